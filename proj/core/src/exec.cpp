#include "treehash/exec.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <thread>

#include "treehash/error.hpp"

namespace treehash {

std::vector<std::uint8_t> squeeze_extended(Sponge& root, const ChainingValue& cv, std::size_t out_bits) {
  if (out_bits == 0) throw std::invalid_argument("output length must be at least one bit");
  std::size_t bytes = (out_bits + 7) / 8;
  std::vector<std::uint8_t> out(cv.bytes().begin(), cv.bytes().end());
  if (bytes <= out.size()) {
    out.resize(bytes);
  } else {
    std::size_t have = out.size();
    out.resize(bytes);
    root.squeeze(std::span(out).subspan(have));
  }
  if (out_bits % 8 != 0) out.back() &= static_cast<std::uint8_t>((1u << (out_bits % 8)) - 1);
  return out;
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

ByteSource span_source(std::span<const std::uint8_t> message) {
  auto offset = std::make_shared<std::size_t>(0);
  return [message, offset](std::span<std::uint8_t> out) {
    std::size_t take = std::min(out.size(), message.size() - *offset);
    std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(*offset), take, out.begin());
    *offset += take;
    return take;
  };
}

ByteSource stream_source(std::istream& in) {
  return [&in](std::span<std::uint8_t> out) -> std::size_t {
    if (!in) return 0;
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    return static_cast<std::size_t>(in.gcount());
  };
}

// ---------------------------------------------------------------------------
// Topology-driven evaluation

namespace {

struct Counters {
  std::uint64_t f_calls = 0;
  std::uint64_t perms = 0;
  std::uint64_t live = 0;
  std::uint64_t max_live = 0;
};

struct NodeResult {
  Sponge sponge;
  ChainingValue cv;
};

NodeResult finish_node(Sponge s, const Topology& topo, std::size_t level, std::uint64_t index,
                       std::size_t payload_bits, Counters& c) {
  NodeKind kind = topo.node_kind(level, index);
  s.absorb(frame_trailer(kind, payload_bits, FrameConfig{}, kind.is_root ? 0 : topo.pad_bits(level)));
  ChainingValue cv = s.finalize();
  ++c.f_calls;
  c.perms += s.permutation_calls();
  return {std::move(s), cv};
}

NodeResult eval_node(const Topology& topo, std::span<const std::uint8_t> msg, std::size_t level,
                     std::uint64_t index, bool dry, Counters& c) {
  Sponge s(dry);
  ++c.live;
  c.max_live = std::max(c.max_live, c.live);
  std::size_t payload = 0;
  if (level == 1) {
    for (const Segment& seg : topo.leaf_segments(index)) {
      s.absorb(msg.subspan(static_cast<std::size_t>(seg.offset), static_cast<std::size_t>(seg.length)));
      payload += static_cast<std::size_t>(seg.length * 8);
    }
  } else {
    auto [first, last] = topo.children(level, index);
    for (std::uint64_t child = first; child <= last; ++child) {
      NodeResult r = eval_node(topo, msg, level - 1, child, dry, c);
      s.absorb(r.cv.bytes());
    }
    payload = static_cast<std::size_t>((last - first + 1) * kChainingBits);
  }
  NodeResult r = finish_node(std::move(s), topo, level, index, payload, c);
  --c.live;
  return r;
}

// Evaluates levels above `level` sequentially from that level's chaining values.
NodeResult finish_upper(const Topology& topo, std::size_t level, std::vector<ChainingValue> cvs, bool dry,
                        Counters& c) {
  for (std::size_t i = level + 1; i <= topo.height(); ++i) {
    std::vector<ChainingValue> next;
    next.reserve(static_cast<std::size_t>(topo.level_size(i)));
    for (std::uint64_t j = 1; j <= topo.level_size(i); ++j) {
      auto [first, last] = topo.children(i, j);
      Sponge s(dry);
      for (std::uint64_t child = first; child <= last; ++child) s.absorb(cvs[child - 1].bytes());
      NodeResult r = finish_node(std::move(s), topo, i, j, static_cast<std::size_t>((last - first + 1) * kChainingBits), c);
      if (i == topo.height()) return r;
      next.push_back(r.cv);
    }
    cvs = std::move(next);
  }
  throw std::logic_error("topology without a root");
}

ExecReport make_report(NodeResult& root, const Counters& c, std::size_t out_bits) {
  ExecReport r;
  r.digest = squeeze_extended(root.sponge, root.cv, out_bits);
  r.max_live_states = c.max_live;
  r.f_calls = c.f_calls;
  r.permutation_calls = c.perms;
  return r;
}

}  // namespace

ExecReport hash_topology(const Topology& topology, std::span<const std::uint8_t> message,
                         const ExecOptions& options) {
  if (message.size() != topology.message_bytes()) throw UsageError("message length differs from the topology");
  Counters c;
  NodeResult root = eval_node(topology, message, topology.height(), 1, options.dry, c);
  return make_report(root, c, options.out_bits);
}

ExecReport hash_parallel_stored(std::span<const std::uint8_t> message, const ModeParams& params,
                                std::size_t workers, const ExecOptions& options) {
  AritySchedule schedule(params);
  Topology topo = build_topology_bytes(schedule, message.size());
  if (workers <= 1 || topo.height() == 1) return hash_topology(topo, message, options);

  // highest non-root level with at least p nodes, else the base level
  std::size_t split = 1;
  for (std::size_t i = topo.height() - 1; i >= 1; --i) {
    if (topo.level_size(i) >= workers) {
      split = i;
      break;
    }
  }
  const std::uint64_t q = topo.level_size(split);
  const std::uint64_t per = ceil_div(q, workers);
  const std::uint64_t used = ceil_div(q, per);

  std::vector<ChainingValue> cvs(static_cast<std::size_t>(q));
  std::vector<Counters> counters(static_cast<std::size_t>(used));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < used; ++w) {
      pool.emplace_back([&, w] {
        try {
          std::uint64_t first = w * per + 1;
          std::uint64_t last = std::min(q, (w + 1) * per);
          for (std::uint64_t j = first; j <= last; ++j) {
            cvs[j - 1] = eval_node(topo, message, split, j, options.dry, counters[w]).cv;
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Counters total;
  for (const Counters& c : counters) {
    total.f_calls += c.f_calls;
    total.perms += c.perms;
    total.max_live += c.max_live;
  }
  total.max_live += q;
  NodeResult root = finish_upper(topo, split, std::move(cvs), options.dry, total);
  return make_report(root, total, options.out_bits);
}

// ---------------------------------------------------------------------------
// Buffered level-wise streaming

bool supports_parallel_stream(const ModeParams& params) {
  switch (params.mode) {
    case Mode::M3:
    case Mode::M5L:
    case Mode::M6L:
    case Mode::WC:
    case Mode::B1:
    case Mode::B2:
    case Mode::B3:
      return true;
    default:
      return false;
  }
}

namespace {

using Item = std::vector<std::uint8_t>;

enum class Finality { NonRoot, Root, Unknown };

class StreamPipeline {
 public:
  StreamPipeline(const ModeParams& params, std::size_t workers, std::size_t k, bool dry)
      : schedule_(params), p_(std::max<std::size_t>(1, workers)), k_(std::max<std::size_t>(1, k)), dry_(dry) {}

  ExecReport run(const ByteSource& source, std::size_t out_bits) {
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < p_; ++w) pool.emplace_back([this] { worker(); });
      produce(source);
      std::unique_lock lock(m_);
      cv_.wait(lock, [this] { return finished_; });
    }
    if (error_) std::rethrow_exception(error_);
    ExecReport r;
    r.digest = squeeze_extended(*root_, root_cv_, out_bits);
    r.f_calls = f_calls_;
    r.permutation_calls = perms_;
    r.max_live_states = max_live_;
    r.max_buffer_occupancy = max_occupancy_;
    r.buffer_bound_violations = violations_;
    return r;
  }

 private:
  struct LevelState {
    explicit LevelState(ArityCursor c) : cursor(std::move(c)) {}
    std::deque<Item> items;
    std::map<std::uint64_t, Item> early;  // finished chaining values waiting for a lower index
    std::uint64_t arrived = 0;
    std::uint64_t reserved = 0;  // in-flight tasks that will deliver here
    std::uint64_t next_node = 1;
    std::uint64_t next_arity = 0;
    std::uint64_t max_arity = 0;
    std::uint64_t dispatched = 0;
    std::uint64_t done = 0;
    bool input_complete = false;
    bool complete_signalled = false;
    ArityCursor cursor;
    std::optional<Sponge> held;  // node 1 absorbed, root status not yet known
    std::uint64_t held_arity = 0;
    std::size_t held_payload = 0;
  };

  struct Task {
    std::size_t level = 0;
    std::uint64_t index = 0;
    std::vector<Item> items;
    std::uint64_t arity = 0;
    Finality finality = Finality::Unknown;
    std::optional<Sponge> sponge;  // set for finalize-only tasks
    std::size_t payload_bits = 0;
  };

  LevelState& level(std::size_t i) {
    while (levels_.size() < i) {
      std::size_t next = levels_.size() + 1;
      auto l = std::make_unique<LevelState>(schedule_.cursor(next, 0));
      l->next_arity = l->cursor.next();
      if (l->next_arity == kUnbounded) throw ModeError("streaming strategy needs bounded arities");
      l->max_arity = l->next_arity;
      levels_.push_back(std::move(l));
    }
    return *levels_[i - 1];
  }

  std::uint64_t capacity(const LevelState& l) const {
    return static_cast<std::uint64_t>(p_ * k_) * std::max(l.max_arity, l.next_arity);
  }
  static std::uint64_t occupancy(const LevelState& l) { return l.items.size() + l.early.size() + l.reserved; }

  void note_occupancy(const LevelState& l) {
    std::uint64_t occ = occupancy(l);
    max_occupancy_ = std::max(max_occupancy_, occ);
    if (occ > capacity(l)) ++violations_;
    std::uint64_t live = in_flight_;
    for (const auto& lv : levels_) {
      live += lv->early.size() + (lv->held ? 1 : 0);
      if (lv.get() != levels_.front().get()) live += lv->items.size();
    }
    max_live_ = std::max(max_live_, live);
  }

  void fail(std::exception_ptr e) {
    std::lock_guard lock(m_);
    if (!error_) error_ = e;
    finished_ = true;
    cv_.notify_all();
  }

  void produce(const ByteSource& source) {
    try {
      Item block(kBlockBytes);
      std::uint64_t total = 0;
      for (;;) {
        std::size_t got = 0;
        while (got < block.size()) {
          std::size_t n = source(std::span(block).subspan(got));
          if (n == 0) break;
          got += n;
        }
        if (got == 0) break;
        total += got;
        std::unique_lock lock(m_);
        LevelState& l1 = level(1);
        cv_.wait(lock, [&] { return finished_ || occupancy(l1) < capacity(l1); });
        if (finished_) return;
        l1.items.emplace_back(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(got));
        ++l1.arrived;
        note_occupancy(l1);
        cv_.notify_all();
        if (got < block.size()) break;
      }
      std::lock_guard lock(m_);
      if (total == 0) {
        // the empty message is a single empty leaf
        Sponge s(dry_);
        NodeKind kind;
        kind.is_root = true;
        s.absorb(frame_trailer(kind, 0));
        root_cv_ = s.finalize();
        ++f_calls_;
        perms_ += s.permutation_calls();
        root_.emplace(std::move(s));
        finished_ = true;
      } else {
        level(1).input_complete = true;
      }
      cv_.notify_all();
    } catch (...) {
      fail(std::current_exception());
    }
  }

  void propagate_completion() {
    for (std::size_t i = 1; i <= levels_.size(); ++i) {
      LevelState& l = *levels_[i - 1];
      if (l.complete_signalled || !l.input_complete) continue;
      if (!l.items.empty() || l.held || l.dispatched != l.done) continue;
      l.complete_signalled = true;
      if (i < levels_.size()) levels_[i]->input_complete = true;
    }
  }

  std::optional<Task> pick_task() {
    propagate_completion();
    for (std::size_t i = levels_.size(); i >= 1; --i) {
      LevelState& l = *levels_[i - 1];
      if (l.held) {
        Finality f = Finality::Unknown;
        if (l.arrived > l.held_arity) {
          f = Finality::NonRoot;
        } else if (l.input_complete) {
          f = Finality::Root;
          --levels_[i]->reserved;
        }
        if (f != Finality::Unknown) {
          Task t;
          t.level = i;
          t.index = 1;
          t.arity = l.held_arity;
          t.finality = f;
          t.sponge = std::move(l.held);
          t.payload_bits = l.held_payload;
          l.held.reset();
          ++in_flight_;
          return t;
        }
      }
      std::uint64_t take = 0;
      if (l.items.size() >= l.next_arity) {
        take = l.next_arity;
      } else if (l.input_complete && !l.items.empty()) {
        take = l.items.size();
      } else {
        continue;
      }
      const std::uint64_t j = l.next_node;
      Finality f = Finality::NonRoot;
      if (j == 1) {
        if (l.arrived > take) {
          f = Finality::NonRoot;
        } else if (l.input_complete) {
          f = Finality::Root;
        } else {
          f = Finality::Unknown;
        }
      }
      if (f != Finality::Root) {
        LevelState& up = level(i + 1);
        if (occupancy(up) >= capacity(up)) continue;
        ++up.reserved;
        note_occupancy(up);
      }
      LevelState& lv = *levels_[i - 1];  // level() may have grown the vector
      Task t;
      t.level = i;
      t.index = j;
      t.arity = take;
      t.finality = f;
      for (std::uint64_t n = 0; n < take; ++n) {
        t.items.push_back(std::move(lv.items.front()));
        lv.items.pop_front();
      }
      ++lv.next_node;
      lv.next_arity = lv.cursor.next();
      lv.max_arity = std::max(lv.max_arity, take);
      ++lv.dispatched;
      ++in_flight_;
      return t;
    }
    return std::nullopt;
  }

  NodeKind kind_of(const Task& t) const {
    NodeKind k;
    k.type = t.level == 1 ? NodeType::Leaf : NodeType::Inner;
    k.is_root = t.finality == Finality::Root;
    if (k.type == NodeType::Inner) k.arity = t.arity;
    return k;
  }

  void worker() {
    try {
      std::unique_lock lock(m_);
      for (;;) {
        if (finished_) return;
        std::optional<Task> task = pick_task();
        if (!task) {
          cv_.wait(lock);
          continue;
        }
        lock.unlock();
        Task& t = *task;
        std::size_t pad = level_pad_bits(schedule_, t.level, 0);
        if (!t.sponge) {
          t.sponge.emplace(dry_);
          for (const Item& item : t.items) {
            t.sponge->absorb(item);
            t.payload_bits += item.size() * 8;
          }
        }
        std::optional<ChainingValue> cv;
        std::uint64_t perms = 0;
        if (t.finality != Finality::Unknown) {
          t.sponge->absorb(frame_trailer(kind_of(t), t.payload_bits, FrameConfig{},
                                         t.finality == Finality::Root ? 0 : pad));
          cv = t.sponge->finalize();
          perms = t.sponge->permutation_calls();
        }
        lock.lock();
        --in_flight_;
        LevelState& l = *levels_[t.level - 1];
        if (!cv) {
          l.held = std::move(t.sponge);
          l.held_arity = t.arity;
          l.held_payload = t.payload_bits;
        } else {
          ++f_calls_;
          perms_ += perms;
          ++l.done;
          if (t.finality == Finality::Root) {
            root_ = std::move(t.sponge);
            root_cv_ = *cv;
            finished_ = true;
          } else {
            LevelState& up = *levels_[t.level];
            --up.reserved;
            Item bytes(cv->bytes().begin(), cv->bytes().end());
            up.early.emplace(t.index, std::move(bytes));
            while (!up.early.empty() && up.early.begin()->first == up.arrived + 1) {
              up.items.push_back(std::move(up.early.begin()->second));
              up.early.erase(up.early.begin());
              ++up.arrived;
            }
            note_occupancy(up);
          }
        }
        note_occupancy(l);
        cv_.notify_all();
      }
    } catch (...) {
      fail(std::current_exception());
    }
  }

  AritySchedule schedule_;
  std::size_t p_;
  std::size_t k_;
  bool dry_;

  std::mutex m_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<LevelState>> levels_;
  bool finished_ = false;
  std::exception_ptr error_;
  std::optional<Sponge> root_;
  ChainingValue root_cv_;
  std::uint64_t in_flight_ = 0;
  std::uint64_t f_calls_ = 0;
  std::uint64_t perms_ = 0;
  std::uint64_t max_live_ = 0;
  std::uint64_t max_occupancy_ = 0;
  std::uint64_t violations_ = 0;
};

}  // namespace

ExecReport hash_parallel_stream(const ByteSource& source, const ModeParams& params, std::size_t workers,
                                std::size_t buffer_k, const ExecOptions& options) {
  params.validate();
  if (!supports_parallel_stream(params)) {
    throw ModeError("the streaming strategy needs a live mode with bounded arities (3, 5L, 6L, WC, B1-B3); got " +
                    std::string(mode_name(params.mode)));
  }
  StreamPipeline pipeline(params, workers, buffer_k, options.dry);
  return pipeline.run(source, options.out_bits);
}

ExecReport hash_parallel_stream(std::span<const std::uint8_t> message, const ModeParams& params,
                                std::size_t workers, std::size_t buffer_k, const ExecOptions& options) {
  return hash_parallel_stream(span_source(message), params, workers, buffer_k, options);
}

}  // namespace treehash
