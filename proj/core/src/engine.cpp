// Sequential highest-node-first hashing.

#include <algorithm>
#include <array>
#include <deque>
#include <limits>

#include "treehash/error.hpp"
#include "treehash/exec.hpp"

namespace treehash {

class SequentialHasher::Engine {
 public:
  Engine(const ModeParams& params, std::optional<std::uint64_t> total, bool dry)
      : schedule_(params), total_(total), dry_(dry), il_(leaf_interleave(schedule_)) {
    if (!is_live(params.mode) && !total) {
      throw ModeError("mode " + std::string(mode_name(params.mode)) +
                      " hashes stored content only; the message length is required");
    }
    if (total) n_blocks_ = blocks_for_bytes(*total);
    if (il_) {
      il_nodes_.resize(il_->ways);
      il_bytes_.assign(il_->ways, 0);
      il_group_end_ = il_->kind == InterleaveKind::Groups ? kBlockBytes * il_->ways
                                                          : std::numeric_limits<std::uint64_t>::max();
    }
  }

  void feed(std::span<const std::uint8_t> data) {
    if (finished_) throw UsageError("update after finish");
    if (total_ && data.size() > *total_ - fed_) throw UsageError("more data than the declared length");
    if (il_) {
      feed_interleaved(data);
      return;
    }
    while (!data.empty()) {
      if (levels_.empty()) level(1);
      if (levels_[0].sponge && levels_[0].filled_bytes == capacity_bytes(levels_[0].target)) {
        close_node(1, false);
        drain();
      }
      if (!levels_[0].sponge) open_node(1);
      Level& l1 = levels_[0];
      std::uint64_t room = capacity_bytes(l1.target) - l1.filled_bytes;
      std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(room, data.size()));
      l1.sponge->absorb(data.first(take));
      l1.filled_bytes += take;
      fed_ += take;
      data = data.subspan(take);
    }
  }

  void feed_zeros(std::uint64_t count) {
    static const std::array<std::uint8_t, 1 << 16> zeros{};
    while (count > 0) {
      std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(count, zeros.size()));
      feed(std::span(zeros).first(take));
      count -= take;
    }
  }

  std::uint64_t live() const noexcept { return open_ + buffered_; }

  ExecReport finish(std::size_t out_bits) {
    if (finished_) throw UsageError("finish called twice");
    if (total_ && fed_ != *total_) {
      throw UsageError("message shorter than the declared length (" + std::to_string(fed_) + " of " +
                       std::to_string(*total_) + " bytes)");
    }
    if (il_) {
      finish_interleaved();
    } else {
      if (levels_.empty()) level(1);
      if (levels_[0].index == 0) open_node(1);  // empty message: one empty leaf
      for (std::size_t i = 1;; ++i) {
        if (i >= 2) absorb_pending(i);
        bool above = levels_.size() > i && levels_[i].received;
        if (levels_[i - 1].index == 1 && !above) {
          close_node(i, true);
          break;
        }
        close_node(i, false);
      }
    }
    finished_ = true;
    ExecReport r;
    r.digest = squeeze_extended(*root_, root_cv_, out_bits);
    r.max_live_states = max_live_;
    r.f_calls = f_calls_;
    r.permutation_calls = perms_;
    return r;
  }

 private:
  struct Level {
    std::optional<Sponge> sponge;
    std::uint64_t index = 0;   // nodes opened so far
    std::uint64_t target = 0;  // arity of the open node
    std::uint64_t filled = 0;  // chaining values absorbed into the open node
    std::uint64_t filled_bytes = 0;
    std::deque<ChainingValue> pending;
    std::optional<ArityCursor> cursor;
    std::size_t pad = 0;
    bool received = false;
  };

  static std::uint64_t capacity_bytes(std::uint64_t blocks) {
    if (blocks > std::numeric_limits<std::uint64_t>::max() / kBlockBytes) return std::numeric_limits<std::uint64_t>::max();
    return blocks * kBlockBytes;
  }

  Level& level(std::size_t i) {
    while (levels_.size() < i) {
      std::size_t next = levels_.size() + 1;
      Level l;
      l.cursor.emplace(schedule_.cursor(next, n_blocks_));
      l.pad = level_pad_bits(schedule_, next, n_blocks_);
      levels_.push_back(std::move(l));
    }
    return levels_[i - 1];
  }

  void track() { max_live_ = std::max(max_live_, open_ + buffered_); }

  void open_node(std::size_t i) {
    Level& l = level(i);
    l.sponge.emplace(dry_);
    ++l.index;
    l.target = l.cursor->next();
    if (l.target == 0) throw ModeError("schedule produced arity 0 at level " + std::to_string(i));
    l.filled = 0;
    l.filled_bytes = 0;
    ++open_;
    track();
  }

  NodeKind kind_at(std::size_t i, bool root, std::uint64_t arity) const {
    NodeKind k;
    k.type = i == 1 ? NodeType::Leaf : NodeType::Inner;
    k.is_root = root;
    if (k.type == NodeType::Inner) {
      k.arity = arity;
      if (i == 2 && il_) {
        k.interleave.block_bits = il_->slice_bytes * 8;
        if (il_->kind == InterleaveKind::Groups) k.interleave.group_size = il_->ways;
      }
    }
    return k;
  }

  void finalize_sponge(Sponge& s, const NodeKind& kind, std::size_t payload_bits, std::size_t pad, bool root,
                       std::size_t parent_level) {
    s.absorb(frame_trailer(kind, payload_bits, FrameConfig{}, root ? 0 : pad));
    ChainingValue cv = s.finalize();
    ++f_calls_;
    perms_ += s.permutation_calls();
    --open_;
    if (root) {
      root_.emplace(std::move(s));
      root_cv_ = cv;
    } else {
      push_cv(parent_level, cv);
    }
  }

  void close_node(std::size_t i, bool root) {
    Level& l = level(i);
    std::size_t payload = i == 1 ? static_cast<std::size_t>(l.filled_bytes * 8)
                                 : static_cast<std::size_t>(l.filled * kChainingBits);
    Sponge s = std::move(*l.sponge);
    l.sponge.reset();
    NodeKind kind = kind_at(i, root, l.filled);
    finalize_sponge(s, kind, payload, l.pad, root, i + 1);
  }

  void push_cv(std::size_t i, const ChainingValue& cv) {
    Level& l = level(i);
    l.pending.push_back(cv);
    l.received = true;
    ++buffered_;
    track();
  }

  void absorb_pending(std::size_t i) {
    while (!level(i).pending.empty()) {
      if (levels_[i - 1].sponge && levels_[i - 1].filled == levels_[i - 1].target) close_node(i, false);
      if (!levels_[i - 1].sponge) open_node(i);
      Level& l = levels_[i - 1];
      l.sponge->absorb(l.pending.front().bytes());
      l.pending.pop_front();
      ++l.filled;
      --buffered_;
    }
  }

  // Advance the highest level holding at least d unconsumed chaining values.
  void drain() {
    const std::uint64_t d = schedule_.params().d;
    for (;;) {
      std::size_t best = 0;
      for (std::size_t i = levels_.size(); i >= 2; --i) {
        if (levels_[i - 1].pending.size() >= d) {
          best = i;
          break;
        }
      }
      if (best == 0) return;
      absorb_pending(best);
    }
  }

  // --- interleaved level 1 ---------------------------------------------------

  void feed_interleaved(std::span<const std::uint8_t> data) {
    const std::uint64_t slice = il_->slice_bytes;
    while (!data.empty()) {
      if (fed_ == il_group_end_) {
        close_group();
        ++il_group_;
        il_group_start_ = fed_;
        il_group_end_ = fed_ + kBlockBytes * il_->ways * il_group_;
      }
      std::uint64_t pos = fed_ - il_group_start_;
      std::uint64_t node = (pos / slice) % il_->ways;
      std::uint64_t room = std::min(slice - pos % slice, il_group_end_ - fed_);
      std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(room, data.size()));
      if (!il_nodes_[node]) {
        il_nodes_[node].emplace(dry_);
        ++il_leaves_;
        ++open_;
        track();
      }
      il_nodes_[node]->absorb(data.first(take));
      il_bytes_[node] += take;
      fed_ += take;
      data = data.subspan(take);
    }
  }

  void close_leaf(std::size_t r, bool root) {
    Sponge s = std::move(*il_nodes_[r]);
    il_nodes_[r].reset();
    std::size_t payload = static_cast<std::size_t>(il_bytes_[r] * 8);
    il_bytes_[r] = 0;
    finalize_sponge(s, kind_at(1, root, 0), payload, 0, root, 2);
  }

  void close_group() {
    for (std::size_t r = 0; r < il_nodes_.size(); ++r) {
      if (il_nodes_[r]) close_leaf(r, false);
    }
    drain();
  }

  void finish_interleaved() {
    if (il_leaves_ == 0) {
      il_nodes_[0].emplace(dry_);
      ++il_leaves_;
      ++open_;
      track();
    }
    if (il_leaves_ == 1) {
      close_leaf(0, true);
      return;
    }
    for (std::size_t r = 0; r < il_nodes_.size(); ++r) {
      if (il_nodes_[r]) close_leaf(r, false);
    }
    absorb_pending(2);
    close_node(2, true);
  }

  AritySchedule schedule_;
  std::optional<std::uint64_t> total_;
  std::uint64_t n_blocks_ = 0;
  bool dry_ = false;
  std::optional<LeafInterleave> il_;
  std::vector<Level> levels_;
  std::uint64_t fed_ = 0;
  bool finished_ = false;

  std::vector<std::optional<Sponge>> il_nodes_;
  std::vector<std::uint64_t> il_bytes_;
  std::uint64_t il_group_ = 1;
  std::uint64_t il_group_start_ = 0;
  std::uint64_t il_group_end_ = 0;
  std::uint64_t il_leaves_ = 0;

  std::uint64_t open_ = 0;
  std::uint64_t buffered_ = 0;
  std::uint64_t max_live_ = 0;
  std::uint64_t f_calls_ = 0;
  std::uint64_t perms_ = 0;
  std::optional<Sponge> root_;
  ChainingValue root_cv_;
};

SequentialHasher::SequentialHasher(const ModeParams& params, std::optional<std::uint64_t> total_bytes, bool dry)
    : engine_(std::make_unique<Engine>(params, total_bytes, dry)) {}
SequentialHasher::SequentialHasher(SequentialHasher&&) noexcept = default;
SequentialHasher& SequentialHasher::operator=(SequentialHasher&&) noexcept = default;
SequentialHasher::~SequentialHasher() = default;

void SequentialHasher::update(std::span<const std::uint8_t> data) { engine_->feed(data); }
void SequentialHasher::update_zeros(std::uint64_t count) { engine_->feed_zeros(count); }
std::uint64_t SequentialHasher::live_states() const noexcept { return engine_->live(); }
ExecReport SequentialHasher::finish(std::size_t out_bits) { return engine_->finish(out_bits); }

ExecReport hash_sequential(std::span<const std::uint8_t> message, const ModeParams& params,
                           const ExecOptions& options) {
  SequentialHasher h(params, message.size(), options.dry);
  h.update(message);
  return h.finish(options.out_bits);
}

ExecReport hash_sequential(const ByteSource& source, const ModeParams& params,
                           std::optional<std::uint64_t> total_bytes, const ExecOptions& options) {
  SequentialHasher h(params, total_bytes, options.dry);
  std::vector<std::uint8_t> buf(1 << 16);
  for (;;) {
    std::size_t got = source(buf);
    if (got == 0) break;
    h.update(std::span(buf).first(got));
  }
  return h.finish(options.out_bits);
}

}  // namespace treehash
