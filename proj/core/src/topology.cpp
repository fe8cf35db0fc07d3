#include "treehash/topology.hpp"

#include <algorithm>
#include <sstream>

#include "treehash/error.hpp"
#include "treehash/interleave.hpp"
#include "treehash/keccak.hpp"

namespace treehash {

namespace {

struct GroupShape {
  std::uint64_t start = 0;   // first byte
  std::uint64_t bytes = 0;   // bytes present in this group
  std::uint64_t nodes = 0;   // nodes actually used
};

// Walks the 4L SIMD groups covering a message of `total` bytes.
template <typename Fn>
void for_each_group(const LeafInterleave& il, std::uint64_t total, Fn&& fn) {
  for (std::uint64_t g = 1;; ++g) {
    std::uint64_t start = simd_group_start_bytes(il.ways, g);
    if (start >= total) break;
    std::uint64_t bytes = std::min(kBlockBytes * il.ways * g, total - start);
    std::uint64_t slices = ceil_div(bytes, il.slice_bytes);
    if (!fn(g, GroupShape{start, bytes, std::min(il.ways, slices)})) break;
  }
}

// Segments of node r0 (0-based) among `ways` nodes sharing [start, start+bytes).
std::vector<Segment> round_robin_segments(std::uint64_t start, std::uint64_t bytes, std::uint64_t slice,
                                          std::uint64_t ways, std::uint64_t r0) {
  std::vector<Segment> out;
  std::uint64_t slices = ceil_div(bytes, slice);
  for (std::uint64_t k = r0; k < slices; k += ways) {
    std::uint64_t off = k * slice;
    out.push_back({start + off, std::min(slice, bytes - off)});
  }
  return out;
}

std::uint64_t round_robin_bytes(std::uint64_t bytes, std::uint64_t slice, std::uint64_t ways, std::uint64_t r0) {
  std::uint64_t slices = ceil_div(bytes, slice);
  if (r0 >= slices) return 0;
  std::uint64_t count = (slices - r0 + ways - 1) / ways;
  std::uint64_t total = count * slice;
  if ((slices - 1) % ways == r0) total -= slices * slice - bytes;
  return total;
}

std::vector<std::uint64_t> interleaved_leaf_bytes(const LeafInterleave& il, std::uint64_t total) {
  std::vector<std::uint64_t> out;
  if (il.kind == InterleaveKind::Lanes) {
    std::uint64_t lanes = std::min(il.ways, ceil_div(total, il.slice_bytes));
    for (std::uint64_t r = 0; r < lanes; ++r) out.push_back(round_robin_bytes(total, il.slice_bytes, il.ways, r));
  } else {
    for_each_group(il, total, [&](std::uint64_t, const GroupShape& gs) {
      for (std::uint64_t r = 0; r < gs.nodes; ++r) {
        out.push_back(round_robin_bytes(gs.bytes, il.slice_bytes, il.ways, r));
      }
      return true;
    });
  }
  return out;
}

}  // namespace

std::uint64_t blocks_for_bytes(std::uint64_t bytes) { return ceil_div(bytes, kBlockBytes); }

Topology::Topology(ModeParams params, std::uint64_t message_bytes, std::vector<std::vector<std::uint64_t>> levels,
                   std::vector<std::size_t> pad_bits, std::optional<LeafInterleave> interleave)
    : params_(std::move(params)),
      message_bytes_(message_bytes),
      levels_(std::move(levels)),
      pad_bits_(std::move(pad_bits)),
      interleave_(interleave) {
  pad_bits_.resize(levels_.size(), 0);
  starts_.reserve(levels_.size());
  for (const auto& level : levels_) {
    std::vector<std::uint64_t> s(level.size() + 1, 0);
    for (std::size_t j = 0; j < level.size(); ++j) s[j + 1] = s[j] + level[j];
    starts_.push_back(std::move(s));
  }
}

std::uint64_t Topology::n_blocks() const noexcept { return blocks_for_bytes(message_bytes_); }

std::vector<std::uint64_t> Topology::level_sizes() const {
  std::vector<std::uint64_t> out;
  for (const auto& l : levels_) out.push_back(l.size());
  return out;
}

std::uint64_t Topology::node_count() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

std::pair<std::uint64_t, std::uint64_t> Topology::children(std::size_t level, std::uint64_t index) const {
  if (level < 2 || level > height()) throw std::out_of_range("children of a non-inner level");
  const auto& s = starts_.at(level - 1);
  if (index < 1 || index >= s.size()) throw std::out_of_range("node index out of range");
  return {s[index - 1] + 1, s[index]};
}

std::uint64_t Topology::parent(std::size_t level, std::uint64_t index) const {
  if (level >= height()) throw std::out_of_range("the root has no parent");
  const auto& s = starts_.at(level);
  auto it = std::upper_bound(s.begin(), s.end(), index - 1);
  return static_cast<std::uint64_t>(it - s.begin());
}

std::vector<Segment> Topology::leaf_segments(std::uint64_t index) const {
  if (index < 1 || index > level_size(1)) throw std::out_of_range("leaf index out of range");
  if (!interleave_) {
    std::uint64_t first = starts_[0][index - 1] * kBlockBytes;
    std::uint64_t last = std::min(starts_[0][index] * kBlockBytes, message_bytes_);
    if (last <= first) return {};
    return {Segment{first, last - first}};
  }
  const LeafInterleave& il = *interleave_;
  if (il.kind == InterleaveKind::Lanes) {
    return round_robin_segments(0, message_bytes_, il.slice_bytes, il.ways, index - 1);
  }
  std::vector<Segment> out;
  std::uint64_t remaining = index;
  for_each_group(il, message_bytes_, [&](std::uint64_t, const GroupShape& gs) {
    if (remaining > gs.nodes) {
      remaining -= gs.nodes;
      return true;
    }
    out = round_robin_segments(gs.start, gs.bytes, il.slice_bytes, il.ways, remaining - 1);
    return false;
  });
  return out;
}

std::uint64_t Topology::leaf_bytes(std::uint64_t index) const {
  std::uint64_t total = 0;
  for (const auto& s : leaf_segments(index)) total += s.length;
  return total;
}

NodeKind Topology::node_kind(std::size_t level, std::uint64_t index) const {
  NodeKind k;
  k.type = level == 1 ? NodeType::Leaf : NodeType::Inner;
  k.is_root = level == height();
  if (k.type == NodeType::Inner) {
    k.arity = arity(level, index);
    if (level == 2 && interleave_) {
      k.interleave.block_bits = interleave_->slice_bytes * 8;
      if (interleave_->kind == InterleaveKind::Groups) k.interleave.group_size = interleave_->ways;
    }
  }
  return k;
}

std::size_t Topology::payload_bits(std::size_t level, std::uint64_t index) const {
  if (level == 1) return static_cast<std::size_t>(leaf_bytes(index) * 8);
  return static_cast<std::size_t>(arity(level, index) * kChainingBits);
}

std::size_t Topology::framed_bits(std::size_t level, std::uint64_t index) const {
  return framed_length(node_kind(level, index), payload_bits(level, index), FrameConfig{}, pad_bits(level));
}

std::string Topology::to_text() const {
  std::ostringstream os;
  os << "# mode=" << mode_name(params_.mode) << " bytes=" << message_bytes_ << " blocks=" << n_blocks()
     << " height=" << height() << " nodes=" << node_count() << "\n";
  os << "# level index arity payload\n";
  for (std::size_t i = 1; i <= height(); ++i) {
    for (std::uint64_t j = 1; j <= level_size(i); ++j) {
      os << i << ' ' << j << ' ' << arity(i, j) << ' ';
      if (i > 1) {
        auto [a, b] = children(i, j);
        os << "nodes:" << a << '-' << b;
      } else if (interleave_ && interleave_->kind == InterleaveKind::Lanes) {
        os << "lane:" << j;
      } else if (interleave_) {
        std::uint64_t remaining = j;
        for_each_group(*interleave_, message_bytes_, [&](std::uint64_t g, const GroupShape& gs) {
          if (remaining > gs.nodes) {
            remaining -= gs.nodes;
            return true;
          }
          os << "group:" << g << " node:" << remaining;
          return false;
        });
      } else if (arity(1, j) == 0) {
        os << "blocks:none";
      } else {
        os << "blocks:" << starts_[0][j - 1] + 1 << '-' << starts_[0][j];
      }
      if (i == height()) os << " root";
      os << '\n';
    }
  }
  return os.str();
}

std::optional<LeafInterleave> leaf_interleave(const AritySchedule& schedule) {
  if (!schedule.interleaved()) return std::nullopt;
  const ModeParams& p = schedule.params();
  LeafInterleave il;
  if (p.mode == Mode::M2L) {
    il.kind = InterleaveKind::Lanes;
    il.slice_bytes = p.interleave_bits.value_or(512) / 8;
    il.ways = p.q;
  } else {
    il.kind = InterleaveKind::Groups;
    il.slice_bytes = p.interleave_bits.value_or(64) / 8;
    il.ways = *p.group_size;
  }
  return il;
}

std::size_t level_pad_bits(const AritySchedule& schedule, std::size_t level, std::uint64_t n_blocks) {
  if (schedule.interleaved() && level <= 2) return 0;
  auto u = schedule.uniform_arity(level, n_blocks);
  if (!u) return 0;
  NodeKind kind;
  kind.type = level == 1 ? NodeType::Leaf : NodeType::Inner;
  kind.arity = kind.type == NodeType::Inner ? *u : 0;
  return framed_length(kind, static_cast<std::size_t>(*u * kChainingBits));
}

Topology build_topology(const AritySchedule& schedule, std::uint64_t n_blocks) {
  return build_topology_bytes(schedule, n_blocks * kBlockBytes);
}

Topology build_topology_bytes(const AritySchedule& schedule, std::uint64_t message_bytes) {
  const std::uint64_t n = blocks_for_bytes(message_bytes);
  std::vector<std::vector<std::uint64_t>> levels;
  auto il = leaf_interleave(schedule);
  if (n == 0) {
    levels.push_back({0});
  } else if (il) {
    std::vector<std::uint64_t> leaves;
    for (std::uint64_t b : interleaved_leaf_bytes(*il, message_bytes)) leaves.push_back(blocks_for_bytes(b));
    std::uint64_t count = leaves.size();
    levels.push_back(std::move(leaves));
    if (count > 1) levels.push_back({count});
  } else {
    std::uint64_t below = n;
    int stalled = 0;
    for (std::size_t level = 1;; ++level) {
      ArityCursor cursor = schedule.cursor(level, n);
      std::vector<std::uint64_t> arities;
      std::uint64_t sum = 0;
      while (sum < below) {
        std::uint64_t a = cursor.next();
        if (a == 0) throw ModeError("schedule produced arity 0 at level " + std::to_string(level));
        std::uint64_t take = std::min(a, below - sum);
        arities.push_back(take);
        sum += take;
      }
      std::uint64_t count = arities.size();
      levels.push_back(std::move(arities));
      if (count == 1) break;
      if (level > 1 && count == below && ++stalled > 64) {
        throw ModeError("schedule does not converge to a single root");
      }
      below = count;
    }
  }
  std::vector<std::size_t> pads;
  for (std::size_t i = 1; i <= levels.size(); ++i) pads.push_back(level_pad_bits(schedule, i, n));
  return Topology(schedule.params(), message_bytes, std::move(levels), std::move(pads), il);
}

// ---------------------------------------------------------------------------

StreamBuilder::StreamBuilder(const ModeParams& params) : schedule_(params) {
  if (!is_live(params.mode)) {
    throw ModeError("mode " + std::string(mode_name(params.mode)) + " needs the message length; it cannot stream");
  }
}

void StreamBuilder::add_item(std::vector<Frontier>& levels, const AritySchedule& schedule, std::size_t level) {
  if (levels.size() < level) levels.push_back(Frontier{{}, 0, 0, false, schedule.cursor(level, 0)});
  Frontier& f = levels[level - 1];
  if (f.started && f.filled == f.target) {
    f.closed.push_back(f.filled);
    f.filled = 0;
    f.started = false;
    add_item(levels, schedule, level + 1);
  }
  Frontier& g = levels[level - 1];
  if (!g.started) {
    g.started = true;
    g.target = g.cursor.next();
    if (g.target == 0) throw ModeError("schedule produced arity 0 at level " + std::to_string(level));
  }
  ++g.filled;
}

void StreamBuilder::push_bytes(std::uint64_t count) {
  bytes_ += count;
  std::uint64_t blocks = blocks_for_bytes(bytes_);
  if (schedule_.interleaved()) {
    blocks_ = blocks;
    return;
  }
  while (blocks_ < blocks) {
    add_item(levels_, schedule_, 1);
    ++blocks_;
  }
}

Topology StreamBuilder::finalize() const {
  if (schedule_.interleaved() || blocks_ == 0) return build_topology_bytes(schedule_, bytes_);
  std::vector<Frontier> lv = levels_;
  std::size_t top = 0;
  for (std::size_t i = 1;; ++i) {
    Frontier& f = lv[i - 1];
    bool above_started = lv.size() > i && (lv[i].started || !lv[i].closed.empty());
    if (f.closed.empty() && !above_started) {
      f.closed.push_back(f.filled);
      top = i;
      break;
    }
    f.closed.push_back(f.filled);
    f.filled = 0;
    f.started = false;
    add_item(lv, schedule_, i + 1);
  }
  std::vector<std::vector<std::uint64_t>> levels;
  std::vector<std::size_t> pads;
  for (std::size_t i = 1; i <= top; ++i) {
    levels.push_back(std::move(lv[i - 1].closed));
    pads.push_back(level_pad_bits(schedule_, i, blocks_));
  }
  return Topology(schedule_.params(), bytes_, std::move(levels), std::move(pads), std::nullopt);
}

}  // namespace treehash
