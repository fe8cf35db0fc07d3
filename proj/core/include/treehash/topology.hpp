#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treehash/coding.hpp"
#include "treehash/schedule.hpp"

namespace treehash {

enum class InterleaveKind { Lanes, Groups };

/// Round-robin distribution of the message over the level-1 nodes.
/// Lanes: Mode 2L, `ways` = q. Groups: 4L SIMD variant, `ways` = n_I.
struct LeafInterleave {
  InterleaveKind kind = InterleaveKind::Lanes;
  std::uint64_t slice_bytes = 64;
  std::uint64_t ways = 1;

  friend bool operator==(const LeafInterleave&, const LeafInterleave&) = default;
};

/// A contiguous run of message bytes.
struct Segment {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

/// The arity structure of a concrete tree. Levels and node indices are 1-based.
class Topology {
 public:
  Topology() = default;
  Topology(ModeParams params, std::uint64_t message_bytes, std::vector<std::vector<std::uint64_t>> levels,
           std::vector<std::size_t> pad_bits, std::optional<LeafInterleave> interleave);

  const ModeParams& params() const noexcept { return params_; }
  std::uint64_t message_bytes() const noexcept { return message_bytes_; }
  std::uint64_t n_blocks() const noexcept;
  std::size_t height() const noexcept { return levels_.size(); }
  std::uint64_t level_size(std::size_t level) const { return levels_.at(level - 1).size(); }
  std::vector<std::uint64_t> level_sizes() const;
  const std::vector<std::vector<std::uint64_t>>& levels() const noexcept { return levels_; }
  std::uint64_t arity(std::size_t level, std::uint64_t index) const { return levels_.at(level - 1).at(index - 1); }
  std::uint64_t node_count() const noexcept;
  const std::optional<LeafInterleave>& interleave() const noexcept { return interleave_; }

  /// Children of inner node (level, index) as a 1-based inclusive range of level-1 indices.
  std::pair<std::uint64_t, std::uint64_t> children(std::size_t level, std::uint64_t index) const;
  /// 1-based index of the parent of (level, index) in level+1.
  std::uint64_t parent(std::size_t level, std::uint64_t index) const;

  /// Message bytes carried by leaf `index`, in payload order.
  std::vector<Segment> leaf_segments(std::uint64_t index) const;
  std::uint64_t leaf_bytes(std::uint64_t index) const;

  NodeKind node_kind(std::size_t level, std::uint64_t index) const;
  std::size_t payload_bits(std::size_t level, std::uint64_t index) const;
  /// Length every non-root f-input of `level` is zero-extended to (0: none).
  std::size_t pad_bits(std::size_t level) const { return pad_bits_.at(level - 1); }
  std::size_t framed_bits(std::size_t level, std::uint64_t index) const;

  /// One line per node: "level index arity payload [root]".
  std::string to_text() const;

  bool same_shape(const Topology& other) const { return levels_ == other.levels_; }

 private:
  ModeParams params_;
  std::uint64_t message_bytes_ = 0;
  std::vector<std::vector<std::uint64_t>> levels_;
  std::vector<std::size_t> pad_bits_;
  std::optional<LeafInterleave> interleave_;
  // starts_[i][j]: 0-based index of the first item of node j+1 at level i+1
  std::vector<std::vector<std::uint64_t>> starts_;
};

/// Blocks of kBlockBytes bytes needed for a message (last block may be short).
std::uint64_t blocks_for_bytes(std::uint64_t bytes);

/// Interleaving layout of a schedule's level 1, if it has one.
std::optional<LeafInterleave> leaf_interleave(const AritySchedule& schedule);

/// Framed length every non-root node of `level` is padded to, 0 when the level
/// has no fixed arity.
std::size_t level_pad_bits(const AritySchedule& schedule, std::size_t level, std::uint64_t n_blocks);

/// Whole-message construction for a message of n_blocks full blocks.
Topology build_topology(const AritySchedule& schedule, std::uint64_t n_blocks);
/// Same, for a message of `message_bytes` bytes.
Topology build_topology_bytes(const AritySchedule& schedule, std::uint64_t message_bytes);

/// Incremental topology construction for length-oblivious modes.
class StreamBuilder {
 public:
  /// Throws ModeError for stored-only modes.
  explicit StreamBuilder(const ModeParams& params);

  void push_bytes(std::uint64_t count);
  void push_block() { push_bytes(kBlockBytesForStream); }
  std::uint64_t bytes_seen() const noexcept { return bytes_; }
  std::uint64_t blocks_seen() const noexcept { return blocks_; }

  /// Topology of everything pushed so far; the builder stays usable.
  Topology finalize() const;

 private:
  static constexpr std::uint64_t kBlockBytesForStream = 64;

  struct Frontier {
    std::vector<std::uint64_t> closed;
    std::uint64_t target = 0;
    std::uint64_t filled = 0;
    bool started = false;
    ArityCursor cursor;
  };
  static void add_item(std::vector<Frontier>& levels, const AritySchedule& schedule, std::size_t level);

  AritySchedule schedule_;
  std::vector<Frontier> levels_;
  std::uint64_t bytes_ = 0;
  std::uint64_t blocks_ = 0;
};

}  // namespace treehash
