#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "treehash/keccak.hpp"
#include "treehash/schedule.hpp"
#include "treehash/topology.hpp"

namespace treehash {

struct ExecOptions {
  /// Digest length in bits; anything past 512 continues squeezing the root sponge.
  std::size_t out_bits = kChainingBits;
  /// Dry runs skip Keccak but keep the traversal and all counters.
  bool dry = false;
};

struct ExecReport {
  std::vector<std::uint8_t> digest;
  /// Peak of open sponges plus buffered chaining values.
  std::uint64_t max_live_states = 0;
  std::uint64_t f_calls = 0;
  std::uint64_t permutation_calls = 0;
  /// Streaming strategy only: peak per-level buffer fill and its bound p*a*k.
  std::uint64_t max_buffer_occupancy = 0;
  std::uint64_t buffer_bound_violations = 0;
};

/// Reads up to out.size() bytes, returns how many were read (0 at the end).
using ByteSource = std::function<std::size_t(std::span<std::uint8_t>)>;

ByteSource span_source(std::span<const std::uint8_t> message);
ByteSource stream_source(std::istream& in);

/// Highest-node-first sequential hashing with threshold d (params.d). Data
/// may be fed in arbitrary pieces. Stored-only modes need the total length
/// up front and throw ModeError without it.
class SequentialHasher {
 public:
  SequentialHasher(const ModeParams& params, std::optional<std::uint64_t> total_bytes = std::nullopt,
                   bool dry = false);
  SequentialHasher(SequentialHasher&&) noexcept;
  SequentialHasher& operator=(SequentialHasher&&) noexcept;
  ~SequentialHasher();

  void update(std::span<const std::uint8_t> data);
  /// Feeds `count` zero bytes; cheap in dry mode.
  void update_zeros(std::uint64_t count);
  std::uint64_t live_states() const noexcept;
  ExecReport finish(std::size_t out_bits = kChainingBits);

 private:
  class Engine;
  std::unique_ptr<Engine> engine_;
};

ExecReport hash_sequential(std::span<const std::uint8_t> message, const ModeParams& params,
                           const ExecOptions& options = {});
/// Stream input; `total_bytes` is required for stored-only modes.
ExecReport hash_sequential(const ByteSource& source, const ModeParams& params,
                           std::optional<std::uint64_t> total_bytes, const ExecOptions& options = {});

/// Reference evaluation straight from a topology, node by node.
ExecReport hash_topology(const Topology& topology, std::span<const std::uint8_t> message,
                         const ExecOptions& options = {});

/// Subtree partitioning over p worker threads; the levels above the split
/// level are finished sequentially.
ExecReport hash_parallel_stored(std::span<const std::uint8_t> message, const ModeParams& params,
                                std::size_t workers, const ExecOptions& options = {});

/// Level-wise buffered streaming over p workers with per-level buffers of
/// p*a*k items. Needs a live mode with bounded arities everywhere.
ExecReport hash_parallel_stream(const ByteSource& source, const ModeParams& params, std::size_t workers,
                                std::size_t buffer_k, const ExecOptions& options = {});
ExecReport hash_parallel_stream(std::span<const std::uint8_t> message, const ModeParams& params,
                                std::size_t workers, std::size_t buffer_k, const ExecOptions& options = {});

/// True when hash_parallel_stream accepts the mode.
bool supports_parallel_stream(const ModeParams& params);

/// Continues squeezing a finalized root sponge: returns cv || more output,
/// truncated to out_bits (bits past the end of the last byte are cleared).
std::vector<std::uint8_t> squeeze_extended(Sponge& root, const ChainingValue& cv, std::size_t out_bits);

std::size_t default_workers();

}  // namespace treehash
