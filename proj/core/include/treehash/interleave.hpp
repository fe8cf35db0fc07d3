#pragma once

#include <cstdint>

namespace treehash {

/// Lane (0-based) of a 0-based block in Mode 2L round-robin distribution.
std::uint64_t interleave_lane_2L(std::uint64_t q, std::uint64_t block_index);

/// Location of a slice in the 4L SIMD group layout. All fields are 1-based.
struct SimdSlot {
  std::uint64_t group = 0;
  std::uint64_t node = 0;      // node within the group, 1..n_I
  std::uint64_t position = 0;  // slice position within that node's payload

  friend bool operator==(const SimdSlot&, const SimdSlot&) = default;
};

/// Group g holds n_I nodes of arity g, i.e. n_I*g blocks of
/// slices_per_block slices each; inside a group slices are dealt round-robin
/// to its n_I nodes. slice_index is 1-based (s_1, s_2, ...).
SimdSlot interleave_map_4L_simd(std::uint64_t n_I, std::uint64_t slice_index,
                                std::uint64_t slices_per_block = 8);

/// Index (0-based) of the first byte of group g (1-based) in the 4L SIMD layout.
std::uint64_t simd_group_start_bytes(std::uint64_t n_I, std::uint64_t group);

}  // namespace treehash
