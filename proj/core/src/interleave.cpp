#include "treehash/interleave.hpp"

#include <stdexcept>

#include "treehash/keccak.hpp"

namespace treehash {

std::uint64_t interleave_lane_2L(std::uint64_t q, std::uint64_t block_index) {
  if (q == 0) throw std::invalid_argument("q must be >= 1");
  return block_index % q;
}

SimdSlot interleave_map_4L_simd(std::uint64_t n_I, std::uint64_t slice_index, std::uint64_t slices_per_block) {
  if (n_I == 0 || slice_index == 0 || slices_per_block == 0) {
    throw std::invalid_argument("n_I, slice index and slices per block must be >= 1");
  }
  const std::uint64_t per_unit = slices_per_block * n_I;  // slices in n_I blocks
  std::uint64_t offset = slice_index - 1;
  std::uint64_t g = 1;
  while (offset >= per_unit * g) {
    offset -= per_unit * g;
    ++g;
  }
  return SimdSlot{g, offset % n_I + 1, offset / n_I + 1};
}

std::uint64_t simd_group_start_bytes(std::uint64_t n_I, std::uint64_t group) {
  return kBlockBytes * n_I * (group * (group - 1) / 2);
}

}  // namespace treehash
