#pragma once

#include <cstdint>
#include <vector>

#include "ref_keccak.hpp"

namespace ref {

// Straightforward tree hash over a given arity table. levels[i][j] is the
// arity of node j+1 at level i+1; level 1 consumes 64-byte blocks in order
// (the last one may be short). pad_arity[i] != 0 zero-extends every non-root
// node of level i+1 to the framed length of a node of that arity.
std::vector<std::uint8_t> tree_digest(const std::vector<std::vector<std::uint64_t>>& levels,
                                      const std::vector<std::uint8_t>& message,
                                      const std::vector<std::uint64_t>& pad_arity);

// Same, with the leaf payloads given explicitly (interleaved layouts) and the
// interleaving code written into the level-2 nodes.
std::vector<std::uint8_t> tree_digest_leaves(const std::vector<std::vector<std::uint64_t>>& levels,
                                             const std::vector<std::vector<std::uint8_t>>& leaves,
                                             const std::vector<std::uint64_t>& pad_arity,
                                             const std::vector<std::uint8_t>& level2_icode);

// I2OSP(x, len) || len, big-endian, as bits.
Bits enc_bits(std::uint64_t x);

// Leaf: payload || 11 [|| 0* || 0]. Inner: payload || enc(arity) || FF FF || 01 [|| 0* || 0].
Bits frame(Bits payload, bool inner, std::uint64_t arity, bool root, std::size_t pad_to,
           const std::vector<std::uint8_t>& icode = {0xff, 0xff});
std::size_t full_frame_bits(bool inner, std::uint64_t arity);

}  // namespace ref
