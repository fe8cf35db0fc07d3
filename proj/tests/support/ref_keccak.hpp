#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Slow, bit-per-bool Keccak written straight from the state-array
// description. Used only to cross-check the library.
namespace ref {

using Bits = std::vector<bool>;

// Keccak-p[1600, 24] on the 5x5x64 array, A[x][y][z].
void keccak_p1600(std::array<std::array<std::array<bool, 64>, 5>, 5>& a);

// Keccak[c=512](input), first out_bits bits.
Bits keccak512(const Bits& input, std::size_t out_bits);

// RawSHAKE256: Keccak[512](input || 11).
Bits raw_shake256(const Bits& input, std::size_t out_bits = 512);

Bits from_bytes(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> to_bytes(const Bits& bits);

}  // namespace ref
