#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treehash/bits.hpp"

namespace treehash {

inline constexpr std::size_t kStateLanes = 25;
inline constexpr std::size_t kStateBits = 1600;
inline constexpr std::size_t kRateBits = 1088;
inline constexpr std::size_t kCapacityBits = kStateBits - kRateBits;
inline constexpr std::size_t kRateBytes = kRateBits / 8;

/// Output width N of the inner function, also the message block size.
inline constexpr std::size_t kChainingBits = 512;
inline constexpr std::size_t kChainingBytes = kChainingBits / 8;
inline constexpr std::size_t kBlockBytes = kChainingBytes;

using KeccakLanes = std::array<std::uint64_t, kStateLanes>;

/// Keccak-f[1600], 24 rounds, in place.
void keccak_f1600(KeccakLanes& lanes) noexcept;

class ChainingValue {
 public:
  ChainingValue() = default;
  explicit ChainingValue(std::span<const std::uint8_t, kChainingBytes> bytes);

  std::span<const std::uint8_t, kChainingBytes> bytes() const noexcept { return bytes_; }
  static constexpr std::size_t bit_length() noexcept { return kChainingBits; }

  friend bool operator==(const ChainingValue&, const ChainingValue&) = default;

 private:
  std::array<std::uint8_t, kChainingBytes> bytes_{};
};

/// RawSHAKE256 sponge: Keccak[c=512] with the two-bit domain suffix 11 and
/// pad10*1. Absorb accepts arbitrary bit strings; the byte-aligned path is the
/// fast one. A dry sponge tracks offsets and permutation counts only.
class Sponge {
 public:
  Sponge() = default;
  explicit Sponge(bool dry) : dry_(dry) {}

  void absorb(std::span<const std::uint8_t> bytes);
  void absorb(const BitString& bits);
  void absorb_bits(std::span<const std::uint8_t> bytes, std::size_t bit_length);

  /// Appends the RawSHAKE suffix and padding and returns the first 512 output bits.
  ChainingValue finalize();
  /// Continues the squeezing phase; output resumes right after the 512-bit
  /// chaining value returned by finalize().
  void squeeze(std::span<std::uint8_t> out);

  bool finalized() const noexcept { return finalized_; }
  bool dry() const noexcept { return dry_; }
  std::size_t absorb_offset_bits() const noexcept { return offset_bits_; }
  std::uint64_t permutation_calls() const noexcept { return permutations_; }
  const KeccakLanes& lanes() const noexcept { return lanes_; }

 private:
  void xor_bit(std::size_t position);
  void absorb_bit(bool b);
  void permute();

  KeccakLanes lanes_{};
  std::size_t offset_bits_ = 0;
  std::size_t squeeze_offset_ = 0;
  std::uint64_t permutations_ = 0;
  bool finalized_ = false;
  bool dry_ = false;
};

/// The inner function f: first 512 bits of RawSHAKE256(node_bits).
ChainingValue raw_shake256(const BitString& node_bits);

/// Permutation calls needed to absorb and pad an input of `bits` bits.
constexpr std::uint64_t permutation_calls_for(std::uint64_t bits) noexcept {
  return (bits + 4 + kRateBits - 1) / kRateBits;
}

/// SHAKE256(message) to out_bytes, via SHAKE256(M) = RawSHAKE256(M || 11).
std::vector<std::uint8_t> shake256(std::span<const std::uint8_t> message, std::size_t out_bytes);

}  // namespace treehash
