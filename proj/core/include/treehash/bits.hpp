#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treehash {

/// A bit string in the Keccak convention: bit i lives in byte i/8 at
/// position i%8 (least significant bit first). Unused high bits of the last
/// byte are always zero, so equal strings have equal byte storage.
class BitString {
 public:
  BitString() = default;

  static BitString from_bytes(std::span<const std::uint8_t> bytes);
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_length);
  /// Parses a string of '0'/'1' characters, first character = bit 0.
  static BitString from_binary(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool byte_aligned() const noexcept { return size_ % 8 == 0; }

  bool bit(std::size_t i) const;
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  void append_bit(bool b);
  /// Appends the low `count` bits of `value`, least significant first.
  void append_bits(std::uint64_t value, std::size_t count);
  void append_bytes(std::span<const std::uint8_t> bytes);
  void append(const BitString& other);
  void append_zeros(std::size_t count);

  BitString slice(std::size_t from, std::size_t length) const;
  std::string to_binary() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Accepts upper or lower case, ignores whitespace. Throws std::invalid_argument.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace treehash
