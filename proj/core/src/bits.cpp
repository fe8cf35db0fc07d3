#include "treehash/bits.hpp"

#include <cctype>
#include <stdexcept>

namespace treehash {

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
  return from_bytes(bytes, bytes.size() * 8);
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_length) {
  if (bit_length > bytes.size() * 8) {
    throw std::invalid_argument("bit length exceeds byte storage");
  }
  BitString out;
  out.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((bit_length + 7) / 8));
  out.size_ = bit_length;
  if (bit_length % 8 != 0) {
    out.bytes_.back() &= static_cast<std::uint8_t>((1u << (bit_length % 8)) - 1);
  }
  return out;
}

BitString BitString::from_binary(std::string_view bits) {
  BitString out;
  for (char c : bits) {
    if (c == '0' || c == '1') {
      out.append_bit(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("binary string may only contain 0 and 1");
    }
  }
  return out;
}

bool BitString::bit(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("bit index out of range");
  return (bytes_[i / 8] >> (i % 8)) & 1u;
}

void BitString::append_bit(bool b) {
  if (size_ % 8 == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (size_ % 8));
  ++size_;
}

void BitString::append_bits(std::uint64_t value, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) append_bit((value >> i) & 1u);
}

void BitString::append_bytes(std::span<const std::uint8_t> bytes) {
  if (size_ % 8 == 0) {
    bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
    size_ += bytes.size() * 8;
    return;
  }
  for (std::uint8_t b : bytes) append_bits(b, 8);
}

void BitString::append(const BitString& other) {
  if (size_ % 8 == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    size_ += other.size_;
    return;
  }
  for (std::size_t i = 0; i < other.size_; ++i) append_bit(other.bit(i));
}

void BitString::append_zeros(std::size_t count) {
  std::size_t new_size = size_ + count;
  bytes_.resize((new_size + 7) / 8, 0);
  size_ = new_size;
}

BitString BitString::slice(std::size_t from, std::size_t length) const {
  if (from > size_ || length > size_ - from) throw std::out_of_range("slice out of range");
  if (from % 8 == 0) {
    return from_bytes(std::span(bytes_).subspan(from / 8, (length + 7) / 8), length);
  }
  BitString out;
  for (std::size_t i = 0; i < length; ++i) out.append_bit(bit(from + i));
  return out;
}

std::string BitString::to_binary() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  int high = -1;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int v = nibble(c);
    if (v < 0) throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
    if (high < 0) {
      high = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((high << 4) | v));
      high = -1;
    }
  }
  if (high >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

}  // namespace treehash
