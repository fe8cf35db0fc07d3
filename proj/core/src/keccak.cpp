#include "treehash/keccak.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "treehash/error.hpp"

namespace treehash {

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// rho offsets along the pi walk starting from lane (1,0)
constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                      27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline std::uint64_t load_le64(const std::uint8_t* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void store_le64(std::uint8_t* p, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

void keccak_f1600(KeccakLanes& st) noexcept {
  std::uint64_t bc[5];
  for (std::uint64_t rc : kRoundConstants) {
    // theta
    for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
    for (int i = 0; i < 5; ++i) {
      std::uint64_t t = bc[(i + 4) % 5] ^ std::rotl(bc[(i + 1) % 5], 1);
      for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
    }
    // rho + pi
    std::uint64_t t = st[1];
    for (int i = 0; i < 24; ++i) {
      int j = kPi[i];
      std::uint64_t next = st[j];
      st[j] = std::rotl(t, kRho[i]);
      t = next;
    }
    // chi
    for (int j = 0; j < 25; j += 5) {
      for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
      for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
    }
    // iota
    st[0] ^= rc;
  }
}

ChainingValue::ChainingValue(std::span<const std::uint8_t, kChainingBytes> bytes) {
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

void Sponge::permute() {
  ++permutations_;
  if (!dry_) keccak_f1600(lanes_);
}

void Sponge::xor_bit(std::size_t position) {
  if (!dry_) lanes_[position / 64] ^= std::uint64_t{1} << (position % 64);
}

void Sponge::absorb_bit(bool b) {
  if (b) xor_bit(offset_bits_);
  if (++offset_bits_ == kRateBits) {
    permute();
    offset_bits_ = 0;
  }
}

void Sponge::absorb(std::span<const std::uint8_t> bytes) {
  if (finalized_) throw UsageError("absorb after finalize");
  if (offset_bits_ % 8 != 0) {
    for (std::uint8_t b : bytes) {
      for (int i = 0; i < 8; ++i) absorb_bit((b >> i) & 1u);
    }
    return;
  }
  std::size_t pos = offset_bits_ / 8;
  const std::uint8_t* data = bytes.data();
  std::size_t remaining = bytes.size();
  while (remaining > 0) {
    std::size_t take = std::min(remaining, kRateBytes - pos);
    if (!dry_) {
      std::size_t i = 0;
      // unaligned head
      for (; i < take && (pos + i) % 8 != 0; ++i) {
        lanes_[(pos + i) / 8] ^= std::uint64_t{data[i]} << (8 * ((pos + i) % 8));
      }
      for (; i + 8 <= take; i += 8) lanes_[(pos + i) / 8] ^= load_le64(data + i);
      for (; i < take; ++i) {
        lanes_[(pos + i) / 8] ^= std::uint64_t{data[i]} << (8 * ((pos + i) % 8));
      }
    }
    data += take;
    remaining -= take;
    pos += take;
    if (pos == kRateBytes) {
      permute();
      pos = 0;
    }
  }
  offset_bits_ = pos * 8;
}

void Sponge::absorb_bits(std::span<const std::uint8_t> bytes, std::size_t bit_length) {
  if (finalized_) throw UsageError("absorb after finalize");
  std::size_t whole = bit_length / 8;
  absorb(bytes.first(whole));
  for (std::size_t i = 0; i < bit_length % 8; ++i) absorb_bit((bytes[whole] >> i) & 1u);
}

void Sponge::absorb(const BitString& bits) { absorb_bits(bits.bytes(), bits.size()); }

ChainingValue Sponge::finalize() {
  if (finalized_) throw UsageError("finalize called twice");
  // RawSHAKE domain suffix 11, then the first bit of pad10*1
  absorb_bit(true);
  absorb_bit(true);
  absorb_bit(true);
  xor_bit(kRateBits - 1);
  permute();
  offset_bits_ = 0;
  finalized_ = true;

  std::array<std::uint8_t, kChainingBytes> out{};
  if (!dry_) {
    for (std::size_t i = 0; i < kChainingBytes / 8; ++i) store_le64(out.data() + 8 * i, lanes_[i]);
  }
  squeeze_offset_ = kChainingBytes;
  return ChainingValue(out);
}

void Sponge::squeeze(std::span<std::uint8_t> out) {
  if (!finalized_) throw UsageError("squeeze before finalize");
  for (std::uint8_t& b : out) {
    if (squeeze_offset_ == kRateBytes) {
      permute();
      squeeze_offset_ = 0;
    }
    b = dry_ ? 0 : static_cast<std::uint8_t>(lanes_[squeeze_offset_ / 8] >> (8 * (squeeze_offset_ % 8)));
    ++squeeze_offset_;
  }
}

ChainingValue raw_shake256(const BitString& node_bits) {
  Sponge sponge;
  sponge.absorb(node_bits);
  return sponge.finalize();
}

std::vector<std::uint8_t> shake256(std::span<const std::uint8_t> message, std::size_t out_bytes) {
  Sponge sponge;
  sponge.absorb(message);
  sponge.absorb_bits(std::array<std::uint8_t, 1>{0x03}, 2);
  ChainingValue cv = sponge.finalize();
  std::vector<std::uint8_t> out(cv.bytes().begin(), cv.bytes().end());
  if (out_bytes <= out.size()) {
    out.resize(out_bytes);
  } else {
    std::size_t have = out.size();
    out.resize(out_bytes);
    sponge.squeeze(std::span(out).subspan(have));
  }
  return out;
}

}  // namespace treehash
