#include "treehash/coding.hpp"

#include <algorithm>

#include "treehash/error.hpp"
#include "treehash/keccak.hpp"

namespace treehash {

namespace {

constexpr std::size_t kChainingPayload = kChainingBits;

std::size_t code_bits(const NodeKind& kind) {
  if (kind.type == NodeType::Leaf) return 0;
  std::size_t len = enc(kind.arity).size() + (kind.interleave.group_size ? 3 : 2);
  return 8 * len;
}

std::size_t round_up(std::size_t x, std::size_t w) { return (x + w - 1) / w * w; }

}  // namespace

std::vector<std::uint8_t> i2osp(std::uint64_t x, std::size_t length) {
  std::vector<std::uint8_t> out(length, 0);
  for (std::size_t i = 0; i < length; ++i) {
    out[length - 1 - i] = static_cast<std::uint8_t>(x & 0xFF);
    x = i + 1 < 8 ? x >> 8 : 0;
  }
  if (x != 0) throw CodingError("integer too large for I2OSP length " + std::to_string(length));
  return out;
}

std::vector<std::uint8_t> enc(std::uint64_t x) {
  if (x == 0) throw CodingError("enc(0): arity is never zero");
  std::size_t len = 1;
  while (len < 8 && (x >> (8 * len)) != 0) ++len;
  auto out = i2osp(x, len);
  out.push_back(static_cast<std::uint8_t>(len));
  return out;
}

std::vector<std::uint8_t> encode_interleave(const InterleaveCode& code) {
  std::vector<std::uint8_t> out;
  if (code.infinite()) {
    out = {0xFF, 0xFF};
  } else {
    std::uint64_t m = code.block_bits;
    std::uint64_t e = 0;
    while (m > 254) {
      if (m % 2 != 0) throw CodingError("interleaving size " + std::to_string(code.block_bits) + " is not m*2^e with m <= 254");
      m /= 2;
      ++e;
    }
    if (e > 254) throw CodingError("interleaving exponent out of range");
    out = {static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(e)};
  }
  if (code.group_size) {
    if (*code.group_size < 1 || *code.group_size > 255) throw CodingError("group size must be in [1, 255]");
    out.push_back(static_cast<std::uint8_t>(*code.group_size));
  }
  return out;
}

InterleaveCode decode_interleave(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 2 && bytes.size() != 3) throw CodingError("interleaving code has 2 or 3 bytes");
  InterleaveCode code;
  std::uint8_t m = bytes[0];
  std::uint8_t e = bytes[1];
  if (m == 0xFF && e == 0xFF) {
    code.block_bits = kInterleaveInfinity;
  } else {
    if (m == 0xFF || e == 0xFF) throw CodingError("byte 0xFF is reserved for I-infinity");
    if (e > 0 && m <= 127) throw CodingError("interleaving size coded with a non-minimal exponent");
    if (e >= 56) throw CodingError("interleaving size exceeds 64 bits");
    code.block_bits = std::uint64_t{m} << e;
    if (code.block_bits == 0) throw CodingError("interleaving size zero");
  }
  if (bytes.size() == 3) {
    if (bytes[2] == 0) throw CodingError("group size zero");
    code.group_size = bytes[2];
  }
  return code;
}

std::size_t framed_length(const NodeKind& kind, std::size_t payload_bits, const FrameConfig& config,
                          std::size_t pad_to_bits) {
  if (config.word_bits != 32 && config.word_bits != 64) throw CodingError("word size must be 32 or 64");
  std::size_t base = payload_bits + code_bits(kind) + 2;
  if (kind.is_root) return base;
  if (pad_to_bits % config.word_bits != 0) throw CodingError("padding target is not a multiple of the word size");
  std::size_t natural = round_up(base + 1, config.word_bits);
  return std::max(natural, pad_to_bits);
}

BitString frame_trailer(const NodeKind& kind, std::size_t payload_bits, const FrameConfig& config,
                        std::size_t pad_to_bits) {
  if (config.word_bits != 32 && config.word_bits != 64) throw CodingError("word size must be 32 or 64");
  if (!kind.is_root && pad_to_bits % config.word_bits != 0) {
    throw CodingError("padding target is not a multiple of the word size");
  }
  BitString t;
  if (kind.type == NodeType::Inner) {
    if (payload_bits != kind.arity * kChainingPayload) {
      throw CodingError("inner node payload of " + std::to_string(payload_bits) + " bits does not hold " +
                        std::to_string(kind.arity) + " chaining values");
    }
    t.append_bytes(enc(kind.arity));
    t.append_bytes(encode_interleave(kind.interleave));
    t.append_bit(false);
    t.append_bit(true);
  } else {
    t.append_bit(true);
    t.append_bit(true);
  }
  if (!kind.is_root) {
    std::size_t total = framed_length(kind, payload_bits, config, pad_to_bits);
    t.append_zeros(total - payload_bits - t.size());
  }
  return t;
}

BitString frame_node(const BitString& payload, const NodeKind& kind, const FrameConfig& config,
                     std::size_t pad_to_bits) {
  BitString out = payload;
  out.append(frame_trailer(kind, payload.size(), config, pad_to_bits));
  return out;
}

DecodedNode decode_node(const BitString& input, const FrameConfig& config) {
  const std::size_t n = input.size();
  if (n < 2) throw DecodeError("input shorter than the two frame bits", 0);
  DecodedNode out;
  std::size_t end = n;  // exclusive end of payload || codes || suffix
  if (input.bit(n - 1)) {
    out.kind.is_root = true;
  } else {
    if (n % config.word_bits != 0) throw DecodeError("non-root input is not word aligned", n);
    std::size_t pos = n - 1;
    while (pos > 0 && !input.bit(pos - 1)) --pos;
    if (pos == 0) throw DecodeError("no frame marker bit found", 0);
    end = pos;  // bit end-1 is the marker 1
  }
  if (end < 2) throw DecodeError("truncated frame suffix", 0);
  const bool leaf = input.bit(end - 2);
  const std::size_t body = end - 2;
  if (leaf) {
    out.kind.type = NodeType::Leaf;
    out.payload = input.slice(0, body);
    return out;
  }

  out.kind.type = NodeType::Inner;
  if (body % 8 != 0) throw DecodeError("inner node codes are not byte aligned", body);
  auto byte_at = [&](std::size_t byte_index) {
    std::uint8_t v = 0;
    for (std::size_t b = 0; b < 8; ++b) v |= static_cast<std::uint8_t>(input.bit(8 * byte_index + b) << b);
    return v;
  };
  const std::size_t body_bytes = body / 8;
  std::string last_error = "malformed inner node codes";
  std::size_t last_pos = body;
  for (std::size_t icode_len : {std::size_t{2}, std::size_t{3}}) {
    if (body_bytes < icode_len + 2) {
      last_error = "inner node too short for its codes";
      last_pos = 0;
      continue;
    }
    std::vector<std::uint8_t> icode;
    for (std::size_t i = body_bytes - icode_len; i < body_bytes; ++i) icode.push_back(byte_at(i));
    InterleaveCode interleave;
    try {
      interleave = decode_interleave(icode);
    } catch (const CodingError& e) {
      last_error = e.what();
      last_pos = 8 * (body_bytes - icode_len);
      continue;
    }
    if (!interleave.infinite() && interleave.block_bits % 8 != 0) {
      last_error = "interleaving size is not a whole number of bytes";
      last_pos = 8 * (body_bytes - icode_len);
      continue;
    }
    std::size_t len_index = body_bytes - icode_len - 1;
    std::uint8_t len = byte_at(len_index);
    if (len < 1 || len > 8 || len > len_index) {
      last_error = "bad arity length byte";
      last_pos = 8 * len_index;
      continue;
    }
    std::size_t x_index = len_index - len;
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < len; ++i) x = (x << 8) | byte_at(x_index + i);
    if (byte_at(x_index) == 0) {
      last_error = "arity coded with a leading zero byte";
      last_pos = 8 * x_index;
      continue;
    }
    std::size_t payload_bits = 8 * x_index;
    if (x > payload_bits / kChainingPayload || payload_bits != x * kChainingPayload) {
      last_error = "payload length does not match the coded arity";
      last_pos = payload_bits;
      continue;
    }
    out.kind.arity = x;
    out.kind.interleave = interleave;
    out.payload = input.slice(0, payload_bits);
    return out;
  }
  throw DecodeError(last_error, last_pos);
}

std::string describe(const NodeKind& kind) {
  std::string s = kind.type == NodeType::Leaf ? "leaf" : "inner";
  s += kind.is_root ? " root" : " non-root";
  if (kind.type == NodeType::Inner) {
    s += " arity=" + std::to_string(kind.arity);
    s += " I=" + (kind.interleave.infinite() ? std::string("inf") : std::to_string(kind.interleave.block_bits));
    if (kind.interleave.group_size) s += " nI=" + std::to_string(*kind.interleave.group_size);
  }
  return s;
}

}  // namespace treehash
