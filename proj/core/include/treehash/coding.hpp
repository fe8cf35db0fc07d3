#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treehash/bits.hpp"

namespace treehash {

/// Marker for the "no interleaving" block size I∞.
inline constexpr std::uint64_t kInterleaveInfinity = std::numeric_limits<std::uint64_t>::max();

/// Interleaving block size I in bits (or kInterleaveInfinity) plus the
/// optional group size n_I of the 4L SIMD variant.
struct InterleaveCode {
  std::uint64_t block_bits = kInterleaveInfinity;
  std::optional<std::uint64_t> group_size;

  bool infinite() const noexcept { return block_bits == kInterleaveInfinity; }
  friend bool operator==(const InterleaveCode&, const InterleaveCode&) = default;
};

struct FrameConfig {
  std::size_t word_bits = 64;
};

enum class NodeType { Leaf, Inner };

struct NodeKind {
  NodeType type = NodeType::Leaf;
  bool is_root = false;
  std::uint64_t arity = 0;  // inner nodes only
  InterleaveCode interleave;  // inner nodes only

  friend bool operator==(const NodeKind&, const NodeKind&) = default;
};

/// Big-endian fixed-length encoding. Throws CodingError when x does not fit.
std::vector<std::uint8_t> i2osp(std::uint64_t x, std::size_t length);

/// I2OSP(x, floor(log256 x) + 1) followed by that length as one byte. x >= 1.
std::vector<std::uint8_t> enc(std::uint64_t x);

/// Two bytes mantissa, exponent (minimal exponent, mantissa <= 254), or FF FF
/// for I∞; a third byte n_I follows when a group size is present.
std::vector<std::uint8_t> encode_interleave(const InterleaveCode& code);

/// Inverse of encode_interleave for the two- or three-byte forms. Rejects
/// non-canonical codings. Throws CodingError.
InterleaveCode decode_interleave(std::span<const std::uint8_t> bytes);

/// Frame bits that follow a payload of `payload_bits` bits. For non-root nodes
/// the zero run is the minimal one reaching a multiple of the word size, or
/// extended so the whole f-input is `pad_to_bits` long when that is larger.
BitString frame_trailer(const NodeKind& kind, std::size_t payload_bits, const FrameConfig& config = {},
                        std::size_t pad_to_bits = 0);

/// Length in bits of the f-input produced by frame_node.
std::size_t framed_length(const NodeKind& kind, std::size_t payload_bits, const FrameConfig& config = {},
                          std::size_t pad_to_bits = 0);

/// payload || frame_trailer. Inner payloads must hold exactly arity chaining values.
BitString frame_node(const BitString& payload, const NodeKind& kind, const FrameConfig& config = {},
                     std::size_t pad_to_bits = 0);

struct DecodedNode {
  NodeKind kind;
  BitString payload;
};

/// Parses an f-input from its end. Throws DecodeError carrying the bit position.
DecodedNode decode_node(const BitString& input, const FrameConfig& config = {});

std::string describe(const NodeKind& kind);

}  // namespace treehash
