#include "ref_tree.hpp"

#include <stdexcept>

namespace ref {

namespace {

void push_byte(Bits& b, std::uint8_t v) {
  for (int i = 0; i < 8; ++i) b.push_back((v >> i) & 1);
}

std::size_t round_up64(std::size_t x) { return (x + 63) / 64 * 64; }

Bits upper_levels(const std::vector<std::vector<std::uint64_t>>& levels, std::vector<Bits> cvs,
                  const std::vector<std::uint64_t>& pad_arity, const std::vector<std::uint8_t>& level2_icode) {
  const std::size_t h = levels.size();
  for (std::size_t i = 1; i < h; ++i) {
    std::vector<Bits> next;
    std::size_t c = 0;
    std::vector<std::uint8_t> icode = i == 1 ? level2_icode : std::vector<std::uint8_t>{0xff, 0xff};
    for (std::uint64_t a : levels[i]) {
      Bits payload;
      for (std::uint64_t k = 0; k < a; ++k, ++c) payload.insert(payload.end(), cvs.at(c).begin(), cvs.at(c).end());
      bool root = i + 1 == h;
      std::size_t pad = !root && pad_arity[i] ? full_frame_bits(true, pad_arity[i]) : 0;
      next.push_back(raw_shake256(frame(payload, true, a, root, pad, icode)));
    }
    if (c != cvs.size()) throw std::logic_error("level does not consume every chaining value");
    cvs = std::move(next);
  }
  return cvs.at(0);
}

}  // namespace

Bits enc_bits(std::uint64_t x) {
  std::vector<std::uint8_t> be;
  for (std::uint64_t v = x; v != 0; v >>= 8) be.insert(be.begin(), static_cast<std::uint8_t>(v & 0xff));
  Bits b;
  for (auto v : be) push_byte(b, v);
  push_byte(b, static_cast<std::uint8_t>(be.size()));
  return b;
}

std::size_t full_frame_bits(bool inner, std::uint64_t arity) {
  std::size_t body = 512 * arity + 2;
  if (inner) body += enc_bits(arity).size() + 16;
  return round_up64(body + 1);
}

Bits frame(Bits payload, bool inner, std::uint64_t arity, bool root, std::size_t pad_to,
           const std::vector<std::uint8_t>& icode) {
  if (inner) {
    Bits e = enc_bits(arity);
    payload.insert(payload.end(), e.begin(), e.end());
    for (auto v : icode) push_byte(payload, v);
    payload.push_back(false);
    payload.push_back(true);
  } else {
    payload.push_back(true);
    payload.push_back(true);
  }
  if (!root) {
    std::size_t target = std::max(round_up64(payload.size() + 1), pad_to);
    payload.resize(target, false);
  }
  return payload;
}

std::vector<std::uint8_t> tree_digest_leaves(const std::vector<std::vector<std::uint64_t>>& levels,
                                             const std::vector<std::vector<std::uint8_t>>& leaves,
                                             const std::vector<std::uint64_t>& pad_arity,
                                             const std::vector<std::uint8_t>& level2_icode) {
  if (leaves.size() != levels.at(0).size()) throw std::logic_error("one payload per leaf expected");
  std::vector<Bits> cvs;
  for (const auto& leaf : leaves) {
    bool root = levels.size() == 1;
    std::size_t pad = !root && pad_arity[0] ? full_frame_bits(false, pad_arity[0]) : 0;
    cvs.push_back(raw_shake256(frame(from_bytes(leaf), false, 0, root, pad)));
  }
  return to_bytes(upper_levels(levels, std::move(cvs), pad_arity, level2_icode));
}

std::vector<std::uint8_t> tree_digest(const std::vector<std::vector<std::uint64_t>>& levels,
                                      const std::vector<std::uint8_t>& message,
                                      const std::vector<std::uint64_t>& pad_arity) {
  std::vector<std::vector<std::uint8_t>> leaves;
  std::size_t pos = 0;
  for (std::uint64_t a : levels.at(0)) {
    std::size_t end = std::min(message.size(), pos + 64 * a);
    leaves.emplace_back(message.begin() + pos, message.begin() + end);
    pos = end;
  }
  if (pos != message.size()) throw std::logic_error("leaf arities do not cover the message");
  return tree_digest_leaves(levels, leaves, pad_arity, {0xff, 0xff});
}

}  // namespace ref
