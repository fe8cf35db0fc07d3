#include <gtest/gtest.h>

#include "treehash/bits.hpp"

using treehash::BitString;

TEST(BitString, BinaryRoundTrip) {
  auto b = BitString::from_binary("1011001");
  EXPECT_EQ(b.size(), 7u);
  EXPECT_EQ(b.to_binary(), "1011001");
  EXPECT_TRUE(b.bit(0));
  EXPECT_FALSE(b.bit(1));
  // LSB first inside the byte
  EXPECT_EQ(b.bytes()[0], 0b01001101);
}

TEST(BitString, AppendKeepsHighBitsClear) {
  BitString a;
  a.append_bits(0x3, 2);
  a.append_zeros(3);
  a.append_bit(true);
  EXPECT_EQ(a.to_binary(), "110001");
  EXPECT_EQ(a.bytes().size(), 1u);
  EXPECT_EQ(a.bytes()[0], 0x23);

  BitString b = BitString::from_bytes(std::vector<std::uint8_t>{0xff}, 6);
  EXPECT_EQ(b.bytes()[0], 0x3f);
  EXPECT_EQ(b, BitString::from_binary("111111"));
}

TEST(BitString, UnalignedAppendAndSlice) {
  BitString a = BitString::from_binary("101");
  std::vector<std::uint8_t> bytes{0x0f, 0xa5};
  a.append_bytes(bytes);
  EXPECT_EQ(a.size(), 19u);
  EXPECT_EQ(a.slice(3, 16), BitString::from_bytes(bytes));
  EXPECT_EQ(a.slice(0, 3).to_binary(), "101");
  EXPECT_THROW(a.slice(10, 10), std::out_of_range);
  EXPECT_THROW(a.bit(19), std::out_of_range);
}

TEST(BitString, RejectsBadBinary) { EXPECT_THROW(BitString::from_binary("10x"), std::invalid_argument); }

TEST(Hex, RoundTrip) {
  std::vector<std::uint8_t> v{0x00, 0x1f, 0xab, 0xff};
  EXPECT_EQ(treehash::to_hex(v), "001fabff");
  EXPECT_EQ(treehash::from_hex("00 1F\nAB ff"), v);
  EXPECT_THROW(treehash::from_hex("abc"), std::invalid_argument);
  EXPECT_THROW(treehash::from_hex("zz"), std::invalid_argument);
}
