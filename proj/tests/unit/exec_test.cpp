#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "openssl_shake.hpp"
#include "ref_tree.hpp"
#include "treehash/error.hpp"
#include "treehash/exec.hpp"

using namespace treehash;

namespace {

using Bytes = std::vector<std::uint8_t>;

ModeParams mode(Mode m) {
  ModeParams p;
  p.mode = m;
  return p;
}

Bytes random_bytes(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  Bytes v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng());
  return v;
}

std::vector<std::uint64_t> pad_arities(const ModeParams& p, std::uint64_t n_blocks, std::size_t height) {
  AritySchedule s(p);
  std::vector<std::uint64_t> pads;
  for (std::size_t i = 1; i <= height; ++i) {
    auto u = (s.interleaved() && i <= 2) ? std::nullopt : s.uniform_arity(i, n_blocks);
    pads.push_back(u.value_or(0));
  }
  return pads;
}

Bytes reference(const ModeParams& p, const Bytes& msg) {
  Topology t = build_topology_bytes(AritySchedule(p), msg.size());
  auto pads = pad_arities(p, t.n_blocks(), t.height());
  if (!t.interleave()) return ref::tree_digest(t.levels(), msg, pads);
  std::vector<Bytes> leaves;
  for (std::uint64_t j = 1; j <= t.level_size(1); ++j) {
    Bytes leaf;
    for (Segment s : t.leaf_segments(j)) leaf.insert(leaf.end(), msg.begin() + s.offset, msg.begin() + s.offset + s.length);
    leaves.push_back(leaf);
  }
  return ref::tree_digest_leaves(t.levels(), leaves, pads, encode_interleave(t.node_kind(2, 1).interleave));
}

std::vector<ModeParams> sample_modes() {
  std::vector<ModeParams> out;
  for (Mode m : all_modes()) out.push_back(mode(m));
  ModeParams p = mode(Mode::M4L);
  p.h = 3;
  out.push_back(p);
  p = mode(Mode::M4L);
  p.group_size = 2;
  out.push_back(p);
  p = mode(Mode::M2L);
  p.q = 3;
  p.interleave_bits = 64;
  out.push_back(p);
  p = mode(Mode::M4S);
  p.epsilon = {1, 3};
  out.push_back(p);
  p = mode(Mode::M1);
  p.B = 2;
  out.push_back(p);
  return out;
}

}  // namespace

TEST(Exec, SingleLeafIsShake256) {
  for (std::size_t len : {0, 1, 17, 64}) {
    Bytes m = random_bytes(len, len);
    ExecReport r = hash_sequential(m, mode(Mode::M3));
    EXPECT_EQ(r.digest, ref::openssl_shake256(m, 64));
    EXPECT_EQ(r.max_live_states, 1u);
    EXPECT_EQ(r.f_calls, 1u);
  }
}

TEST(Exec, SequentialMatchesReferenceTree) {
  for (const ModeParams& p : sample_modes()) {
    for (std::size_t len : {65, 640, 1000, 64 * 17}) {
      Bytes m = random_bytes(len, len);
      EXPECT_EQ(hash_sequential(m, p).digest, reference(p, m)) << mode_name(p.mode) << " len=" << len;
    }
  }
}

TEST(Exec, AllStrategiesAgree) {
  for (const ModeParams& p : sample_modes()) {
    for (std::size_t len : {0, 1, 64, 65, 64 * 33 + 5, 64 * 200}) {
      Bytes m = random_bytes(len + 1, len);
      Topology t = build_topology_bytes(AritySchedule(p), len);
      Bytes expect = hash_topology(t, m).digest;
      EXPECT_EQ(hash_sequential(m, p).digest, expect) << mode_name(p.mode) << " " << len;
      for (std::size_t w : {1, 3, 8}) {
        EXPECT_EQ(hash_parallel_stored(m, p, w).digest, expect) << mode_name(p.mode) << " p=" << w;
      }
      if (supports_parallel_stream(p)) {
        for (std::size_t w : {1, 2, 5}) {
          for (std::size_t k : {1, 3}) {
            ExecReport r = hash_parallel_stream(m, p, w, k);
            EXPECT_EQ(r.digest, expect) << mode_name(p.mode) << " p=" << w << " k=" << k;
            EXPECT_EQ(r.buffer_bound_violations, 0u);
          }
        }
      }
    }
  }
}

TEST(Exec, ThresholdDoesNotChangeDigest) {
  Bytes m = random_bytes(9, 64 * 300);
  for (Mode md : {Mode::M3, Mode::M6L, Mode::M6S, Mode::B1}) {
    ModeParams p = mode(md);
    Bytes base = hash_sequential(m, p).digest;
    for (std::uint64_t d : {2, 3, 7}) {
      p.d = d;
      EXPECT_EQ(hash_sequential(m, p).digest, base) << mode_name(md) << " d=" << d;
    }
  }
}

TEST(Exec, ChunkedUpdates) {
  Bytes m = random_bytes(4, 5000);
  for (Mode md : {Mode::M3, Mode::M2L, Mode::M4S}) {
    ModeParams p = mode(md);
    SequentialHasher h(p, m.size());
    std::size_t pos = 0;
    std::mt19937 rng(2);
    while (pos < m.size()) {
      std::size_t step = std::min<std::size_t>(m.size() - pos, rng() % 150);
      h.update(std::span(m).subspan(pos, step));
      pos += step;
    }
    EXPECT_EQ(h.finish().digest, hash_sequential(m, p).digest) << mode_name(md);
  }
}

TEST(Exec, StreamInput) {
  Bytes m = random_bytes(6, 3000);
  std::istringstream in(std::string(m.begin(), m.end()));
  ExecReport r = hash_sequential(stream_source(in), mode(Mode::M6L), std::nullopt);
  EXPECT_EQ(r.digest, hash_sequential(m, mode(Mode::M6L)).digest);
}

TEST(Exec, Counters) {
  for (const ModeParams& p : sample_modes()) {
    Bytes m = random_bytes(3, 64 * 40 + 9);
    Topology t = build_topology_bytes(AritySchedule(p), m.size());
    std::uint64_t perms = 0;
    for (std::size_t i = 1; i <= t.height(); ++i)
      for (std::uint64_t j = 1; j <= t.level_size(i); ++j) perms += permutation_calls_for(t.framed_bits(i, j));
    ExecReport r = hash_sequential(m, p);
    EXPECT_EQ(r.f_calls, t.node_count()) << mode_name(p.mode);
    EXPECT_EQ(r.permutation_calls, perms) << mode_name(p.mode);
    ExecReport dry = hash_sequential(m, p, {kChainingBits, true});
    EXPECT_EQ(dry.permutation_calls, perms);
    EXPECT_EQ(dry.max_live_states, r.max_live_states);
  }
}

TEST(Exec, LiveStatesMode3) {
  SequentialHasher h(mode(Mode::M3), std::nullopt, true);
  h.update_zeros(1024 * 64);
  ExecReport r = h.finish();
  EXPECT_GE(r.max_live_states, 10u);
  EXPECT_LE(r.max_live_states, 12u);
}

TEST(Exec, LiveStatesMode4SConstant) {
  std::vector<std::uint64_t> seen;
  for (std::uint64_t n : {100, 10000, 1000000}) {
    SequentialHasher h(mode(Mode::M4S), n * 64, true);
    h.update_zeros(n * 64);
    seen.push_back(h.finish().max_live_states);
  }
  EXPECT_EQ(seen[0], seen[1]);
  EXPECT_EQ(seen[1], seen[2]);
}

TEST(Exec, ExtendedOutput) {
  Bytes m = random_bytes(8, 64 * 9);
  ModeParams p = mode(Mode::M3);
  Bytes d512 = hash_sequential(m, p).digest;
  Bytes d1024 = hash_sequential(m, p, {1024, false}).digest;
  ASSERT_EQ(d1024.size(), 128u);
  EXPECT_TRUE(std::equal(d512.begin(), d512.end(), d1024.begin()));
  EXPECT_EQ(hash_parallel_stored(m, p, 3, {1024, false}).digest, d1024);
  EXPECT_EQ(hash_parallel_stream(m, p, 3, 2, {1024, false}).digest, d1024);

  Bytes d12 = hash_sequential(m, p, {12, false}).digest;
  ASSERT_EQ(d12.size(), 2u);
  EXPECT_EQ(d12[0], d512[0]);
  EXPECT_EQ(d12[1], d512[1] & 0x0f);

  // single leaf: extended output is plain SHAKE256
  Bytes small = random_bytes(1, 20);
  EXPECT_EQ(hash_sequential(small, p, {2000, false}).digest, ref::openssl_shake256(small, 250));
}

TEST(Exec, Errors) {
  EXPECT_THROW(SequentialHasher(mode(Mode::M4S)), ModeError);
  SequentialHasher h(mode(Mode::M3), 10);
  Bytes eleven(11);
  EXPECT_THROW(h.update(eleven), UsageError);
  SequentialHasher h2(mode(Mode::M3), 10);
  h2.update(Bytes(5));
  EXPECT_THROW(h2.finish(), UsageError);
  Bytes m(100);
  EXPECT_THROW(hash_parallel_stream(m, mode(Mode::M4S), 2, 2), ModeError);
  EXPECT_THROW(hash_parallel_stream(m, mode(Mode::M4L), 2, 2), ModeError);
  EXPECT_FALSE(supports_parallel_stream(mode(Mode::M1)));
  EXPECT_TRUE(supports_parallel_stream(mode(Mode::B2)));
}

TEST(Exec, ManyWorkersFewNodes) {
  Bytes m = random_bytes(12, 64 * 3);
  ModeParams p = mode(Mode::M6S);
  EXPECT_EQ(hash_parallel_stored(m, p, 64).digest, hash_sequential(m, p).digest);
}
