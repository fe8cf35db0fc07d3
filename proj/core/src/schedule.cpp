#include "treehash/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "treehash/coding.hpp"
#include "treehash/error.hpp"

namespace treehash {

namespace {

struct ModeName {
  Mode mode;
  std::string_view name;
};

constexpr ModeName kModeNames[] = {
    {Mode::M1, "1"},   {Mode::M2S, "2S"}, {Mode::M2L, "2L"}, {Mode::M3, "3"},   {Mode::M4S, "4S"},
    {Mode::M5S, "5S"}, {Mode::M6S, "6S"}, {Mode::M4L, "4L"}, {Mode::M5L, "5L"}, {Mode::M6L, "6L"},
    {Mode::WC, "WC"},  {Mode::B1, "B1"},  {Mode::B2, "B2"},  {Mode::B3, "B3"},
};

std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("invalid number '" + std::string(s) + "'");
  }
  return v;
}

long double log_base(long double base, long double x) { return std::log2(x) / std::log2(base); }

}  // namespace

// ---------------------------------------------------------------------------
// Names and parameters

Mode parse_mode(std::string_view name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up.size() > 1 && up.front() == 'M' && up != "M") up.erase(0, 1);
  for (const auto& m : kModeNames) {
    if (m.name == up) return m.mode;
  }
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string_view mode_name(Mode mode) {
  for (const auto& m : kModeNames) {
    if (m.mode == mode) return m.name;
  }
  return "?";
}

const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = [] {
    std::vector<Mode> v;
    for (const auto& m : kModeNames) v.push_back(m.mode);
    return v;
  }();
  return modes;
}

bool is_live(Mode mode) {
  switch (mode) {
    case Mode::M2S:
    case Mode::M4S:
    case Mode::M5S:
    case Mode::M6S:
      return false;
    default:
      return true;
  }
}

Rational Rational::parse(std::string_view text) {
  Rational r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    r.num = static_cast<std::int64_t>(parse_u64(text.substr(0, slash)));
    r.den = static_cast<std::int64_t>(parse_u64(text.substr(slash + 1)));
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw ConfigError("too many decimals in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t whole = dot == 0 ? 0 : static_cast<std::int64_t>(parse_u64(text.substr(0, dot)));
    std::int64_t part = frac.empty() ? 0 : static_cast<std::int64_t>(parse_u64(frac));
    r.num = whole * scale + part;
    r.den = scale;
  } else {
    r.num = static_cast<std::int64_t>(parse_u64(text));
    r.den = 1;
  }
  if (r.den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::uint64_t ModeParams::height_4s() const {
  if (epsilon.num <= 0 || epsilon.den % epsilon.num != 0) {
    throw ConfigError("mode 4S needs 1/epsilon to be a positive integer, got epsilon=" +
                      epsilon.to_string());
  }
  return static_cast<std::uint64_t>(epsilon.den / epsilon.num);
}

void ModeParams::validate() const {
  if (d < 1) throw ConfigError("threshold d must be >= 1");
  auto need_epsilon = [&] {
    if (epsilon.num <= 0 || epsilon.den <= 0 || epsilon.num >= epsilon.den) {
      throw ConfigError("epsilon must lie in (0,1), got " + epsilon.to_string());
    }
  };
  switch (mode) {
    case Mode::M1:
      if (B < 1) throw ConfigError("mode 1 needs B >= 1");
      break;
    case Mode::M2S:
    case Mode::M2L:
      if (q < 1) throw ConfigError("mode 2 needs q >= 1");
      break;
    case Mode::M4S:
      need_epsilon();
      if (height_4s() < 2) throw ConfigError("mode 4S needs 1/epsilon >= 2");
      break;
    case Mode::M5S:
      need_epsilon();
      break;
    case Mode::M5L:
      need_epsilon();
      [[fallthrough]];
    case Mode::M6S:
    case Mode::M6L:
      if (c < 2) throw ConfigError("base c must be an integer > 1");
      break;
    case Mode::M4L:
      if (h < 2) throw ConfigError("mode 4L needs h >= 2");
      break;
    case Mode::WC:
      if (k < 2 || (k & (k - 1)) != 0) throw ConfigError("mode WC needs k >= 2, a power of 2");
      break;
    default:
      break;
  }
  if (group_size) {
    if (mode != Mode::M4L) throw ConfigError("group size nI only applies to mode 4L");
    if (h != 2) throw ConfigError("the 4L group variant is defined for h = 2");
    if (*group_size < 1 || *group_size > 255) throw ConfigError("nI must be in [1, 255]");
  }
  if (interleave_bits) {
    bool allowed = mode == Mode::M2L || (mode == Mode::M4L && group_size);
    if (!allowed) throw ConfigError("interleaving block size I applies to 2L or 4L with nI only");
    if (*interleave_bits == 0 || *interleave_bits % 8 != 0) {
      throw ConfigError("interleaving block size I must be a positive multiple of 8 bits");
    }
    encode_interleave(InterleaveCode{*interleave_bits, std::nullopt});
  }
}

// ---------------------------------------------------------------------------
// Integer helpers

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

std::uint64_t ceil_log(std::uint64_t base, std::uint64_t x) {
  std::uint64_t e = 0;
  std::uint64_t p = 1;
  while (p < x) {
    ++e;
    if (__builtin_mul_overflow(p, base, &p)) break;
  }
  return e;
}

std::uint64_t ceil_root(std::uint64_t x, std::uint64_t k) {
  if (x <= 1) return 1;
  auto pow_at_least = [&](std::uint64_t r) {
    std::uint64_t p = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
      if (__builtin_mul_overflow(p, r, &p)) return true;
      if (p >= x) return true;
    }
    return p >= x;
  };
  auto guess = static_cast<std::uint64_t>(
      std::ceil(std::pow(static_cast<long double>(x), 1.0L / static_cast<long double>(k))));
  guess = std::max<std::uint64_t>(guess, 1);
  while (guess > 1 && pow_at_least(guess - 1)) --guess;
  while (!pow_at_least(guess)) ++guess;
  return guess;
}

std::uint64_t floor_log2(std::uint64_t x) {
  if (x == 0) throw std::invalid_argument("floor_log2(0)");
  return 63 - static_cast<std::uint64_t>(__builtin_clzll(x));
}

std::uint64_t checked_ceil(long double x) {
  if (x <= 0) return 0;
  long double r = std::round(x);
  if (std::fabs(x - r) < 1e-9L) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n-k+i) / i is exact; divide first to stay in range
    std::uint64_t g = std::gcd(r, i);
    std::uint64_t m = (n - k + i) / (i / g);
    if (__builtin_mul_overflow(r / g, m, &r)) throw std::overflow_error("binomial overflow");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Mode 4L

struct ArityCursor::Mode4LState {
  std::uint64_t h;
  std::uint64_t level;
  std::unique_ptr<Mode4LState> parent;
  std::uint64_t parent_arity = 0;
  std::uint64_t next_child = 0;
  std::uint64_t counter = 1;

  Mode4LState(std::uint64_t h_, std::uint64_t level_) : h(h_), level(level_) {
    if (level + 1 < h) parent = std::make_unique<Mode4LState>(h, level + 1);
  }

  Mode4LState(const Mode4LState& o)
      : h(o.h),
        level(o.level),
        parent(o.parent ? std::make_unique<Mode4LState>(*o.parent) : nullptr),
        parent_arity(o.parent_arity),
        next_child(o.next_child),
        counter(o.counter) {}

  std::uint64_t next() {
    if (level >= h) return kUnbounded;
    if (level + 1 == h) return ++counter;  // 2, 3, 4, ...
    if (next_child == 0 || next_child > parent_arity + 1) {
      parent_arity = parent->next();
      next_child = 2;
    }
    return next_child++;
  }
};

ArityCursor::ArityCursor(std::function<std::uint64_t(std::uint64_t)> by_index)
    : by_index_(std::move(by_index)) {}

ArityCursor::ArityCursor(std::uint64_t h4l, std::uint64_t level)
    : m4l_(std::make_unique<Mode4LState>(h4l, level)) {}

ArityCursor::ArityCursor(const ArityCursor& other)
    : by_index_(other.by_index_),
      m4l_(other.m4l_ ? std::make_unique<Mode4LState>(*other.m4l_) : nullptr),
      index_(other.index_) {}

ArityCursor& ArityCursor::operator=(const ArityCursor& other) {
  if (this != &other) *this = ArityCursor(other);
  return *this;
}

ArityCursor::ArityCursor(ArityCursor&&) noexcept = default;
ArityCursor& ArityCursor::operator=(ArityCursor&&) noexcept = default;
ArityCursor::~ArityCursor() = default;

std::uint64_t ArityCursor::next() {
  if (m4l_) return m4l_->next();
  return by_index_(++index_);
}

std::uint64_t arity_4l(std::uint64_t h, std::uint64_t level, std::uint64_t index) {
  if (h < 2) throw ConfigError("mode 4L needs h >= 2");
  if (level < 1 || level > h) throw std::out_of_range("level outside [1, h]");
  if (index < 1) throw std::out_of_range("node index must be >= 1");
  if (level == h) return kUnbounded;
  if (level + 1 == h) return index + 1;
  ArityCursor parents(h, level + 1);
  std::uint64_t before = 0;
  for (;;) {
    std::uint64_t k = parents.next();
    if (before + k >= index) return 2 + (index - before - 1);
    before += k;
  }
}

std::uint64_t arity_4l_closed_form_h4(std::uint64_t level, std::uint64_t j) {
  if (level < 1 || level > 4) throw std::out_of_range("level outside [1, 4]");
  if (j < 1) throw std::out_of_range("node index must be >= 1");
  if (level == 4) return kUnbounded;
  if (level == 3 || j <= 2) return j + 1;
  if (level == 2) {
    std::uint64_t k1 = (isqrt(1 + 8 * j) - 1) / 2;
    return 2 + j % ((k1 * k1 + k1) / 2);
  }
  // k2: integer part of the positive root of k^3 + 3k^2 + 2k - 6j = 0
  auto tetra6 = [](std::uint64_t k) { return k * k * k + 3 * k * k + 2 * k; };
  auto k2 = static_cast<std::uint64_t>(std::cbrt(6.0L * static_cast<long double>(j)));
  while (k2 > 0 && tetra6(k2) > 6 * j) --k2;
  while (tetra6(k2 + 1) <= 6 * j) ++k2;
  return 2 + j % (tetra6(k2) / 6);
}

std::uint64_t n_max_4l(std::uint64_t x, std::uint64_t h) {
  if (x < 1 || h < 2) throw ConfigError("n_max_4l needs x >= 1 and h >= 2");
  return binomial(x + h - 2, h - 1) + binomial(x + h - 1, h);
}

std::uint64_t n_blocks_4l(std::uint64_t x, std::uint64_t h) {
  if (x < 1 || h < 2) throw ConfigError("n_blocks_4l needs x >= 1 and h >= 2");
  // s[a] = blocks under a node of arity a, one level at a time from the leaves
  std::vector<std::uint64_t> s(x + h + 1);
  for (std::uint64_t a = 0; a < s.size(); ++a) s[a] = a;
  for (std::uint64_t level = 2; level <= h; ++level) {
    std::vector<std::uint64_t> next(s.size(), 0);
    std::uint64_t run = 0;
    for (std::uint64_t a = 1; a + 1 < s.size(); ++a) {
      run += s[a + 1];
      next[a] = run;
    }
    s = std::move(next);
  }
  return s[x];
}

// ---------------------------------------------------------------------------
// AritySchedule

AritySchedule::AritySchedule(ModeParams params)
    : params_(std::move(params)), kind_(is_live(params_.mode) ? ScheduleKind::Live : ScheduleKind::Stored) {
  params_.validate();
}

AritySchedule AritySchedule::reduced(ModeParams origin, std::uint64_t leaf_arity, std::uint64_t fanout) {
  AritySchedule s(std::move(origin));
  s.kind_ = ScheduleKind::Stored;
  s.reduced_ = Reduced{leaf_arity, fanout};
  return s;
}

bool AritySchedule::interleaved() const noexcept {
  return !reduced_ && (params_.mode == Mode::M2L || (params_.mode == Mode::M4L && params_.group_size));
}

AritySchedule::StoredFormula AritySchedule::stored_formula(std::uint64_t n) const {
  StoredFormula f;
  f.n = n;
  const std::uint64_t nn = std::max<std::uint64_t>(n, 1);
  if (reduced_) {
    f.level_arity = {reduced_->leaf_arity};
    f.rest = reduced_->fanout;
    return f;
  }
  switch (params_.mode) {
    case Mode::M2S:
      f.level_arity = {ceil_div(nn, params_.q)};
      f.rest = kUnbounded;
      f.height = 2;
      break;
    case Mode::M4S: {
      std::uint64_t h = params_.height_4s();
      f.rest = ceil_root(nn, h);
      f.height = h;
      break;
    }
    case Mode::M5S: {
      const long double eps = params_.epsilon.value();
      const long double L = std::max(std::log2(static_cast<long double>(nn)), 2.0L);
      const long double LL = std::log2(L);
      std::uint64_t u1 = std::max<std::uint64_t>(1, checked_ceil(std::pow(L, 1 + eps) / LL));
      f.level_arity = {u1};
      f.rest = checked_ceil(std::pow(L, eps));
      std::uint64_t n1 = ceil_div(nn, u1);
      if (n1 <= 1) {
        f.height = 1;
      } else {
        const long double L1 = std::log2(static_cast<long double>(n1));
        const long double LL1 = std::log2(std::max(L1, 2.0L));
        f.height = checked_ceil(L1 / (eps * LL1)) + 1;
      }
      break;
    }
    case Mode::M6S: {
      std::uint64_t u1 = std::max<std::uint64_t>(1, ceil_log(params_.c, nn));
      f.level_arity = {u1};
      f.rest = params_.c;
      f.height = ceil_log(params_.c, ceil_div(nn, u1)) + 1;
      break;
    }
    default:
      throw std::logic_error("stored_formula on a live mode");
  }
  return f;
}

std::uint64_t AritySchedule::live_arity(std::uint64_t level, std::uint64_t j) const {
  const auto& p = params_;
  switch (p.mode) {
    case Mode::M1:
      return level == 1 ? p.B : kUnbounded;
    case Mode::M2L:
      return kUnbounded;  // level 1 lanes are laid out by the topology builder
    case Mode::M3:
      return 2;
    case Mode::WC:
      return p.k;
    case Mode::M4L:
      if (p.group_size) return kUnbounded;
      return arity_4l(p.h, level, j);
    case Mode::M5L: {
      const long double eps = p.epsilon.value();
      const long double x = static_cast<long double>(p.c + j);
      const long double lc = log_base(static_cast<long double>(p.c), x);
      if (level == 1) return checked_ceil(std::pow(lc, 1 + eps) / std::log2(std::log2(x)));
      return checked_ceil(std::pow(lc, eps));
    }
    case Mode::M6L:
      return level == 1 ? ceil_log(p.c, p.c + j) : p.c;
    case Mode::B1:
      return level >= 62 ? (std::uint64_t{1} << 62) : (std::uint64_t{1} << level);
    case Mode::B2:
      return level + 1;
    case Mode::B3:
      return floor_log2(level + 3);
    default:
      throw std::logic_error("live_arity on a stored mode");
  }
}

std::uint64_t AritySchedule::arity(std::uint64_t level, std::uint64_t index, std::uint64_t n) const {
  if (level < 1 || index < 1) throw std::out_of_range("levels and indices are 1-based");
  if (kind_ == ScheduleKind::Live) return live_arity(level, index);
  StoredFormula f = stored_formula(n);
  return level <= f.level_arity.size() ? f.level_arity[level - 1] : f.rest;
}

std::optional<std::uint64_t> AritySchedule::uniform_arity(std::uint64_t level, std::uint64_t n) const {
  auto finite = [](std::uint64_t a) -> std::optional<std::uint64_t> {
    if (a == kUnbounded) return std::nullopt;
    return a;
  };
  if (kind_ == ScheduleKind::Stored) return finite(arity(level, 1, n));
  switch (params_.mode) {
    case Mode::M1:
    case Mode::M3:
    case Mode::WC:
    case Mode::B1:
    case Mode::B2:
    case Mode::B3:
      return finite(live_arity(level, 1));
    case Mode::M6L:
      if (level >= 2) return params_.c;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::optional<std::uint64_t> AritySchedule::declared_height(std::uint64_t n) const {
  if (reduced_) return std::nullopt;
  switch (params_.mode) {
    case Mode::M1:
    case Mode::M2L:
      return 2;
    case Mode::M4L:
      return params_.h;
    case Mode::M2S:
    case Mode::M4S:
    case Mode::M5S:
    case Mode::M6S:
      return stored_formula(n).height;
    default:
      return std::nullopt;
  }
}

ArityCursor AritySchedule::cursor(std::uint64_t level, std::uint64_t n) const {
  if (!reduced_ && params_.mode == Mode::M4L && !params_.group_size) return ArityCursor(params_.h, level);
  if (kind_ == ScheduleKind::Stored) {
    std::uint64_t a = arity(level, 1, n);
    return ArityCursor([a](std::uint64_t) { return a; });
  }
  return ArityCursor([self = *this, level](std::uint64_t j) { return self.live_arity(level, j); });
}

AritySchedule make_schedule(const ModeParams& params) { return AritySchedule(params); }

AritySchedule reduce_processors(const AritySchedule& schedule, std::uint64_t n,
                                const std::function<std::uint64_t(std::uint64_t)>& ideal_time) {
  if (schedule.interleaved()) throw ConfigError("processor reduction needs a non-interleaved schedule");
  auto fanout = schedule.uniform_arity(2, n);
  if (!fanout) {
    throw ConfigError(std::string(schedule.kind() == ScheduleKind::Live ? "live" : "stored") +
                      " schedule of mode " + std::string(mode_name(schedule.params().mode)) +
                      " has no uniform fanout above level 1");
  }
  if (*fanout < 2) throw ConfigError("processor reduction needs a fanout >= 2");
  std::uint64_t t = std::max<std::uint64_t>(1, ideal_time(n));
  std::uint64_t nodes = ceil_div(std::max<std::uint64_t>(n, 1), t);
  std::uint64_t levels_above = ceil_log(*fanout, nodes);
  for (std::uint64_t level = 3; level <= levels_above + 1; ++level) {
    if (schedule.uniform_arity(level, n) != fanout) {
      throw ConfigError("processor reduction needs the same fanout on every level above level 1");
    }
  }
  return AritySchedule::reduced(schedule.params(), t, *fanout);
}

}  // namespace treehash
