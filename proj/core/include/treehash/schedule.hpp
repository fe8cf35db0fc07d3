#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treehash {

enum class Mode { M1, M2S, M2L, M3, M4S, M5S, M6S, M4L, M5L, M6L, WC, B1, B2, B3 };

/// "4S", "M4S", "m4s" all parse to Mode::M4S. Throws ConfigError.
Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);
const std::vector<Mode>& all_modes();

/// Live modes never need the message length; stored modes do.
bool is_live(Mode mode);

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 2;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// Accepts "1/2", "0.25", "3". Throws ConfigError.
  static Rational parse(std::string_view text);
  std::string to_string() const;
};

/// Every tunable of the tree modes. Fields that do not apply to `mode` are ignored.
struct ModeParams {
  Mode mode = Mode::M3;
  Rational epsilon{1, 2};  // 4S, 5S, 5L
  std::uint64_t c = 2;     // 5L, 6S, 6L base
  std::uint64_t q = 4;     // 2S, 2L lanes
  std::uint64_t B = 8;     // 1: leaf chunk size in blocks
  std::uint64_t h = 2;     // 4L height
  std::uint64_t k = 4;     // WC arity
  std::uint64_t d = 1;     // sequential threshold
  /// 4L group size n_I; enables the height-2 SIMD group variant.
  std::optional<std::uint64_t> group_size;
  /// Interleaving slice in bits for 2L (default 512) and the 4L group variant (default 64).
  std::optional<std::uint64_t> interleave_bits;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  /// 1/epsilon for 4S.
  std::uint64_t height_4s() const;
};

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

enum class ScheduleKind { Stored, Live };

/// Iterates u(i,1), u(i,2), ... for one level, left to right.
class ArityCursor {
 public:
  ArityCursor(std::function<std::uint64_t(std::uint64_t)> by_index);
  explicit ArityCursor(std::uint64_t h4l, std::uint64_t level);
  ArityCursor(const ArityCursor& other);
  ArityCursor& operator=(const ArityCursor& other);
  ArityCursor(ArityCursor&&) noexcept;
  ArityCursor& operator=(ArityCursor&&) noexcept;
  ~ArityCursor();

  std::uint64_t next();

 private:
  struct Mode4LState;
  std::function<std::uint64_t(std::uint64_t)> by_index_;
  std::unique_ptr<Mode4LState> m4l_;
  std::uint64_t index_ = 0;
};

/// The arity structure u_{i,j} of a mode. Levels and indices are 1-based.
class AritySchedule {
 public:
  explicit AritySchedule(ModeParams params);

  ScheduleKind kind() const noexcept { return kind_; }
  const ModeParams& params() const noexcept { return params_; }

  /// u(i,j) for a message of n blocks (live schedules ignore n). kUnbounded
  /// marks a node that takes everything that is left (a root).
  std::uint64_t arity(std::uint64_t level, std::uint64_t index, std::uint64_t n) const;
  /// The arity shared by every node of `level`, when it does not depend on j.
  std::optional<std::uint64_t> uniform_arity(std::uint64_t level, std::uint64_t n) const;
  /// Height stated by the mode formula, if the mode has one.
  std::optional<std::uint64_t> declared_height(std::uint64_t n) const;
  ArityCursor cursor(std::uint64_t level, std::uint64_t n) const;

  /// True when level 1 distributes data round-robin (2L, 4L group variant).
  bool interleaved() const noexcept;
  bool is_reduced() const noexcept { return reduced_.has_value(); }

  /// Schedule of the processor-reduction transform: level 1 of arity
  /// `leaf_arity`, every level above of arity `fanout`.
  static AritySchedule reduced(ModeParams origin, std::uint64_t leaf_arity, std::uint64_t fanout);

 private:
  struct Reduced {
    std::uint64_t leaf_arity;
    std::uint64_t fanout;
  };
  struct StoredFormula {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> level_arity;  // levels 1.. of a per-level schedule
    std::uint64_t rest = 0;                  // arity of levels past the vector
    std::optional<std::uint64_t> height;
  };
  StoredFormula stored_formula(std::uint64_t n) const;
  std::uint64_t live_arity(std::uint64_t level, std::uint64_t index) const;

  ModeParams params_;
  ScheduleKind kind_;
  std::optional<Reduced> reduced_;
};

AritySchedule make_schedule(const ModeParams& params);

/// Arity of node (i,j) in the unpruned Mode 4L tree of height h, from the
/// recursive definition. The root level reports kUnbounded. O(j) time.
std::uint64_t arity_4l(std::uint64_t h, std::uint64_t level, std::uint64_t index);

/// Closed-form arity for h = 4 using the triangular / tetrahedral root
/// k1, k2 formulas. Kept as an independent cross-check of arity_4l.
std::uint64_t arity_4l_closed_form_h4(std::uint64_t level, std::uint64_t index);

/// Binomial closed form C(x+h-2, h-1) + C(x+h-1, h) for the block capacity of
/// an h-level 4L tree with root arity x. Agrees with n_blocks_4l for h = 2 only.
std::uint64_t n_max_4l(std::uint64_t x, std::uint64_t h);

/// Blocks covered by a full h-level 4L tree whose root has arity x, by
/// summing over the tree: children of an arity-k node have arities 2..k+1.
std::uint64_t n_blocks_4l(std::uint64_t x, std::uint64_t h);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Processor-reduction transform: level-1 arity T(n), then the schedule's
/// uniform fanout a over ceil(n/T(n)) base nodes. Throws ConfigError when the
/// schedule has no uniform finite fanout above level 1.
AritySchedule reduce_processors(const AritySchedule& schedule, std::uint64_t n,
                                const std::function<std::uint64_t(std::uint64_t)>& ideal_time);

// Exact integer helpers shared by the formulas.
std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b);
/// Smallest e >= 0 with base^e >= x (for x >= 1): ceil(log_base x).
std::uint64_t ceil_log(std::uint64_t base, std::uint64_t x);
/// Smallest r >= 1 with r^k >= x: ceil(x^(1/k)).
std::uint64_t ceil_root(std::uint64_t x, std::uint64_t k);
/// floor(log2 x) for x >= 1.
std::uint64_t floor_log2(std::uint64_t x);
/// ceil of a real computed in floating point; values within 1e-9 of an
/// integer snap to that integer so near-integral results are reproducible.
std::uint64_t checked_ceil(long double x);

}  // namespace treehash
