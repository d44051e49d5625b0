#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capsfx/kernels.hpp"
#include "capsfx/lut.hpp"

namespace capsfx {

enum class SquashVariant { kExact, kNorm, kExp, kPow2 };

const char* to_string(SquashVariant v);
SquashVariant parse_squash_variant(const std::string& name);

/// Per-length scaling constants for the max-plus-scaled-sum norm
/// approximation. Defaults are calibrated against the double-precision norm
/// over uniform random vectors (see calibrate_lambda).
struct LambdaTable {
  std::map<int, double> values;

  static LambdaTable defaults();
  double at(int length) const;  // throws for uncovered lengths
};

/// Mean relative norm error over `samples` uniform vectors in [-1,1]^length,
/// minimized by golden-section search. Deterministic under the seed; the
/// shipped LambdaTable::defaults() values come from this with the default
/// arguments.
double calibrate_lambda(int length, int samples = 10000, std::uint64_t seed = 0x6C616D626461ull);

struct SquashOptions {
  QFormat format = kDefaultFormat;
  /// Norm breakpoint between the nonlinear range-1 coefficient and the
  /// range-2 table. Validated so that t * coeff(t) <= 1 everywhere below it.
  double breakpoint = 1.0;
  LambdaTable lambda = LambdaTable::defaults();
  int coeff_index_bits = 8;
  double coeff_domain_hi = 8.0;
  int sqrt_index_bits = 8;
  double sqrt_domain_hi = 65.0;
  /// Largest vector length the accumulators are sized for.
  int max_length = 32;
};

struct SquashResult {
  std::vector<FxValue> values;
  bool overflow = false;
};

struct NormResult {
  FxValue value;
  bool overflow = false;
};

/// Reference squash in double precision: scales x by ||x|| / (1 + ||x||^2),
/// with the zero vector mapped to zero.
std::vector<double> squash_exact(std::span<const double> x);

/// The exact squashing coefficient t / (1 + t^2).
double squash_coeff_exact(double t);

/// Max-plus-scaled-sum norm approximation:
///   |x_imax| + lambda * sum_{i != imax} |x_i|
/// via abs unit, accumulator, max unit, subtractor, scaling multiplier and
/// final adder.
NormResult norm_chaudhuri(std::span<const FxValue> x, const FxValue& lambda);

/// Square-accumulate in a widened word, then one of two direct-mapped sqrt
/// tables selected by the squared-norm range.
NormResult norm_sqrt_lut(std::span<const FxValue> x, const Lut& sqrt_lo,
                         const Lut& sqrt_hi, const QFormat& acc_fmt);

/// One squash unit. The exact oracle, or:
///  - norm: approximate norm above, coefficient from two tables.
///  - exp:  sqrt-table norm; coefficient 1 - e^-t below the breakpoint,
///          table above.
///  - pow2: same with 1 - 2^-t below the breakpoint.
class SquashImpl {
 public:
  explicit SquashImpl(SquashVariant variant, SquashOptions options = {});

  SquashResult apply(std::span<const FxValue> x) const;
  NormResult norm(std::span<const FxValue> x) const;
  FxValue coeff(const FxValue& t, OverflowFlag* flag = nullptr) const;  // t >= 0

  SquashVariant variant() const { return variant_; }
  const QFormat& format() const { return options_.format; }
  const SquashOptions& options() const { return options_; }
  const Lut& coeff_range2() const;
  const Lut& coeff_range1() const;  // norm variant only
  const Lut& sqrt_range1() const;   // exp/pow2 only
  const Lut& sqrt_range2() const;   // exp/pow2 only

  /// Accumulator format used for the squared-norm sum.
  QFormat square_acc_format() const;

 private:
  void validate_breakpoint() const;

  SquashVariant variant_;
  SquashOptions options_;
  std::optional<Lut> coeff_lo_;
  std::optional<Lut> coeff_hi_;
  std::optional<Lut> sqrt_lo_;
  std::optional<Lut> sqrt_hi_;
};

}  // namespace capsfx
