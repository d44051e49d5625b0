#pragma once

#include "capsfx/fixed_point.hpp"
#include "capsfx/lut.hpp"

namespace capsfx {

/// x split as integer_part + fraction with fraction in [0, 1).
struct Pow2Split {
  int integer_part;
  FxValue fraction;
};

/// Positive x split as 2^exponent * mantissa with mantissa in [1, 2).
struct Log2Split {
  int exponent;
  FxValue mantissa;
};

Pow2Split split_pow2_arg(const FxValue& x);
Log2Split split_log2_arg(const FxValue& x);  // throws std::domain_error for x <= 0

/// 2^x approximated as 2^i * (1 + f): bus-arrange the fraction onto 1.f, then
/// shift by the integer part. Exact at integer arguments, saturates on
/// left-shift overflow, truncates on right shifts.
FxValue pow2_linear(const FxValue& x, OverflowFlag* flag = nullptr);

/// log2(x) approximated as exponent + (mantissa - 1), the linear fit of
/// log2 on [1, 2). Exact at powers of two. Throws for x <= 0.
FxValue log2_linear(const FxValue& x);

/// e^x as pow2_linear(x * log2(e)) with the constant quantized to the
/// datapath format (the constant-multiplier stage of the exp unit).
FxValue exp_natural(const FxValue& x, OverflowFlag* flag = nullptr);

/// ln(x) as ln(2) * log2_linear(x), constant quantized likewise.
FxValue ln_approx(const FxValue& x);

/// n1 / n2 carried out in the log domain: subtract the two log2_linear
/// values and raise back with pow2_linear. Both operands must be positive;
/// the result lands in n1's format.
FxValue div_log_domain(const FxValue& n1, const FxValue& n2, OverflowFlag* flag = nullptr);

/// Bit allocation for the two-table exponent decomposition
/// x = a + b + c: a the (clamped) integer part, b the top `frac_high_bits`
/// fraction bits, c the remaining low fraction bits.
struct TaylorSplit {
  int frac_high_bits = 3;
  int int_min = -16;
  int int_max = 0;
};

/// The two exponent tables: one entry per integer in the clamp window for
/// e^a, and 2^frac_high_bits entries for e^b over [0, 1).
struct TaylorExpTables {
  Lut ea;
  Lut eb;

  static TaylorExpTables make(const TaylorSplit& split, const QFormat& fmt);
};

/// e^x ~= e^a * e^b * (1 + c), two sequential datapath multiplies. Integer
/// parts outside the clamp window saturate to the boundary table entry.
FxValue exp_taylor(const FxValue& x, const TaylorSplit& split,
                   const TaylorExpTables& tables, OverflowFlag* flag = nullptr);

}  // namespace capsfx
