#include "capsfx/kernels.hpp"

#include <cmath>
#include <numbers>

namespace capsfx {

Pow2Split split_pow2_arg(const FxValue& x) {
  const int f = x.format().frac_bits();
  const std::int32_t ipart = x.raw() >> f;
  const std::int32_t frac_raw = x.raw() & ((std::int32_t{1} << f) - 1);
  return Pow2Split{ipart, FxValue::from_raw(frac_raw, x.format())};
}

Log2Split split_log2_arg(const FxValue& x) {
  const int w = leading_one_detect(x);  // throws for x <= 0
  return Log2Split{w, fx_shift(x, -w)};
}

FxValue pow2_linear(const FxValue& x, OverflowFlag* flag) {
  const QFormat& fmt = x.format();
  const Pow2Split split = split_pow2_arg(x);
  // 1 + f needs one integer bit; degenerate formats saturate here.
  const std::int64_t one_plus = (std::int64_t{1} << fmt.frac_bits()) + split.fraction.raw();
  const FxValue mant =
      FxValue::from_raw(detail::saturate_raw(one_plus, fmt, flag), fmt);
  return fx_shift(mant, split.integer_part, flag);
}

FxValue log2_linear(const FxValue& x) {
  const QFormat& fmt = x.format();
  const Log2Split split = split_log2_arg(x);
  const std::int64_t mant_minus_one =
      std::int64_t{split.mantissa.raw()} - (std::int64_t{1} << fmt.frac_bits());
  const std::int64_t result =
      (std::int64_t{split.exponent} << fmt.frac_bits()) + mant_minus_one;
  return FxValue::from_raw(detail::saturate_raw(result, fmt, nullptr), fmt);
}

FxValue exp_natural(const FxValue& x, OverflowFlag* flag) {
  const FxValue log2e = fx_const(std::numbers::log2e, x.format());
  return pow2_linear(fx_mul(x, log2e, flag), flag);
}

FxValue ln_approx(const FxValue& x) {
  const FxValue ln2 = fx_const(std::numbers::ln2, x.format());
  return fx_mul(ln2, log2_linear(x));
}

FxValue div_log_domain(const FxValue& n1, const FxValue& n2, OverflowFlag* flag) {
  const FxValue l1 = log2_linear(n1);
  const FxValue l2 = log2_linear(n2);
  const FxValue l2_local = fx_convert(l2, n1.format(), RoundMode::kTruncate, flag);
  return pow2_linear(fx_sub(l1, l2_local, flag), flag);
}

TaylorExpTables TaylorExpTables::make(const TaylorSplit& split, const QFormat& fmt) {
  if (split.frac_high_bits < 1 || split.frac_high_bits > fmt.frac_bits()) {
    throw std::invalid_argument("TaylorSplit: frac_high_bits must be in 1..frac_bits");
  }
  if (split.int_min > split.int_max) {
    throw std::invalid_argument("TaylorSplit: int_min must not exceed int_max");
  }
  const double fmin = fmt.min_value();
  const double fmax = fmt.max_value();
  if (split.int_min < fmin || split.int_max > fmax) {
    throw std::invalid_argument("TaylorSplit: clamp window outside format range");
  }
  // Table domain: the smallest power-of-two span of integers ending at
  // int_max, so every integer in the clamp window is a node.
  const int span = split.int_max - split.int_min + 1;
  const int bits = std::max(1, ceil_log2(span));
  const double hi = static_cast<double>(split.int_max) + 1.0;
  const double lo = hi - std::exp2(bits);
  Lut ea = Lut::build([](double a) { return std::exp(a); }, lo, hi, bits, fmt);
  Lut eb = Lut::build([](double b) { return std::exp(b); }, 0.0, 1.0,
                      split.frac_high_bits, fmt);
  return TaylorExpTables{std::move(ea), std::move(eb)};
}

FxValue exp_taylor(const FxValue& x, const TaylorSplit& split,
                   const TaylorExpTables& tables, OverflowFlag* flag) {
  const QFormat& fmt = x.format();
  const int f = fmt.frac_bits();
  const int hb = split.frac_high_bits;
  if (hb < 1 || hb > f) {
    throw std::invalid_argument("exp_taylor: frac_high_bits must be in 1..frac_bits");
  }

  std::int32_t a = x.raw() >> f;
  if (a < split.int_min) a = split.int_min;
  if (a > split.int_max) a = split.int_max;

  const std::int32_t frac_raw = x.raw() & ((std::int32_t{1} << f) - 1);
  const std::int32_t b_index = frac_raw >> (f - hb);
  const std::int32_t c_raw = frac_raw & ((std::int32_t{1} << (f - hb)) - 1);

  const FxValue ea = tables.ea.lookup(FxValue::from_raw(a << f, fmt));
  const FxValue eb = tables.eb.lookup(FxValue::from_raw(b_index << (f - hb), fmt));
  const std::int64_t one_plus_c = (std::int64_t{1} << f) + c_raw;
  const FxValue tail =
      FxValue::from_raw(detail::saturate_raw(one_plus_c, fmt, flag), fmt);

  return fx_mul(fx_mul(ea, eb, flag), tail, flag);
}

}  // namespace capsfx
