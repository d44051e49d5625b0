#include "capsfx/squash.hpp"

#include <algorithm>
#include <cmath>

#include "capsfx/rng.hpp"

namespace capsfx {

const char* to_string(SquashVariant v) {
  switch (v) {
    case SquashVariant::kExact: return "exact";
    case SquashVariant::kNorm: return "norm";
    case SquashVariant::kExp: return "exp";
    case SquashVariant::kPow2: return "pow2";
  }
  return "?";
}

SquashVariant parse_squash_variant(const std::string& name) {
  if (name == "exact") return SquashVariant::kExact;
  if (name == "norm") return SquashVariant::kNorm;
  if (name == "exp") return SquashVariant::kExp;
  if (name == "pow2") return SquashVariant::kPow2;
  throw std::invalid_argument("unknown squash variant '" + name + "'");
}

LambdaTable LambdaTable::defaults() {
  // calibrate_lambda(n) with default sample count and seed.
  return LambdaTable{{
      {4, 0.2751742770200547},
      {8, 0.23313678444903818},
      {16, 0.19156689830037371},
      {32, 0.15194000118768336},
  }};
}

double LambdaTable::at(int length) const {
  auto it = values.find(length);
  if (it == values.end()) {
    throw std::invalid_argument("LambdaTable: no entry for length " + std::to_string(length));
  }
  return it->second;
}

double calibrate_lambda(int length, int samples, std::uint64_t seed) {
  if (length < 2 || samples < 1) {
    throw std::invalid_argument("calibrate_lambda: need length >= 2 and samples >= 1");
  }
  // Precompute per-sample (max, rest_sum, norm); the objective is convex
  // piecewise-linear in lambda, so golden-section converges.
  std::vector<double> max_abs(samples), rest(samples), norm(samples);
  SplitMix64 rng(seed + static_cast<std::uint64_t>(length));
  for (int s = 0; s < samples; ++s) {
    double mx = 0.0, sum = 0.0, sq = 0.0;
    for (int i = 0; i < length; ++i) {
      const double v = std::fabs(rng.uniform(-1.0, 1.0));
      mx = std::max(mx, v);
      sum += v;
      sq += v * v;
    }
    max_abs[s] = mx;
    rest[s] = sum - mx;
    norm[s] = std::sqrt(sq);
  }
  const auto objective = [&](double lambda) {
    double total = 0.0;
    for (int s = 0; s < samples; ++s) {
      if (norm[s] == 0.0) continue;
      total += std::fabs(max_abs[s] + lambda * rest[s] - norm[s]) / norm[s];
    }
    return total / samples;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  for (int it = 0; it < 120; ++it) {
    if (fa < fb) {
      hi = b; b = a; fb = fa;
      a = hi - phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a; a = b; fa = fb;
      b = lo + phi * (hi - lo);
      fb = objective(b);
    }
  }
  return (lo + hi) / 2.0;
}

std::vector<double> squash_exact(std::span<const double> x) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  std::vector<double> y(x.size(), 0.0);
  if (sq == 0.0) return y;  // continuous limit at the origin
  const double norm = std::sqrt(sq);
  const double scale = norm / (1.0 + sq);  // == (sq / (1 + sq)) / norm
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * scale;
  return y;
}

double squash_coeff_exact(double t) { return t / (1.0 + t * t); }

NormResult norm_chaudhuri(std::span<const FxValue> x, const FxValue& lambda) {
  if (x.empty()) {
    throw std::invalid_argument("norm_chaudhuri: empty input");
  }
  const QFormat& fmt = x.front().format();
  OverflowFlag flag;
  const QFormat acc_fmt = fmt.widened(ceil_log2(static_cast<int>(x.size())));

  FxValue sum = fx_zero(acc_fmt);
  FxValue max_abs = fx_zero(fmt);
  for (const FxValue& v : x) {
    require_same_format(v, x.front());
    const FxValue a = fx_abs(v, &flag);
    sum = fx_add(sum, fx_convert(a, acc_fmt), &flag);
    if (a.raw() > max_abs.raw()) max_abs = a;
  }
  const FxValue max_wide = fx_convert(max_abs, acc_fmt);
  const FxValue others = fx_sub(sum, max_wide, &flag);
  const FxValue lambda_wide = fx_convert(lambda, acc_fmt, RoundMode::kTruncate, &flag);
  const FxValue scaled = fx_mul(lambda_wide, others, &flag);
  const FxValue total = fx_add(max_wide, scaled, &flag);
  return NormResult{fx_convert(total, fmt, RoundMode::kTruncate, &flag), flag.triggered()};
}

NormResult norm_sqrt_lut(std::span<const FxValue> x, const Lut& sqrt_lo,
                         const Lut& sqrt_hi, const QFormat& acc_fmt) {
  if (x.empty()) {
    throw std::invalid_argument("norm_sqrt_lut: empty input");
  }
  OverflowFlag flag;
  FxValue sum = fx_zero(acc_fmt);
  for (const FxValue& v : x) {
    require_same_format(v, x.front());
    sum = fx_add(sum, fx_mul_to(v, v, acc_fmt, &flag), &flag);
  }
  const Lut& table = sum.to_real() < sqrt_lo.domain_hi() ? sqrt_lo : sqrt_hi;
  return NormResult{table.lookup(sum), flag.triggered()};
}

SquashImpl::SquashImpl(SquashVariant variant, SquashOptions options)
    : variant_(variant), options_(std::move(options)) {
  const QFormat& fmt = options_.format;
  const double t_br = options_.breakpoint;
  if (!(t_br > 0.0) || t_br >= options_.coeff_domain_hi) {
    throw std::invalid_argument("SquashImpl: breakpoint must lie in (0, coeff_domain_hi)");
  }
  if (options_.max_length < 1) {
    throw std::invalid_argument("SquashImpl: max_length must be positive");
  }
  if (variant_ == SquashVariant::kExact) return;

  coeff_hi_ = Lut::build(squash_coeff_exact, t_br, options_.coeff_domain_hi,
                         options_.coeff_index_bits, fmt);
  if (variant_ == SquashVariant::kNorm) {
    for (const auto& [len, lambda] : options_.lambda.values) {
      if (!(lambda > 0.0) || lambda > 1.0) {
        throw std::invalid_argument("SquashImpl: lambda for length " + std::to_string(len) +
                                    " must lie in (0, 1]");
      }
    }
    coeff_lo_ = Lut::build(squash_coeff_exact, 0.0, t_br, options_.coeff_index_bits, fmt);
  } else {
    if (!(options_.sqrt_domain_hi > 1.0)) {
      throw std::invalid_argument("SquashImpl: sqrt_domain_hi must exceed 1");
    }
    sqrt_lo_ = Lut::build([](double s) { return std::sqrt(s); }, 0.0, 1.0,
                          options_.sqrt_index_bits, fmt);
    sqrt_hi_ = Lut::build([](double s) { return std::sqrt(s); }, 1.0,
                          options_.sqrt_domain_hi, options_.sqrt_index_bits, fmt);
    validate_breakpoint();
  }
}

void SquashImpl::validate_breakpoint() const {
  // The range-1 coefficient must keep t * coeff(t) bounded by one on the
  // whole grid below the breakpoint.
  const QFormat& fmt = options_.format;
  const std::int64_t limit = static_cast<std::int64_t>(
      std::ceil(options_.breakpoint * std::exp2(fmt.frac_bits())));
  for (std::int64_t raw = 0; raw < limit && raw <= fmt.raw_max(); ++raw) {
    const FxValue t = FxValue::from_raw(static_cast<std::int32_t>(raw), fmt);
    if (t.to_real() >= options_.breakpoint) break;
    const FxValue c = coeff(t);
    if (t.to_real() * c.to_real() > 1.0) {
      throw std::invalid_argument("SquashImpl: breakpoint too high, t * coeff(t) exceeds 1 at t = " +
                                  std::to_string(t.to_real()));
    }
  }
}

QFormat SquashImpl::square_acc_format() const {
  const QFormat& fmt = options_.format;
  // Squares double the integer width; the sum adds log2(length) on top.
  const int extra = fmt.integer_bits() + ceil_log2(options_.max_length);
  return fmt.widened(extra);
}

const Lut& SquashImpl::coeff_range2() const {
  if (!coeff_hi_) throw std::logic_error("coeff_range2: exact squash has no tables");
  return *coeff_hi_;
}

const Lut& SquashImpl::coeff_range1() const {
  if (!coeff_lo_) throw std::logic_error("coeff_range1: only the norm variant has one");
  return *coeff_lo_;
}

const Lut& SquashImpl::sqrt_range1() const {
  if (!sqrt_lo_) throw std::logic_error("sqrt_range1: only exp/pow2 variants have one");
  return *sqrt_lo_;
}

const Lut& SquashImpl::sqrt_range2() const {
  if (!sqrt_hi_) throw std::logic_error("sqrt_range2: only exp/pow2 variants have one");
  return *sqrt_hi_;
}

FxValue SquashImpl::coeff(const FxValue& t, OverflowFlag* flag) const {
  if (t.raw() < 0) {
    throw std::domain_error("SquashImpl::coeff: norm argument must be nonnegative");
  }
  const QFormat& fmt = options_.format;
  if (variant_ == SquashVariant::kExact) {
    return FxValue::from_real(squash_coeff_exact(t.to_real()), fmt);
  }
  const bool range1 = t.to_real() < options_.breakpoint;
  switch (variant_) {
    case SquashVariant::kNorm:
      return range1 ? coeff_lo_->lookup(t) : coeff_hi_->lookup(t);
    case SquashVariant::kExp: {
      if (!range1) return coeff_hi_->lookup(t);
      const FxValue e = exp_natural(fx_neg(t, flag), flag);
      return fx_sub(fx_const(1.0, fmt), e, flag);
    }
    default: {  // kPow2
      if (!range1) return coeff_hi_->lookup(t);
      const FxValue p = pow2_linear(fx_neg(t, flag), flag);
      return fx_sub(fx_const(1.0, fmt), p, flag);
    }
  }
}

NormResult SquashImpl::norm(std::span<const FxValue> x) const {
  if (variant_ == SquashVariant::kExact) {
    double sq = 0.0;
    for (const FxValue& v : x) sq += v.to_real() * v.to_real();
    return NormResult{FxValue::from_real(std::sqrt(sq), options_.format)};
  }
  if (variant_ == SquashVariant::kNorm) {
    const FxValue lambda =
        fx_const(options_.lambda.at(static_cast<int>(x.size())), options_.format);
    return norm_chaudhuri(x, lambda);
  }
  return norm_sqrt_lut(x, *sqrt_lo_, *sqrt_hi_, square_acc_format());
}

SquashResult SquashImpl::apply(std::span<const FxValue> x) const {
  if (x.empty()) {
    throw std::invalid_argument("SquashImpl::apply: empty input");
  }
  const QFormat& fmt = options_.format;
  for (const FxValue& v : x) {
    if (!(v.format() == fmt)) {
      throw std::invalid_argument("SquashImpl::apply: input format mismatch");
    }
  }
  if (static_cast<int>(x.size()) > options_.max_length) {
    throw std::invalid_argument("SquashImpl::apply: input longer than max_length");
  }

  SquashResult result;
  result.values.reserve(x.size());

  if (variant_ == SquashVariant::kExact) {
    std::vector<double> reals(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) reals[i] = x[i].to_real();
    for (double y : squash_exact(reals)) {
      result.values.push_back(FxValue::from_real(y, fmt));
    }
    return result;
  }

  // Zero input short-circuits to zero output before any norm machinery runs.
  const bool all_zero =
      std::all_of(x.begin(), x.end(), [](const FxValue& v) { return v.raw() == 0; });
  if (all_zero) {
    result.values.assign(x.size(), fx_zero(fmt));
    return result;
  }

  OverflowFlag flag;
  const NormResult t = norm(x);
  if (t.overflow) flag.mark();
  const FxValue c = coeff(t.value, &flag);
  for (const FxValue& v : x) {
    result.values.push_back(fx_mul(v, c, &flag));
  }
  result.overflow = flag.triggered();
  return result;
}

}  // namespace capsfx
