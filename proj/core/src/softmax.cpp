#include "capsfx/softmax.hpp"

#include <algorithm>
#include <cmath>

namespace capsfx {

const char* to_string(SoftmaxVariant v) {
  switch (v) {
    case SoftmaxVariant::kExact: return "exact";
    case SoftmaxVariant::kTaylor: return "taylor";
    case SoftmaxVariant::kLnu: return "lnu";
    case SoftmaxVariant::kB2: return "b2";
  }
  return "?";
}

SoftmaxVariant parse_softmax_variant(const std::string& name) {
  if (name == "exact") return SoftmaxVariant::kExact;
  if (name == "taylor") return SoftmaxVariant::kTaylor;
  if (name == "lnu") return SoftmaxVariant::kLnu;
  if (name == "b2") return SoftmaxVariant::kB2;
  throw std::invalid_argument("unknown softmax variant '" + name + "'");
}

std::vector<double> softmax_exact(std::span<const double> x) {
  if (x.size() < 2) {
    throw std::invalid_argument("softmax_exact: need at least 2 inputs");
  }
  const double m = *std::max_element(x.begin(), x.end());
  std::vector<double> y(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - m);
    sum += y[i];
  }
  for (double& v : y) v /= sum;
  return y;
}

SoftmaxImpl::SoftmaxImpl(SoftmaxVariant variant, SoftmaxOptions options)
    : variant_(variant), options_(options) {
  if (variant_ == SoftmaxVariant::kTaylor) {
    tables_ = TaylorExpTables::make(options_.taylor, options_.format);
  }
}

const TaylorExpTables& SoftmaxImpl::taylor_tables() const {
  if (!tables_) {
    throw std::logic_error("taylor_tables: not a taylor softmax");
  }
  return *tables_;
}

SoftmaxResult SoftmaxImpl::apply(std::span<const FxValue> x) const {
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("SoftmaxImpl::apply: need at least 2 inputs");
  }
  const QFormat& fmt = options_.format;
  for (const FxValue& v : x) {
    if (!(v.format() == fmt)) {
      throw std::invalid_argument("SoftmaxImpl::apply: input format mismatch");
    }
  }

  SoftmaxResult result;
  result.values.reserve(n);

  if (variant_ == SoftmaxVariant::kExact) {
    std::vector<double> reals(n);
    for (std::size_t i = 0; i < n; ++i) reals[i] = x[i].to_real();
    for (double y : softmax_exact(reals)) {
      result.values.push_back(FxValue::from_real(y, fmt));
    }
    return result;
  }

  OverflowFlag flag;

  // Input scaling stage: shift everything down by the maximum.
  std::vector<FxValue> t;
  t.reserve(n);
  if (options_.scale_inputs) {
    FxValue m = x[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (x[i].raw() > m.raw()) m = x[i];
    }
    for (std::size_t i = 0; i < n; ++i) t.push_back(fx_sub(x[i], m, &flag));
  } else {
    t.assign(x.begin(), x.end());
  }

  // Per-element exponential stage.
  std::vector<FxValue> e;
  e.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (variant_) {
      case SoftmaxVariant::kTaylor:
        e.push_back(exp_taylor(t[i], options_.taylor, *tables_, &flag));
        break;
      case SoftmaxVariant::kLnu:
        e.push_back(exp_natural(t[i], &flag));
        break;
      default:
        e.push_back(pow2_linear(t[i], &flag));
        break;
    }
  }

  // Widened accumulator, fixed ascending order.
  const QFormat acc_fmt = fmt.widened(ceil_log2(static_cast<int>(n)));
  FxValue sum = fx_zero(acc_fmt);
  for (std::size_t i = 0; i < n; ++i) {
    sum = fx_add(sum, fx_convert(e[i], acc_fmt), &flag);
  }

  switch (variant_) {
    case SoftmaxVariant::kTaylor:
      for (std::size_t i = 0; i < n; ++i) {
        // A fully underflowed exponential stays zero; the division unit only
        // sees positive dividends.
        if (e[i].raw() == 0) {
          result.values.push_back(fx_zero(fmt));
        } else {
          result.values.push_back(div_log_domain(e[i], sum, &flag));
        }
      }
      break;
    case SoftmaxVariant::kLnu: {
      const FxValue log_sum = fx_convert(ln_approx(sum), fmt, RoundMode::kTruncate, &flag);
      for (std::size_t i = 0; i < n; ++i) {
        result.values.push_back(exp_natural(fx_sub(t[i], log_sum, &flag), &flag));
      }
      break;
    }
    default: {
      const FxValue log_sum = fx_convert(log2_linear(sum), fmt, RoundMode::kTruncate, &flag);
      for (std::size_t i = 0; i < n; ++i) {
        result.values.push_back(pow2_linear(fx_sub(t[i], log_sum, &flag), &flag));
      }
      break;
    }
  }

  result.overflow = flag.triggered();
  return result;
}

}  // namespace capsfx
