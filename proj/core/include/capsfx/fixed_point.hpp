#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace capsfx {

/// Rounding behavior when a real value is mapped onto the fixed-point grid.
/// Datapath-internal bit drops always truncate; conversions from the real
/// domain default to round-to-nearest-even.
enum class RoundMode {
  kNearestEven,
  kTruncate,  // toward -inf, i.e. plain bit dropping on two's complement
};

/// Signed two's complement fixed-point format: `total_bits` bits of storage,
/// `frac_bits` of them below the binary point. Representable range is
/// [-2^(total-1-frac), 2^(total-1-frac) - 2^-frac] with resolution 2^-frac.
class QFormat {
 public:
  constexpr QFormat(int total_bits, int frac_bits)
      : total_(static_cast<std::int8_t>(total_bits)),
        frac_(static_cast<std::int8_t>(frac_bits)) {
    if (total_bits < 4 || total_bits > 32 || frac_bits < 0 ||
        frac_bits >= total_bits) {
      throw std::invalid_argument("QFormat: need 4 <= total <= 32 and 0 <= frac < total");
    }
  }

  constexpr int total_bits() const { return total_; }
  constexpr int frac_bits() const { return frac_; }
  constexpr int integer_bits() const { return total_ - 1 - frac_; }

  constexpr std::int32_t raw_max() const {
    return static_cast<std::int32_t>((std::int64_t{1} << (total_ - 1)) - 1);
  }
  constexpr std::int32_t raw_min() const {
    return static_cast<std::int32_t>(-(std::int64_t{1} << (total_ - 1)));
  }

  double resolution() const { return std::exp2(-frac_); }
  double max_value() const { return static_cast<double>(raw_max()) * resolution(); }
  double min_value() const { return static_cast<double>(raw_min()) * resolution(); }

  /// Same resolution with `extra_int_bits` more headroom, capped at 32 total
  /// bits. Models the widened accumulator words of the datapaths.
  constexpr QFormat widened(int extra_int_bits) const {
    int t = total_ + extra_int_bits;
    return QFormat(t > 32 ? 32 : t, frac_);
  }

  constexpr bool operator==(const QFormat&) const = default;

  std::string to_string() const;          // "Q16.10"
  static QFormat parse(const std::string& text);

 private:
  std::int8_t total_;
  std::int8_t frac_;
};

inline constexpr QFormat kDefaultFormat{16, 10};

/// Sticky saturation indicator threaded through the datapath; any operation
/// that clamps marks it. Pipelines surface it as result metadata instead of
/// silently returning clipped values.
class OverflowFlag {
 public:
  void mark() noexcept { set_ = true; }
  bool triggered() const noexcept { return set_; }
  void clear() noexcept { set_ = false; }

 private:
  bool set_ = false;
};

namespace detail {
inline std::int32_t saturate_raw(std::int64_t raw, const QFormat& fmt,
                                 OverflowFlag* flag) {
  if (raw > fmt.raw_max()) {
    if (flag) flag->mark();
    return fmt.raw_max();
  }
  if (raw < fmt.raw_min()) {
    if (flag) flag->mark();
    return fmt.raw_min();
  }
  return static_cast<std::int32_t>(raw);
}

// Round-half-to-even on an exactly scaled double. Assumes finite input.
inline double round_half_even(double scaled) {
  const double lower = std::floor(scaled);
  const double diff = scaled - lower;
  if (diff > 0.5) return lower + 1.0;
  if (diff < 0.5) return lower;
  return (std::fmod(lower, 2.0) == 0.0) ? lower : lower + 1.0;
}
}  // namespace detail

/// One fixed-point datapath word: a raw two's complement integer plus its
/// format. Immutable; real value is raw * 2^-frac exactly.
class FxValue {
 public:
  static FxValue from_raw(std::int32_t raw, const QFormat& fmt) {
    if (raw > fmt.raw_max() || raw < fmt.raw_min()) {
      throw std::invalid_argument("FxValue::from_raw: raw outside format range");
    }
    return FxValue(raw, fmt);
  }

  /// Quantize a real value. Saturates at the format bounds, never wraps.
  static FxValue from_real(double r, const QFormat& fmt,
                           RoundMode mode = RoundMode::kNearestEven,
                           OverflowFlag* flag = nullptr) {
    if (std::isnan(r)) {
      throw std::domain_error("FxValue::from_real: NaN is not quantizable");
    }
    const double scaled = r * std::exp2(fmt.frac_bits());
    double rounded;
    if (std::isinf(scaled)) {
      rounded = scaled;  // saturation below handles the sign
    } else if (mode == RoundMode::kNearestEven) {
      rounded = detail::round_half_even(scaled);
    } else {
      rounded = std::floor(scaled);
    }
    std::int64_t raw;
    if (rounded >= static_cast<double>(fmt.raw_max())) {
      raw = static_cast<std::int64_t>(fmt.raw_max()) + (rounded > fmt.raw_max() ? 1 : 0);
    } else if (rounded <= static_cast<double>(fmt.raw_min())) {
      raw = static_cast<std::int64_t>(fmt.raw_min()) - (rounded < fmt.raw_min() ? 1 : 0);
    } else {
      raw = static_cast<std::int64_t>(rounded);
    }
    return FxValue(detail::saturate_raw(raw, fmt, flag), fmt);
  }

  std::int32_t raw() const { return raw_; }
  const QFormat& format() const { return fmt_; }
  double to_real() const { return static_cast<double>(raw_) * std::exp2(-fmt_.frac_bits()); }

  bool operator==(const FxValue&) const = default;

 private:
  FxValue(std::int32_t raw, const QFormat& fmt) : raw_(raw), fmt_(fmt) {}

  std::int32_t raw_;
  QFormat fmt_;
};

/// Quantized constant, shorthand for nearest-even conversion.
inline FxValue fx_const(double r, const QFormat& fmt) {
  return FxValue::from_real(r, fmt);
}

inline void require_same_format(const FxValue& a, const FxValue& b) {
  if (!(a.format() == b.format())) {
    throw std::invalid_argument("fixed-point operands have mismatched formats");
  }
}

/// Exact sum, then saturation.
inline FxValue fx_add(const FxValue& a, const FxValue& b, OverflowFlag* flag = nullptr) {
  require_same_format(a, b);
  const std::int64_t sum = std::int64_t{a.raw()} + b.raw();
  return FxValue::from_raw(detail::saturate_raw(sum, a.format(), flag), a.format());
}

inline FxValue fx_sub(const FxValue& a, const FxValue& b, OverflowFlag* flag = nullptr) {
  require_same_format(a, b);
  const std::int64_t diff = std::int64_t{a.raw()} - b.raw();
  return FxValue::from_raw(detail::saturate_raw(diff, a.format(), flag), a.format());
}

/// Full double-width product, then the low frac_bits are dropped the way a
/// hardware multiplier truncates (toward -inf on the raw word), then
/// saturation into `out_fmt`. `out_fmt` must share the fraction width.
inline FxValue fx_mul_to(const FxValue& a, const FxValue& b, const QFormat& out_fmt,
                         OverflowFlag* flag = nullptr) {
  require_same_format(a, b);
  if (out_fmt.frac_bits() != a.format().frac_bits()) {
    throw std::invalid_argument("fx_mul_to: output format must keep frac_bits");
  }
  const std::int64_t product = std::int64_t{a.raw()} * b.raw();
  const std::int64_t truncated = product >> a.format().frac_bits();
  return FxValue::from_raw(detail::saturate_raw(truncated, out_fmt, flag), out_fmt);
}

inline FxValue fx_mul(const FxValue& a, const FxValue& b, OverflowFlag* flag = nullptr) {
  return fx_mul_to(a, b, a.format(), flag);
}

/// Value scaled by 2^k. Right shifts truncate toward -inf on the raw integer
/// (arithmetic shift); left shifts saturate.
inline FxValue fx_shift(const FxValue& a, int k, OverflowFlag* flag = nullptr) {
  const QFormat& fmt = a.format();
  if (k >= 0) {
    if (k > 62) k = 62;
    const std::int64_t shifted = std::int64_t{a.raw()} << k;
    return FxValue::from_raw(detail::saturate_raw(shifted, fmt, flag), fmt);
  }
  int s = -k;
  if (s > 62) s = 62;
  const std::int64_t shifted = std::int64_t{a.raw()} >> s;
  return FxValue::from_raw(static_cast<std::int32_t>(shifted), fmt);
}

/// Re-formats a value. Fraction-width changes round per `mode`; narrowing
/// saturates.
inline FxValue fx_convert(const FxValue& a, const QFormat& out_fmt,
                          RoundMode mode = RoundMode::kTruncate,
                          OverflowFlag* flag = nullptr) {
  const int df = out_fmt.frac_bits() - a.format().frac_bits();
  std::int64_t raw = a.raw();
  if (df > 0) {
    raw <<= df;
  } else if (df < 0) {
    const int s = -df;
    const std::int64_t mask = (std::int64_t{1} << s) - 1;
    const std::int64_t rem = raw & mask;
    const std::int64_t shifted = raw >> s;
    if (mode == RoundMode::kTruncate) {
      raw = shifted;
    } else {
      const std::int64_t half = std::int64_t{1} << (s - 1);
      if (rem > half || (rem == half && (shifted & 1))) {
        raw = shifted + 1;
      } else {
        raw = shifted;
      }
    }
  }
  return FxValue::from_raw(detail::saturate_raw(raw, out_fmt, flag), out_fmt);
}

inline FxValue fx_abs(const FxValue& a, OverflowFlag* flag = nullptr) {
  const std::int64_t mag = a.raw() < 0 ? -std::int64_t{a.raw()} : a.raw();
  return FxValue::from_raw(detail::saturate_raw(mag, a.format(), flag), a.format());
}

inline FxValue fx_neg(const FxValue& a, OverflowFlag* flag = nullptr) {
  return FxValue::from_raw(detail::saturate_raw(-std::int64_t{a.raw()}, a.format(), flag),
                           a.format());
}

inline FxValue fx_zero(const QFormat& fmt) { return FxValue::from_raw(0, fmt); }

/// Position of the leading one: returns w with 2^w <= value < 2^(w+1).
/// w is negative for purely fractional values. Input must be positive.
inline int leading_one_detect(const FxValue& a) {
  if (a.raw() <= 0) {
    throw std::domain_error("leading_one_detect: input must be positive");
  }
  const int msb = std::bit_width(static_cast<std::uint32_t>(a.raw())) - 1;
  return msb - a.format().frac_bits();
}

inline int ceil_log2(int n) {
  if (n <= 1) return 0;
  return std::bit_width(static_cast<std::uint32_t>(n - 1));
}

}  // namespace capsfx
