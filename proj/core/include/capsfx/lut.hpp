#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capsfx/fixed_point.hpp"

namespace capsfx {

class LutParseError : public std::runtime_error {
 public:
  LutParseError(int line, const std::string& what)
      : std::runtime_error("LUT parse error at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Direct-mapped lookup table over a half-open domain [lo, hi), 2^index_bits
/// entries sampled at segment left edges. No interpolation: a lookup clamps
/// into the domain and returns the stored entry of its segment, exactly like
/// an addressed hardware table.
class Lut {
 public:
  using Oracle = std::function<double(double)>;

  Lut(double domain_lo, double domain_hi, int index_bits, const QFormat& fmt,
      std::vector<FxValue> entries);

  /// Sample `oracle` at the 2^index_bits segment left edges and quantize
  /// nearest-even. Throws if the oracle is non-finite on a node.
  static Lut build(const Oracle& oracle, double domain_lo, double domain_hi,
                   int index_bits, const QFormat& fmt);

  FxValue lookup(const FxValue& x) const;

  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }
  double step() const { return step_; }
  int index_bits() const { return index_bits_; }
  const QFormat& format() const { return fmt_; }
  std::size_t size() const { return entries_.size(); }
  const FxValue& entry(std::size_t i) const { return entries_.at(i); }
  double node(std::size_t i) const { return lo_ + static_cast<double>(i) * step_; }

  /// Worst-case lookup error against the sampled function: the largest
  /// in-segment variation plus half a quantization step. `samples_per_segment`
  /// controls how densely each segment is probed.
  double max_error_bound(const Oracle& oracle, int samples_per_segment = 16) const;

  /// Line-oriented text form, bit-exact round-trip:
  ///   LUT v1 <index_bits> <total_bits> <frac_bits> <domain_lo> <domain_hi>
  /// followed by one lowercase two's complement hex raw value per line.
  std::string dump() const;
  static Lut load(const std::string& text);

  void dump_file(const std::string& path) const;
  static Lut load_file(const std::string& path);

 private:
  double lo_;
  double hi_;
  double step_;
  int index_bits_;
  QFormat fmt_;
  std::vector<FxValue> entries_;
};

}  // namespace capsfx
