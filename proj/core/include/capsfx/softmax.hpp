#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capsfx/kernels.hpp"

namespace capsfx {

enum class SoftmaxVariant { kExact, kTaylor, kLnu, kB2 };

const char* to_string(SoftmaxVariant v);
SoftmaxVariant parse_softmax_variant(const std::string& name);

struct SoftmaxOptions {
  QFormat format = kDefaultFormat;
  /// Subtract the running maximum before exponentiation. Applied to every
  /// approximate variant so exponent arguments stay <= 0.
  bool scale_inputs = true;
  TaylorSplit taylor{};
};

struct SoftmaxResult {
  std::vector<FxValue> values;
  bool overflow = false;
};

/// Reference softmax in double precision (max-subtracted). n >= 2.
std::vector<double> softmax_exact(std::span<const double> x);

/// One softmax unit: the exact oracle or one of the three approximate
/// pipelines, fixed to a format at construction.
///
///  - taylor: two-table exponent decomposition per element, accumulate,
///    then a log-domain division per element.
///  - lnu: natural exp via constant-multiplier + pow2, natural log of the
///    sum, then exp of the difference.
///  - b2: the lnu chain with both constant multipliers removed, i.e. raw
///    pow2/log2 in place of exp/ln.
class SoftmaxImpl {
 public:
  explicit SoftmaxImpl(SoftmaxVariant variant, SoftmaxOptions options = {});

  SoftmaxResult apply(std::span<const FxValue> x) const;

  SoftmaxVariant variant() const { return variant_; }
  const QFormat& format() const { return options_.format; }
  const SoftmaxOptions& options() const { return options_; }
  const TaylorExpTables& taylor_tables() const;

 private:
  SoftmaxVariant variant_;
  SoftmaxOptions options_;
  std::optional<TaylorExpTables> tables_;  // taylor only
};

}  // namespace capsfx
