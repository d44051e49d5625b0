#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "capsfx/fixed_point.hpp"

namespace capsfx {

/// One randomized sweep: `count` vectors of length `n`, components uniform on
/// the quantized grid inside [lo, hi), reproducible from the seed.
struct SweepSpec {
  int n = 10;
  int count = 1000;
  double lo = -8.0;
  double hi = 8.0;
  std::uint64_t seed = 1;
  QFormat format = kDefaultFormat;
};

/// Mean-error-distance statistics of an approximation against its oracle:
/// per vector take the max and average component error (absolute, and
/// relative with an epsilon-guarded denominator), then average over the
/// sweep. argmax_agreement is the fraction of vectors whose reported argmax
/// matches the oracle's.
struct ErrorReport {
  double mean_max_abs = 0.0;
  double mean_avg_abs = 0.0;
  double mean_max_rel = 0.0;
  double mean_avg_rel = 0.0;
  double argmax_agreement = 1.0;
  long overflow_count = 0;
};

std::vector<std::vector<FxValue>> gen_vectors(const SweepSpec& spec);

/// FNV-1a digest over the raw words of a generated sweep; locks goldens.
std::uint64_t sweep_checksum(const SweepSpec& spec);

struct ApproxOutput {
  std::vector<FxValue> values;
  bool overflow = false;
};

using ExactFn = std::function<std::vector<double>(std::span<const double>)>;
using ApproxFn = std::function<ApproxOutput(std::span<const FxValue>)>;

ErrorReport med_report(const ExactFn& exact, const ApproxFn& approx, const SweepSpec& spec);

/// Report context carried into the serialized forms.
struct ReportMeta {
  std::string evaluation;  // "softmax" | "squash" | "routing"
  std::string variant;
};

/// Flat `key = value` text, one line per field, `%.17g` reals so repeated
/// runs are byte-identical.
std::string report_to_kv(const ErrorReport& report, const ReportMeta& meta,
                         const SweepSpec& spec);

/// Single JSON object with the same field names.
std::string report_to_json(const ErrorReport& report, const ReportMeta& meta,
                           const SweepSpec& spec);

/// Lowest-index argmax over doubles / raw fixed-point words.
std::size_t argmax_real(std::span<const double> y);
std::size_t argmax_fx(std::span<const FxValue> y);

}  // namespace capsfx
