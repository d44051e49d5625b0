#include "capsfx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "capsfx/rng.hpp"

namespace capsfx {

namespace {

void validate_spec(const SweepSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("SweepSpec: n must be positive");
  if (spec.count < 1) throw std::invalid_argument("SweepSpec: count must be positive");
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("SweepSpec: need lo < hi");
}

struct RawRange {
  std::int64_t lo;
  std::uint64_t span;
};

RawRange raw_range(const SweepSpec& spec) {
  const double scale = std::exp2(spec.format.frac_bits());
  std::int64_t raw_lo = static_cast<std::int64_t>(std::ceil(spec.lo * scale));
  std::int64_t raw_hi = static_cast<std::int64_t>(std::ceil(spec.hi * scale));
  raw_lo = std::max<std::int64_t>(raw_lo, spec.format.raw_min());
  raw_hi = std::min<std::int64_t>(raw_hi, std::int64_t{spec.format.raw_max()} + 1);
  if (raw_lo >= raw_hi) {
    throw std::invalid_argument("SweepSpec: range does not intersect the format grid");
  }
  return RawRange{raw_lo, static_cast<std::uint64_t>(raw_hi - raw_lo)};
}

std::vector<FxValue> next_vector(SplitMix64& rng, const RawRange& range,
                                 const SweepSpec& spec) {
  std::vector<FxValue> v;
  v.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const std::int64_t raw = range.lo + static_cast<std::int64_t>(rng.below(range.span));
    v.push_back(FxValue::from_raw(static_cast<std::int32_t>(raw), spec.format));
  }
  return v;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::vector<FxValue>> gen_vectors(const SweepSpec& spec) {
  validate_spec(spec);
  const RawRange range = raw_range(spec);
  SplitMix64 rng(spec.seed);
  std::vector<std::vector<FxValue>> out;
  out.reserve(spec.count);
  for (int k = 0; k < spec.count; ++k) {
    out.push_back(next_vector(rng, range, spec));
  }
  return out;
}

std::uint64_t sweep_checksum(const SweepSpec& spec) {
  validate_spec(spec);
  const RawRange range = raw_range(spec);
  SplitMix64 rng(spec.seed);
  Fnv1a64 hash;
  for (int k = 0; k < spec.count; ++k) {
    for (const FxValue& v : next_vector(rng, range, spec)) {
      hash.feed(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.raw())));
    }
  }
  return hash.digest();
}

std::size_t argmax_real(std::span<const double> y) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] > y[best]) best = i;  // ties keep the lowest index
  }
  return best;
}

std::size_t argmax_fx(std::span<const FxValue> y) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i].raw() > y[best].raw()) best = i;
  }
  return best;
}

ErrorReport med_report(const ExactFn& exact, const ApproxFn& approx, const SweepSpec& spec) {
  validate_spec(spec);
  const RawRange range = raw_range(spec);
  const double eps = spec.format.resolution();
  SplitMix64 rng(spec.seed);

  ErrorReport report;
  double sum_max_abs = 0.0, sum_avg_abs = 0.0;
  double sum_max_rel = 0.0, sum_avg_rel = 0.0;
  long agreements = 0;

  for (int k = 0; k < spec.count; ++k) {
    const std::vector<FxValue> x = next_vector(rng, range, spec);
    std::vector<double> x_real(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x_real[i] = x[i].to_real();

    const std::vector<double> y_exact = exact(x_real);
    const ApproxOutput y_approx = approx(x);
    if (y_exact.size() != x.size() || y_approx.values.size() != x.size()) {
      throw std::invalid_argument("med_report: function output length mismatch");
    }
    if (y_approx.overflow) ++report.overflow_count;

    double max_abs = 0.0, avg_abs = 0.0, max_rel = 0.0, avg_rel = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double abs_err = std::fabs(y_approx.values[i].to_real() - y_exact[i]);
      const double rel_err = abs_err / std::max(std::fabs(y_exact[i]), eps);
      max_abs = std::max(max_abs, abs_err);
      max_rel = std::max(max_rel, rel_err);
      avg_abs += abs_err;
      avg_rel += rel_err;
    }
    avg_abs /= static_cast<double>(x.size());
    avg_rel /= static_cast<double>(x.size());

    sum_max_abs += max_abs;
    sum_avg_abs += avg_abs;
    sum_max_rel += max_rel;
    sum_avg_rel += avg_rel;
    if (argmax_real(y_exact) == argmax_fx(y_approx.values)) ++agreements;
  }

  const double count = static_cast<double>(spec.count);
  report.mean_max_abs = sum_max_abs / count;
  report.mean_avg_abs = sum_avg_abs / count;
  report.mean_max_rel = sum_max_rel / count;
  report.mean_avg_rel = sum_avg_rel / count;
  report.argmax_agreement = static_cast<double>(agreements) / count;
  return report;
}

std::string report_to_kv(const ErrorReport& report, const ReportMeta& meta,
                         const SweepSpec& spec) {
  std::string out;
  out += "evaluation = " + meta.evaluation + "\n";
  out += "variant = " + meta.variant + "\n";
  out += "format = " + spec.format.to_string() + "\n";
  out += "n = " + std::to_string(spec.n) + "\n";
  out += "count = " + std::to_string(spec.count) + "\n";
  out += "seed = " + std::to_string(spec.seed) + "\n";
  out += "range_lo = " + format_real(spec.lo) + "\n";
  out += "range_hi = " + format_real(spec.hi) + "\n";
  out += "mean_max_abs = " + format_real(report.mean_max_abs) + "\n";
  out += "mean_avg_abs = " + format_real(report.mean_avg_abs) + "\n";
  out += "mean_max_rel = " + format_real(report.mean_max_rel) + "\n";
  out += "mean_avg_rel = " + format_real(report.mean_avg_rel) + "\n";
  out += "argmax_agreement = " + format_real(report.argmax_agreement) + "\n";
  out += "overflow_count = " + std::to_string(report.overflow_count) + "\n";
  return out;
}

std::string report_to_json(const ErrorReport& report, const ReportMeta& meta,
                           const SweepSpec& spec) {
  nlohmann::json j;
  j["evaluation"] = meta.evaluation;
  j["variant"] = meta.variant;
  j["format"] = spec.format.to_string();
  j["n"] = spec.n;
  j["count"] = spec.count;
  j["seed"] = spec.seed;
  j["range_lo"] = spec.lo;
  j["range_hi"] = spec.hi;
  j["mean_max_abs"] = report.mean_max_abs;
  j["mean_avg_abs"] = report.mean_avg_abs;
  j["mean_max_rel"] = report.mean_max_rel;
  j["mean_avg_rel"] = report.mean_avg_rel;
  j["argmax_agreement"] = report.argmax_agreement;
  j["overflow_count"] = report.overflow_count;
  return j.dump(2) + "\n";
}

}  // namespace capsfx
