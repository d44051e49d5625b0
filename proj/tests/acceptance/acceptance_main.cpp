// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit when any
// criterion fails. `--print-measured` reports the measured golden values
// (sweep checksums, report texts, agreement fractions) instead of asserting,
// which is how the locked constants below were produced.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "capsfx/analysis.hpp"
#include "capsfx/config.hpp"
#include "capsfx/routing.hpp"
#include "capsfx/rng.hpp"
#include "oracle/reference.hpp"

#ifndef CAPSFX_CLI_PATH
#define CAPSFX_CLI_PATH ""
#endif

namespace {

using namespace capsfx;
namespace fs = std::filesystem;

const QFormat q16_10{16, 10};
const refmodel::Grid g16_10{16, 10};

bool g_print_measured = false;
int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// Locked golden values, produced by a certified run of --print-measured.
// ---------------------------------------------------------------------------

constexpr std::uint64_t kSweepChecksum =
    0x0390d2dd830b3964ull;  // seed 1, n 10, count 1000, Q16.10

const char* kGoldenSoftmaxB2Report =
    "evaluation = softmax\n"
    "variant = b2\n"
    "format = Q16.10\n"
    "n = 10\n"
    "count = 1000\n"
    "seed = 1\n"
    "range_lo = -8\n"
    "range_hi = 8\n"
    "mean_max_abs = 0.068035057927523901\n"
    "mean_avg_abs = 0.017216586264874524\n"
    "mean_max_rel = 3.9758947234997923\n"
    "mean_avg_rel = 1.1525392732734638\n"
    "argmax_agreement = 1\n"
    "overflow_count = 0\n";

const char* kGoldenSquashPow2Report =
    "evaluation = squash\n"
    "variant = pow2\n"
    "format = Q16.10\n"
    "n = 16\n"
    "count = 1000\n"
    "seed = 1\n"
    "range_lo = -1\n"
    "range_hi = 1\n"
    "mean_max_abs = 0.0043136866180660391\n"
    "mean_avg_abs = 0.0021015244774929146\n"
    "mean_max_rel = 0.085110779478380486\n"
    "mean_avg_rel = 0.016667269802381347\n"
    "argmax_agreement = 0.997\n"
    "overflow_count = 0\n";

struct AgreementGolden {
  const char* softmax;
  const char* squash;
  double locked;
};

AgreementGolden kAgreementGoldens[] = {
    {"taylor", "exact", 0.95499999999999996},
    {"lnu", "exact", 0.95699999999999996},
    {"b2", "exact", 0.93700000000000006},
    {"exact", "norm", 0.52700000000000002},
    {"exact", "exp", 0.91400000000000003},
    {"exact", "pow2", 0.92100000000000004},
    {"b2", "pow2", 0.91200000000000003},
};

// ---------------------------------------------------------------------------
// Criterion 2: kernel exactness points, exhaustive at 12-bit formats.
// ---------------------------------------------------------------------------
bool criterion_kernel_exactness(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  long checked = 0;
  for (const QFormat fmt : {QFormat(12, 6), QFormat(12, 8)}) {
    const int f = fmt.frac_bits();
    const FxValue one = fx_const(1.0, fmt);
    for (std::int32_t raw = fmt.raw_min(); raw <= fmt.raw_max(); ++raw) {
      const FxValue x = FxValue::from_raw(raw, fmt);
      if (raw % (1 << f) == 0) {
        const int u = raw >> f;
        const double expect =
            u >= -f ? std::min(std::exp2(u), fmt.max_value()) : 0.0;
        if (pow2_linear(x).to_real() != expect) {
          detail = "pow2_linear not exact at integer " + std::to_string(u);
          return false;
        }
      }
      if (raw > 0) {
        if ((raw & (raw - 1)) == 0) {
          const int w = leading_one_detect(x);
          const double expect = std::clamp(static_cast<double>(w), fmt.min_value(),
                                           fmt.max_value());
          if (log2_linear(x).to_real() != expect) {
            detail = "log2_linear not exact at 2^" + std::to_string(w);
            return false;
          }
        }
        if (div_log_domain(x, x).raw() != one.raw()) {
          detail = "div_log_domain(x,x) != 1 at raw " + std::to_string(raw);
          return false;
        }
        ++checked;
      }
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  detail = std::to_string(checked) + " positive grid points, " + std::to_string(elapsed) + " ms";
  return elapsed < 60000;
}

// ---------------------------------------------------------------------------
// Criterion 3: kernel fit error bounds over exhaustive sweeps at Q12.8.
// ---------------------------------------------------------------------------
bool criterion_kernel_error_bounds(std::string& detail) {
  const QFormat fmt{12, 8};
  double worst_log = 0.0;
  for (std::int32_t raw = 1; raw <= fmt.raw_max(); ++raw) {
    const FxValue x = FxValue::from_raw(raw, fmt);
    const double rel =
        std::fabs(std::exp2(log2_linear(x).to_real()) - x.to_real()) / x.to_real();
    worst_log = std::max(worst_log, rel);
  }
  // pow2 sweep stays inside the window where neither underflow (x < -4)
  // nor saturation (x >= 2) masks the fit itself.
  double worst_pow2 = 0.0;
  for (std::int32_t raw = -4 * 256; raw < 2 * 256; ++raw) {
    const FxValue x = FxValue::from_raw(raw, fmt);
    const double truth = std::exp2(x.to_real());
    worst_pow2 = std::max(worst_pow2, std::fabs(pow2_linear(x).to_real() - truth) / truth);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "log2 fit %.4f%% <= 6.3%%, pow2 fit %.4f%% <= 6.4%%",
                100.0 * worst_log, 100.0 * worst_pow2);
  detail = buf;
  return worst_log <= 0.062 + 0.001 && worst_pow2 <= 0.063 + 0.001;
}

// ---------------------------------------------------------------------------
// Criterion 4: the b2 hand example at fine formats.
// ---------------------------------------------------------------------------
bool criterion_b2_hand_example(std::string& detail) {
  for (const QFormat fmt : {QFormat(16, 10), QFormat(20, 14)}) {
    SoftmaxOptions opt;
    opt.format = fmt;
    const SoftmaxImpl b2(SoftmaxVariant::kB2, opt);
    const std::vector<FxValue> x{fx_const(1.0, fmt), fx_const(0.0, fmt)};
    const SoftmaxResult r = b2.apply(x);
    const double tol = 2.0 * fmt.resolution();
    if (std::fabs(r.values[0].to_real() - 0.75) > tol ||
        std::fabs(r.values[1].to_real() - 0.375) > tol) {
      detail = "expected [0.75, 0.375] at " + fmt.to_string();
      return false;
    }
  }
  detail = "[0.75, 0.375] within 2 ulp at Q16.10 and Q20.14";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 5: order preservation and separated-argmax agreement.
// ---------------------------------------------------------------------------
bool order_preserved(const std::vector<FxValue>& x, const std::vector<FxValue>& y) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return x[a].raw() > x[b].raw(); });
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (y[idx[k - 1]].raw() < y[idx[k]].raw()) return false;
  }
  return true;
}

bool criterion_order_argmax(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const double step = q16_10.resolution();
  long separated = 0;
  for (const SoftmaxVariant variant :
       {SoftmaxVariant::kTaylor, SoftmaxVariant::kLnu, SoftmaxVariant::kB2}) {
    const SoftmaxImpl impl(variant);
    for (const int n : {10, 32, 128}) {
      const SweepSpec spec{n, 1000, -8.0, 8.0, 1, q16_10};
      for (const auto& x : gen_vectors(spec)) {
        const SoftmaxResult r = impl.apply(x);
        if (!order_preserved(x, r.values)) {
          detail = std::string("order violated for ") + to_string(variant) + " at n=" +
                   std::to_string(n);
          return false;
        }
        // Exact argmax on the quantized inputs.
        std::vector<double> xv(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].to_real();
        std::vector<double> sorted(xv);
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        if (sorted[0] - sorted[1] < 2.0 * step) continue;
        ++separated;
        const std::size_t winner = argmax_real(xv);
        const std::size_t best = argmax_fx(r.values);
        if (r.values[winner].raw() != r.values[best].raw()) {
          detail = std::string("argmax lost for ") + to_string(variant) + " at n=" +
                   std::to_string(n);
          return false;
        }
      }
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  detail = "9000 vectors, " + std::to_string(separated) + " with separated top-2, " +
           std::to_string(elapsed) + " ms";
  return elapsed < 60000;
}

// ---------------------------------------------------------------------------
// Criterion 6: squash safety. Random sweeps at the default format plus an
// exhaustive length-4 sweep at an 8-bit format over the unit-scale component
// box, covering every sign pattern through a per-component worst-case bound.
// ---------------------------------------------------------------------------
double eps_lut_of(const SquashImpl& impl) {
  return impl.variant() == SquashVariant::kExact
             ? 0.0
             : impl.coeff_range2().max_error_bound(squash_coeff_exact);
}

bool criterion_squash_safety(std::string& detail) {
  // Part 1: seeded random vectors per length at Q16.10.
  for (const SquashVariant variant :
       {SquashVariant::kExact, SquashVariant::kNorm, SquashVariant::kExp,
        SquashVariant::kPow2}) {
    const SquashImpl impl(variant);
    const double eps = eps_lut_of(impl);
    for (const int len : {4, 8, 16, 32}) {
      const SweepSpec spec{len, 1000, -1.0, 1.0, 1, q16_10};
      for (const auto& x : gen_vectors(spec)) {
        const SquashResult r = impl.apply(x);
        double sq = 0.0;
        for (const FxValue& v : r.values) sq += v.to_real() * v.to_real();
        const double norm = std::sqrt(sq);
        if (variant == SquashVariant::kExact ? !(norm < 1.0) : !(norm <= 1.0 + eps)) {
          detail = std::string(to_string(variant)) + " norm " + std::to_string(norm) +
                   " out of bound at len " + std::to_string(len);
          return false;
        }
        const double q = q16_10.resolution();
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (r.values[i].raw() != 0 &&
              static_cast<std::int64_t>(r.values[i].raw()) * x[i].raw() <= 0) {
            detail = std::string(to_string(variant)) + " flipped a component sign";
            return false;
          }
          for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double cross = r.values[i].to_real() * x[j].to_real() -
                                 r.values[j].to_real() * x[i].to_real();
            const double tol =
                q * (std::fabs(x[i].to_real()) + std::fabs(x[j].to_real())) + 1e-12;
            if (std::fabs(cross) > tol) {
              detail = std::string(to_string(variant)) + " broke collinearity";
              return false;
            }
          }
        }
      }
    }
  }

  // Part 2: exhaustive length-4 magnitude multisets at Q8.6 over the
  // unit-scale box [-1, 1]. The norm and coefficient paths depend only on
  // component magnitudes; the bound below uses the worst |output| over both
  // signs of every component, so all sign patterns are covered.
  const QFormat fmt8{8, 6};
  const int f = fmt8.frac_bits();
  const std::int32_t m_max = 1 << f;  // |raw| for -1.0
  SquashOptions opt8;
  opt8.format = fmt8;
  opt8.max_length = 4;

  for (const SquashVariant variant :
       {SquashVariant::kExact, SquashVariant::kNorm, SquashVariant::kExp,
        SquashVariant::kPow2}) {
    const SquashImpl impl(variant, opt8);
    const double eps = eps_lut_of(impl);
    const double bound = variant == SquashVariant::kExact ? 1.0 : 1.0 + eps;
    std::vector<FxValue> x;
    for (std::int32_t m0 = 0; m0 <= m_max; ++m0) {
      for (std::int32_t m1 = 0; m1 <= m0; ++m1) {
        for (std::int32_t m2 = 0; m2 <= m1; ++m2) {
          for (std::int32_t m3 = 0; m3 <= m2; ++m3) {
            if (m0 == 0) continue;  // zero vector maps to zero
            x.clear();
            for (const std::int32_t m : {m0, m1, m2, m3}) {
              x.push_back(FxValue::from_raw(-m, fmt8));
            }
            const SquashResult r = impl.apply(x);
            // With all components negative, |y_i| = ceil(m_i c) on the raw
            // grid, which dominates the floor(m_i c) a positive sign would
            // give. Summing these covers every sign pattern.
            double worst_sq = 0.0;
            bool sign_ok = true;
            for (std::size_t i = 0; i < 4; ++i) {
              if (r.values[i].raw() > 0) sign_ok = false;
              const double mag = std::fabs(r.values[i].to_real());
              worst_sq += mag * mag;
            }
            if (!sign_ok) {
              detail = std::string(to_string(variant)) + " produced a positive output for a negative input";
              return false;
            }
            if (std::sqrt(worst_sq) > bound) {
              detail = std::string(to_string(variant)) + " exhaustive bound broken at [" +
                       std::to_string(m0) + "," + std::to_string(m1) + "," +
                       std::to_string(m2) + "," + std::to_string(m3) + "]";
              return false;
            }
          }
        }
      }
    }
  }
  detail = "4x1000 random vectors per variant at Q16.10; exhaustive length-4 multisets at Q8.6";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 7: the pow2 coefficient coincidence at t = 1.
// ---------------------------------------------------------------------------
bool criterion_coincidence(std::string& detail) {
  for (const QFormat fmt : {QFormat(16, 10), QFormat(12, 8)}) {
    SquashOptions opt;
    opt.format = fmt;
    const SquashImpl impl(SquashVariant::kPow2, opt);
    const double c = impl.coeff(fx_const(1.0, fmt)).to_real();
    if (std::fabs(c - 0.5) > fmt.resolution()) {
      detail = "coeff(1) = " + std::to_string(c) + " at " + fmt.to_string();
      return false;
    }
  }
  detail = "coeff(1) == 0.5 within one step at Q16.10 and Q12.8";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 8: bit-for-bit equivalence with the double-domain reference on
// 10,000 seeded inputs per unit.
// ---------------------------------------------------------------------------
bool criterion_oracle_equivalence(std::string& detail) {
  SplitMix64 rng(2024);
  const TaylorSplit split{};
  const TaylorExpTables tables = TaylorExpTables::make(split, q16_10);
  const refmodel::TaylorSplit ref_split{};
  const refmodel::LutRef ea = refmodel::LutRef::build(
      [](double v) { return std::exp(v); }, -31.0, 1.0, 5, g16_10);
  const refmodel::LutRef eb = refmodel::LutRef::build(
      [](double v) { return std::exp(v); }, 0.0, 1.0, 3, g16_10);

  for (int i = 0; i < 10000; ++i) {
    const std::int32_t raw = static_cast<std::int32_t>(
        static_cast<std::int64_t>(rng.below(65536)) - 32768);
    const FxValue x = FxValue::from_raw(raw, q16_10);
    const double xv = x.to_real();
    if (pow2_linear(x).to_real() != refmodel::pow2_linear(xv, g16_10)) {
      detail = "pow2_linear diverged at raw " + std::to_string(raw);
      return false;
    }
    if (exp_natural(x).to_real() != refmodel::exp_natural(xv, g16_10)) {
      detail = "exp_natural diverged at raw " + std::to_string(raw);
      return false;
    }
    if (exp_taylor(x, split, tables).to_real() !=
        refmodel::exp_taylor(xv, ref_split, ea, eb, g16_10)) {
      detail = "exp_taylor diverged at raw " + std::to_string(raw);
      return false;
    }
    if (raw > 0) {
      if (log2_linear(x).to_real() != refmodel::log2_linear(xv, g16_10) ||
          ln_approx(x).to_real() != refmodel::ln_approx(xv, g16_10)) {
        detail = "log unit diverged at raw " + std::to_string(raw);
        return false;
      }
      const FxValue x2 = FxValue::from_raw(1 + static_cast<std::int32_t>(rng.below(32767)),
                                           q16_10);
      if (div_log_domain(x, x2).to_real() !=
          refmodel::div_log_domain(xv, g16_10, x2.to_real(), g16_10)) {
        detail = "div_log_domain diverged";
        return false;
      }
    }
  }

  // Vector pipelines: 10,000 seeded vectors each.
  const SoftmaxImpl sm_taylor(SoftmaxVariant::kTaylor);
  const SoftmaxImpl sm_lnu(SoftmaxVariant::kLnu);
  const SoftmaxImpl sm_b2(SoftmaxVariant::kB2);
  const SweepSpec sm_spec{10, 10000, -8.0, 8.0, 77, q16_10};
  for (const auto& x : gen_vectors(sm_spec)) {
    std::vector<double> xv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].to_real();
    const auto rt = sm_taylor.apply(x);
    const auto rl = sm_lnu.apply(x);
    const auto rb = sm_b2.apply(x);
    const auto et = refmodel::softmax_taylor(xv, ref_split, g16_10);
    const auto el = refmodel::softmax_lnu(xv, g16_10);
    const auto eb2 = refmodel::softmax_b2(xv, g16_10);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (rt.values[i].to_real() != et[i] || rl.values[i].to_real() != el[i] ||
          rb.values[i].to_real() != eb2[i]) {
        detail = "softmax pipeline diverged";
        return false;
      }
    }
  }

  for (const SquashVariant variant :
       {SquashVariant::kNorm, SquashVariant::kExp, SquashVariant::kPow2}) {
    const SquashImpl impl(variant);
    refmodel::SquashRef ref;
    ref.variant = variant == SquashVariant::kNorm ? refmodel::SquashRef::Variant::kNorm
                  : variant == SquashVariant::kExp ? refmodel::SquashRef::Variant::kExp
                                                   : refmodel::SquashRef::Variant::kPow2;
    ref.grid = g16_10;
    const QFormat acc = impl.square_acc_format();
    ref.acc = refmodel::Grid{acc.total_bits(), acc.frac_bits()};
    ref.breakpoint = impl.options().breakpoint;
    const auto coeff_fn = [](double t) { return t / (1.0 + t * t); };
    const auto sqrt_fn = [](double s) { return std::sqrt(s); };
    ref.coeff_hi = refmodel::LutRef::build(coeff_fn, 1.0, 8.0, 8, g16_10);
    if (variant == SquashVariant::kNorm) {
      ref.lambda = impl.options().lambda.at(16);
      ref.coeff_lo = refmodel::LutRef::build(coeff_fn, 0.0, 1.0, 8, g16_10);
    } else {
      ref.sqrt_lo = refmodel::LutRef::build(sqrt_fn, 0.0, 1.0, 8, g16_10);
      ref.sqrt_hi = refmodel::LutRef::build(sqrt_fn, 1.0, 65.0, 8, g16_10);
    }
    const SweepSpec sq_spec{16, 10000, -1.0, 1.0, 78, q16_10};
    for (const auto& x : gen_vectors(sq_spec)) {
      std::vector<double> xv(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].to_real();
      const auto out = impl.apply(x);
      const auto expect = ref.apply(xv);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (out.values[i].to_real() != expect[i]) {
          detail = std::string("squash-") + to_string(variant) + " pipeline diverged";
          return false;
        }
      }
    }
  }
  detail = "10k inputs per scalar unit, 10k vectors per pipeline, bit-exact";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 9: MED harness reproducibility through the CLI, locked goldens.
// ---------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CAPSFX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool criterion_med_reproducibility(std::string& detail, std::string& measured_b2,
                                   std::string& measured_pow2) {
  if (std::string(CAPSFX_CLI_PATH).empty()) {
    detail = "CLI not built";
    return false;
  }
  const fs::path dir = fs::temp_directory_path() / "capsfx_acceptance";
  fs::create_directories(dir);

  const struct {
    const char* subcommand;
    const char* variant;
  } runs[] = {{"eval-softmax", "taylor"}, {"eval-softmax", "lnu"}, {"eval-softmax", "b2"},
              {"eval-squash", "norm"},    {"eval-squash", "exp"}, {"eval-squash", "pow2"}};

  for (const auto& r : runs) {
    const fs::path a = dir / (std::string(r.variant) + "_a.txt");
    const fs::path b = dir / (std::string(r.variant) + "_b.txt");
    const std::string args = std::string(r.subcommand) + " --variant " + r.variant +
                             " --count 1000 --seed 1 --out ";
    if (run_cli(args + a.string()) != 0 || run_cli(args + b.string()) != 0) {
      detail = std::string("CLI run failed for ") + r.variant;
      return false;
    }
    if (slurp(a) != slurp(b) ||
        slurp(fs::path(a.string() + ".json")) != slurp(fs::path(b.string() + ".json"))) {
      detail = std::string("reports not byte-identical for ") + r.variant;
      return false;
    }
  }

  measured_b2 = slurp(dir / "b2_a.txt");
  measured_pow2 = slurp(dir / "pow2_a.txt");
  if (!g_print_measured) {
    if (measured_b2 != kGoldenSoftmaxB2Report) {
      detail = "softmax-b2 report drifted from the locked golden";
      return false;
    }
    if (measured_pow2 != kGoldenSquashPow2Report) {
      detail = "squash-pow2 report drifted from the locked golden";
      return false;
    }
  }
  detail = "6 variants byte-identical across runs; b2/pow2 goldens match";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 10: routing sanity against the double-precision oracle.
// ---------------------------------------------------------------------------
bool criterion_routing_sanity(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();

  // Coupling rows must stay normalized at the default format.
  {
    const RoutingConfig cfg{32, 10, 16, 3, SoftmaxImpl(SoftmaxVariant::kExact),
                            SquashImpl(SquashVariant::kExact)};
    SplitMix64 rng(0x51);
    for (int trial = 0; trial < 50; ++trial) {
      const Predictions p = Predictions::random(32, 10, 16, q16_10, rng.next());
      const RoutingResult r = dynamic_routing(p, cfg);
      for (const auto& iteration : r.coupling_history) {
        for (const auto& row : iteration) {
          double sum = 0.0;
          for (const FxValue& c : row) sum += c.to_real();
          if (std::fabs(sum - 1.0) > 10.0 * q16_10.resolution()) {
            detail = "coupling row sum " + std::to_string(sum);
            return false;
          }
        }
      }
    }
  }

  // Argmax agreement with the pure double-precision oracle. Random tensors
  // leave top-2 norm margins down to ~2e-4, below Q16.10 noise, so this part
  // runs at a fraction width that resolves them.
  const QFormat fine{20, 14};
  SoftmaxOptions so;
  so.format = fine;
  SquashOptions qo;
  qo.format = fine;
  const RoutingConfig cfg{32, 10, 16, 3, SoftmaxImpl(SoftmaxVariant::kExact, so),
                          SquashImpl(SquashVariant::kExact, qo)};
  SplitMix64 rng(0x0DD5);
  int matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Predictions p = Predictions::random(32, 10, 16, fine, rng.next());
    const RoutingResult r = dynamic_routing(p, cfg);
    std::vector<std::vector<std::vector<double>>> u(
        32, std::vector<std::vector<double>>(10, std::vector<double>(16)));
    for (int i = 0; i < 32; ++i) {
      for (int j = 0; j < 10; ++j) {
        for (int d = 0; d < 16; ++d) u[i][j][d] = p.at(i, j)[d].to_real();
      }
    }
    if (routing_argmax(r) == refmodel::argmax_norm(refmodel::routing_exact(u, 3))) {
      ++matches;
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  detail = std::to_string(matches) + "/100 argmax matches, " + std::to_string(elapsed) + " ms";
  return matches == 100 && elapsed < 60000;
}

// ---------------------------------------------------------------------------
// Criterion 11: routing-agreement proxy with locked regression thresholds.
// ---------------------------------------------------------------------------
bool criterion_routing_agreement(std::string& detail, std::string& measured) {
  const RunConfig cfg = RunConfig::defaults();
  const RoutingConfig reference =
      cfg.routing_config(SoftmaxVariant::kExact, SquashVariant::kExact);
  std::string lines;
  bool ok = true;
  for (auto& golden : kAgreementGoldens) {
    const RoutingConfig candidate = cfg.routing_config(
        parse_softmax_variant(golden.softmax), parse_squash_variant(golden.squash));
    const double agreement = routing_agreement(reference, candidate, 1000, 1);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  {\"%s\", \"%s\", %.17g},\n", golden.softmax,
                  golden.squash, agreement);
    lines += buf;
    if (!g_print_measured && agreement < golden.locked) {
      detail = std::string(golden.softmax) + "+" + golden.squash + " regressed to " +
               std::to_string(agreement);
      ok = false;
    }
  }
  measured = lines;
  if (ok && detail.empty()) detail = "7 configurations at or above locked agreement";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  g_print_measured = argc > 1 && std::string(argv[1]) == "--print-measured";

  std::string detail;

  // Criteria 2..8, 10: self-contained checks.
  detail.clear();
  const bool c2 = criterion_kernel_exactness(detail);
  report("kernel exactness points (exhaustive, 12-bit)", c2, detail);

  detail.clear();
  const bool c3 = criterion_kernel_error_bounds(detail);
  report("kernel fit error bounds", c3, detail);

  detail.clear();
  const bool c4 = criterion_b2_hand_example(detail);
  report("softmax-b2 hand example [0.75, 0.375]", c4, detail);

  detail.clear();
  const bool c5 = criterion_order_argmax(detail);
  report("softmax order and separated-argmax preservation", c5, detail);

  detail.clear();
  const bool c6 = criterion_squash_safety(detail);
  report("squash safety (norm bound, collinearity)", c6, detail);

  detail.clear();
  const bool c7 = criterion_coincidence(detail);
  report("squash-pow2 coefficient coincidence at t=1", c7, detail);

  detail.clear();
  const bool c8 = criterion_oracle_equivalence(detail);
  report("fixed-point pipelines match the double-domain reference", c8, detail);

  detail.clear();
  std::string measured_b2, measured_pow2;
  const bool c9 = criterion_med_reproducibility(detail, measured_b2, measured_pow2);
  report("MED harness reproducibility and locked goldens", c9, detail);

  detail.clear();
  const bool c10 = criterion_routing_sanity(detail);
  report("routing sanity vs double-precision oracle", c10, detail);

  detail.clear();
  std::string measured_agreements;
  const bool c11 = criterion_routing_agreement(detail, measured_agreements);
  report("routing-agreement proxy at locked thresholds", c11, detail);

  // Criterion 1 is the scope substitution: end-to-end trained-model
  // accuracies are not reproducible here; the property suites plus the
  // routing-agreement proxy stand in for them.
  report("trained-model accuracy substituted by property suites + routing proxy",
         c5 && c6 && c11, "substitution criteria all green");

  const std::uint64_t checksum = sweep_checksum(SweepSpec{10, 1000, -8.0, 8.0, 1, q16_10});
  if (g_print_measured) {
    std::printf("\n--- measured goldens ---\n");
    std::printf("sweep checksum: 0x%llx\n", static_cast<unsigned long long>(checksum));
    std::printf("softmax-b2 report:\n%s", measured_b2.c_str());
    std::printf("squash-pow2 report:\n%s", measured_pow2.c_str());
    std::printf("agreement table:\n%s", measured_agreements.c_str());
  } else {
    report("generated-sweep checksum matches the locked golden", checksum == kSweepChecksum,
           "");
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
