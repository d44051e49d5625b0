// capsfx command-line tool: LUT generation, mean-error-distance sweeps over
// the approximate softmax/squash units, routing-agreement studies, and
// effective-config inspection. All commands are deterministic under a fixed
// config and seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "capsfx/config.hpp"

namespace {

using namespace capsfx;

struct CommonArgs {
  std::string config_path;
  std::string fmt;
  std::string out;
};

void apply_common(const CommonArgs& args, RunConfig& cfg) {
  if (!args.config_path.empty()) cfg.merge_file(args.config_path);
  if (!args.fmt.empty()) cfg.format = QFormat::parse(args.fmt);
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("range must look like lo:hi, got '" + text + "'");
  }
  std::size_t pos = 0;
  const double lo = std::stod(text.substr(0, colon), &pos);
  if (pos != colon) throw std::invalid_argument("bad range lower bound in '" + text + "'");
  const std::string hi_text = text.substr(colon + 1);
  const double hi = std::stod(hi_text, &pos);
  if (pos != hi_text.size()) throw std::invalid_argument("bad range upper bound in '" + text + "'");
  if (!(lo < hi)) throw std::invalid_argument("range needs lo < hi");
  return {lo, hi};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

void emit_report(const ErrorReport& report, const ReportMeta& meta, const SweepSpec& spec,
                 const std::string& out_path) {
  const std::string kv = report_to_kv(report, meta, spec);
  if (out_path.empty()) {
    std::cout << kv;
    return;
  }
  write_text(out_path, kv);
  write_text(out_path + ".json", report_to_json(report, meta, spec));
  std::cout << "wrote " << out_path << " and " << out_path << ".json\n";
}

int cmd_gen_luts(const RunConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);

  const TaylorExpTables tables =
      TaylorExpTables::make(cfg.softmax_options().taylor, cfg.format);
  const SquashImpl norm_unit = cfg.make_squash(SquashVariant::kNorm);
  const SquashImpl pow2_unit = cfg.make_squash(SquashVariant::kPow2);

  const std::pair<std::string, const Lut*> files[] = {
      {"softmax_taylor_ea.lut", &tables.ea},
      {"softmax_taylor_eb.lut", &tables.eb},
      {"squash_sqrt_range1.lut", &pow2_unit.sqrt_range1()},
      {"squash_sqrt_range2.lut", &pow2_unit.sqrt_range2()},
      {"squash_coeff_range1.lut", &norm_unit.coeff_range1()},
      {"squash_coeff_range2.lut", &norm_unit.coeff_range2()},
  };
  for (const auto& [name, lut] : files) {
    const std::string path = (dir / name).string();
    lut->dump_file(path);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

int cmd_eval_softmax(const RunConfig& cfg, const std::string& out_path) {
  cfg.validate();
  const SoftmaxImpl impl = cfg.make_softmax();
  const SweepSpec spec = cfg.softmax_sweep();
  const ErrorReport report = med_report(
      [](std::span<const double> x) { return softmax_exact(x); },
      [&](std::span<const FxValue> x) {
        SoftmaxResult r = impl.apply(x);
        return ApproxOutput{std::move(r.values), r.overflow};
      },
      spec);
  emit_report(report, ReportMeta{"softmax", to_string(cfg.softmax_variant)}, spec, out_path);
  return 0;
}

int cmd_eval_squash(const RunConfig& cfg, const std::string& out_path,
                    const std::string& curve_path) {
  cfg.validate();
  const SquashImpl impl = cfg.make_squash();
  const SweepSpec spec = cfg.squash_sweep();
  const ErrorReport report = med_report(
      [](std::span<const double> x) { return squash_exact(x); },
      [&](std::span<const FxValue> x) {
        SquashResult r = impl.apply(x);
        return ApproxOutput{std::move(r.values), r.overflow};
      },
      spec);
  emit_report(report, ReportMeta{"squash", to_string(cfg.squash_variant)}, spec, out_path);

  if (!curve_path.empty()) {
    // Plot-ready squashing-coefficient curve: x, exact, approx, abs_err.
    std::string tsv = "x\texact\tapprox\tabs_err\n";
    char line[160];
    const std::int32_t limit = static_cast<std::int32_t>(
        cfg.coeff_domain_hi * std::exp2(cfg.format.frac_bits()));
    for (std::int32_t raw = 0; raw < limit && raw <= cfg.format.raw_max(); ++raw) {
      const FxValue t = FxValue::from_raw(raw, cfg.format);
      const double exact = squash_coeff_exact(t.to_real());
      const double approx = impl.coeff(t).to_real();
      std::snprintf(line, sizeof(line), "%.17g\t%.17g\t%.17g\t%.17g\n", t.to_real(), exact,
                    approx, std::fabs(approx - exact));
      tsv += line;
    }
    write_text(curve_path, tsv);
    std::cout << "wrote " << curve_path << "\n";
  }
  return 0;
}

int cmd_route_agree(const RunConfig& cfg, const std::string& out_path) {
  cfg.validate();
  const RoutingConfig reference = cfg.routing_config(SoftmaxVariant::kExact, SquashVariant::kExact);
  const RoutingConfig candidate = cfg.routing_config(cfg.softmax_variant, cfg.squash_variant);
  const double agreement = routing_agreement(reference, candidate, cfg.trials, cfg.seed);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", agreement);
  std::string kv;
  kv += "evaluation = routing\n";
  kv += "softmax = " + std::string(to_string(cfg.softmax_variant)) + "\n";
  kv += "squash = " + std::string(to_string(cfg.squash_variant)) + "\n";
  kv += "format = " + cfg.format.to_string() + "\n";
  kv += "num_lower = " + std::to_string(cfg.num_lower) + "\n";
  kv += "num_upper = " + std::to_string(cfg.num_upper) + "\n";
  kv += "dim = " + std::to_string(cfg.dim) + "\n";
  kv += "iterations = " + std::to_string(cfg.iterations) + "\n";
  kv += "trials = " + std::to_string(cfg.trials) + "\n";
  kv += "seed = " + std::to_string(cfg.seed) + "\n";
  kv += "agreement = " + std::string(buf) + "\n";
  if (out_path.empty()) {
    std::cout << kv;
  } else {
    write_text(out_path, kv);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bit-accurate fixed-point models of approximate softmax and squash units"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "config file (key = value sections)");
  app.add_option("--fmt", common.fmt, "datapath format, e.g. Q16.10");

  auto* gen = app.add_subcommand("gen-luts", "write every lookup table to files");
  std::string gen_out = ".";
  gen->add_option("--out", gen_out, "output directory");

  auto* eval_sm = app.add_subcommand("eval-softmax", "mean-error-distance sweep of a softmax unit");
  std::string sm_variant, sm_range, sm_out;
  int sm_n = -1, sm_count = -1;
  std::int64_t sm_seed = -1;
  eval_sm->add_option("--variant", sm_variant, "exact|taylor|lnu|b2");
  eval_sm->add_option("--n", sm_n, "vector length (>= 2)");
  eval_sm->add_option("--count", sm_count, "number of vectors");
  eval_sm->add_option("--seed", sm_seed, "sweep seed");
  eval_sm->add_option("--range", sm_range, "component range lo:hi");
  eval_sm->add_option("--out", sm_out, "report path (also writes <out>.json)");

  auto* eval_sq = app.add_subcommand("eval-squash", "mean-error-distance sweep of a squash unit");
  std::string sq_variant, sq_range, sq_out, sq_curve;
  int sq_n = -1, sq_count = -1;
  std::int64_t sq_seed = -1;
  eval_sq->add_option("--variant", sq_variant, "exact|norm|exp|pow2");
  eval_sq->add_option("--n", sq_n, "vector length");
  eval_sq->add_option("--count", sq_count, "number of vectors");
  eval_sq->add_option("--seed", sq_seed, "sweep seed");
  eval_sq->add_option("--range", sq_range, "component range lo:hi");
  eval_sq->add_option("--out", sq_out, "report path (also writes <out>.json)");
  eval_sq->add_option("--curve", sq_curve, "dump the coefficient curve as TSV");

  auto* agree = app.add_subcommand("route-agree", "argmax agreement of approximate vs exact routing");
  std::string ra_softmax, ra_squash, ra_out;
  int ra_trials = -1, ra_iterations = -1;
  std::int64_t ra_seed = -1;
  agree->add_option("--softmax", ra_softmax, "softmax variant for the candidate configuration");
  agree->add_option("--squash", ra_squash, "squash variant for the candidate configuration");
  agree->add_option("--trials", ra_trials, "number of random prediction tensors");
  agree->add_option("--seed", ra_seed, "trial seed");
  agree->add_option("--iterations", ra_iterations, "routing iterations");
  agree->add_option("--out", ra_out, "report path");

  auto* show = app.add_subcommand("show-config", "echo the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = RunConfig::defaults();
    apply_common(common, cfg);

    if (gen->parsed()) {
      return cmd_gen_luts(cfg, gen_out);
    }
    if (eval_sm->parsed()) {
      if (!sm_variant.empty()) cfg.softmax_variant = parse_softmax_variant(sm_variant);
      if (sm_n >= 0) cfg.softmax_n = sm_n;
      if (sm_count >= 0) cfg.count = sm_count;
      if (sm_seed >= 0) cfg.seed = static_cast<std::uint64_t>(sm_seed);
      if (!sm_range.empty()) {
        std::tie(cfg.softmax_lo, cfg.softmax_hi) = parse_range(sm_range);
      }
      return cmd_eval_softmax(cfg, sm_out);
    }
    if (eval_sq->parsed()) {
      if (!sq_variant.empty()) cfg.squash_variant = parse_squash_variant(sq_variant);
      if (sq_n >= 0) cfg.squash_n = sq_n;
      if (sq_count >= 0) cfg.count = sq_count;
      if (sq_seed >= 0) cfg.seed = static_cast<std::uint64_t>(sq_seed);
      if (!sq_range.empty()) {
        std::tie(cfg.squash_lo, cfg.squash_hi) = parse_range(sq_range);
      }
      return cmd_eval_squash(cfg, sq_out, sq_curve);
    }
    if (agree->parsed()) {
      if (!ra_softmax.empty()) cfg.softmax_variant = parse_softmax_variant(ra_softmax);
      if (!ra_squash.empty()) cfg.squash_variant = parse_squash_variant(ra_squash);
      if (ra_trials >= 0) cfg.trials = ra_trials;
      if (ra_seed >= 0) cfg.seed = static_cast<std::uint64_t>(ra_seed);
      if (ra_iterations >= 0) cfg.iterations = ra_iterations;
      return cmd_route_agree(cfg, ra_out);
    }
    if (show->parsed()) {
      cfg.validate();
      std::cout << cfg.to_text();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
