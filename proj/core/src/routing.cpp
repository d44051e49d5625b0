#include "capsfx/routing.hpp"

#include <cmath>
#include <stdexcept>

#include "capsfx/rng.hpp"

namespace capsfx {

Predictions::Predictions(int num_lower, int num_upper, int dim, std::vector<FxValue> data)
    : num_lower_(num_lower), num_upper_(num_upper), dim_(dim), data_(std::move(data)) {
  if (num_lower_ < 1 || num_upper_ < 2 || dim_ < 1) {
    throw std::invalid_argument("Predictions: need num_lower >= 1, num_upper >= 2, dim >= 1");
  }
  const std::size_t expected = static_cast<std::size_t>(num_lower_) * num_upper_ * dim_;
  if (data_.size() != expected) {
    throw std::invalid_argument("Predictions: data size does not match shape");
  }
}

Predictions Predictions::random(int num_lower, int num_upper, int dim, const QFormat& fmt,
                                std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::int64_t raw_lo = -(std::int64_t{1} << fmt.frac_bits());
  const std::int64_t raw_hi = std::int64_t{1} << fmt.frac_bits();
  const std::uint64_t span = static_cast<std::uint64_t>(raw_hi - raw_lo);
  std::vector<FxValue> data;
  data.reserve(static_cast<std::size_t>(num_lower) * num_upper * dim);
  for (std::size_t i = 0; i < data.capacity(); ++i) {
    const std::int64_t raw = raw_lo + static_cast<std::int64_t>(rng.below(span));
    data.push_back(FxValue::from_raw(static_cast<std::int32_t>(raw), fmt));
  }
  return Predictions(num_lower, num_upper, dim, std::move(data));
}

std::span<const FxValue> Predictions::at(int lower, int upper) const {
  const std::size_t base =
      (static_cast<std::size_t>(lower) * num_upper_ + upper) * dim_;
  return std::span<const FxValue>(data_.data() + base, static_cast<std::size_t>(dim_));
}

RoutingResult dynamic_routing(const Predictions& p, const RoutingConfig& cfg) {
  if (p.num_lower() != cfg.num_lower || p.num_upper() != cfg.num_upper ||
      p.dim() != cfg.dim) {
    throw std::invalid_argument("dynamic_routing: prediction shape does not match config");
  }
  if (cfg.iterations < 1) {
    throw std::invalid_argument("dynamic_routing: iterations must be >= 1");
  }
  if (!(cfg.softmax.format() == cfg.squash.format())) {
    throw std::invalid_argument("dynamic_routing: softmax/squash format mismatch");
  }
  const QFormat& fmt = cfg.softmax.format();
  const QFormat acc_lower = fmt.widened(ceil_log2(cfg.num_lower));
  const QFormat acc_dim = fmt.widened(ceil_log2(cfg.dim));

  OverflowFlag flag;
  RoutingResult result;

  // Routing logits, all zero at the start.
  std::vector<std::vector<FxValue>> logits(
      cfg.num_lower, std::vector<FxValue>(cfg.num_upper, fx_zero(fmt)));
  std::vector<std::vector<FxValue>> couplings(
      cfg.num_lower, std::vector<FxValue>(cfg.num_upper, fx_zero(fmt)));
  std::vector<std::vector<FxValue>> outputs(cfg.num_upper,
                                            std::vector<FxValue>(cfg.dim, fx_zero(fmt)));

  for (int round = 0; round < cfg.iterations; ++round) {
    for (int i = 0; i < cfg.num_lower; ++i) {
      SoftmaxResult sm = cfg.softmax.apply(logits[i]);
      if (sm.overflow) flag.mark();
      couplings[i] = std::move(sm.values);
    }
    result.coupling_history.push_back(couplings);

    for (int j = 0; j < cfg.num_upper; ++j) {
      std::vector<FxValue> s;
      s.reserve(cfg.dim);
      for (int d = 0; d < cfg.dim; ++d) {
        FxValue acc = fx_zero(acc_lower);
        for (int i = 0; i < cfg.num_lower; ++i) {
          const FxValue term = fx_mul(couplings[i][j], p.at(i, j)[d], &flag);
          acc = fx_add(acc, fx_convert(term, acc_lower), &flag);
        }
        s.push_back(fx_convert(acc, fmt, RoundMode::kTruncate, &flag));
      }
      SquashResult sq = cfg.squash.apply(s);
      if (sq.overflow) flag.mark();
      outputs[j] = std::move(sq.values);
    }

    if (round + 1 < cfg.iterations) {
      // Agreement step: logit += <prediction, output>.
      for (int i = 0; i < cfg.num_lower; ++i) {
        for (int j = 0; j < cfg.num_upper; ++j) {
          FxValue dot = fx_zero(acc_dim);
          for (int d = 0; d < cfg.dim; ++d) {
            const FxValue term = fx_mul(p.at(i, j)[d], outputs[j][d], &flag);
            dot = fx_add(dot, fx_convert(term, acc_dim), &flag);
          }
          logits[i][j] =
              fx_add(logits[i][j], fx_convert(dot, fmt, RoundMode::kTruncate, &flag), &flag);
        }
      }
    }
  }

  result.outputs = std::move(outputs);
  result.couplings = std::move(couplings);
  result.overflow = flag.triggered();
  return result;
}

std::size_t routing_argmax(const RoutingResult& r) {
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < r.outputs.size(); ++j) {
    double sq = 0.0;
    for (const FxValue& v : r.outputs[j]) sq += v.to_real() * v.to_real();
    if (sq > best_norm) {
      best_norm = sq;
      best = j;
    }
  }
  return best;
}

double routing_agreement(const RoutingConfig& cfg_a, const RoutingConfig& cfg_b,
                         int trials, std::uint64_t seed) {
  if (cfg_a.num_lower != cfg_b.num_lower || cfg_a.num_upper != cfg_b.num_upper ||
      cfg_a.dim != cfg_b.dim) {
    throw std::invalid_argument("routing_agreement: configurations must share shapes");
  }
  if (trials < 1) {
    throw std::invalid_argument("routing_agreement: trials must be >= 1");
  }
  SplitMix64 rng(seed);
  long matches = 0;
  for (int t = 0; t < trials; ++t) {
    const Predictions p = Predictions::random(cfg_a.num_lower, cfg_a.num_upper, cfg_a.dim,
                                              cfg_a.softmax.format(), rng.next());
    const RoutingResult ra = dynamic_routing(p, cfg_a);
    const RoutingResult rb = dynamic_routing(p, cfg_b);
    if (routing_argmax(ra) == routing_argmax(rb)) ++matches;
  }
  return static_cast<double>(matches) / trials;
}

}  // namespace capsfx
