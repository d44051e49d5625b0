#pragma once

#include <cstdint>
#include <string>

#include "capsfx/analysis.hpp"
#include "capsfx/routing.hpp"
#include "capsfx/softmax.hpp"
#include "capsfx/squash.hpp"

namespace capsfx {

/// Every tunable of the tool in one place. Defaults match the shipped
/// datapath; a config file overrides defaults and command-line flags override
/// the file. validate() checks all module preconditions before any
/// computation starts.
struct RunConfig {
  QFormat format = kDefaultFormat;

  // softmax
  SoftmaxVariant softmax_variant = SoftmaxVariant::kB2;
  bool scale_inputs = true;
  TaylorSplit taylor{};
  int softmax_n = 10;
  double softmax_lo = -8.0;
  double softmax_hi = 8.0;

  // squash
  SquashVariant squash_variant = SquashVariant::kPow2;
  double breakpoint = 1.0;
  LambdaTable lambda = LambdaTable::defaults();
  int coeff_index_bits = 8;
  double coeff_domain_hi = 8.0;
  int sqrt_index_bits = 8;
  double sqrt_domain_hi = 65.0;
  int squash_n = 16;
  double squash_lo = -1.0;
  double squash_hi = 1.0;

  // analysis
  int count = 1000;
  std::uint64_t seed = 1;

  // routing
  int num_lower = 32;
  int num_upper = 10;
  int dim = 16;
  int iterations = 3;
  int trials = 1000;

  static RunConfig defaults() { return RunConfig{}; }

  /// Parse the line-oriented `key = value` file with [section] headers and
  /// merge it over *this. Throws std::invalid_argument with a line number on
  /// malformed input.
  void merge_file(const std::string& path);
  void merge_text(const std::string& text, const std::string& origin = "<config>");

  /// Effective configuration in the same sectioned format.
  std::string to_text() const;

  void validate() const;

  SoftmaxOptions softmax_options() const;
  SquashOptions squash_options() const;
  SoftmaxImpl make_softmax() const { return make_softmax(softmax_variant); }
  SoftmaxImpl make_softmax(SoftmaxVariant v) const;
  SquashImpl make_squash() const { return make_squash(squash_variant); }
  SquashImpl make_squash(SquashVariant v) const;
  SweepSpec softmax_sweep() const;
  SweepSpec squash_sweep() const;
  RoutingConfig routing_config(SoftmaxVariant sv, SquashVariant qv) const;
};

}  // namespace capsfx
