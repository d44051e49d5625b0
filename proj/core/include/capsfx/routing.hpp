#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "capsfx/softmax.hpp"
#include "capsfx/squash.hpp"

namespace capsfx {

/// Shapes and plugged nonlinearities for one routing run.
struct RoutingConfig {
  int num_lower = 32;
  int num_upper = 10;
  int dim = 16;
  int iterations = 3;
  SoftmaxImpl softmax{SoftmaxVariant::kExact};
  SquashImpl squash{SquashVariant::kExact};
};

/// Prediction tensor: one dim-vector per (lower, upper) capsule pair.
class Predictions {
 public:
  Predictions(int num_lower, int num_upper, int dim, std::vector<FxValue> data);

  /// Components uniform on the grid inside [-1, 1), reproducible from seed.
  static Predictions random(int num_lower, int num_upper, int dim, const QFormat& fmt,
                            std::uint64_t seed);

  std::span<const FxValue> at(int lower, int upper) const;
  int num_lower() const { return num_lower_; }
  int num_upper() const { return num_upper_; }
  int dim() const { return dim_; }

 private:
  int num_lower_;
  int num_upper_;
  int dim_;
  std::vector<FxValue> data_;
};

struct RoutingResult {
  /// Upper capsule vectors after the final iteration, num_upper x dim.
  std::vector<std::vector<FxValue>> outputs;
  /// Final coupling coefficients, num_lower x num_upper.
  std::vector<std::vector<FxValue>> couplings;
  /// Couplings of every iteration, iterations x num_lower x num_upper.
  std::vector<std::vector<std::vector<FxValue>>> coupling_history;
  bool overflow = false;
};

/// Iterative routing-by-agreement: logits start at zero; each round couples
/// lower to upper capsules through the softmax unit, forms weighted
/// prediction sums, squashes them, and (except in the last round) reinforces
/// the logits with the prediction/output dot products. Accumulations run in
/// widened words, ascending index.
RoutingResult dynamic_routing(const Predictions& p, const RoutingConfig& cfg);

/// Index of the upper capsule with the largest output norm.
std::size_t routing_argmax(const RoutingResult& r);

/// Fraction of seeded random prediction tensors on which the two
/// configurations select the same upper capsule.
double routing_agreement(const RoutingConfig& cfg_a, const RoutingConfig& cfg_b,
                         int trials, std::uint64_t seed);

}  // namespace capsfx
