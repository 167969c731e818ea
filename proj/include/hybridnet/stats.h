#pragma once

#include <span>
#include <string>

namespace hybridnet {

enum class Weighting { kUniform, kGravity };

const char* to_string(Weighting w);

// Summary of a stretch distribution over site pairs.
struct StretchStats {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  Weighting weighting = Weighting::kUniform;
  std::size_t pairs = 0;
};

// Weighted quantile: the smallest value whose cumulative weight reaches
// q * total weight. values and weights must have equal length and weights
// must be non-negative with a positive sum. When every weight is the same
// double the result is identical to the unweighted computation.
double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q);

double weighted_mean(std::span<const double> values,
                     std::span<const double> weights);

StretchStats summarize(std::span<const double> values,
                       std::span<const double> weights, Weighting weighting);

}  // namespace hybridnet
