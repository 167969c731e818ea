#include "hybridnet/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

bool all_equal(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [&](double x) { return x == w[0]; });
}

void check(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw InputError("values and weights differ in length");
  }
  if (values.empty()) throw InputError("empty sample");
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("negative or NaN weight");
  }
}

}  // namespace

const char* to_string(Weighting w) {
  return w == Weighting::kUniform ? "uniform" : "gravity";
}

double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q) {
  check(values, weights);
  q = std::clamp(q, 0.0, 1.0);
  const std::size_t n = values.size();
  if (all_equal(weights)) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return v[rank - 1];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw InputError("weights sum to zero");
  const double target = q * total;
  double cum = 0.0;
  double last = values[order.front()];
  for (std::size_t i : order) {
    if (weights[i] == 0.0) continue;
    cum += weights[i];
    last = values[i];
    if (cum >= target) return values[i];
  }
  return last;
}

double weighted_mean(std::span<const double> values,
                     std::span<const double> weights) {
  check(values, weights);
  if (all_equal(weights)) {
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw InputError("weights sum to zero");
  return num / den;
}

StretchStats summarize(std::span<const double> values,
                       std::span<const double> weights, Weighting weighting) {
  StretchStats s;
  s.weighting = weighting;
  s.pairs = values.size();
  s.mean = weighted_mean(values, weights);
  s.median = weighted_quantile(values, weights, 0.5);
  s.p95 = weighted_quantile(values, weights, 0.95);
  return s;
}

}  // namespace hybridnet
