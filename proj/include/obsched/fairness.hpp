#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

namespace obsched {

// Jain fairness index |sum x|^2 / (n * sum x^2). Equals 1 for any constant
// positive vector and 1/n when a single entry holds everything, and is
// invariant under positive scaling.
inline double jain_index(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("fairness index of empty vector");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
  }
  if (!(sum_sq > 0.0))
    throw std::domain_error("fairness index undefined for the zero vector");
  return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

// Jain index of the achievement ratios x[i] / required[i]. Hits exactly 1
// when every entry meets its requirement in equal proportion, which makes it
// a direct check of proportional rate balancing.
inline double modified_jain(std::span<const double> x,
                            std::span<const double> required) {
  if (x.size() != required.size())
    throw std::invalid_argument("value and requirement sizes disagree");
  if (x.empty()) throw std::invalid_argument("fairness index of empty vector");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(required[i] > 0.0))
      throw std::invalid_argument("requirements must be positive");
    const double ratio = x[i] / required[i];
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  if (!(sum_sq > 0.0))
    throw std::domain_error("fairness index undefined for the zero vector");
  return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

// Textbook dispersion measures. Each field is absent when its formula is
// undefined for the input: variance and the coefficient of variation need at
// least two entries, the coefficient also needs a nonzero mean, and the
// min/max ratio needs a nonzero maximum.
struct ClassicIndices {
  std::optional<double> variance;
  std::optional<double> coeff_of_variation;
  std::optional<double> min_max_ratio;
};

inline ClassicIndices classic_indices(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("fairness index of empty vector");
  ClassicIndices out;
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  if (n >= 2) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double variance = ss / static_cast<double>(n - 1);
    out.variance = variance;
    if (mean != 0.0) out.coeff_of_variation = std::sqrt(variance) / mean;
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi != 0.0) out.min_max_ratio = *lo / *hi;
  return out;
}

}  // namespace obsched
