#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace iafb::stats {

/// Pairwise (cascade) summation; result depends only on the input order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double stderr_mean = 0.0;
  std::size_t count = 0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = pairwise_sum(xs) / n;
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    std::transform(xs.begin(), xs.end(), sq.begin(), [&](double x) {
      const double d = x - s.mean;
      return d * d;
    });
    s.stddev = std::sqrt(pairwise_sum(sq) / (n - 1.0));
    s.stderr_mean = s.stddev / std::sqrt(n);
  }
  return s;
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

/// One-sample two-sided Kolmogorov-Smirnov test against a continuous CDF.
/// The p-value uses the asymptotic law with Stephens' finite-n correction.
inline KsResult ks_test(std::vector<double> samples,
                        const std::function<double(double)>& cdf) {
  KsResult out;
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    out.distance = std::max({out.distance, lo, hi});
  }
  const double rn = std::sqrt(n);
  out.p_value = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * out.distance);
  return out;
}

/// CDF of Beta(1, d-1), the law of |u^H x|^2 for x isotropic in C^d.
inline double isotropic_coherence_cdf(double t, int dim) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - t, dim - 1);
}

}  // namespace iafb::stats
