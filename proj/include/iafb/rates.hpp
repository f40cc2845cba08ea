#pragma once

// Achievable rates under perfect and quantized precoder feedback, the
// per-user rate-loss bound, the feedback-bit scaling law and the
// multiplexing-gain (high-SNR slope) estimator.
//
// Noise power is 1 and each user transmits with power equal to the linear
// SNR; only their ratio enters any formula.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>

#include "iafb/alignment.hpp"

namespace iafb {

class SnrPoint {
 public:
  static SnrPoint from_db(double db) {
    if (!std::isfinite(db)) throw InvalidArgument("SNR in dB must be finite");
    return SnrPoint(std::pow(10.0, db / 10.0), db);
  }
  static SnrPoint from_linear(double linear) {
    if (!(linear > 0.0) || !std::isfinite(linear)) {
      throw InvalidArgument("linear SNR must be positive and finite");
    }
    return SnrPoint(linear, 10.0 * std::log10(linear));
  }

  double linear() const { return linear_; }
  double db() const { return db_; }

 private:
  SnrPoint(double linear, double db) : linear_(linear), db_(db) {}
  double linear_;
  double db_;
};

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

struct RateReport {
  std::array<double, kUsers> r_pfb{};
  std::array<double, kUsers> r_lfb{};
  std::array<double, kUsers> delta{};
  double sum_pfb = 0.0;
  double sum_lfb = 0.0;
  double sum_delta = 0.0;

  static RateReport from_rates(const std::array<double, kUsers>& pfb,
                               const std::array<double, kUsers>& lfb) {
    RateReport out;
    out.r_pfb = pfb;
    out.r_lfb = lfb;
    for (int i = 0; i < kUsers; ++i) {
      out.delta[i] = pfb[i] - lfb[i];
      out.sum_pfb += pfb[i];
      out.sum_lfb += lfb[i];
      out.sum_delta += out.delta[i];
    }
    return out;
  }
};

/// g with g^H = w^H H, i.e. g = H^H w.
inline CVec effective_channel(const CVec& w, const CMat& h) {
  if (w.size() != h.rows()) {
    throw DimensionMismatch("combiner of size " + std::to_string(w.size()) +
                            " against channel with " +
                            std::to_string(h.rows()) + " rows");
  }
  return h.adjoint() * w;
}

/// Rate of `user` when users transmit the (possibly quantized) vectors
/// `v_hat` while the base station keeps the combiners designed for the true
/// precoders. Interference from all three other users is counted.
inline double rate_limited(const ChannelSet& ch, const CombinerSet& comb,
                           const std::array<CVec, kUsers>& v_hat, int user,
                           const SnrPoint& snr) {
  const int cell = serving_cell(user);
  const CVec& w = comb.w.at(user);
  double desired = 0.0;
  double interference = 0.0;
  for (int m = 0; m < kUsers; ++m) {
    const CVec g = effective_channel(w, ch.link(cell, m));
    if (g.size() != v_hat[m].size()) {
      throw DimensionMismatch("precoder length differs from M");
    }
    const double gain = std::norm(g.dot(v_hat[m]));
    (m == user ? desired : interference) += gain;
  }
  const double p = snr.linear();
  return log2_1p(p * desired / (1.0 + p * interference));
}

/// Interference-free rate under perfect alignment and zero-forcing.
inline double rate_perfect(const ChannelSet& ch, const CombinerSet& comb,
                           const std::array<CVec, kUsers>& v, int user,
                           const SnrPoint& snr) {
  const CVec g = effective_channel(comb.w.at(user), ch.serving(user));
  return log2_1p(snr.linear() * std::norm(g.dot(v.at(user))));
}

struct BoundParams {
  double tau = 2.0;
  std::array<double, 3> a{1.5, 1.5, 1.5};  // interferer gains E||g||^2
  int m = 2;
  double bits = 0.0;  // real-valued so the un-rounded bit count can be used

  void validate() const {
    if (!(tau > 1.0)) throw InvalidTau(tau);
    for (double aj : a) {
      if (!(aj > 0.0)) throw InvalidArgument("A_j must be positive");
    }
    if (m < 2) throw InvalidArgument("M must be at least 2");
    if (bits < 0.0) throw InvalidArgument("bits must be non-negative");
  }

  double a_sum() const { return a[0] + a[1] + a[2]; }
};

/// log2(1 + SNR * sum_j A_j * 2^(-B/(M-1))).
inline double rate_loss_bound(const BoundParams& p, const SnrPoint& snr) {
  p.validate();
  const double per_unit_gain =
      std::exp2(-p.bits / static_cast<double>(p.m - 1));
  return log2_1p(snr.linear() * p.a_sum() * per_unit_gain);
}

/// (M-1) log2(SNR) + (M-1) log2(A_sum / (tau - 1)), before rounding.
inline double feedback_bits_real(const SnrPoint& snr, double tau, int m,
                                 double a_sum) {
  if (!(tau > 1.0)) throw InvalidTau(tau);
  if (!(a_sum > 0.0)) throw InvalidArgument("A_sum must be positive");
  if (m < 2) throw InvalidArgument("M must be at least 2");
  const double dof = static_cast<double>(m - 1);
  return dof * std::log2(snr.linear()) + dof * std::log2(a_sum / (tau - 1.0));
}

/// Smallest non-negative integer B meeting the rate-loss budget log2(tau).
inline int feedback_bits_required(const SnrPoint& snr, double tau, int m,
                                  double a_sum) {
  const double real_bits = feedback_bits_real(snr, tau, m, a_sum);
  // Absorb round-off so an exactly integral bound is not pushed up by one.
  const double rounded = std::ceil(real_bits - 1e-9);
  return rounded <= 0.0 ? 0 : static_cast<int>(rounded);
}

/// Least-squares slope of sum rate against log2(SNR).
inline double multiplexing_gain(
    std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DegenerateGrid();
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [snr, rate] : points) {
    if (!(snr > 0.0)) throw InvalidArgument("SNR must be positive");
    mean_x += std::log2(snr);
    mean_y += rate;
  }
  const double n = static_cast<double>(points.size());
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [snr, rate] : points) {
    const double dx = std::log2(snr) - mean_x;
    sxx += dx * dx;
    sxy += dx * (rate - mean_y);
  }
  if (sxx == 0.0) throw DegenerateGrid();
  return sxy / sxx;
}

}  // namespace iafb
