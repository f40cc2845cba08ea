#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks: eigenvalues of a Gram matrix
// instead of an SVD, element-by-element loops instead of Eigen products,
// plain scans instead of the library's shared scan kernel.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "iafb/iafb.hpp"

namespace iafb::oracle {

/// Rank from the eigenvalues of the smaller Gram matrix (A A^H or A^H A),
/// counting eigenvalues above 1e-12 * lambda_max (sigma above 1e-6 sigma_max;
/// squaring leaves exact zeros at ~eps * lambda_max).
inline int gram_rank(const CMat& a) {
  const CMat gram = a.rows() <= a.cols() ? CMat(a * a.adjoint())
                                         : CMat(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<CMat> eig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((lambda.array() > 1e-12 * top).count());
}

inline int kernel_dimension(const CMat& a) {
  return static_cast<int>(a.cols()) - gram_rank(a);
}

/// Smallest singular value as sqrt of the smallest eigenvalue of A^H A.
inline double min_singular_value(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(a.adjoint() * a, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
}

/// w^H H v by explicit triple loop.
inline std::complex<double> bilinear(const CVec& w, const CMat& h,
                                     const CVec& v) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    std::complex<double> row = 0.0;
    for (Eigen::Index c = 0; c < h.cols(); ++c) row += h(r, c) * v(c);
    acc += std::conj(w(r)) * row;
  }
  return acc;
}

/// Straight-line SINR evaluation of the limited-feedback rate of `user`.
inline double limited_rate(const ChannelSet& ch, const CombinerSet& comb,
                           const std::array<CVec, kUsers>& v_hat, int user,
                           double snr_linear) {
  const int cell = user < 2 ? 0 : 1;
  double signal = 0.0;
  double interference = 0.0;
  for (int m = 0; m < kUsers; ++m) {
    const double p = std::norm(bilinear(comb.w[user], ch.link(cell, m), v_hat[m]));
    if (m == user) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return std::log2(1.0 + snr_linear * signal / (1.0 + snr_linear * interference));
}

/// First index attaining the largest |c^H v| (compared via std::abs).
inline std::int64_t argmax_coherence(const CVec& v, const Codebook& cb) {
  std::int64_t best = -1;
  double best_abs = -1.0;
  for (std::int64_t q = 0; q < cb.codewords.cols(); ++q) {
    std::complex<double> dot = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      dot += std::conj(cb.codewords(k, q)) * v(k);
    }
    const double a = std::abs(dot);
    if (a > best_abs) {
      best_abs = a;
      best = q;
    }
  }
  return best;
}

inline CVec random_unit(int dim, Rng& rng) {
  CVec z(dim);
  for (int k = 0; k < dim; ++k) z(k) = rng.complex_normal();
  return z / z.norm();
}

}  // namespace iafb::oracle
