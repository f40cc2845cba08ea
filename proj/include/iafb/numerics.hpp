#pragma once

// Small dense complex kernels shared by every stage of the simulation.
// Everything is double precision: alignment residuals are checked at 1e-10.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "iafb/errors.hpp"
#include "iafb/rng.hpp"

namespace iafb {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline CMat draw_complex_gaussian(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("matrix dimensions must be positive");
  }
  CMat out(rows, cols);
  // Row-major fill order so the stream layout matches the semantic layout.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out(r, c) = rng.complex_normal();
    }
  }
  return out;
}

inline CVec draw_complex_gaussian_vector(int dim, Rng& rng) {
  if (dim < 1) throw InvalidArgument("vector dimension must be positive");
  CVec out(dim);
  for (int k = 0; k < dim; ++k) out(k) = rng.complex_normal();
  return out;
}

/// Rotates `v` by a unit-modulus scalar so that its first component with
/// non-negligible magnitude is real and positive. Gives SVD-derived basis
/// vectors a deterministic phase.
inline void fix_phase(CVec& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    if (mag > 1e-12 * scale) {
      v *= std::conj(v(k)) / mag;
      v(k) = Complex(mag, 0.0);
      return;
    }
  }
}

/// Numerical rank: sigma counts as zero iff
/// sigma <= max(rows, cols) * eps * sigma_max.
inline int numerical_rank(const Eigen::VectorXd& singular_values, Eigen::Index rows,
                          Eigen::Index cols) {
  if (singular_values.size() == 0) return 0;
  const double sigma_max = singular_values.maxCoeff();
  if (sigma_max == 0.0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon() * sigma_max;
  return static_cast<int>((singular_values.array() > tol).count());
}

/// Orthonormal basis of ker(A). Empty when A has full column rank.
inline std::vector<CVec> null_space(const CMat& a) {
  if (!a.allFinite()) throw InvalidArgument("null_space: non-finite input");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const int rank = numerical_rank(svd.singularValues(), a.rows(), a.cols());
  std::vector<CVec> basis;
  basis.reserve(static_cast<std::size_t>(a.cols() - rank));
  for (Eigen::Index c = rank; c < a.cols(); ++c) {
    CVec v = svd.matrixV().col(c);
    fix_phase(v);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline CVec unit_normalize(const CVec& v) {
  const double norm = v.norm();
  if (!(norm > 1e-300)) throw ZeroVector();
  return v / norm;
}

/// |u^H v|, the cosine of the chordal angle between two unit vectors.
inline double coherence(const CVec& u, const CVec& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("coherence of vectors of size " +
                            std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  return std::abs(u.dot(v));
}

inline double spectral_norm(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace iafb
