#pragma once

// Random vector quantization (RVQ) of unit precoders.
//
// A codebook holds 2^B independent isotropic unit vectors; a vector is
// quantized to the codeword of largest coherence |c^H v|. Three routes are
// provided:
//   * generate_rvq_codebook + quantize: explicit codebook, linear scan.
//   * quantize_rvq_streamed: the same scan without storing the codebook.
//     Consumes the stream identically, so its result is bit-identical.
//   * quantize_rvq_sampled: draws the winning codeword directly from its
//     exact law (used when 2^B is too large to scan).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "iafb/numerics.hpp"

namespace iafb {

inline constexpr int kMaxCodebookBits = 24;

struct Codebook {
  int bits = 0;
  int dim = 0;
  CMat codewords;  // dim x 2^bits, one unit codeword per column

  std::int64_t size() const { return codewords.cols(); }
};

struct QuantizationResult {
  // Codeword position; empty when the codeword was sampled rather than
  // searched.
  std::optional<std::uint32_t> index;
  CVec v_hat;
  double cos2 = 1.0;
  double sin2 = 0.0;
};

struct Decomposition {
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  CVec error_dir;
  // Complex projection coefficients: v_hat = v * along_v + e * along_e.
  Complex along_v;
  Complex along_e;
};

namespace detail {

inline void check_bits(int bits) {
  if (bits < 0) throw InvalidArgument("feedback bits must be non-negative");
  if (bits > kMaxCodebookBits) throw TooManyBits(bits);
}

inline void check_codeword_dim(int dim) {
  if (dim < 2) throw InvalidArgument("codeword dimension must be at least 2");
}

// Draws one isotropic unit codeword into `out` (length preset).
inline void draw_codeword(CVec& scratch, CVec& out, Rng& rng) {
  for (Eigen::Index k = 0; k < scratch.size(); ++k) {
    scratch(k) = rng.complex_normal();
  }
  out = scratch / scratch.norm();
}

// |c^H v|^2 with a fixed summation order shared by every scan.
inline double coherence_sq(const Complex* c, const CVec& v) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::conj(c[k]) * v(k);
  return std::norm(acc);
}

inline QuantizationResult finish(std::uint32_t index, CVec v_hat,
                                 double cos2) {
  QuantizationResult out;
  out.index = index;
  out.v_hat = std::move(v_hat);
  out.cos2 = std::min(cos2, 1.0);
  out.sin2 = std::max(0.0, 1.0 - out.cos2);
  return out;
}

}  // namespace detail

inline Codebook generate_rvq_codebook(int bits, int dim, Rng& rng) {
  detail::check_bits(bits);
  detail::check_codeword_dim(dim);
  const std::int64_t count = std::int64_t{1} << bits;
  Codebook cb;
  cb.bits = bits;
  cb.dim = dim;
  cb.codewords.resize(dim, count);
  CVec scratch(dim);
  CVec codeword(dim);
  for (std::int64_t q = 0; q < count; ++q) {
    detail::draw_codeword(scratch, codeword, rng);
    cb.codewords.col(q) = codeword;
  }
  return cb;
}

/// Codeword of maximal coherence with `v`; ties go to the lowest index.
inline QuantizationResult quantize(const CVec& v, const Codebook& cb) {
  if (v.size() != cb.dim) {
    throw DimensionMismatch("vector of size " + std::to_string(v.size()) +
                            " against codebook of dimension " +
                            std::to_string(cb.dim));
  }
  std::int64_t best = 0;
  double best_sq = -1.0;
  for (std::int64_t q = 0; q < cb.size(); ++q) {
    const double sq = detail::coherence_sq(cb.codewords.col(q).data(), v);
    if (sq > best_sq) {
      best_sq = sq;
      best = q;
    }
  }
  return detail::finish(static_cast<std::uint32_t>(best),
                        cb.codewords.col(best), best_sq);
}

/// Same result as quantize(v, generate_rvq_codebook(bits, v.size(), rng)),
/// in O(dim) memory.
inline QuantizationResult quantize_rvq_streamed(const CVec& v, int bits,
                                                Rng& rng) {
  detail::check_bits(bits);
  detail::check_codeword_dim(static_cast<int>(v.size()));
  const std::int64_t count = std::int64_t{1} << bits;
  CVec scratch(v.size());
  CVec codeword(v.size());
  CVec best_word;
  std::int64_t best = 0;
  double best_sq = -1.0;
  for (std::int64_t q = 0; q < count; ++q) {
    detail::draw_codeword(scratch, codeword, rng);
    const double sq = detail::coherence_sq(codeword.data(), v);
    if (sq > best_sq) {
      best_sq = sq;
      best = q;
      best_word = codeword;
    }
  }
  return detail::finish(static_cast<std::uint32_t>(best), std::move(best_word),
                        best_sq);
}

/// Unit vector drawn isotropically from the orthogonal complement of unit v.
inline CVec draw_orthogonal_direction(const CVec& v, Rng& rng) {
  for (;;) {
    CVec z = draw_complex_gaussian_vector(static_cast<int>(v.size()), rng);
    z -= v * v.dot(z);
    const double norm = z.norm();
    if (norm > 1e-12) return z / norm;
  }
}

/// Draws the RVQ winner for `v` directly. For an isotropic codebook of size
/// Q = 2^bits in C^M each |c^H v|^2 ~ Beta(1, M-1), so the winning sin^2 is
/// the minimum of Q Beta(M-1, 1) variables, with CDF 1 - (1 - x^(M-1))^Q.
/// Given sin^2, the codeword's component orthogonal to v is isotropic and
/// its overall phase uniform.
inline QuantizationResult quantize_rvq_sampled(const CVec& v, double bits,
                                               Rng& rng) {
  if (bits < 0.0) throw InvalidArgument("feedback bits must be non-negative");
  detail::check_codeword_dim(static_cast<int>(v.size()));
  const double m = static_cast<double>(v.size());
  const double q = std::exp2(bits);
  const double u = rng.uniform();
  // 1 - (1-u)^(1/Q), stable for huge Q.
  const double tail = -std::expm1(std::log1p(-u) / q);
  const double sin2 = std::pow(tail, 1.0 / (m - 1.0));
  const double sin_t = std::sqrt(sin2);
  const double cos_t = std::sqrt(std::max(0.0, 1.0 - sin2));

  const CVec e = draw_orthogonal_direction(v, rng);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  const Complex rot = std::polar(1.0, phase);

  QuantizationResult out;
  out.v_hat = rot * (cos_t * v + sin_t * e);
  out.cos2 = cos_t * cos_t;
  out.sin2 = sin2;
  return out;
}

inline constexpr double kDegenerateSin = 1e-12;

/// Splits v_hat into its component along v and a unit error direction
/// orthogonal to v. Rates depend only on magnitudes, so the complex
/// projection coefficients are kept rather than forced real.
inline Decomposition decompose(const CVec& v, const CVec& v_hat) {
  if (v.size() != v_hat.size()) {
    throw DimensionMismatch("decompose inputs differ in length");
  }
  Decomposition out;
  out.along_v = v.dot(v_hat);
  const CVec residual = v_hat - v * out.along_v;
  out.cos_theta = std::abs(out.along_v);
  out.sin_theta = residual.norm();
  if (out.sin_theta <= kDegenerateSin) throw DegenerateDecomposition();
  out.error_dir = residual / out.sin_theta;
  out.along_e = out.error_dir.dot(v_hat);
  return out;
}

}  // namespace iafb
