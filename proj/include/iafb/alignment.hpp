#pragma once

// Interference-alignment transmit precoders and zero-forcing receive
// combiners for the two-cell, two-users-per-cell uplink.
//
// Each base station aligns the two inter-cell interferers it sees onto one
// receive dimension: the users of the *other* cell pick v_a, v_b so that
// H_a v_a and H_b v_b are parallel. With N = 3 receive antennas this leaves
// two dimensions for the two served users, which are then separated by
// zero-forcing.

#include <array>

#include "iafb/channel.hpp"

namespace iafb {

struct AlignedPair {
  CVec v_a;
  CVec v_b;
  CVec h_ici;  // unit direction of the aligned interference
};

struct PrecoderSet {
  std::array<CVec, kUsers> v;
  // h_ici[cell] is the aligned interference direction seen by that cell.
  std::array<CVec, kCells> h_ici;
};

struct CombinerSet {
  std::array<CVec, kUsers> w;
};

struct NetworkDesign {
  PrecoderSet precoders;
  CombinerSet combiners;
};

inline constexpr double kMinHalfNorm = 1e-10;

/// Finds unit v_a, v_b with H_a v_a parallel to H_b v_b by taking a kernel
/// vector of [H_a | -H_b] and normalising its two stacked halves.
inline AlignedPair align_pair(const CMat& h_a, const CMat& h_b) {
  if (h_a.rows() != h_b.rows() || h_a.cols() != h_b.cols()) {
    throw DimensionMismatch("align_pair needs equally shaped channels");
  }
  const Eigen::Index m = h_a.cols();
  CMat stacked(h_a.rows(), 2 * m);
  stacked << h_a, -h_b;

  const auto kernel = null_space(stacked);
  if (kernel.empty()) throw AlignmentInfeasible();

  const CVec& x = kernel.front();
  const CVec half_a = x.head(m);
  const CVec half_b = x.tail(m);
  if (half_a.norm() <= kMinHalfNorm || half_b.norm() <= kMinHalfNorm) {
    throw ZeroVector();
  }
  AlignedPair out;
  out.v_a = unit_normalize(half_a);
  out.v_b = unit_normalize(half_b);
  out.h_ici = unit_normalize(h_a * out.v_a);
  return out;
}

/// Unit w with w^H b1 = w^H b2 = 0. When b1 and b2 are parallel the kernel is
/// two-dimensional and the first basis vector is returned.
inline CVec zf_combiner(const CVec& b1, const CVec& b2) {
  if (b1.size() != b2.size()) {
    throw DimensionMismatch("zf_combiner inputs differ in length");
  }
  CMat constraints(2, b1.size());
  constraints.row(0) = b1.adjoint();
  constraints.row(1) = b2.adjoint();
  const auto kernel = null_space(constraints);
  if (kernel.empty()) throw AlignmentInfeasible();
  return kernel.front();
}

inline NetworkDesign design_network(const ChannelSet& ch) {
  NetworkDesign out;
  auto& v = out.precoders.v;
  auto& h_ici = out.precoders.h_ici;

  // Cell 0 aligns users 2 and 3; cell 1 aligns users 0 and 1.
  AlignedPair at_cell0 = align_pair(ch.link(0, 2), ch.link(0, 3));
  AlignedPair at_cell1 = align_pair(ch.link(1, 0), ch.link(1, 1));
  v[2] = std::move(at_cell0.v_a);
  v[3] = std::move(at_cell0.v_b);
  h_ici[0] = std::move(at_cell0.h_ici);
  v[0] = std::move(at_cell1.v_a);
  v[1] = std::move(at_cell1.v_b);
  h_ici[1] = std::move(at_cell1.h_ici);

  auto& w = out.combiners.w;
  w[0] = zf_combiner(ch.link(0, 1) * v[1], h_ici[0]);
  w[1] = zf_combiner(ch.link(0, 0) * v[0], h_ici[0]);
  w[2] = zf_combiner(ch.link(1, 3) * v[3], h_ici[1]);
  w[3] = zf_combiner(ch.link(1, 2) * v[2], h_ici[1]);
  return out;
}

/// coherence(unit(H_a v_a), unit(H_b v_b)) for the pair aligned at `cell`.
inline double alignment_coherence(const ChannelSet& ch, const PrecoderSet& p,
                                  int cell) {
  const int other_first = cell == 0 ? 2 : 0;
  const CVec a = unit_normalize(ch.link(cell, other_first) * p.v[other_first]);
  const CVec b =
      unit_normalize(ch.link(cell, other_first + 1) * p.v[other_first + 1]);
  return coherence(a, b);
}

/// |w_i^H H_{k,m} v_m| for decoding user i (k its serving cell) and any m.
inline double leakage(const ChannelSet& ch, const CombinerSet& c,
                      const std::array<CVec, kUsers>& v, int decoded_user,
                      int transmitting_user) {
  const CMat& h = ch.link(serving_cell(decoded_user), transmitting_user);
  return std::abs(c.w[decoded_user].dot(h * v[transmitting_user]));
}

}  // namespace iafb
