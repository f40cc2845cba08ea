#pragma once

#include <array>

#include "iafb/numerics.hpp"

namespace iafb {

inline constexpr int kCells = 2;
inline constexpr int kUsers = 4;

/// Users 0 and 1 are served by cell 0, users 2 and 3 by cell 1.
inline constexpr int serving_cell(int user) { return user < 2 ? 0 : 1; }

struct SystemDims {
  int tx_antennas = 2;  // M, per user
  int rx_antennas = 3;  // N, per base station

  void validate() const {
    if (tx_antennas != 2 || rx_antennas != 3) {
      throw UnsupportedDims(tx_antennas, rx_antennas);
    }
  }
};

/// The eight N x M uplink matrices, indexed (cell, user), 0-based.
class ChannelSet {
 public:
  ChannelSet() = default;

  const CMat& link(int cell, int user) const { return h_.at(cell).at(user); }
  CMat& link(int cell, int user) { return h_.at(cell).at(user); }

  /// Channel from `user` to its own base station.
  const CMat& serving(int user) const { return link(serving_cell(user), user); }

 private:
  std::array<std::array<CMat, kUsers>, kCells> h_;
};

inline constexpr double kMinSingularValue = 1e-8;

/// Draws all eight matrices i.i.d. CN(0,1), resampling any matrix whose
/// smallest singular value is at or below kMinSingularValue.
inline ChannelSet draw_channels(const SystemDims& dims, Rng& rng) {
  dims.validate();
  ChannelSet out;
  for (int cell = 0; cell < kCells; ++cell) {
    for (int user = 0; user < kUsers; ++user) {
      CMat h;
      do {
        h = draw_complex_gaussian(dims.rx_antennas, dims.tx_antennas, rng);
      } while (Eigen::JacobiSVD<CMat>(h).singularValues().minCoeff() <=
               kMinSingularValue);
      out.link(cell, user) = std::move(h);
    }
  }
  return out;
}

}  // namespace iafb
