#include <gtest/gtest.h>

#include "oracles.hpp"

namespace iafb {
namespace {

bool identical(const ChannelSet& a, const ChannelSet& b) {
  for (int c = 0; c < kCells; ++c) {
    for (int u = 0; u < kUsers; ++u) {
      if (!(a.link(c, u).array() == b.link(c, u).array()).all()) return false;
    }
  }
  return true;
}

TEST(DrawChannels, Deterministic) {
  Rng a(17);
  Rng b(17);
  EXPECT_TRUE(identical(draw_channels({}, a), draw_channels({}, b)));
}

TEST(DrawChannels, EveryLinkIsThreeByTwoFullRank) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const ChannelSet ch = draw_channels({}, rng);
    for (int c = 0; c < kCells; ++c) {
      for (int u = 0; u < kUsers; ++u) {
        const CMat& h = ch.link(c, u);
        ASSERT_EQ(h.rows(), 3);
        ASSERT_EQ(h.cols(), 2);
        EXPECT_EQ(oracle::gram_rank(h), 2);
        EXPECT_GT(oracle::min_singular_value(h), kMinSingularValue);
      }
    }
  }
}

TEST(DrawChannels, RejectsUnsupportedDims) {
  Rng rng(1);
  EXPECT_THROW(draw_channels(SystemDims{3, 3}, rng), UnsupportedDims);
  EXPECT_THROW(draw_channels(SystemDims{2, 4}, rng), UnsupportedDims);
}

TEST(DrawChannels, EntryPowerIsUnitOnAverage) {
  Rng rng(8);
  constexpr int kDraws = 10000;
  Eigen::MatrixXd power = Eigen::MatrixXd::Zero(3, 2);
  for (int t = 0; t < kDraws; ++t) {
    power += draw_channels({}, rng).link(1, 2).cwiseAbs2();
  }
  power /= kDraws;
  EXPECT_LE((power.array() - 1.0).abs().maxCoeff(), 0.05);
}

TEST(ServingCell, UsersMapToCells) {
  EXPECT_EQ(serving_cell(0), 0);
  EXPECT_EQ(serving_cell(1), 0);
  EXPECT_EQ(serving_cell(2), 1);
  EXPECT_EQ(serving_cell(3), 1);
}

}  // namespace
}  // namespace iafb
