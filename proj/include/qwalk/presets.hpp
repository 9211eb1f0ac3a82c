#pragma once

#include <array>
#include <vector>

#include "lattice.hpp"

namespace qwalk::presets {

// 1D anchor points
inline constexpr double kTheta1 = -3 * pi / 8;
inline constexpr double kTheta2Topo = pi / 8;        // W = 1
inline constexpr double kTheta2Trivial = 5 * pi / 8; // W = 0
inline constexpr double kTheta2Outer = pi / 4;

inline constexpr int kNk = 201;

// Fig. 2
inline constexpr int kPhase1dCells = 101;
inline constexpr int kPhase2dCells = 51;
inline constexpr int kChernGrid = 101;

// Fig. 3 panels: (theta1, theta2, gamma)
inline constexpr std::array<std::array<double, 3>, 4> kFig3 = {{
    {-3 * pi / 8, pi / 8, 0.25},
    {-3 * pi / 8, 5 * pi / 8, 0.25},
    {-3 * pi / 8, pi / 8, 1.8},
    {-3 * pi / 8, pi / 8, 3.0},
}};

// Fig. 4 panels: theta1
inline constexpr std::array<double, 3> kFig4Theta1 = {-pi / 2, -3 * pi / 4, -pi};
inline constexpr double kFig4GammaMax = 2.0;

// Fig. 5 panels: (theta1, gamma_y)
inline constexpr std::array<std::array<double, 2>, 6> kFig5 = {{
    {pi / 4, 0.0},
    {3 * pi / 8, 0.0},
    {3 * pi / 2, 0.0},
    {pi / 4, 0.1},
    {3 * pi / 8, 0.5},
    {3 * pi / 2, 1.0},
}};
inline constexpr double kFig5GammaMax = 2.0;
inline constexpr int kFig5Theta2Cells = 51;
inline constexpr int kFig5GammaCells = 21;

// Fig. 6: chain of 201 sites, boundaries at +-50
inline constexpr int kChainSites = 201;
inline constexpr int kBoundary = 50;
inline constexpr std::array<double, 4> kFig6Gamma = {0.0, 0.2, 0.2110, 0.25};

inline RegionSpec chain_regions() {
  return {kBoundary, {-3 * pi / 8, 5 * pi / 8}, {-3 * pi / 8, pi / 4}};
}

// Fig. 8: strip, C = +1 inside, C = 0 outside
inline constexpr int kStripSites = 201;
inline constexpr int kKxSamples = 64;
inline constexpr std::array<double, 4> kFig8Gamma = {0.0, 0.2, 0.3, 0.47};

inline RegionSpec strip_regions() {
  return {kBoundary, {7 * pi / 6, 7 * pi / 6}, {3 * pi / 2, pi}};
}

}  // namespace qwalk::presets
