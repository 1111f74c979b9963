// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <vector>

#include "aerobust/error.hpp"
#include "aerobust/raster.hpp"
#include "aerobust/rng.hpp"

namespace aerobust {

/// Plasma heightmap by toroidal diamond-square on the next power-of-two
/// square, cropped to `w` x `h` and normalized to [0, 1]. The perturbation
/// amplitude starts at 100 and is divided by `roughness_decay` per octave.
inline RealImage fractal_noise(int w, int h, double roughness_decay, RngStream& rng) {
  if (w < 1 || h < 1) throw ParameterError("fractal_noise needs w, h >= 1");
  if (!(roughness_decay > 0.0)) throw ParameterError("roughness_decay must be positive");
  const auto size = static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max({w, h, 2}))));
  std::vector<double> map(static_cast<std::size_t>(size) * size, 0.0);
  auto at = [&](int x, int y) -> double& {
    x &= size - 1;
    y &= size - 1;
    return map[static_cast<std::size_t>(y) * size + x];
  };
  double wibble = 100.0;
  for (int step = size; step >= 2; step /= 2) {
    const int half = step / 2;
    // Square step: centers from the four corners.
    for (int y = 0; y < size; y += step)
      for (int x = 0; x < size; x += step) {
        const double sum = at(x, y) + at(x + step, y) + at(x, y + step) + at(x + step, y + step);
        at(x + half, y + half) = sum / 4.0 + rng.uniform(-wibble, wibble);
      }
    // Diamond step: edge midpoints from their four neighbors.
    for (int y = 0; y < size; y += step)
      for (int x = 0; x < size; x += step) {
        const double top = at(x + half, y - half) + at(x + half, y + half) + at(x, y) + at(x + step, y);
        at(x + half, y) = top / 4.0 + rng.uniform(-wibble, wibble);
        const double left = at(x - half, y + half) + at(x + half, y + half) + at(x, y) + at(x, y + step);
        at(x, y + half) = left / 4.0 + rng.uniform(-wibble, wibble);
      }
    wibble /= roughness_decay;
  }
  RealImage out(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = at(x, y);
  auto data = out.data();
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : data) v = range > 0.0 ? (v - min) / range : 0.0;
  return out;
}

}  // namespace aerobust
