// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "aerobust/raster.hpp"

namespace aerobust {

struct Hsv {
  double h;  // degrees in [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

/// `r`, `g`, `b` in [0, 255].
inline Hsv rgb_to_hsv(double r, double g, double b) noexcept {
  r /= 255.0;
  g /= 255.0;
  b /= 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, mx > 0.0 ? delta / mx : 0.0, mx};
  if (delta > 0.0) {
    double h;
    if (mx == r) {
      h = (g - b) / delta;
    } else if (mx == g) {
      h = 2.0 + (b - r) / delta;
    } else {
      h = 4.0 + (r - g) / delta;
    }
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

/// Returns RGB in [0, 255].
inline std::array<double, 3> hsv_to_rgb(Hsv hsv) noexcept {
  const double v = hsv.v * 255.0;
  if (hsv.s <= 0.0) return {v, v, v};
  double h = std::fmod(hsv.h, 360.0);
  if (h < 0.0) h += 360.0;
  h /= 60.0;
  const int sector = std::min(5, static_cast<int>(std::floor(h)));
  const double f = h - sector;
  const double p = v * (1.0 - hsv.s);
  const double q = v * (1.0 - hsv.s * f);
  const double t = v * (1.0 - hsv.s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

/// Three-channel image whose channels hold H, S, V.
inline RealImage rgb_to_hsv(const RealImage& rgb) {
  RealImage out(rgb.width(), rgb.height(), 3);
  auto src = rgb.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const Hsv hsv = rgb_to_hsv(src[i], src[i + 1], src[i + 2]);
    dst[i] = hsv.h;
    dst[i + 1] = hsv.s;
    dst[i + 2] = hsv.v;
  }
  return out;
}

inline RealImage hsv_to_rgb(const RealImage& hsv) {
  RealImage out(hsv.width(), hsv.height(), 3);
  auto src = hsv.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const auto rgb = hsv_to_rgb(Hsv{src[i], src[i + 1], src[i + 2]});
    dst[i] = rgb[0];
    dst[i + 1] = rgb[1];
    dst[i + 2] = rgb[2];
  }
  return out;
}

}  // namespace aerobust
