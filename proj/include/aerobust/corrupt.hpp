// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "aerobust/codec.hpp"
#include "aerobust/color.hpp"
#include "aerobust/corruption_kind.hpp"
#include "aerobust/error.hpp"
#include "aerobust/filters.hpp"
#include "aerobust/fractal.hpp"
#include "aerobust/raster.hpp"
#include "aerobust/rng.hpp"
#include "aerobust/schedule.hpp"

namespace aerobust {

/// Optional inputs that change how some corruptions render.
struct CorruptOptions {
  /// Photographic frost textures; empty selects the procedural frost layer.
  std::span<const RasterImage> frost_textures;
};

namespace detail {

// All helpers below work on real images scaled to [0, 1].

inline RealImage scaled(const RasterImage& img) {
  RealImage out = to_real(img);
  for (double& v : out.data()) v /= 255.0;
  return out;
}

inline RasterImage unscaled(RealImage img) {
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0) * 255.0;
  return quantize(img);
}

inline RealImage times(RealImage img, double k) {
  for (double& v : img.data()) v *= k;
  return img;
}

inline RealImage gaussian_noise(RealImage x, double sigma, RngStream& rng) {
  for (double& v : x.data()) v += rng.normal(0.0, sigma);
  return x;
}

inline RealImage shot_noise(RealImage x, double photons, RngStream& rng) {
  for (double& v : x.data()) v = static_cast<double>(rng.poisson(v * photons)) / photons;
  return x;
}

inline RealImage impulse_noise(RealImage x, double amount, RngStream& rng) {
  for (double& v : x.data()) {
    const bool hit = rng.uniform() < amount;
    const bool salt = rng.uniform() < 0.5;
    if (hit) v = salt ? 1.0 : 0.0;
  }
  return x;
}

inline RealImage speckle_noise(RealImage x, double sigma, RngStream& rng) {
  for (double& v : x.data()) v += v * rng.normal(0.0, sigma);
  return x;
}

inline RealImage glass_blur(RealImage x, double sigma, int max_delta, int iterations, RngStream& rng) {
  x = gaussian_blur(x, sigma);
  const int w = x.width();
  const int h = x.height();
  for (int it = 0; it < iterations; ++it) {
    for (int y = h - 1 - max_delta; y >= max_delta; --y) {
      for (int xx = w - 1 - max_delta; xx >= max_delta; --xx) {
        const int dx = rng.integer(-max_delta, max_delta);
        const int dy = rng.integer(-max_delta, max_delta);
        for (int c = 0; c < x.channels(); ++c) std::swap(x.at(xx, y, c), x.at(xx + dx, y + dy, c));
      }
    }
  }
  return gaussian_blur(x, sigma);
}

// Magnifies about the image center by `factor`, sampling bilinearly.
inline RealImage zoom_center(const RealImage& x, double factor) {
  if (factor == 1.0) return x;
  RealImage out(x.width(), x.height(), x.channels());
  const double cx = x.width() / 2.0;
  const double cy = x.height() / 2.0;
  for (int y = 0; y < x.height(); ++y) {
    const double sy = cy + (y + 0.5 - cy) / factor - 0.5;
    for (int xx = 0; xx < x.width(); ++xx) {
      const double sx = cx + (xx + 0.5 - cx) / factor - 0.5;
      for (int c = 0; c < x.channels(); ++c) out.at(xx, y, c) = sample_bilinear(x, sx, sy, c, Border::replicate);
    }
  }
  return out;
}

inline RealImage zoom_blur(const RealImage& x, double max_zoom, double step) {
  const int count = static_cast<int>(std::floor((max_zoom - 1.0) / step + 1e-9)) + 1;
  RealImage acc(x.width(), x.height(), x.channels());
  for (int i = 0; i < count; ++i) {
    const RealImage zoomed = zoom_center(x, 1.0 + i * step);
    auto dst = acc.data();
    auto src = zoomed.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
  for (double& v : acc.data()) v /= count;
  return acc;
}

inline RealImage snow(const RealImage& x, double mean, double stddev, double zoom, double threshold,
                      int streak_length, double blend, RngStream& rng) {
  const int w = x.width();
  const int h = x.height();
  RealImage layer(w, h, 1);
  for (double& v : layer.data()) v = rng.normal(mean, stddev);
  layer = zoom_center(layer, zoom);
  for (double& v : layer.data()) v = v < threshold ? 0.0 : std::min(v, 1.0);
  const double angle = rng.uniform(-135.0, -45.0);
  layer = convolve2d(layer, line_kernel(streak_length, angle), Border::reflect);
  const RealImage gray = luminance(x);
  RealImage out(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      const double lifted = gray.at(xx, y) * 1.5 + 0.5;
      const double flake = layer.at(xx, y) + layer.at(w - 1 - xx, h - 1 - y);
      for (int c = 0; c < 3; ++c) {
        const double base = x.at(xx, y, c);
        out.at(xx, y, c) = blend * base + (1.0 - blend) * std::max(base, lifted) + flake;
      }
    }
  return out;
}

// Procedural frost: ridged plasma sharpened into crystalline filaments plus
// sparse bright grains, tinted cold white.
inline RealImage procedural_frost(int w, int h, RngStream& rng) {
  const RealImage coarse = fractal_noise(w, h, 1.6, rng);
  const RealImage fine = fractal_noise(w, h, 1.25, rng);
  RealImage out(w, h, 3);
  static constexpr std::array<double, 3> tint = {0.86, 0.93, 1.0};
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    const double ridge = 1.0 - std::abs(2.0 * coarse.data()[i] - 1.0);
    const double filament = std::pow(ridge, 6.0);
    const double grain = fine.data()[i] > 0.72 ? (fine.data()[i] - 0.72) / 0.28 : 0.0;
    const double value = std::clamp(0.35 * coarse.data()[i] + 0.55 * filament + 0.6 * grain, 0.0, 1.0);
    for (int c = 0; c < 3; ++c) out.data()[i * 3 + c] = value * tint[c];
  }
  return out;
}

inline RealImage texture_frost(std::span<const RasterImage> textures, int w, int h, RngStream& rng) {
  const RasterImage& tex = textures[rng.below(textures.size())];
  RealImage src = scaled(tex);
  if (src.width() < w || src.height() < h) {
    const double grow = std::max(static_cast<double>(w) / src.width(), static_cast<double>(h) / src.height());
    src = resize(src, static_cast<int>(std::ceil(src.width() * grow)), static_cast<int>(std::ceil(src.height() * grow)),
                 ResizeFilter::bilinear);
  }
  const int x0 = rng.integer(0, src.width() - w);
  const int y0 = rng.integer(0, src.height() - h);
  return crop(src, x0, y0, w, h);
}

inline RealImage frost(const RealImage& x, double image_weight, double frost_weight,
                       std::span<const RasterImage> textures, RngStream& rng) {
  const RealImage layer = textures.empty() ? procedural_frost(x.width(), x.height(), rng)
                                           : texture_frost(textures, x.width(), x.height(), rng);
  RealImage out(x.width(), x.height(), 3);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = image_weight * x.data()[i] + frost_weight * layer.data()[i];
  return out;
}

inline RealImage fog(RealImage x, double strength, double decay, RngStream& rng) {
  const auto data = x.data();
  const double max_val = *std::max_element(data.begin(), data.end());
  const RealImage haze = fractal_noise(x.width(), x.height(), decay, rng);
  for (std::size_t i = 0; i < x.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) {
      double& v = data[i * 3 + c];
      v = (v + strength * haze.data()[i]) * max_val / (max_val + strength);
    }
  return x;
}

inline RealImage adjust_hsv(const RealImage& x, double s_scale, double s_offset, double v_offset) {
  RealImage hsv = rgb_to_hsv(times(x, 255.0));
  auto data = hsv.data();
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i + 1] = std::clamp(data[i + 1] * s_scale + s_offset, 0.0, 1.0);
    data[i + 2] = std::clamp(data[i + 2] + v_offset, 0.0, 1.0);
  }
  return times(hsv_to_rgb(hsv), 1.0 / 255.0);
}

inline RealImage spatter(const RealImage& x, double mean, double stddev, double sigma, double threshold,
                         double intensity, double mask_sigma, bool mud, RngStream& rng) {
  const int w = x.width();
  const int h = x.height();
  RealImage liquid(w, h, 1);
  for (double& v : liquid.data()) v = rng.normal(mean, stddev);
  liquid = gaussian_blur(liquid, sigma);
  for (double& v : liquid.data())
    if (v < threshold) v = 0.0;
  RealImage out = x;
  if (!mud) {
    RealImage mask = gaussian_blur(liquid, 1.0);
    const auto md = mask.data();
    const double peak = *std::max_element(md.begin(), md.end());
    static constexpr std::array<double, 3> water = {175.0 / 255.0, 238.0 / 255.0, 238.0 / 255.0};
    for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
      const double m = peak > 0.0 ? md[i] / peak * intensity : 0.0;
      for (int c = 0; c < 3; ++c) out.data()[i * 3 + c] += m * water[c];
    }
    return out;
  }
  RealImage mask(w, h, 1);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) mask.data()[i] = liquid.data()[i] > threshold ? 1.0 : 0.0;
  mask = gaussian_blur(mask, mask_sigma);
  static constexpr std::array<double, 3> mud_color = {63.0 / 255.0, 42.0 / 255.0, 20.0 / 255.0};
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    double m = mask.data()[i];
    if (m < 0.8) m = 0.0;
    m = std::min(1.0, m * intensity);
    for (int c = 0; c < 3; ++c) {
      double& v = out.data()[i * 3 + c];
      v = v * (1.0 - m) + mud_color[c] * m;
    }
  }
  return out;
}

inline RealImage contrast(RealImage x, double factor) {
  std::array<double, 3> mean{};
  const auto data = x.data();
  for (std::size_t i = 0; i < data.size(); ++i) mean[i % 3] += data[i];
  for (double& m : mean) m /= static_cast<double>(x.pixel_count());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = (data[i] - mean[i % 3]) * factor + mean[i % 3];
  return x;
}

inline RealImage elastic_transform(const RealImage& x, double alpha, double sigma, double affine, RngStream& rng) {
  const int w = x.width();
  const int h = x.height();
  // Random affine from three jittered control points around the center.
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  const double half = std::min(w, h) / 3.0;
  const std::array<std::array<double, 2>, 3> src = {{{cx + half, cy + half}, {cx + half, cy - half}, {cx - half, cy - half}}};
  std::array<std::array<double, 2>, 3> dst{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k) dst[i][k] = src[i][k] + rng.uniform(-affine, affine);
  // Solve the affine map dst -> src so output pixels can be pulled from the input.
  const double det = (dst[0][0] - dst[2][0]) * (dst[1][1] - dst[2][1]) - (dst[1][0] - dst[2][0]) * (dst[0][1] - dst[2][1]);
  std::array<double, 6> m{1, 0, 0, 0, 1, 0};
  if (std::abs(det) > 1e-12) {
    for (int k = 0; k < 2; ++k) {
      const double a0 = src[0][k] - src[2][k];
      const double a1 = src[1][k] - src[2][k];
      const double gx = (a0 * (dst[1][1] - dst[2][1]) - a1 * (dst[0][1] - dst[2][1])) / det;
      const double gy = (a1 * (dst[0][0] - dst[2][0]) - a0 * (dst[1][0] - dst[2][0])) / det;
      m[k * 3 + 0] = gx;
      m[k * 3 + 1] = gy;
      m[k * 3 + 2] = src[2][k] - gx * dst[2][0] - gy * dst[2][1];
    }
  }
  RealImage dx(w, h, 1);
  RealImage dy(w, h, 1);
  for (double& v : dx.data()) v = rng.uniform(-1.0, 1.0);
  for (double& v : dy.data()) v = rng.uniform(-1.0, 1.0);
  dx = gaussian_blur(dx, sigma);
  dy = gaussian_blur(dy, sigma);
  RealImage out(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      const double ax = m[0] * xx + m[1] * y + m[2];
      const double ay = m[3] * xx + m[4] * y + m[5];
      const double sx = ax + alpha * dx.at(xx, y);
      const double sy = ay + alpha * dy.at(xx, y);
      for (int c = 0; c < 3; ++c) out.at(xx, y, c) = sample_bilinear(x, sx, sy, c, Border::reflect);
    }
  return out;
}

inline RealImage pixelate(const RealImage& x, double scale) {
  if (scale >= 1.0) return x;
  const int sw = std::max(1, static_cast<int>(std::lround(x.width() * scale)));
  const int sh = std::max(1, static_cast<int>(std::lround(x.height() * scale)));
  return resize(resize(x, sw, sh, ResizeFilter::box), x.width(), x.height(), ResizeFilter::nearest);
}

inline RealImage jpeg_compression(const RealImage& x, int quality) {
  const RasterImage q = unscaled(x);
  return scaled(decode_image(encode_image(q, ImageFormat::jpeg, quality), ImageFormat::jpeg));
}

}  // namespace detail

/// Applies one corruption at one severity. All randomness comes from a
/// stream seeded with `spec.seed`, so the result is a pure function of
/// (image, spec, schedule, options).
inline RasterImage corrupt(const RasterImage& image, const CorruptionSpec& spec,
                           const SeveritySchedule& schedule = SeveritySchedule::builtin(),
                           const CorruptOptions& options = {}) {
  validate(spec);
  if (image.empty()) throw ParameterError("cannot corrupt an empty image");
  if (image.channels() != 3) throw ParameterError("corrupt expects an RGB image");
  RngStream rng(spec.seed);
  const int s = spec.severity;
  auto p = [&](std::string_view param) { return schedule.get(spec.kind, param, s); };
  auto pi = [&](std::string_view param) { return static_cast<int>(std::lround(p(param))); };
  const RealImage x = detail::scaled(image);

  RealImage y;
  switch (spec.kind) {
    case CorruptionKind::gaussian_noise: y = detail::gaussian_noise(x, p("sigma"), rng); break;
    case CorruptionKind::shot_noise: y = detail::shot_noise(x, p("photons"), rng); break;
    case CorruptionKind::impulse_noise: y = detail::impulse_noise(x, p("amount"), rng); break;
    case CorruptionKind::speckle_noise: y = detail::speckle_noise(x, p("sigma"), rng); break;
    case CorruptionKind::defocus_blur:
      y = convolve2d(x, disk_kernel(p("radius"), p("alias_sigma")), Border::reflect);
      break;
    case CorruptionKind::glass_blur:
      y = detail::glass_blur(x, p("sigma"), pi("max_delta"), pi("iterations"), rng);
      break;
    case CorruptionKind::motion_blur: {
      const double angle = rng.uniform(-45.0, 45.0);
      y = convolve2d(x, line_kernel(pi("length"), angle), Border::replicate);
      break;
    }
    case CorruptionKind::zoom_blur: y = detail::zoom_blur(x, p("max_zoom"), p("step")); break;
    case CorruptionKind::gaussian_blur: y = gaussian_blur(x, p("sigma")); break;
    case CorruptionKind::snow:
      y = detail::snow(x, p("mean"), p("std"), p("zoom"), p("threshold"), pi("streak_length"), p("blend"), rng);
      break;
    case CorruptionKind::frost:
      y = detail::frost(x, p("image_weight"), p("frost_weight"), options.frost_textures, rng);
      break;
    case CorruptionKind::fog: y = detail::fog(x, p("strength"), p("decay"), rng); break;
    case CorruptionKind::brightness: y = detail::adjust_hsv(x, 1.0, 0.0, p("delta")); break;
    case CorruptionKind::spatter:
      y = detail::spatter(x, p("mean"), p("std"), p("sigma"), p("threshold"), p("intensity"), p("mask_sigma"),
                          p("mud") >= 0.5, rng);
      break;
    case CorruptionKind::contrast: y = detail::contrast(x, p("factor")); break;
    case CorruptionKind::elastic_transform:
      y = detail::elastic_transform(x, p("alpha"), p("sigma"), p("affine"), rng);
      break;
    case CorruptionKind::pixelate: y = detail::pixelate(x, p("scale")); break;
    case CorruptionKind::jpeg_compression: y = detail::jpeg_compression(x, pi("quality")); break;
    case CorruptionKind::saturate: y = detail::adjust_hsv(x, p("scale"), p("offset"), 0.0); break;
  }
  return detail::unscaled(std::move(y));
}

/// Peak signal-to-noise ratio in dB; +infinity for identical images.
inline double psnr(const RasterImage& reference, const RasterImage& test) {
  if (!reference.same_shape(test)) throw ParameterError("psnr: images differ in shape");
  if (reference.empty()) throw ParameterError("psnr: empty images");
  double sse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = static_cast<double>(reference.data()[i]) - static_cast<double>(test.data()[i]);
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(reference.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace aerobust
