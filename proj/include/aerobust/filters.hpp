// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "aerobust/error.hpp"
#include "aerobust/raster.hpp"

namespace aerobust {

enum class Border { replicate, reflect };
enum class ResizeFilter { nearest, bilinear, box };

/// Dense real kernel, row-major, odd dimensions.
class Kernel {
 public:
  Kernel(int rows, int cols, std::vector<double> weights)
      : rows_(rows), cols_(cols), weights_(std::move(weights)) {
    if (rows < 1 || cols < 1 || weights_.size() != static_cast<std::size_t>(rows) * cols) {
      throw ParameterError("kernel weights must match rows * cols");
    }
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double operator()(int r, int c) const noexcept { return weights_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator()(int r, int c) noexcept { return weights_[static_cast<std::size_t>(r) * cols_ + c]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double sum() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  Kernel& normalize() {
    const double s = sum();
    if (s == 0.0) throw ParameterError("cannot normalize a zero-sum kernel");
    for (double& w : weights_) w /= s;
    return *this;
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> weights_;
};

/// Maps an out-of-range index into [0, n). Reflect repeats the edge sample (abc|cba).
inline int border_index(int i, int n, Border border) noexcept {
  if (n == 1) return 0;
  if (border == Border::replicate) return std::clamp(i, 0, n - 1);
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

/// Per-channel linear convolution (kernel flipped) on real data; no clamping.
inline RealImage convolve2d(const RealImage& img, const Kernel& kernel, Border border = Border::replicate) {
  if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0) {
    throw ParameterError("kernel dimensions must be odd, got " + std::to_string(kernel.rows()) + "x" +
                         std::to_string(kernel.cols()));
  }
  const int kr = kernel.rows() / 2;
  const int kc = kernel.cols() / 2;
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  RealImage out(w, h, ch);
  std::vector<int> xs(static_cast<std::size_t>(w + 2 * kc));
  for (int x = -kc; x < w + kc; ++x) xs[x + kc] = border_index(x, w, border);
  for (int y = 0; y < h; ++y) {
    double* dst = out.row(y);
    for (int r = 0; r < kernel.rows(); ++r) {
      const double* src = img.row(border_index(y + kr - r, h, border));
      for (int c = 0; c < kernel.cols(); ++c) {
        const double k = kernel(r, c);
        if (k == 0.0) continue;
        const int dx = kc - c;
        for (int x = 0; x < w; ++x) {
          const double* p = src + static_cast<std::size_t>(xs[x + dx + kc]) * ch;
          for (int i = 0; i < ch; ++i) dst[x * ch + i] += k * p[i];
        }
      }
    }
  }
  return out;
}

/// 8-bit convenience form: convolve in real precision, quantize once.
inline RasterImage convolve2d(const RasterImage& img, const Kernel& kernel, Border border = Border::replicate) {
  return quantize(convolve2d(to_real(img), kernel, border));
}

/// Normalized 1D Gaussian taps with radius ceil(3 sigma).
inline std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

inline Kernel gaussian_kernel(double sigma) {
  auto taps = gaussian_taps(sigma);
  const int n = static_cast<int>(taps.size());
  Kernel k(n, n, std::vector<double>(taps.size() * taps.size()));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) k(r, c) = taps[r] * taps[c];
  return k;
}

/// Separable convolution with a symmetric 1D kernel along both axes.
inline RealImage convolve_separable(const RealImage& img, const std::vector<double>& taps,
                                    Border border = Border::reflect) {
  const int radius = static_cast<int>(taps.size()) / 2;
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  RealImage tmp(w, h, ch);
  for (int y = 0; y < h; ++y) {
    const double* src = img.row(y);
    double* dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      for (int t = -radius; t <= radius; ++t) {
        const double k = taps[t + radius];
        const double* p = src + static_cast<std::size_t>(border_index(x + t, w, border)) * ch;
        for (int i = 0; i < ch; ++i) dst[x * ch + i] += k * p[i];
      }
    }
  }
  RealImage out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    double* dst = out.row(y);
    for (int t = -radius; t <= radius; ++t) {
      const double k = taps[t + radius];
      const double* src = tmp.row(border_index(y + t, h, border));
      for (int i = 0; i < w * ch; ++i) dst[i] += k * src[i];
    }
  }
  return out;
}

inline RealImage gaussian_blur(const RealImage& img, double sigma, Border border = Border::reflect) {
  if (!(sigma > 0.0)) return img;
  return convolve_separable(img, gaussian_taps(sigma), border);
}

/// Normalized disk of the given radius, softened by a small Gaussian to reduce aliasing.
inline Kernel disk_kernel(double radius, double alias_sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(radius)));
  const int size = 2 * r + 1;
  Kernel disk(size, size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0));
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x)
      if (x * x + y * y <= radius * radius) disk(y + r, x + r) = 1.0;
  disk.normalize();
  if (!(alias_sigma > 0.0)) return disk;
  // Smooth the kernel itself with a 3x3 (5x5 for wide disks) Gaussian.
  const int half = radius <= 8 ? 1 : 2;
  std::vector<double> g(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i) g[i + half] = std::exp(-(i * i) / (2.0 * alias_sigma * alias_sigma));
  Kernel smooth(size, size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0));
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      double norm = 0.0;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
          const int sy = y + dy;
          const int sx = x + dx;
          const double wgt = g[dy + half] * g[dx + half];
          norm += wgt;
          if (sy >= 0 && sy < size && sx >= 0 && sx < size) acc += wgt * disk(sy, sx);
        }
      smooth(y, x) = acc / norm;
    }
  return smooth.normalize();
}

/// Normalized one-pixel-wide line through the kernel center, `length` pixels
/// long, at `angle_deg` (counter-clockwise from +x, image y pointing down).
inline Kernel line_kernel(int length, double angle_deg) {
  if (length < 1) throw ParameterError("motion length must be >= 1");
  const int half = length / 2;
  const int size = 2 * half + 1;
  Kernel k(size, size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0));
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(a);
  const double dy = -std::sin(a);
  // Supersample along the segment so every traversed cell gets a weight.
  const int steps = 4 * size;
  for (int s = 0; s <= steps; ++s) {
    const double t = -half + (2.0 * half) * s / steps;
    const int x = static_cast<int>(std::lround(half + t * dx));
    const int y = static_cast<int>(std::lround(half + t * dy));
    k(std::clamp(y, 0, size - 1), std::clamp(x, 0, size - 1)) = 1.0;
  }
  return k.normalize();
}

/// Bilinear sample at real pixel-center coordinates; out-of-range handled by `border`.
inline double sample_bilinear(const RealImage& img, double x, double y, int c, Border border) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const int w = img.width();
  const int h = img.height();
  const int xa = border_index(x0, w, border);
  const int xb = border_index(x0 + 1, w, border);
  const int ya = border_index(y0, h, border);
  const int yb = border_index(y0 + 1, h, border);
  const double top = img.at(xa, ya, c) * (1.0 - ax) + img.at(xb, ya, c) * ax;
  const double bottom = img.at(xa, yb, c) * (1.0 - ax) + img.at(xb, yb, c) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

namespace detail {

inline void check_resize_dims(int w, int h) {
  if (w < 1 || h < 1) {
    throw ParameterError("resize target must be at least 1x1, got " + std::to_string(w) + "x" + std::to_string(h));
  }
}

// Coverage weights of source cells [i, i+1) over the output cell interval.
inline std::vector<std::vector<std::pair<int, double>>> box_weights(int src, int dst) {
  std::vector<std::vector<std::pair<int, double>>> table(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < std::min(src, static_cast<int>(std::ceil(hi))); ++i) {
      const double cover = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (cover > 0.0) table[o].emplace_back(i, cover / scale);
    }
  }
  return table;
}

}  // namespace detail

/// Resamples to `new_w` x `new_h`. Same-size requests return the input unchanged.
inline RealImage resize(const RealImage& img, int new_w, int new_h, ResizeFilter filter) {
  detail::check_resize_dims(new_w, new_h);
  if (new_w == img.width() && new_h == img.height()) return img;
  const int ch = img.channels();
  RealImage out(new_w, new_h, ch);
  const double sx = static_cast<double>(img.width()) / new_w;
  const double sy = static_cast<double>(img.height()) / new_h;
  switch (filter) {
    case ResizeFilter::nearest:
      for (int y = 0; y < new_h; ++y) {
        const int src_y = std::min(img.height() - 1, static_cast<int>(std::floor((y + 0.5) * sy)));
        for (int x = 0; x < new_w; ++x) {
          const int src_x = std::min(img.width() - 1, static_cast<int>(std::floor((x + 0.5) * sx)));
          for (int c = 0; c < ch; ++c) out.at(x, y, c) = img.at(src_x, src_y, c);
        }
      }
      break;
    case ResizeFilter::bilinear:
      for (int y = 0; y < new_h; ++y) {
        const double src_y = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        for (int x = 0; x < new_w; ++x) {
          const double src_x = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
          for (int c = 0; c < ch; ++c) out.at(x, y, c) = sample_bilinear(img, src_x, src_y, c, Border::replicate);
        }
      }
      break;
    case ResizeFilter::box: {
      const auto wx = detail::box_weights(img.width(), new_w);
      const auto wy = detail::box_weights(img.height(), new_h);
      for (int y = 0; y < new_h; ++y)
        for (int x = 0; x < new_w; ++x)
          for (const auto& [iy, ky] : wy[y])
            for (const auto& [ix, kx] : wx[x])
              for (int c = 0; c < ch; ++c) out.at(x, y, c) += ky * kx * img.at(ix, iy, c);
      break;
    }
  }
  return out;
}

inline RasterImage resize(const RasterImage& img, int new_w, int new_h, ResizeFilter filter) {
  detail::check_resize_dims(new_w, new_h);
  if (new_w == img.width() && new_h == img.height()) return img;
  return quantize(resize(to_real(img), new_w, new_h, filter));
}

}  // namespace aerobust
