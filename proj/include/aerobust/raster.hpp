// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aerobust/error.hpp"

namespace aerobust {

/// Interleaved row-major image with `channels` samples per pixel.
///
/// `Image<std::uint8_t>` is the storage form of every raster the toolkit
/// reads or writes (RGB, three channels). `Image<double>` is the working
/// form: corruptions compute on real values in [0, 255] and quantize once.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;

  Image(int width, int height, int channels = 3, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw ParameterError("image dimensions must be non-negative with at least one channel");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  Image(int width, int height, int channels, std::vector<T> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 0 || height < 0 || channels < 1 ||
        data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw ParameterError("image data length must equal width * height * channels");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  T* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
  const T* row(int y) const noexcept {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  template <typename U>
  bool same_extent(const Image<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 3;
  std::vector<T> data_;
};

using RasterImage = Image<std::uint8_t>;
using RealImage = Image<double>;

/// Round-half-up then clamp to [0, 255]. NaN maps to 0.
inline std::uint8_t quantize_sample(double v) noexcept {
  if (!(v >= 0.0)) return 0;
  const double r = std::floor(v + 0.5);
  return r >= 255.0 ? std::uint8_t{255} : static_cast<std::uint8_t>(r);
}

inline RasterImage quantize(const RealImage& img) {
  std::vector<std::uint8_t> out(img.size());
  auto src = img.data();
  std::transform(src.begin(), src.end(), out.begin(), quantize_sample);
  return RasterImage(img.width(), img.height(), img.channels(), std::move(out));
}

inline RealImage to_real(const RasterImage& img) {
  std::vector<double> out(img.size());
  auto src = img.data();
  std::transform(src.begin(), src.end(), out.begin(), [](std::uint8_t v) { return double(v); });
  return RealImage(img.width(), img.height(), img.channels(), std::move(out));
}

inline void clamp_in_place(RealImage& img, double lo = 0.0, double hi = 255.0) {
  for (double& v : img.data()) v = std::clamp(v, lo, hi);
}

/// Single channel `c` of `img` as a one-channel image.
template <typename T>
Image<T> extract_channel(const Image<T>& img, int c) {
  Image<T> out(img.width(), img.height(), 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) out.data()[i] = img.data()[i * img.channels() + c];
  return out;
}

template <typename T>
void insert_channel(Image<T>& img, const Image<T>& plane, int c) {
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.data()[i * img.channels() + c] = plane.data()[i];
}

/// Luma (ITU-R BT.601) of an RGB image as a one-channel image.
inline RealImage luminance(const RealImage& rgb) {
  RealImage out(rgb.width(), rgb.height(), 1);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
    const double* p = rgb.data().data() + i * 3;
    out.data()[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

/// Copies the `w`x`h` window at (`x0`, `y0`); samples outside the source are `pad`.
template <typename T>
Image<T> crop(const Image<T>& img, int x0, int y0, int w, int h, T pad = T{}) {
  Image<T> out(w, h, img.channels(), pad);
  for (int y = 0; y < h; ++y) {
    const int sy = y0 + y;
    if (sy < 0 || sy >= img.height()) continue;
    for (int x = 0; x < w; ++x) {
      const int sx = x0 + x;
      if (sx < 0 || sx >= img.width()) continue;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

}  // namespace aerobust
