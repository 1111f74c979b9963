// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aerobust/codec.hpp"
#include "aerobust/error.hpp"
#include "aerobust/raster.hpp"
#include "aerobust/rng.hpp"

namespace aerobust {

inline constexpr double kDefaultCloudGamma = 128.0;

/// Cloud layer ready for compositing; every value lies in [0, G].
struct CloudIngredient {
  RealImage values;
};

struct CompositeParams {
  double max_gray = 255.0;          // G
  double atmospheric_light = 0.95;  // A
};

/// Thresholded self-subtraction: max(0, I - gamma) per sample, unquantized.
inline RealImage cloud_self_subtract(const RasterImage& cloudy, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 255.0)) throw ParameterError("cloud threshold must lie in [0, 255]");
  RealImage out(cloudy.width(), cloudy.height(), cloudy.channels());
  for (std::size_t i = 0; i < cloudy.size(); ++i)
    out.data()[i] = std::max(0.0, static_cast<double>(cloudy.data()[i]) - gamma);
  return out;
}

/// Per-channel compensation coefficient: sum of the original intensity over
/// the cloud support divided by the sum of the subtracted map.
inline std::vector<double> cloud_compensation_coefficients(const RasterImage& cloudy, const RealImage& degraded) {
  if (!cloudy.same_extent(degraded) || cloudy.channels() != degraded.channels()) {
    throw ParameterError("cloud_compensate: cloudy image and degraded map differ in shape");
  }
  const int ch = cloudy.channels();
  std::vector<double> support(ch, 0.0);
  std::vector<double> mass(ch, 0.0);
  for (std::size_t i = 0; i < degraded.size(); ++i) {
    const double d = degraded.data()[i];
    if (d != 0.0) {
      support[i % ch] += cloudy.data()[i];
      mass[i % ch] += d;
    }
  }
  std::vector<double> k(ch, 0.0);
  bool any = false;
  for (int c = 0; c < ch; ++c) {
    if (mass[c] > 0.0) {
      k[c] = support[c] / mass[c];
      any = true;
    }
  }
  if (!any) throw EmptyCloudError("cloud source has no pixel above the threshold");
  return k;
}

/// Scales the degraded map by its compensation coefficient and clamps to [0, G].
inline CloudIngredient cloud_compensate(const RasterImage& cloudy, const RealImage& degraded,
                                        double max_gray = 255.0) {
  const auto k = cloud_compensation_coefficients(cloudy, degraded);
  const int ch = degraded.channels();
  RealImage values(degraded.width(), degraded.height(), ch);
  for (std::size_t i = 0; i < degraded.size(); ++i)
    values.data()[i] = std::clamp(k[i % ch] * degraded.data()[i], 0.0, max_gray);
  return CloudIngredient{std::move(values)};
}

/// Composites the cloud layer over a clean image with transmittance
/// (G - I_ci) / G and atmospheric light A, then quantizes. A single-channel
/// ingredient is broadcast over the clean image's channels.
inline RasterImage cloud_composite(const RasterImage& clean, const CloudIngredient& ingredient,
                                   const CompositeParams& params = {}) {
  const RealImage& ci = ingredient.values;
  if (!clean.same_extent(ci) || (ci.channels() != clean.channels() && ci.channels() != 1)) {
    throw ParameterError("cloud_composite: clean image and cloud ingredient differ in dimensions");
  }
  if (!(params.atmospheric_light > 0.0 && params.atmospheric_light <= 1.0)) {
    throw ParameterError("atmospheric light must lie in (0, 1]");
  }
  if (!(params.max_gray > 0.0)) throw ParameterError("max gray level must be positive");
  const double g = params.max_gray;
  const int ch = clean.channels();
  RealImage out(clean.width(), clean.height(), ch);
  for (std::size_t p = 0; p < clean.pixel_count(); ++p)
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      const double cloud = ci.channels() == 1 ? ci.data()[p] : ci.data()[i];
      out.data()[i] = clean.data()[i] * (g - cloud) / g + params.atmospheric_light * cloud;
    }
  return quantize(out);
}

/// A cloudy scene and its background threshold.
struct CloudSource {
  std::string name;
  RasterImage image;
  double gamma = kDefaultCloudGamma;
};

/// A pool entry with its ingredient precomputed at source resolution.
struct PreparedCloud {
  CloudSource source;
  CloudIngredient ingredient;
};

/// Runs self-subtraction and compensation; throws EmptyCloudError naming the source.
inline PreparedCloud prepare_cloud(CloudSource source) {
  try {
    auto degraded = cloud_self_subtract(source.image, source.gamma);
    auto ingredient = cloud_compensate(source.image, degraded);
    return PreparedCloud{std::move(source), std::move(ingredient)};
  } catch (const EmptyCloudError&) {
    throw EmptyCloudError("cloud source '" + source.name + "' has no pixel above gamma " +
                          std::to_string(source.gamma));
  }
}

/// Cuts a `w` x `h` window from the ingredient starting at (`x0`, `y0`);
/// axes where the source is smaller than the target wrap around (tiling).
inline CloudIngredient fit_ingredient(const CloudIngredient& ingredient, int w, int h, int x0, int y0) {
  const RealImage& src = ingredient.values;
  RealImage out(w, h, src.channels());
  for (int y = 0; y < h; ++y) {
    const int sy = (y0 + y) % src.height();
    for (int x = 0; x < w; ++x) {
      const int sx = (x0 + x) % src.width();
      for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(sx, sy, c);
    }
  }
  return CloudIngredient{std::move(out)};
}

struct CloudAssignment {
  std::size_t source_index = 0;
  int offset_x = 0;
  int offset_y = 0;
};

/// Draws the pool entry and window offset for one target from its lineage
/// (kind "clouds", severity 0).
inline CloudAssignment assign_cloud(const std::vector<PreparedCloud>& pool, std::uint64_t global_seed,
                                    const std::string& image_id, int target_w, int target_h) {
  if (pool.empty()) throw ConfigError("cloud pool is empty");
  RngStream rng(derive_seed(global_seed, image_id, "clouds", 0));
  CloudAssignment a;
  a.source_index = static_cast<std::size_t>(rng.below(pool.size()));
  const RealImage& src = pool[a.source_index].ingredient.values;
  auto pick = [&](int src_dim, int dst_dim) {
    return src_dim > dst_dim ? rng.integer(0, src_dim - dst_dim) : rng.integer(0, src_dim - 1);
  };
  a.offset_x = pick(src.width(), target_w);
  a.offset_y = pick(src.height(), target_h);
  return a;
}

/// Full transfer for one clean image.
inline RasterImage cloudify_image(const RasterImage& clean, const std::vector<PreparedCloud>& pool,
                                  const CloudAssignment& assignment, const CompositeParams& params = {}) {
  const auto& prepared = pool.at(assignment.source_index);
  auto window = fit_ingredient(prepared.ingredient, clean.width(), clean.height(), assignment.offset_x,
                               assignment.offset_y);
  return cloud_composite(clean, window, params);
}

struct PoolEntry {
  std::filesystem::path path;
  std::optional<double> gamma;
};

/// Parses a pool manifest: one "path [gamma]" per line, '#' comments, blank
/// lines ignored. Relative paths resolve against `base_dir`.
inline std::vector<PoolEntry> parse_pool_manifest(const std::string& text, const std::filesystem::path& base_dir = {}) {
  std::vector<PoolEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string path;
    if (!(fields >> path)) continue;
    PoolEntry entry;
    entry.path = std::filesystem::path(path);
    if (entry.path.is_relative() && !base_dir.empty()) entry.path = base_dir / entry.path;
    std::string gamma_text;
    if (fields >> gamma_text) {
      try {
        std::size_t used = 0;
        const double g = std::stod(gamma_text, &used);
        if (used != gamma_text.size()) throw std::invalid_argument(gamma_text);
        if (!(g >= 0.0 && g <= 255.0)) throw ParseError("gamma must lie in [0, 255]", lineno);
        entry.gamma = g;
      } catch (const std::logic_error&) {
        throw ParseError("non-numeric gamma '" + gamma_text + "'", lineno);
      }
      std::string extra;
      if (fields >> extra) throw ParseError("expected 'path [gamma]'", lineno);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

/// Loads and prepares every manifest entry. Sources without cloud pixels
/// are rejected with EmptyCloudError.
inline std::vector<PreparedCloud> load_cloud_pool(const std::filesystem::path& manifest,
                                                  double default_gamma = kDefaultCloudGamma) {
  const auto bytes = read_file(manifest);
  const auto entries = parse_pool_manifest(std::string(bytes.begin(), bytes.end()), manifest.parent_path());
  if (entries.empty()) throw ConfigError("cloud pool manifest lists no sources: " + manifest.string());
  std::vector<PreparedCloud> pool;
  pool.reserve(entries.size());
  for (const auto& e : entries) {
    CloudSource src{e.path.filename().string(), read_image(e.path), e.gamma.value_or(default_gamma)};
    pool.push_back(prepare_cloud(std::move(src)));
  }
  return pool;
}

}  // namespace aerobust
