// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "aerobust/error.hpp"

namespace aerobust {

/// The nineteen common corruptions, in benchmark column order.
enum class CorruptionKind : std::uint8_t {
  gaussian_noise,
  shot_noise,
  impulse_noise,
  speckle_noise,
  defocus_blur,
  glass_blur,
  motion_blur,
  zoom_blur,
  gaussian_blur,
  snow,
  frost,
  fog,
  brightness,
  spatter,
  contrast,
  elastic_transform,
  pixelate,
  jpeg_compression,
  saturate,
};

enum class CorruptionCategory : std::uint8_t { noise, blur, weather, digital };

inline constexpr int kNumKinds = 19;
inline constexpr int kNumSeverities = 5;

inline constexpr std::array<CorruptionKind, kNumKinds> kAllKinds = {
    CorruptionKind::gaussian_noise, CorruptionKind::shot_noise,     CorruptionKind::impulse_noise,
    CorruptionKind::speckle_noise,  CorruptionKind::defocus_blur,   CorruptionKind::glass_blur,
    CorruptionKind::motion_blur,    CorruptionKind::zoom_blur,      CorruptionKind::gaussian_blur,
    CorruptionKind::snow,           CorruptionKind::frost,          CorruptionKind::fog,
    CorruptionKind::brightness,     CorruptionKind::spatter,        CorruptionKind::contrast,
    CorruptionKind::elastic_transform, CorruptionKind::pixelate,    CorruptionKind::jpeg_compression,
    CorruptionKind::saturate,
};

inline constexpr std::array<CorruptionCategory, 4> kAllCategories = {
    CorruptionCategory::noise, CorruptionCategory::blur, CorruptionCategory::weather, CorruptionCategory::digital};

inline constexpr std::array<std::string_view, kNumKinds> kKindNames = {
    "gaussian_noise", "shot_noise",  "impulse_noise",     "speckle_noise", "defocus_blur",
    "glass_blur",     "motion_blur", "zoom_blur",         "gaussian_blur", "snow",
    "frost",          "fog",         "brightness",        "spatter",       "contrast",
    "elastic_transform", "pixelate", "jpeg_compression",  "saturate",
};

constexpr std::string_view name(CorruptionKind kind) noexcept { return kKindNames[static_cast<int>(kind)]; }

constexpr std::string_view name(CorruptionCategory category) noexcept {
  switch (category) {
    case CorruptionCategory::noise: return "noise";
    case CorruptionCategory::blur: return "blur";
    case CorruptionCategory::weather: return "weather";
    case CorruptionCategory::digital: return "digital";
  }
  return "";
}

constexpr CorruptionCategory category_of(CorruptionKind kind) noexcept {
  const int i = static_cast<int>(kind);
  if (i < 4) return CorruptionCategory::noise;
  if (i < 9) return CorruptionCategory::blur;
  if (i < 14) return CorruptionCategory::weather;
  return CorruptionCategory::digital;
}

inline std::string valid_kind_list() {
  std::string out;
  for (auto n : kKindNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

inline std::optional<CorruptionKind> find_kind(std::string_view text) noexcept {
  for (int i = 0; i < kNumKinds; ++i)
    if (kKindNames[i] == text) return static_cast<CorruptionKind>(i);
  return std::nullopt;
}

/// Throws ParameterError listing the valid names on failure.
inline CorruptionKind parse_kind(std::string_view text) {
  if (auto k = find_kind(text)) return *k;
  throw ParameterError("unknown corruption kind '" + std::string(text) + "'; valid kinds: " + valid_kind_list());
}

inline std::optional<CorruptionCategory> find_category(std::string_view text) noexcept {
  for (auto c : kAllCategories)
    if (name(c) == text) return c;
  return std::nullopt;
}

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::gaussian_noise;
  int severity = 1;
  std::uint64_t seed = 0;
};

inline void validate(const CorruptionSpec& spec) {
  if (static_cast<int>(spec.kind) >= kNumKinds) {
    throw ParameterError("unknown corruption kind id " + std::to_string(static_cast<int>(spec.kind)));
  }
  if (spec.severity < 1 || spec.severity > kNumSeverities) {
    throw ParameterError("severity must be in 1..5, got " + std::to_string(spec.severity));
  }
}

}  // namespace aerobust
