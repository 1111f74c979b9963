// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "aerobust/codec.hpp"
#include "aerobust/corruption_kind.hpp"
#include "aerobust/default_schedule_data.hpp"
#include "aerobust/error.hpp"
#include "aerobust/rng.hpp"

namespace aerobust {

using SeverityValues = std::array<double, kNumSeverities>;

/// Parameter names each kind reads from its schedule table.
inline const std::vector<std::string_view>& schedule_parameters(CorruptionKind kind) {
  static const std::array<std::vector<std::string_view>, kNumKinds> table = {{
      {"sigma"},                                                              // gaussian_noise
      {"photons"},                                                            // shot_noise
      {"amount"},                                                             // impulse_noise
      {"sigma"},                                                              // speckle_noise
      {"radius", "alias_sigma"},                                              // defocus_blur
      {"sigma", "max_delta", "iterations"},                                   // glass_blur
      {"length"},                                                             // motion_blur
      {"max_zoom", "step"},                                                   // zoom_blur
      {"sigma"},                                                              // gaussian_blur
      {"mean", "std", "zoom", "threshold", "streak_length", "blend"},         // snow
      {"image_weight", "frost_weight"},                                       // frost
      {"strength", "decay"},                                                  // fog
      {"delta"},                                                              // brightness
      {"mean", "std", "sigma", "threshold", "intensity", "mask_sigma", "mud"},  // spatter
      {"factor"},                                                             // contrast
      {"alpha", "sigma", "affine"},                                           // elastic_transform
      {"scale"},                                                              // pixelate
      {"quality"},                                                            // jpeg_compression
      {"scale", "offset"},                                                    // saturate
  }};
  return table[static_cast<int>(kind)];
}

/// Per-kind parameter tables, five entries per parameter (severities 1..5).
class SeveritySchedule {
 public:
  /// Parses and validates a YAML schedule. `source` names the origin in errors.
  static SeveritySchedule from_yaml(const std::string& text, const std::string& source = "<schedule>") {
    YAML::Node root;
    try {
      root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
      throw ConfigError(source + ": " + e.what());
    }
    if (!root.IsMap()) throw ConfigError(source + ": expected a mapping of corruption kinds");
    SeveritySchedule schedule;
    schedule.checksum_ = checksum_of(text);
    for (const auto& entry : root) {
      const auto key = entry.first.as<std::string>();
      if (key == "schedule_version") {
        schedule.version_ = entry.second.as<std::string>();
        continue;
      }
      auto kind = find_kind(key);
      if (!kind) throw ConfigError(source + ": unknown corruption kind '" + key + "'");
      if (!entry.second.IsMap()) throw ConfigError(source + ": table for " + key + " must be a mapping");
      auto& params = schedule.tables_[*kind];
      for (const auto& p : entry.second) {
        const auto pname = p.first.as<std::string>();
        if (!p.second.IsSequence() || p.second.size() != kNumSeverities) {
          throw ConfigError(source + ": " + key + "." + pname + " must list exactly 5 values");
        }
        SeverityValues values{};
        for (int s = 0; s < kNumSeverities; ++s) {
          try {
            values[s] = p.second[s].as<double>();
          } catch (const YAML::Exception&) {
            throw ConfigError(source + ": " + key + "." + pname + " has a non-numeric entry");
          }
        }
        params[pname] = values;
      }
    }
    schedule.validate(source);
    return schedule;
  }

  static SeveritySchedule from_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("schedule file not found: " + path.string());
    const auto bytes = read_file(path);
    return from_yaml(std::string(bytes.begin(), bytes.end()), path.string());
  }

  /// The shipped default (config/default_schedule.yaml).
  static const SeveritySchedule& builtin() {
    static const SeveritySchedule schedule = from_yaml(detail::kDefaultScheduleYaml, "default_schedule.yaml");
    return schedule;
  }

  double get(CorruptionKind kind, std::string_view param, int severity) const {
    return values(kind, param)[severity - 1];
  }

  const SeverityValues& values(CorruptionKind kind, std::string_view param) const {
    auto table = tables_.find(kind);
    if (table != tables_.end()) {
      auto it = table->second.find(std::string(param));
      if (it != table->second.end()) return it->second;
    }
    throw ConfigError("schedule lacks " + std::string(name(kind)) + "." + std::string(param));
  }

  /// Overrides one parameter row; the checksum then describes a modified schedule.
  SeveritySchedule& set(CorruptionKind kind, std::string_view param, const SeverityValues& values) {
    tables_[kind][std::string(param)] = values;
    checksum_ = "modified";
    return *this;
  }

  /// FNV-1a 64 of the source text as 16 hex digits.
  const std::string& checksum() const noexcept { return checksum_; }
  const std::string& version() const noexcept { return version_; }

 private:
  static std::string checksum_of(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
  }

  void validate(const std::string& source) const {
    for (auto kind : kAllKinds) {
      auto table = tables_.find(kind);
      if (table == tables_.end()) throw ConfigError(source + ": missing table for " + std::string(name(kind)));
      for (auto param : schedule_parameters(kind)) {
        if (!table->second.contains(std::string(param))) {
          throw ConfigError(source + ": missing " + std::string(name(kind)) + "." + std::string(param));
        }
      }
    }
  }

  std::map<CorruptionKind, std::map<std::string, SeverityValues>> tables_;
  std::string checksum_;
  std::string version_;
};

}  // namespace aerobust
