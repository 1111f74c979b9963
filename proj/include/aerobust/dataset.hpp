// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aerobust/cloud.hpp"
#include "aerobust/codec.hpp"
#include "aerobust/corrupt.hpp"
#include "aerobust/corruption_kind.hpp"
#include "aerobust/schedule.hpp"

namespace aerobust {

namespace fs = std::filesystem;

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers. `fn` must not throw.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

/// Sorted PNG/JPEG files directly inside `dir`.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("image directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && format_from_path(e.path())) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

/// Image id of a dataset file: its stem.
inline std::string image_id_of(const fs::path& p) { return p.stem().string(); }

struct ItemFailure {
  std::string item;
  std::string message;
};

struct CorruptJobReport {
  std::uint64_t global_seed = 0;
  std::string schedule_checksum;
  std::size_t images = 0;
  std::size_t outputs = 0;
  std::map<std::string, std::size_t> per_kind_counts;
  std::vector<ItemFailure> failures;
};

/// Output of one corrupted image: <root>/<kind>/<severity>/<image_id>.png
inline fs::path corrupted_path(const fs::path& root, CorruptionKind kind, int severity, const std::string& image_id) {
  return root / std::string(name(kind)) / std::to_string(severity) / (image_id + ".png");
}

/// Corrupts every manifest image at every requested (kind, severity).
/// Outputs are PNG. Unreadable inputs are recorded and skipped.
inline CorruptJobReport corrupt_dataset(const std::vector<fs::path>& manifest, const std::vector<CorruptionKind>& kinds,
                                        const std::vector<int>& severities, std::uint64_t global_seed,
                                        const fs::path& out_root,
                                        const SeveritySchedule& schedule = SeveritySchedule::builtin(),
                                        const CorruptOptions& options = {}, unsigned threads = 0) {
  for (int s : severities)
    if (s < 1 || s > kNumSeverities) throw ParameterError("severity must be in 1..5, got " + std::to_string(s));
  struct PerImage {
    std::vector<CorruptionKind> done;
    std::vector<ItemFailure> failures;
  };
  std::vector<PerImage> results(manifest.size());
  parallel_for(manifest.size(), threads, [&](std::size_t i) {
    const auto& path = manifest[i];
    const std::string id = image_id_of(path);
    RasterImage image;
    try {
      image = read_image(path);
    } catch (const std::exception& e) {
      results[i].failures.push_back({path.string(), e.what()});
      return;
    }
    for (auto kind : kinds)
      for (int sev : severities) {
        try {
          const CorruptionSpec spec{kind, sev, derive_seed(global_seed, id, name(kind), sev)};
          write_image(corrupted_path(out_root, kind, sev, id), corrupt(image, spec, schedule, options));
          results[i].done.push_back(kind);
        } catch (const std::exception& e) {
          results[i].failures.push_back(
              {path.string() + " [" + std::string(name(kind)) + "/" + std::to_string(sev) + "]", e.what()});
        }
      }
  });
  CorruptJobReport report;
  report.global_seed = global_seed;
  report.schedule_checksum = schedule.checksum();
  report.images = manifest.size();
  for (auto kind : kinds) report.per_kind_counts[std::string(name(kind))] = 0;
  for (auto& r : results) {
    for (auto kind : r.done) ++report.per_kind_counts[std::string(name(kind))];
    report.outputs += r.done.size();
    report.failures.insert(report.failures.end(), r.failures.begin(), r.failures.end());
  }
  return report;
}

struct CloudifyJobReport {
  std::uint64_t global_seed = 0;
  std::size_t outputs = 0;
  std::vector<std::string> source_names;
  std::vector<double> source_gammas;
  std::vector<std::size_t> source_usage;
  std::map<std::string, CloudAssignment> assignments;
  std::vector<ItemFailure> failures;
};

/// Output of one clouded image: <root>/clouds/<image_id>.png
inline fs::path clouded_path(const fs::path& root, const std::string& image_id) {
  return root / "clouds" / (image_id + ".png");
}

/// Transfers one seeded pool cloud onto every manifest image.
inline CloudifyJobReport cloudify_dataset(const std::vector<fs::path>& manifest, const std::vector<PreparedCloud>& pool,
                                          std::uint64_t global_seed, const fs::path& out_root,
                                          const CompositeParams& params = {}, unsigned threads = 0) {
  if (pool.empty()) throw ConfigError("cloud pool is empty");
  struct PerImage {
    std::optional<CloudAssignment> assignment;
    std::optional<ItemFailure> failure;
  };
  std::vector<PerImage> results(manifest.size());
  parallel_for(manifest.size(), threads, [&](std::size_t i) {
    const auto& path = manifest[i];
    const std::string id = image_id_of(path);
    try {
      const RasterImage clean = read_image(path);
      const auto a = assign_cloud(pool, global_seed, id, clean.width(), clean.height());
      write_image(clouded_path(out_root, id), cloudify_image(clean, pool, a, params));
      results[i].assignment = a;
    } catch (const std::exception& e) {
      results[i].failure = ItemFailure{path.string(), e.what()};
    }
  });
  CloudifyJobReport report;
  report.global_seed = global_seed;
  report.source_usage.assign(pool.size(), 0);
  for (const auto& p : pool) {
    report.source_names.push_back(p.source.name);
    report.source_gammas.push_back(p.source.gamma);
  }
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (results[i].assignment) {
      ++report.outputs;
      ++report.source_usage[results[i].assignment->source_index];
      report.assignments[image_id_of(manifest[i])] = *results[i].assignment;
    }
    if (results[i].failure) report.failures.push_back(*results[i].failure);
  }
  return report;
}

}  // namespace aerobust
