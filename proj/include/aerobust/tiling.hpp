// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aerobust/dota.hpp"
#include "aerobust/error.hpp"
#include "aerobust/geometry.hpp"
#include "aerobust/raster.hpp"

namespace aerobust {

inline constexpr int kDefaultTileSize = 1024;
inline constexpr int kDefaultTileOverlap = 200;
inline constexpr double kDefaultKeepFraction = 0.7;
inline constexpr double kDefaultMergeNmsIou = 0.1;

struct TileOrigin {
  int x = 0;
  int y = 0;
  friend bool operator==(TileOrigin, TileOrigin) = default;
  friend auto operator<=>(TileOrigin, TileOrigin) = default;
};

struct TilePlan {
  int width = 0;
  int height = 0;
  int tile_size = kDefaultTileSize;
  int overlap = kDefaultTileOverlap;
  std::vector<int> x_offsets;
  std::vector<int> y_offsets;

  int stride() const noexcept { return tile_size - overlap; }

  /// Row-major list of tile origins.
  std::vector<TileOrigin> origins() const {
    std::vector<TileOrigin> out;
    out.reserve(x_offsets.size() * y_offsets.size());
    for (int y : y_offsets)
      for (int x : x_offsets) out.push_back({x, y});
    return out;
  }

  bool contains(TileOrigin o) const noexcept {
    return std::find(x_offsets.begin(), x_offsets.end(), o.x) != x_offsets.end() &&
           std::find(y_offsets.begin(), y_offsets.end(), o.y) != y_offsets.end();
  }
};

namespace detail {

inline std::vector<int> axis_offsets(int dim, int tile, int stride) {
  std::vector<int> out{0};
  if (dim <= tile) return out;
  for (int o = stride;; o += stride) {
    if (o + tile >= dim) {
      const int last = dim - tile;
      if (last != out.back()) out.push_back(last);
      break;
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace detail

/// Sliding-window plan with the last window on each axis clamped to the image edge.
inline TilePlan plan_tiles(int width, int height, int tile_size = kDefaultTileSize, int overlap = kDefaultTileOverlap) {
  if (width < 1 || height < 1) throw ParameterError("plan_tiles: image dimensions must be >= 1");
  if (tile_size < 1) throw ParameterError("plan_tiles: tile size must be >= 1");
  if (overlap < 0 || overlap >= tile_size) {
    throw ParameterError("plan_tiles: overlap must lie in [0, tile_size), got " + std::to_string(overlap));
  }
  TilePlan plan{width, height, tile_size, overlap, {}, {}};
  plan.x_offsets = detail::axis_offsets(width, tile_size, plan.stride());
  plan.y_offsets = detail::axis_offsets(height, tile_size, plan.stride());
  return plan;
}

/// "<image_id>__<x>__<y>"
inline std::string tile_name(std::string_view image_id, TileOrigin o) {
  return std::string(image_id) + "__" + std::to_string(o.x) + "__" + std::to_string(o.y);
}

struct TileRef {
  std::string image_id;
  TileOrigin origin;
};

inline std::optional<TileRef> parse_tile_name(std::string_view name) {
  const auto second = name.rfind("__");
  if (second == std::string_view::npos || second == 0) return std::nullopt;
  const auto first = name.rfind("__", second - 1);
  if (first == std::string_view::npos || first == 0) return std::nullopt;
  auto to_int = [](std::string_view s) -> std::optional<int> {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
  };
  auto x = to_int(name.substr(first + 2, second - first - 2));
  auto y = to_int(name.substr(second + 2));
  if (!x || !y) return std::nullopt;
  return TileRef{std::string(name.substr(0, first)), {*x, *y}};
}

/// Tile pixels at `origin`; regions beyond the image are black.
inline RasterImage extract_tile(const RasterImage& image, TileOrigin origin, int tile_size) {
  return crop(image, origin.x, origin.y, tile_size, tile_size, std::uint8_t{0});
}

struct TileAnnotations {
  TileOrigin origin;
  std::string tile_id;
  std::vector<GroundTruthRecord> records;
};

/// Assigns boxes to tiles by the fraction of their area inside each tile.
/// Fractions of at least `keep_fraction` keep their flag; smaller positive
/// fractions are kept and marked difficult. Vertices are translated to tile
/// coordinates without clipping, so translating back restores them exactly.
inline std::vector<TileAnnotations> split_ground_truth(const std::vector<GroundTruthRecord>& gts, const TilePlan& plan,
                                                       const std::string& image_id,
                                                       double keep_fraction = kDefaultKeepFraction) {
  std::vector<TileAnnotations> tiles;
  for (const auto origin : plan.origins()) {
    TileAnnotations tile{origin, tile_name(image_id, origin), {}};
    const double x0 = origin.x;
    const double y0 = origin.y;
    const double x1 = x0 + plan.tile_size;
    const double y1 = y0 + plan.tile_size;
    const std::array<Point, 4> rect = {Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}};
    for (const auto& gt : gts) {
      const double total = gt.box.area();
      bool keep = false;
      bool difficult = gt.difficult;
      if (total > 1e-12) {
        const double inside = area(clip_convex(gt.box.vertices(), rect));
        const double fraction = inside / total;
        if (fraction >= keep_fraction) {
          keep = true;
        } else if (fraction > 0.0) {
          keep = true;
          difficult = true;
        }
      } else {
        keep = std::all_of(gt.box.vertices().begin(), gt.box.vertices().end(),
                           [&](Point p) { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; });
      }
      if (!keep) continue;
      GroundTruthRecord local = gt;
      local.image_id = tile.tile_id;
      local.box = gt.box.translated(-x0, -y0);
      local.difficult = difficult;
      tile.records.push_back(std::move(local));
    }
    tiles.push_back(std::move(tile));
  }
  return tiles;
}

/// Greedy rotated NMS per (image, category): keep the best-scoring box and
/// drop every remaining box with IoU >= `iou_threshold` against it. Output is
/// grouped by (image, category), scores descending, ties in input order.
inline std::vector<DetectionRecord> rotated_nms(const std::vector<DetectionRecord>& dets, double iou_threshold) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) groups[{dets[i].image_id, dets[i].category}].push_back(i);
  std::vector<DetectionRecord> out;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
    std::vector<bool> suppressed(idx.size(), false);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (suppressed[i]) continue;
      const auto& keep = dets[idx[i]];
      out.push_back(keep);
      for (std::size_t j = i + 1; j < idx.size(); ++j)
        if (!suppressed[j] && rotated_iou(keep.box, dets[idx[j]].box) >= iou_threshold) suppressed[j] = true;
    }
  }
  return out;
}

/// Maps per-tile detections (image ids in tile-name form) back to image
/// coordinates and removes cross-tile duplicates with rotated NMS.
inline std::vector<DetectionRecord> merge_detections(const std::vector<DetectionRecord>& per_tile,
                                                     const std::map<std::string, TilePlan>& plans,
                                                     double nms_iou = kDefaultMergeNmsIou) {
  std::vector<DetectionRecord> global;
  global.reserve(per_tile.size());
  for (const auto& d : per_tile) {
    auto ref = parse_tile_name(d.image_id);
    if (!ref) throw ParameterError("detection image id '" + d.image_id + "' is not a tile name");
    auto plan = plans.find(ref->image_id);
    if (plan == plans.end() || !plan->second.contains(ref->origin)) {
      throw ParameterError("detection references unknown tile '" + d.image_id + "'");
    }
    DetectionRecord g = d;
    g.image_id = ref->image_id;
    g.box = d.box.translated(ref->origin.x, ref->origin.y);
    global.push_back(std::move(g));
  }
  return rotated_nms(global, nms_iou);
}

}  // namespace aerobust
