// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and reference oracles for the unit and acceptance tests.
// The oracles deliberately avoid the library code paths they check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "aerobust/aerobust.hpp"

namespace aerobust::testing {

// ---------------------------------------------------------------------------
// Published benchmark rows: clean AP, 19 severity-averaged APs (in kind
// order), published mPC, published relative scores, and the cloud columns.

struct BenchmarkRow {
  const char* model;
  double ap_clean;
  double mpc;
  std::array<double, kNumKinds> kind_ap;
  double rpc, rpc_noise, rpc_blur, rpc_weather, rpc_digital;
  double ap_clouds, rpc_clouds;
};

inline const std::vector<BenchmarkRow>& benchmark_rows() {
  static const std::vector<BenchmarkRow> rows = {
      {"Rotated Faster R-CNN", 73.4, 38.9,
       {20.2, 19.7, 17.7, 27.6, 40.5, 46.4, 40.6, 14.1, 43.0, 24.3, 46.2, 49.3, 63.1, 46.7, 42.4, 33.2, 53.1, 50.4, 60.7},
       53.01, 29.01, 50.31, 62.56, 65.38, 58.53, 79.73},
      {"RoI Transformer", 76.1, 39.9,
       {19.8, 20.2, 17.8, 29.1, 41.1, 48.8, 42.6, 14.7, 44.0, 26.5, 47.1, 49.2, 63.5, 49.4, 42.5, 35.0, 53.6, 51.5, 62.3},
       52.46, 28.55, 50.24, 61.95, 64.35, 60.03, 78.90},
      {"Oriented R-CNN", 75.7, 40.7,
       {21.7, 21.7, 18.7, 30.3, 41.9, 49.0, 42.3, 14.8, 44.3, 25.6, 48.7, 51.5, 65.6, 48.5, 43.2, 34.9, 55.5, 50.7, 63.4},
       53.71, 30.52, 50.84, 63.39, 65.45, 60.59, 80.05},
      {"ReDet", 76.7, 45.9,
       {24.7, 24.6, 22.4, 34.3, 50.3, 53.6, 48.3, 18.1, 53.2, 35.3, 58.3, 63.1, 70.5, 52.0, 54.3, 33.2, 59.4, 52.4, 64.9},
       59.90, 34.55, 58.27, 72.81, 68.91, 66.19, 86.33},
      {"SFRNet", 75.9, 41.3,
       {22.0, 22.2, 19.6, 30.4, 42.6, 49.4, 43.6, 14.8, 45.4, 28.0, 48.7, 51.5, 66.1, 49.3, 44.0, 35.2, 55.6, 52.5, 63.5},
       54.39, 31.04, 51.59, 64.18, 66.10, 60.38, 79.55},
      {"OAN", 73.9, 40.0,
       {19.4, 20.1, 17.2, 28.6, 41.6, 49.0, 43.8, 14.6, 44.4, 26.0, 47.6, 50.1, 64.1, 48.8, 42.7, 34.5, 53.9, 51.5, 61.8},
       54.08, 28.84, 52.34, 64.00, 66.10, 60.25, 81.51},
      {"RetinaNet", 68.4, 37.3,
       {20.0, 19.7, 16.9, 26.7, 40.5, 45.8, 39.6, 14.0, 43.3, 23.3, 45.2, 47.9, 59.4, 42.9, 40.3, 31.5, 48.0, 46.4, 58.1},
       54.57, 30.40, 53.55, 63.93, 65.55, 55.12, 80.55},
      {"FCOS", 71.3, 38.9,
       {20.6, 20.5, 18.7, 27.6, 41.3, 46.8, 39.6, 14.5, 43.7, 26.1, 46.6, 50.7, 61.2, 45.8, 43.8, 31.6, 51.4, 48.3, 59.6},
       54.50, 30.67, 52.13, 64.62, 65.85, 57.51, 80.68},
      {"R3Det", 69.8, 37.8,
       {19.9, 19.6, 17.3, 27.4, 38.6, 44.3, 38.0, 14.4, 42.0, 24.8, 46.5, 48.6, 61.1, 43.8, 41.8, 31.8, 51.7, 47.1, 59.4},
       54.14, 30.14, 50.80, 64.38, 66.43, 56.65, 81.15},
      {"S2A-Net", 73.9, 39.8,
       {18.6, 18.6, 15.7, 26.3, 42.3, 48.4, 41.2, 15.1, 44.9, 28.7, 49.7, 53.2, 64.0, 46.5, 45.0, 33.8, 50.9, 49.9, 62.7},
       53.81, 26.83, 51.96, 65.50, 65.57, 59.29, 80.22},
      {"PSC", 71.9, 37.9,
       {18.3, 18.2, 16.0, 25.3, 41.5, 46.0, 40.6, 14.4, 44.7, 23.8, 46.0, 49.9, 61.3, 44.4, 42.3, 32.8, 48.0, 46.8, 59.2},
       52.67, 27.01, 52.10, 62.72, 63.73, 57.25, 79.62},
  };
  return rows;
}

/// A complete matrix whose every severity of kind k holds the row's kind average.
inline EvalMatrix matrix_from_row(const BenchmarkRow& row) {
  EvalMatrix m;
  for (int k = 0; k < kNumKinds; ++k)
    for (int s = 1; s <= kNumSeverities; ++s) m.set(kAllKinds[k], s, row.kind_ap[k]);
  m.set_clean(row.ap_clean);
  m.set_clouds(row.ap_clouds);
  return m;
}

inline EvalMatrix random_matrix(RngStream& rng) {
  EvalMatrix m;
  for (auto k : kAllKinds)
    for (int s = 1; s <= kNumSeverities; ++s) m.set(k, s, rng.uniform(0.0, 100.0));
  m.set_clean(rng.uniform(1.0, 100.0));
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic aerial-like scenes: textured ground, roads and rotated vehicles.

inline RasterImage fixture_scene(int index, int width = 160, int height = 160) {
  RngStream rng(0xF1C7u + static_cast<std::uint64_t>(index) * 7919u);
  RngStream tex_rng(rng.next_u64());
  const RealImage tex = fractal_noise(width, height, 1.6 + 0.1 * (index % 5), tex_rng);
  const double base[3] = {rng.uniform(60, 140), rng.uniform(70, 150), rng.uniform(50, 120)};
  const double tint[3] = {rng.uniform(40, 90), rng.uniform(40, 90), rng.uniform(40, 90)};
  RasterImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = quantize_sample(base[c] + tint[c] * (tex.at(x, y) - 0.5) + 0.15 * (x - y) * (c - 1));
  // A road.
  const double angle = rng.uniform(0.0, std::numbers::pi);
  const double rx = width / 2.0;
  const double ry = height / 2.0;
  const double road = rng.uniform(6.0, 14.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double d = std::abs((x - rx) * std::sin(angle) - (y - ry) * std::cos(angle));
      if (d < road / 2) img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = quantize_sample(90 + 20 * tex.at(x, y));
    }
  // Vehicles and buildings.
  const int objects = 6 + index % 5;
  for (int o = 0; o < objects; ++o) {
    const auto box = OrientedBox::rotated(rng.uniform(10, width - 10), rng.uniform(10, height - 10),
                                          rng.uniform(6, 30), rng.uniform(4, 16), rng.uniform(0, std::numbers::pi));
    const double col[3] = {rng.uniform(0, 255), rng.uniform(0, 255), rng.uniform(0, 255)};
    const auto& v = box.vertices();
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const Point p{x + 0.5, y + 0.5};
        bool inside = true;
        for (int i = 0; i < 4 && inside; ++i) inside = cross(v[(i + 1) % 4] - v[i], p - v[i]) >= 0.0;
        if (inside)
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = quantize_sample(col[c]);
      }
  }
  return img;
}

/// Synthetic cloudy scene: dark ground under fractal cloud cover.
inline RasterImage fixture_cloud(int index, int width = 192, int height = 160) {
  RngStream rng(0xC10Du + static_cast<std::uint64_t>(index) * 104729u);
  const RealImage cover = fractal_noise(width, height, 1.8, rng);
  RasterImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double v = std::pow(cover.at(x, y), 1.5);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = quantize_sample(40 + 10 * c + 215 * v - 5 * c * v);
    }
  return img;
}

// ---------------------------------------------------------------------------
// IoU oracle: stratified (jittered-grid) Monte Carlo over the joint bounding
// box, with membership from half-plane tests.

inline bool inside_convex(const std::array<Point, 4>& poly, double x, double y) {
  int pos = 0;
  int neg = 0;
  for (int i = 0; i < 4; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % 4];
    const double c = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (c > 0) ++pos;
    if (c < 0) ++neg;
  }
  return pos == 0 || neg == 0;
}

inline double monte_carlo_iou(const std::array<Point, 4>& a, const std::array<Point, 4>& b, RngStream& rng,
                              int grid = 1000) {
  double x0 = a[0].x, x1 = a[0].x, y0 = a[0].y, y1 = a[0].y;
  for (const auto* poly : {&a, &b})
    for (const auto& p : *poly) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  const double cw = (x1 - x0) / grid;
  const double ch = (y1 - y0) / grid;
  std::uint64_t both = 0;
  std::uint64_t any = 0;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const double x = x0 + (i + rng.uniform()) * cw;
      const double y = y0 + (j + rng.uniform()) * ch;
      const bool in_a = inside_convex(a, x, y);
      const bool in_b = inside_convex(b, x, y);
      both += in_a && in_b;
      any += in_a || in_b;
    }
  return any == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(any);
}

/// Random convex quadrilateral: a rotated rectangle or four sorted angles on an ellipse.
inline std::array<Point, 4> random_convex_quad(RngStream& rng, double cx, double cy, double scale) {
  if (rng.uniform() < 0.5) {
    return OrientedBox::rotated(cx, cy, rng.uniform(0.2, 1.0) * scale, rng.uniform(0.2, 1.0) * scale,
                                rng.uniform(0.0, 2 * std::numbers::pi))
        .vertices();
  }
  std::array<double, 4> t;
  for (auto& v : t) v = rng.uniform(0.0, 2 * std::numbers::pi);
  std::sort(t.begin(), t.end());
  const double rx = rng.uniform(0.3, 1.0) * scale;
  const double ry = rng.uniform(0.3, 1.0) * scale;
  std::array<Point, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = {cx + rx * std::cos(t[i]), cy + ry * std::sin(t[i])};
  return q;
}

// ---------------------------------------------------------------------------
// AP oracle for small instances: every prefix of the ranking is re-matched
// from scratch, and the interpolated precision at each recall level is a
// direct maximum over all prefixes.

struct SimpleBox {
  int x0, y0, x1, y1;
};

inline double box_iou(const SimpleBox& a, const SimpleBox& b) {
  const int iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const int ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = static_cast<double>(iw) * ih;
  const double uni = static_cast<double>(a.x1 - a.x0) * (a.y1 - a.y0) + static_cast<double>(b.x1 - b.x0) * (b.y1 - b.y0) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

struct OracleGt {
  std::string image;
  SimpleBox box;
  bool difficult;
};

struct OracleDet {
  std::string image;
  double score;
  SimpleBox box;
};

/// Outcome of detection `ranked[k]` given the ranked list: 1 TP, 0 FP, -1 ignored.
inline int oracle_outcome(const std::vector<OracleDet>& ranked, std::size_t k, const std::vector<OracleGt>& gts,
                          double threshold) {
  std::vector<bool> used(gts.size(), false);
  int outcome = 0;
  for (std::size_t d = 0; d <= k; ++d) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image != ranked[d].image) continue;
      const double iou = box_iou(ranked[d].box, gts[g].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= threshold) {
      if (gts[best].difficult) {
        outcome = -1;
      } else {
        used[best] = true;
        outcome = 1;
      }
    } else {
      outcome = 0;
    }
  }
  return outcome;
}

/// AP in percent for one class.
inline double oracle_ap(const std::vector<OracleDet>& dets, const std::vector<OracleGt>& gts, double threshold,
                        bool eleven_point) {
  int npos = 0;
  for (const auto& g : gts) npos += g.difficult ? 0 : 1;
  if (npos == 0) return std::nan("");
  // Rank by score, earlier input first among equal scores (selection, not a sort).
  std::vector<OracleDet> ranked;
  std::vector<bool> taken(dets.size(), false);
  for (std::size_t r = 0; r < dets.size(); ++r) {
    int pick = -1;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (!taken[i] && (pick < 0 || dets[i].score > dets[pick].score)) pick = static_cast<int>(i);
    taken[pick] = true;
    ranked.push_back(dets[pick]);
  }
  std::vector<std::pair<double, double>> points;  // (recall, precision) of counted prefixes
  int tp = 0;
  int fp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const int o = oracle_outcome(ranked, k, gts, threshold);
    if (o < 0) continue;
    (o == 1 ? tp : fp) += 1;
    points.emplace_back(static_cast<double>(tp) / npos, static_cast<double>(tp) / (tp + fp));
  }
  auto best_at = [&](double r) {
    double best = 0.0;
    for (const auto& [rec, prec] : points)
      if (rec >= r) best = std::max(best, prec);
    return best;
  };
  double ap = 0.0;
  if (eleven_point) {
    for (int i = 0; i <= 10; ++i) ap += best_at(i / 10.0) / 11.0;
  } else {
    std::vector<double> levels;
    for (const auto& pt : points) levels.push_back(pt.first);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double prev = 0.0;
    for (double r : levels) {
      ap += (r - prev) * best_at(r);
      prev = r;
    }
  }
  return 100.0 * ap;
}

struct ApCase {
  std::vector<OracleDet> dets;
  std::vector<OracleGt> gts;
};

/// Small random instance on a coarse grid so IoU ties, score ties and
/// duplicates occur often.
inline ApCase random_ap_case(RngStream& rng) {
  ApCase c;
  const int images = rng.integer(1, 2);
  auto random_box = [&] {
    const int x = rng.integer(0, 6);
    const int y = rng.integer(0, 6);
    return SimpleBox{x, y, x + rng.integer(1, 4), y + rng.integer(1, 4)};
  };
  const int ngt = rng.integer(0, 4);
  for (int i = 0; i < ngt; ++i)
    c.gts.push_back({"img" + std::to_string(rng.integer(1, images)), random_box(), rng.uniform() < 0.2});
  const int ndet = rng.integer(0, 6);
  for (int i = 0; i < ndet; ++i) {
    OracleDet d{"img" + std::to_string(rng.integer(1, images)), rng.integer(1, 5) / 5.0, random_box()};
    if (!c.gts.empty() && rng.uniform() < 0.5) {
      const auto& g = c.gts[rng.below(c.gts.size())];
      d.image = g.image;
      d.box = g.box;
      if (rng.uniform() < 0.5) d.box.x1 += 1;
    }
    c.dets.push_back(d);
  }
  return c;
}

inline OrientedBox to_oriented(const SimpleBox& b) { return OrientedBox::axis_aligned(b.x0, b.y0, b.x1, b.y1); }

/// The same instance in library records, all under one class.
inline std::pair<std::vector<DetectionRecord>, std::vector<GroundTruthRecord>> to_records(const ApCase& c,
                                                                                          const std::string& cls) {
  std::vector<DetectionRecord> dets;
  std::vector<GroundTruthRecord> gts;
  for (const auto& d : c.dets) dets.push_back({d.image, cls, d.score, to_oriented(d.box)});
  for (const auto& g : c.gts) gts.push_back({g.image, to_oriented(g.box), cls, g.difficult});
  return {dets, gts};
}

// ---------------------------------------------------------------------------

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("aerobust_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace aerobust::testing
