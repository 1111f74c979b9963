// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aerobust/corruption_kind.hpp"
#include "aerobust/dota.hpp"
#include "aerobust/error.hpp"
#include "aerobust/geometry.hpp"

namespace aerobust {

enum class ApInterpolation { voc07_11point, continuous };

constexpr std::string_view name(ApInterpolation interp) noexcept {
  return interp == ApInterpolation::voc07_11point ? "voc07_11point" : "continuous";
}

inline ApInterpolation parse_interpolation(std::string_view text) {
  if (text == "voc07_11point" || text == "voc07") return ApInterpolation::voc07_11point;
  if (text == "continuous") return ApInterpolation::continuous;
  throw ParameterError("unknown interpolation '" + std::string(text) + "'; expected voc07_11point or continuous");
}

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// Ranked precision/recall after matching; recall is non-decreasing.
using PRCurve = std::vector<PRPoint>;

/// AP in [0, 1] from a PR curve.
inline double ap_from_curve(const PRCurve& curve, ApInterpolation interp) {
  if (interp == ApInterpolation::voc07_11point) {
    // Running max of precision from the right gives max{p : r >= t} by binary search.
    std::vector<double> best(curve.size() + 1, 0.0);
    for (std::size_t i = curve.size(); i-- > 0;) best[i] = std::max(best[i + 1], curve[i].precision);
    double sum = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      const auto it = std::lower_bound(curve.begin(), curve.end(), t,
                                       [](const PRPoint& p, double thr) { return p.recall < thr; });
      sum += best[static_cast<std::size_t>(it - curve.begin())];
    }
    return sum / 11.0;
  }
  std::vector<double> rec{0.0};
  std::vector<double> pre{0.0};
  for (const auto& p : curve) {
    rec.push_back(p.recall);
    pre.push_back(p.precision);
  }
  rec.push_back(1.0);
  pre.push_back(0.0);
  for (std::size_t i = pre.size() - 1; i-- > 0;) pre[i] = std::max(pre[i], pre[i + 1]);
  double ap = 0.0;
  for (std::size_t i = 1; i < rec.size(); ++i)
    if (rec[i] != rec[i - 1]) ap += (rec[i] - rec[i - 1]) * pre[i];
  return ap;
}

struct ClassAp {
  std::string category;
  std::size_t num_gt = 0;       // non-difficult ground truth
  std::size_t num_detections = 0;
  double ap = std::numeric_limits<double>::quiet_NaN();  // percent; NaN without ground truth
  PRCurve curve;
};

struct ApResult {
  std::vector<ClassAp> per_class;
  double mean_ap = 0.0;  // percent, over classes with ground truth
  ApInterpolation interpolation = ApInterpolation::voc07_11point;
  double iou_threshold = 0.5;
};

/// Precision/recall curve for one class. Detections are ranked by score
/// (stable for ties); each takes the highest-IoU unmatched ground truth of its
/// image (first index on ties). Hits on difficult ground truth are ignored
/// and never consume it.
inline PRCurve match_class(const std::vector<const DetectionRecord*>& dets,
                           const std::vector<const GroundTruthRecord*>& gts, double iou_threshold,
                           std::size_t* num_gt_out = nullptr) {
  std::map<std::string, std::vector<std::size_t>> gts_by_image;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    gts_by_image[gts[i]->image_id].push_back(i);
    if (!gts[i]->difficult) ++npos;
  }
  if (num_gt_out) *num_gt_out = npos;
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dets[a]->score > dets[b]->score; });

  std::vector<bool> matched(gts.size(), false);
  PRCurve curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t di : order) {
    const auto& det = *dets[di];
    double best_iou = -1.0;
    std::optional<std::size_t> best;
    if (auto it = gts_by_image.find(det.image_id); it != gts_by_image.end()) {
      for (std::size_t gi : it->second) {
        if (matched[gi]) continue;
        const double iou = rotated_iou(det.box, gts[gi]->box);
        if (iou > best_iou) {
          best_iou = iou;
          best = gi;
        }
      }
    }
    if (best && best_iou >= iou_threshold) {
      if (gts[*best]->difficult) continue;
      matched[*best] = true;
      ++tp;
    } else {
      ++fp;
    }
    curve.push_back({npos > 0 ? static_cast<double>(tp) / npos : 0.0, static_cast<double>(tp) / (tp + fp)});
  }
  return curve;
}

/// Per-class AP and their unweighted mean (percent). Both inputs must use
/// only names from `classes`.
inline ApResult average_precision(const std::vector<DetectionRecord>& dets, const std::vector<GroundTruthRecord>& gts,
                                  const std::vector<std::string>& classes = dota_v1_classes(),
                                  double iou_threshold = 0.5,
                                  ApInterpolation interp = ApInterpolation::voc07_11point) {
  const std::set<std::string> known(classes.begin(), classes.end());
  std::set<std::string> unknown;
  for (const auto& d : dets)
    if (!known.contains(d.category)) unknown.insert(d.category);
  for (const auto& g : gts)
    if (!known.contains(g.category)) unknown.insert(g.category);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw ConfigError("unknown classes: " + list);
  }
  ApResult result;
  result.interpolation = interp;
  result.iou_threshold = iou_threshold;
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& cls : classes) {
    std::vector<const DetectionRecord*> cd;
    std::vector<const GroundTruthRecord*> cg;
    for (const auto& d : dets)
      if (d.category == cls) cd.push_back(&d);
    for (const auto& g : gts)
      if (g.category == cls) cg.push_back(&g);
    ClassAp entry;
    entry.category = cls;
    entry.num_detections = cd.size();
    entry.curve = match_class(cd, cg, iou_threshold, &entry.num_gt);
    if (entry.num_gt > 0) {
      entry.ap = 100.0 * ap_from_curve(entry.curve, interp);
      sum += entry.ap;
      ++counted;
    }
    result.per_class.push_back(std::move(entry));
  }
  result.mean_ap = counted > 0 ? sum / counted : 0.0;
  return result;
}

/// AP50 grid over (corruption, severity) plus clean and cloud AP, all in percent.
class EvalMatrix {
 public:
  void set(CorruptionKind kind, int severity, double ap) {
    check_value(ap);
    if (severity < 1 || severity > kNumSeverities) throw ParameterError("severity must be in 1..5");
    cells_[{kind, severity}] = ap;
  }

  void set_clean(double ap) {
    check_value(ap);
    clean_ = ap;
  }

  void set_clouds(double ap) {
    check_value(ap);
    clouds_ = ap;
  }

  std::optional<double> get(CorruptionKind kind, int severity) const {
    auto it = cells_.find({kind, severity});
    return it == cells_.end() ? std::nullopt : std::optional<double>(it->second);
  }

  /// Throws IncompleteMatrixError naming "kind/severity".
  double at(CorruptionKind kind, int severity) const {
    if (auto v = get(kind, severity)) return *v;
    throw IncompleteMatrixError(std::string(name(kind)) + "/" + std::to_string(severity));
  }

  const std::optional<double>& clean() const noexcept { return clean_; }
  const std::optional<double>& clouds() const noexcept { return clouds_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  void require_complete() const {
    for (auto kind : kAllKinds)
      for (int s = 1; s <= kNumSeverities; ++s) at(kind, s);
  }

 private:
  static void check_value(double ap) {
    if (!(ap >= 0.0 && ap <= 100.0)) throw ParameterError("AP values must lie in [0, 100]");
  }

  std::map<std::pair<CorruptionKind, int>, double> cells_;
  std::optional<double> clean_;
  std::optional<double> clouds_;
};

/// Severity-averaged AP of one kind.
inline double kind_mean(const EvalMatrix& m, CorruptionKind kind) {
  double s = 0.0;
  for (int sev = 1; sev <= kNumSeverities; ++sev) s += m.at(kind, sev);
  return s / kNumSeverities;
}

/// Mean performance under corruption over all 19 kinds and 5 severities.
inline double mpc(const EvalMatrix& m) {
  m.require_complete();
  double s = 0.0;
  for (auto kind : kAllKinds) s += kind_mean(m, kind);
  return s / kNumKinds;
}

inline double rpc(double mpc_value, double ap_clean) {
  if (!(ap_clean > 0.0)) throw UndefinedRatioError("relative performance needs a positive clean AP");
  return 100.0 * mpc_value / ap_clean;
}

/// Relative performance restricted to one corruption category.
inline double category_rpc(const EvalMatrix& m, CorruptionCategory category, double ap_clean) {
  double s = 0.0;
  int n = 0;
  for (auto kind : kAllKinds) {
    if (category_of(kind) != category) continue;
    s += kind_mean(m, kind);
    ++n;
  }
  return rpc(s / n, ap_clean);
}

inline double rpc_clouds(double ap_clouds, double ap_clean) { return rpc(ap_clouds, ap_clean); }

/// Mean AP over all kinds at each fixed severity.
inline std::array<double, kNumSeverities> severity_curve(const EvalMatrix& m) {
  m.require_complete();
  std::array<double, kNumSeverities> curve{};
  for (int sev = 1; sev <= kNumSeverities; ++sev) {
    double s = 0.0;
    for (auto kind : kAllKinds) s += m.at(kind, sev);
    curve[sev - 1] = s / kNumKinds;
  }
  return curve;
}

struct RobustnessSummary {
  double ap_clean = 0.0;
  double mpc = 0.0;
  double rpc = 0.0;
  std::map<CorruptionCategory, double> category_rpc;
  std::optional<double> ap_clouds;
  std::optional<double> rpc_clouds;
  std::array<double, kNumSeverities> severity_curve{};
};

/// All aggregates of a complete matrix with a clean AP.
inline RobustnessSummary summarize(const EvalMatrix& m) {
  if (!m.clean()) throw IncompleteMatrixError("clean");
  RobustnessSummary s;
  s.ap_clean = *m.clean();
  s.mpc = mpc(m);
  s.rpc = rpc(s.mpc, s.ap_clean);
  for (auto c : kAllCategories) s.category_rpc[c] = category_rpc(m, c, s.ap_clean);
  if (m.clouds()) {
    s.ap_clouds = *m.clouds();
    s.rpc_clouds = rpc_clouds(*m.clouds(), s.ap_clean);
  }
  s.severity_curve = severity_curve(m);
  return s;
}

/// Flat CSV: "kind,severity,ap" rows, then "clean,,ap" and "clouds,,ap".
inline std::string write_matrix_csv(const EvalMatrix& m) {
  std::string out = "kind,severity,ap\n";
  for (auto kind : kAllKinds)
    for (int s = 1; s <= kNumSeverities; ++s)
      if (auto v = m.get(kind, s)) out += std::string(name(kind)) + "," + std::to_string(s) + "," + format_number(*v) + "\n";
  if (m.clean()) out += "clean,," + format_number(*m.clean()) + "\n";
  if (m.clouds()) out += "clouds,," + format_number(*m.clouds()) + "\n";
  return out;
}

inline EvalMatrix parse_matrix_csv(std::string_view text) {
  EvalMatrix m;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (lineno == 1 && line == "kind,severity,ap") continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 3) throw ParseError("expected 'kind,severity,ap'", lineno);
    const double ap = detail::parse_real(f[2], lineno, "ap");
    if (!(ap >= 0.0 && ap <= 100.0)) throw ParseError("ap " + f[2] + " outside [0, 100]", lineno);
    const std::string key = f[0] + "/" + f[1];
    if (!seen.insert(key).second) throw ParseError("duplicate cell " + key, lineno);
    if (f[0] == "clean" || f[0] == "clouds") {
      if (!f[1].empty()) throw ParseError(f[0] + " row takes no severity", lineno);
      f[0] == "clean" ? m.set_clean(ap) : m.set_clouds(ap);
      continue;
    }
    auto kind = find_kind(f[0]);
    if (!kind) throw ParseError("unknown corruption kind '" + f[0] + "'", lineno);
    int sev = 0;
    auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), sev);
    if (ec != std::errc{} || p != f[1].data() + f[1].size() || sev < 1 || sev > kNumSeverities) {
      throw ParseError("severity must be an integer in 1..5, got '" + f[1] + "'", lineno);
    }
    m.set(*kind, sev, ap);
  }
  return m;
}

}  // namespace aerobust
