// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aerobust/aerobust.hpp"
#include "json.hpp"

namespace aerobust::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

struct CorruptConfig {
  fs::path input;
  fs::path output;
  std::string kinds = "all";
  std::string severities = "1-5";
  std::uint64_t seed = 0;
  std::optional<fs::path> schedule;
  std::optional<fs::path> frost_dir;
  unsigned threads = 0;
};

struct CloudifyConfig {
  fs::path input;
  fs::path pool;
  fs::path output;
  std::uint64_t seed = 0;
  double gamma = kDefaultCloudGamma;
  double atmospheric_light = 0.95;
  unsigned threads = 0;
};

struct SplitConfig {
  fs::path images;
  std::optional<fs::path> labels;
  fs::path output;
  int tile_size = kDefaultTileSize;
  int overlap = kDefaultTileOverlap;
  double keep_fraction = kDefaultKeepFraction;
};

struct EvaluateConfig {
  std::optional<fs::path> matrix;
  std::optional<fs::path> dets;
  std::optional<fs::path> gt;
  std::optional<fs::path> images;  // set to merge per-tile detections
  fs::path output;
  std::string classes;             // comma-separated; empty = DOTA-v1.0
  double iou = 0.5;
  std::string interp = "voc07_11point";
  double nms_iou = kDefaultMergeNmsIou;
  int tile_size = kDefaultTileSize;
  int overlap = kDefaultTileOverlap;
};

struct ReportConfig {
  std::vector<std::string> matrices;  // "name=path" or "path"
  fs::path output;
};

// ---------------------------------------------------------------------------
// Argument helpers

inline std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

/// "all" or a comma-separated list of kind names.
inline std::vector<CorruptionKind> parse_kind_list(const std::string& text) {
  if (text == "all") return {kAllKinds.begin(), kAllKinds.end()};
  std::vector<CorruptionKind> out;
  for (const auto& k : split_list(text)) {
    const auto kind = parse_kind(k);
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
  }
  if (out.empty()) throw ParameterError("no corruption kinds given; valid kinds: " + valid_kind_list());
  return out;
}

/// "3", "1-5", "1,3,5" or combinations.
inline std::vector<int> parse_severity_list(const std::string& text) {
  std::vector<int> out;
  auto parse_one = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      if (v < 1 || v > kNumSeverities) throw ParameterError("severity must be in 1..5, got " + s);
      return v;
    } catch (const std::logic_error&) {
      throw ParameterError("malformed severity '" + s + "'");
    }
  };
  for (const auto& part : split_list(text)) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_one(part));
      continue;
    }
    const int lo = parse_one(part.substr(0, dash));
    const int hi = parse_one(part.substr(dash + 1));
    if (lo > hi) throw ParameterError("empty severity range '" + part + "'");
    for (int s = lo; s <= hi; ++s) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ParameterError("no severities given");
  return out;
}

struct DatasetDirs {
  fs::path images;
  std::optional<fs::path> labels;
};

/// Accepts either a DOTA-style root (images/ and labelTxt/) or a flat image directory.
inline DatasetDirs resolve_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw ConfigError("input directory not found: " + root.string());
  DatasetDirs d{root, std::nullopt};
  if (fs::is_directory(root / "images")) d.images = root / "images";
  if (fs::is_directory(root / "labelTxt")) d.labels = root / "labelTxt";
  return d;
}

inline void copy_labels(const std::optional<fs::path>& labels, const fs::path& dest) {
  if (!labels) return;
  fs::create_directories(dest);
  for (const auto& e : fs::directory_iterator(*labels))
    if (e.is_regular_file() && e.path().extension() == ".txt")
      fs::copy_file(e.path(), dest / e.path().filename(), fs::copy_options::overwrite_existing);
}

inline void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline ordered_json report_header(const std::string& command) {
  ordered_json j;
  j["tool"] = "aerobust";
  j["version"] = kVersion;
  j["command"] = command;
  return j;
}

inline ordered_json failures_json(const std::vector<ItemFailure>& failures) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : failures) arr.push_back({{"item", f.item}, {"error", f.message}});
  return arr;
}

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// corrupt

inline int cmd_corrupt(const CorruptConfig& cfg, std::ostream& log = std::cerr) {
  // Validate everything before writing anything.
  const auto kinds = parse_kind_list(cfg.kinds);
  const auto severities = parse_severity_list(cfg.severities);
  const auto dirs = resolve_dataset(cfg.input);
  const auto manifest = list_images(dirs.images);
  const SeveritySchedule schedule = cfg.schedule ? SeveritySchedule::from_file(*cfg.schedule) : SeveritySchedule::builtin();
  std::vector<RasterImage> frost_textures;
  if (cfg.frost_dir) {
    for (const auto& p : list_images(*cfg.frost_dir)) frost_textures.push_back(read_image(p));
    if (frost_textures.empty()) throw ConfigError("frost texture directory has no images: " + cfg.frost_dir->string());
  }
  if (cfg.output.empty()) throw ConfigError("--out is required");

  CorruptOptions options{frost_textures};
  const auto report = corrupt_dataset(manifest, kinds, severities, cfg.seed, cfg.output, schedule, options, cfg.threads);
  copy_labels(dirs.labels, cfg.output / "labelTxt");

  ordered_json j = report_header("corrupt");
  ordered_json config;
  config["in"] = cfg.input.string();
  config["out"] = cfg.output.string();
  config["kinds"] = cfg.kinds;
  config["severities"] = cfg.severities;
  config["seed"] = cfg.seed;
  config["schedule"] = cfg.schedule ? cfg.schedule->string() : "builtin";
  config["frost_dir"] = cfg.frost_dir ? cfg.frost_dir->string() : "";
  j["config"] = config;
  j["global_seed"] = report.global_seed;
  j["schedule_checksum"] = report.schedule_checksum;
  j["images"] = report.images;
  j["outputs"] = report.outputs;
  j["per_kind_counts"] = report.per_kind_counts;
  j["failures"] = failures_json(report.failures);
  write_text(cfg.output / "corrupt_report.json", j.dump(2) + "\n");

  log << "corrupt: " << report.outputs << " outputs from " << report.images << " images, " << report.failures.size()
      << " failures\n";
  for (const auto& f : report.failures) log << "  failed: " << f.item << ": " << f.message << "\n";
  return report.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// cloudify

inline int cmd_cloudify(const CloudifyConfig& cfg, std::ostream& log = std::cerr) {
  const auto dirs = resolve_dataset(cfg.input);
  const auto manifest = list_images(dirs.images);
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 255.0)) throw ParameterError("--gamma must lie in [0, 255]");
  if (!(cfg.atmospheric_light > 0.0 && cfg.atmospheric_light <= 1.0)) {
    throw ParameterError("--atmospheric-light must lie in (0, 1]");
  }
  if (!fs::is_regular_file(cfg.pool)) throw ConfigError("cloud pool manifest not found: " + cfg.pool.string());
  if (cfg.output.empty()) throw ConfigError("--out is required");
  const auto pool = load_cloud_pool(cfg.pool, cfg.gamma);

  CompositeParams params;
  params.atmospheric_light = cfg.atmospheric_light;
  const auto report = cloudify_dataset(manifest, pool, cfg.seed, cfg.output, params, cfg.threads);
  copy_labels(dirs.labels, cfg.output / "labelTxt");

  ordered_json j = report_header("cloudify");
  j["config"] = {{"in", cfg.input.string()},
                 {"pool", cfg.pool.string()},
                 {"out", cfg.output.string()},
                 {"seed", cfg.seed},
                 {"gamma", cfg.gamma},
                 {"atmospheric_light", cfg.atmospheric_light}};
  j["global_seed"] = report.global_seed;
  j["outputs"] = report.outputs;
  ordered_json sources = ordered_json::array();
  for (std::size_t i = 0; i < report.source_names.size(); ++i)
    sources.push_back(
        {{"name", report.source_names[i]}, {"gamma", report.source_gammas[i]}, {"uses", report.source_usage[i]}});
  j["sources"] = sources;
  ordered_json assignments = ordered_json::object();
  for (const auto& [id, a] : report.assignments)
    assignments[id] = {{"source", report.source_names[a.source_index]}, {"offset", {a.offset_x, a.offset_y}}};
  j["assignments"] = assignments;
  j["failures"] = failures_json(report.failures);
  write_text(cfg.output / "cloudify_report.json", j.dump(2) + "\n");

  log << "cloudify: " << report.outputs << " outputs from " << pool.size() << " cloud sources, "
      << report.failures.size() << " failures\n";
  return report.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// split

inline int cmd_split(const SplitConfig& cfg, std::ostream& log = std::cerr) {
  const auto dirs = resolve_dataset(cfg.images);
  const auto labels = cfg.labels ? cfg.labels : dirs.labels;
  const auto manifest = list_images(dirs.images);
  if (cfg.output.empty()) throw ConfigError("--out is required");
  if (!(cfg.keep_fraction > 0.0 && cfg.keep_fraction <= 1.0)) throw ParameterError("--keep-fraction must lie in (0, 1]");
  plan_tiles(1, 1, cfg.tile_size, cfg.overlap);  // validates tile parameters

  std::vector<std::string> warnings;
  std::vector<ItemFailure> failures;
  std::size_t tiles = 0;
  for (const auto& path : manifest) {
    const std::string id = image_id_of(path);
    RasterImage image;
    try {
      image = read_image(path);
    } catch (const std::exception& e) {
      failures.push_back({path.string(), e.what()});
      continue;
    }
    std::vector<GroundTruthRecord> gts;
    const fs::path label_file = labels ? *labels / (id + ".txt") : fs::path();
    if (labels && fs::is_regular_file(label_file)) {
      const auto bytes = read_file(label_file);
      auto parsed = parse_annotations(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), id);
      for (auto& w : parsed.warnings) warnings.push_back(id + ": " + w);
      gts = std::move(parsed.records);
    } else {
      warnings.push_back(id + ": no annotation file; tiles emitted with empty annotations");
    }
    const auto plan = plan_tiles(image.width(), image.height(), cfg.tile_size, cfg.overlap);
    for (const auto& tile : split_ground_truth(gts, plan, id, cfg.keep_fraction)) {
      write_image(cfg.output / "images" / (tile.tile_id + ".png"), extract_tile(image, tile.origin, cfg.tile_size));
      write_text(cfg.output / "labelTxt" / (tile.tile_id + ".txt"), emit_annotations(tile.records));
      ++tiles;
    }
  }
  ordered_json j = report_header("split");
  j["config"] = {{"images", cfg.images.string()},
                 {"labels", labels ? labels->string() : ""},
                 {"out", cfg.output.string()},
                 {"tile_size", cfg.tile_size},
                 {"overlap", cfg.overlap},
                 {"keep_fraction", cfg.keep_fraction}};
  j["images"] = manifest.size();
  j["tiles"] = tiles;
  j["warnings"] = warnings;
  j["failures"] = failures_json(failures);
  write_text(cfg.output / "split_report.json", j.dump(2) + "\n");
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  log << "split: " << tiles << " tiles from " << manifest.size() << " images\n";
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// evaluate

namespace detail {

struct EvalContext {
  std::vector<GroundTruthRecord> gts;
  std::vector<std::string> classes;
  std::optional<std::map<std::string, TilePlan>> plans;
  double iou = 0.5;
  double nms_iou = kDefaultMergeNmsIou;
  ApInterpolation interp = ApInterpolation::voc07_11point;
  std::vector<std::string> warnings;
};

inline double evaluate_dir(EvalContext& ctx, const fs::path& dir) {
  auto dets = read_detection_dir(dir);
  for (auto& w : dets.warnings) ctx.warnings.push_back(w);
  if (ctx.plans) dets.records = merge_detections(dets.records, *ctx.plans, ctx.nms_iou);
  return average_precision(dets.records, ctx.gts, ctx.classes, ctx.iou, ctx.interp).mean_ap;
}

inline std::string kind_label(CorruptionKind k) {
  static const std::array<const char*, kNumKinds> labels = {"Ga.",  "Shot",  "Im.",  "Spec.", "De.",  "Glass", "Mo.",
                                                            "Zoom", "Ga.",   "Snow", "Frost", "Fog",  "Br.",   "Spat.",
                                                            "Co.",  "El.",   "Pixel", "JPEG", "Sa."};
  return labels[static_cast<int>(k)];
}

inline std::string render_tables(const EvalMatrix& m, const RobustnessSummary& s) {
  std::ostringstream out;
  char buf[64];
  out << "Per-corruption AP50 (severity-averaged)\n";
  std::snprintf(buf, sizeof buf, "%10s %8s", "AP_clean", "mPC");
  out << buf;
  for (auto k : kAllKinds) {
    std::snprintf(buf, sizeof buf, " %6s", kind_label(k).c_str());
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof buf, "%10.1f %8.1f", s.ap_clean, s.mpc);
  out << buf;
  for (auto k : kAllKinds) {
    std::snprintf(buf, sizeof buf, " %6.1f", kind_mean(m, k));
    out << buf;
  }
  out << "\n\nRelative performance (%)\n";
  std::snprintf(buf, sizeof buf, "%8s %10s %10s %12s %12s\n", "rPC", "rPC_noise", "rPC_blur", "rPC_weather",
                "rPC_digital");
  out << buf;
  std::snprintf(buf, sizeof buf, "%8.2f %10.2f %10.2f %12.2f %12.2f\n", s.rpc,
                s.category_rpc.at(CorruptionCategory::noise), s.category_rpc.at(CorruptionCategory::blur),
                s.category_rpc.at(CorruptionCategory::weather), s.category_rpc.at(CorruptionCategory::digital));
  out << buf;
  if (s.ap_clouds) {
    out << "\nClouds\n";
    std::snprintf(buf, sizeof buf, "%10s %10s %12s\n", "AP_clean", "AP_clouds", "rPC_clouds");
    out << buf;
    std::snprintf(buf, sizeof buf, "%10.1f %10.2f %12.2f\n", s.ap_clean, *s.ap_clouds, *s.rpc_clouds);
    out << buf;
  }
  out << "\nMean AP50 by severity\n";
  for (int i = 0; i < kNumSeverities; ++i) {
    std::snprintf(buf, sizeof buf, "  severity %d: %.2f\n", i + 1, s.severity_curve[i]);
    out << buf;
  }
  return out.str();
}

}  // namespace detail

inline ordered_json summary_json(const EvalMatrix& m, const RobustnessSummary& s) {
  ordered_json j;
  j["AP_clean"] = s.ap_clean;
  j["mPC"] = s.mpc;
  j["rPC"] = s.rpc;
  j["rPC_noise"] = s.category_rpc.at(CorruptionCategory::noise);
  j["rPC_blur"] = s.category_rpc.at(CorruptionCategory::blur);
  j["rPC_weather"] = s.category_rpc.at(CorruptionCategory::weather);
  j["rPC_digital"] = s.category_rpc.at(CorruptionCategory::digital);
  if (s.ap_clouds) {
    j["AP_clouds"] = *s.ap_clouds;
    j["rPC_clouds"] = *s.rpc_clouds;
  }
  j["severity_curve"] = s.severity_curve;
  ordered_json grid = ordered_json::object();
  for (auto k : kAllKinds) {
    ordered_json row = ordered_json::array();
    for (int sev = 1; sev <= kNumSeverities; ++sev) row.push_back(m.at(k, sev));
    grid[std::string(name(k))] = row;
  }
  j["grid"] = grid;
  return j;
}

/// Builds or loads the AP grid, then writes matrix.csv, report.json and table.txt.
inline int cmd_evaluate(const EvaluateConfig& cfg, std::ostream& log = std::cerr) {
  if (cfg.output.empty()) throw ConfigError("--out is required");
  const ApInterpolation interp = parse_interpolation(cfg.interp);
  EvalMatrix matrix;
  std::string mode;
  std::vector<std::string> warnings;
  if (cfg.matrix) {
    if (cfg.dets) throw ConfigError("--matrix and --dets are mutually exclusive");
    const auto bytes = read_file(*cfg.matrix);
    try {
      matrix = parse_matrix_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), cfg.matrix->string());
    }
    mode = "matrix";
  } else {
    if (!cfg.dets || !cfg.gt) throw ConfigError("evaluate needs --matrix, or --dets with --gt");
    if (!fs::is_directory(*cfg.dets)) throw ConfigError("detection root not found: " + cfg.dets->string());
    if (!(cfg.iou > 0.0 && cfg.iou <= 1.0)) throw ParameterError("--iou must lie in (0, 1]");
    // Every required cell must exist before any AP is computed.
    if (!fs::is_directory(*cfg.dets / "clean")) throw IncompleteMatrixError("clean");
    for (auto k : kAllKinds)
      for (int s = 1; s <= kNumSeverities; ++s)
        if (!fs::is_directory(*cfg.dets / std::string(name(k)) / std::to_string(s))) {
          throw IncompleteMatrixError(std::string(name(k)) + "/" + std::to_string(s));
        }
    detail::EvalContext ctx;
    auto gts = read_annotation_dir(*cfg.gt);
    ctx.gts = std::move(gts.records);
    ctx.warnings = std::move(gts.warnings);
    ctx.classes = cfg.classes.empty() ? dota_v1_classes() : split_list(cfg.classes);
    ctx.iou = cfg.iou;
    ctx.interp = interp;
    ctx.nms_iou = cfg.nms_iou;
    if (cfg.images) {
      std::map<std::string, TilePlan> plans;
      for (const auto& p : list_images(*cfg.images)) {
        const auto img = read_image(p);
        plans[image_id_of(p)] = plan_tiles(img.width(), img.height(), cfg.tile_size, cfg.overlap);
      }
      ctx.plans = std::move(plans);
      mode = "merged";
    } else {
      mode = "direct";
    }
    matrix.set_clean(detail::evaluate_dir(ctx, *cfg.dets / "clean"));
    for (auto k : kAllKinds)
      for (int s = 1; s <= kNumSeverities; ++s)
        matrix.set(k, s, detail::evaluate_dir(ctx, *cfg.dets / std::string(name(k)) / std::to_string(s)));
    if (fs::is_directory(*cfg.dets / "clouds")) matrix.set_clouds(detail::evaluate_dir(ctx, *cfg.dets / "clouds"));
    warnings = std::move(ctx.warnings);
  }
  const auto summary = summarize(matrix);

  ordered_json j = report_header("evaluate");
  ordered_json config;
  config["matrix"] = cfg.matrix ? cfg.matrix->string() : "";
  config["dets"] = cfg.dets ? cfg.dets->string() : "";
  config["gt"] = cfg.gt ? cfg.gt->string() : "";
  config["images"] = cfg.images ? cfg.images->string() : "";
  config["out"] = cfg.output.string();
  config["classes"] = cfg.classes.empty() ? "dota-v1.0" : cfg.classes;
  config["iou"] = cfg.iou;
  config["interp"] = std::string(name(interp));
  config["nms_iou"] = cfg.nms_iou;
  j["config"] = config;
  j["eval_mode"] = mode;
  j["interpolation"] = std::string(name(interp));
  j.update(summary_json(matrix, summary));
  j["warnings"] = warnings;
  write_text(cfg.output / "report.json", j.dump(2) + "\n");
  write_text(cfg.output / "matrix.csv", write_matrix_csv(matrix));
  const std::string tables = detail::render_tables(matrix, summary);
  write_text(cfg.output / "table.txt", tables);
  log << tables;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

inline int cmd_report(const ReportConfig& cfg, std::ostream& log = std::cerr) {
  if (cfg.matrices.empty()) throw ConfigError("report needs at least one matrix CSV");
  if (cfg.output.empty()) throw ConfigError("--out is required");
  struct Model {
    std::string name;
    EvalMatrix matrix;
  };
  std::vector<Model> models;
  for (const auto& spec : cfg.matrices) {
    const auto eq = spec.find('=');
    const fs::path path = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
    const std::string model = eq == std::string::npos ? path.stem().string() : spec.substr(0, eq);
    const auto bytes = read_file(path);
    try {
      models.push_back({model, parse_matrix_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))});
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), path.string());
    }
  }
  std::string curve_csv = "model,severity,mean_ap\n";
  std::string footer;
  std::string bars_csv = "model,category,rpc\n";
  for (const auto& m : models) {
    const auto curve = severity_curve(m.matrix);
    double mean = 0.0;
    for (int s = 0; s < kNumSeverities; ++s) {
      curve_csv += m.name + "," + std::to_string(s + 1) + "," + format_number(curve[s]) + "\n";
      mean += curve[s];
    }
    mean /= kNumSeverities;
    const double m_pc = mpc(m.matrix);
    const double diff = std::abs(mean - m_pc);
    footer += "# " + m.name + ": curve_mean=" + format_number(mean) + " mPC=" + format_number(m_pc) +
              " abs_diff=" + format_number(diff) + (diff <= 1e-9 ? " identity=ok\n" : " identity=FAILED\n");
    if (m.matrix.clean()) {
      for (auto c : kAllCategories)
        bars_csv += m.name + "," + std::string(name(c)) + "," +
                    format_number(category_rpc(m.matrix, c, *m.matrix.clean())) + "\n";
    } else {
      log << "warning: " << m.name << " has no clean AP; category bars skipped\n";
    }
  }
  write_text(cfg.output / "severity_curve.csv", curve_csv + footer);
  write_text(cfg.output / "category_rpc.csv", bars_csv);
  log << "report: " << models.size() << " models\n" << footer;
  return footer.find("FAILED") == std::string::npos ? kExitOk : kExitPartial;
}

}  // namespace aerobust::cli
