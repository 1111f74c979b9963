// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

// aerobust: corrupt, cloudify, split, evaluate and report on aerial
// detection datasets. Exit codes: 0 success, 1 partial failure,
// 2 configuration or usage error.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace cli = aerobust::cli;

int main(int argc, char** argv) {
  CLI::App app{"Robustness benchmarking for aerial oriented object detection"};
  app.set_version_flag("--version", std::string(aerobust::kVersion));
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags take precedence");
  app.require_subcommand(1);

  cli::CorruptConfig corrupt;
  std::string schedule;
  std::string frost_dir;
  auto* c = app.add_subcommand("corrupt", "Apply the 19 corruption kinds at chosen severities");
  c->add_option("--in", corrupt.input, "Dataset root (images/, labelTxt/) or image directory")->required();
  c->add_option("--out", corrupt.output, "Output root")->required();
  c->add_option("--kinds", corrupt.kinds, "Comma-separated kinds or 'all'")->capture_default_str();
  c->add_option("--severities", corrupt.severities, "e.g. 1-5, 3, 1,3,5")->capture_default_str();
  c->add_option("--seed", corrupt.seed, "Global seed")->capture_default_str();
  c->add_option("--schedule", schedule, "Severity schedule YAML (default: built-in)");
  c->add_option("--frost-dir", frost_dir, "Directory of frost textures (default: procedural)");
  c->add_option("--threads", corrupt.threads, "Worker threads (0 = all cores)")->capture_default_str();

  cli::CloudifyConfig cloudify;
  auto* cl = app.add_subcommand("cloudify", "Transfer real clouds onto clean images");
  cl->add_option("--in", cloudify.input, "Dataset root or image directory")->required();
  cl->add_option("--pool", cloudify.pool, "Cloud pool manifest: one 'path [gamma]' per line")->required();
  cl->add_option("--out", cloudify.output, "Output root")->required();
  cl->add_option("--seed", cloudify.seed, "Global seed")->capture_default_str();
  cl->add_option("--gamma", cloudify.gamma, "Default self-subtraction threshold")->capture_default_str();
  cl->add_option("--atmospheric-light", cloudify.atmospheric_light, "Cloud brightness A")->capture_default_str();
  cl->add_option("--threads", cloudify.threads, "Worker threads (0 = all cores)")->capture_default_str();

  cli::SplitConfig split;
  std::string labels;
  auto* s = app.add_subcommand("split", "Cut images and annotations into overlapping tiles");
  s->add_option("--images", split.images, "Dataset root or image directory")->required();
  s->add_option("--labels", labels, "Annotation directory (default: <images>/labelTxt)");
  s->add_option("--out", split.output, "Output root")->required();
  s->add_option("--tile-size", split.tile_size)->capture_default_str();
  s->add_option("--overlap", split.overlap)->capture_default_str();
  s->add_option("--keep-fraction", split.keep_fraction, "Minimum inside-area fraction to keep a box as-is")
      ->capture_default_str();

  cli::EvaluateConfig evaluate;
  std::string matrix;
  std::string dets;
  std::string gt;
  std::string images;
  auto* e = app.add_subcommand("evaluate", "Compute AP50, mPC, rPC and cloud metrics");
  e->add_option("--matrix", matrix, "Precomputed AP matrix CSV");
  e->add_option("--dets", dets, "Detection root: clean/, <kind>/<severity>/, clouds/ with Task1_<class>.txt");
  e->add_option("--gt", gt, "Ground-truth labelTxt directory");
  e->add_option("--images", images, "Original images; when set, detections are per tile and get merged");
  e->add_option("--out", evaluate.output, "Output directory")->required();
  e->add_option("--classes", evaluate.classes, "Comma-separated class list (default: DOTA-v1.0)");
  e->add_option("--iou", evaluate.iou)->capture_default_str();
  e->add_option("--interp", evaluate.interp, "voc07_11point or continuous")->capture_default_str();
  e->add_option("--nms-iou", evaluate.nms_iou, "Merge NMS threshold")->capture_default_str();
  e->add_option("--tile-size", evaluate.tile_size)->capture_default_str();
  e->add_option("--overlap", evaluate.overlap)->capture_default_str();

  cli::ReportConfig report;
  auto* r = app.add_subcommand("report", "Severity curves and per-category bars across models");
  r->add_option("matrices", report.matrices, "Matrix CSVs as name=path or path")->required();
  r->add_option("--out", report.output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*c) {
      if (!schedule.empty()) corrupt.schedule = schedule;
      if (!frost_dir.empty()) corrupt.frost_dir = frost_dir;
      return cli::cmd_corrupt(corrupt);
    }
    if (*cl) return cli::cmd_cloudify(cloudify);
    if (*s) {
      if (!labels.empty()) split.labels = labels;
      return cli::cmd_split(split);
    }
    if (*e) {
      if (!matrix.empty()) evaluate.matrix = matrix;
      if (!dets.empty()) evaluate.dets = dets;
      if (!gt.empty()) evaluate.gt = gt;
      if (!images.empty()) evaluate.images = images;
      return cli::cmd_evaluate(evaluate);
    }
    if (*r) return cli::cmd_report(report);
  } catch (const aerobust::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kExitPartial;
  }
  return cli::kExitUsage;
}
