// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "support.hpp"

namespace aerobust {
namespace {

namespace fs = std::filesystem;
using cli::ordered_json;

struct CliResult {
  int code;
  std::string output;
};

// Runs the built binary with stdout and stderr captured.
CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli.log";
  const std::string cmd = std::string(AEROBUST_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {code, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json load_json(const fs::path& p) { return ordered_json::parse(slurp(p)); }

std::size_t count_files(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) ++n;
  return n;
}

// Two images with labels in the images/ + labelTxt/ layout.
fs::path make_dataset(const std::string& name) {
  const auto root = testing::scratch_dir(name);
  write_image(root / "images" / "P0001.png", testing::fixture_scene(1, 48, 40));
  write_image(root / "images" / "P0002.png", testing::fixture_scene(2, 40, 48));
  fs::create_directories(root / "labelTxt");
  std::ofstream(root / "labelTxt" / "P0001.txt") << "1 1 10 1 10 10 1 10 plane 0\n";
  std::ofstream(root / "labelTxt" / "P0002.txt") << "2 2 12 2 12 12 2 12 ship 1\n";
  return root;
}

fs::path write_matrix(const fs::path& path, const EvalMatrix& m) {
  std::ofstream(path) << write_matrix_csv(m);
  return path;
}

TEST(CliCorrupt, FullGridReportAndLabels) {
  const auto root = make_dataset("cli_corrupt");
  cli::CorruptConfig cfg;
  cfg.input = root;
  cfg.output = root / "out";
  cfg.seed = 42;
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_corrupt(cfg, log), cli::kExitOk);
  EXPECT_EQ(count_files(cfg.output, ".png"), 190u);
  const auto j = load_json(cfg.output / "corrupt_report.json");
  EXPECT_EQ(j["global_seed"], 42u);
  EXPECT_EQ(j["outputs"], 190u);
  EXPECT_EQ(j["schedule_checksum"], SeveritySchedule::builtin().checksum());
  EXPECT_EQ(j["per_kind_counts"].size(), 19u);
  EXPECT_TRUE(j["failures"].empty());
  EXPECT_EQ(slurp(cfg.output / "labelTxt" / "P0002.txt"), slurp(root / "labelTxt" / "P0002.txt"));
}

TEST(CliCorrupt, SingleCellSelection) {
  const auto root = make_dataset("cli_corrupt_one");
  const auto r = run_cli("corrupt --in " + root.string() + " --out " + (root / "out").string() +
                             " --kinds gaussian_noise --severities 3 --seed 7",
                         root);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count_files(root / "out", ".png"), 2u);
  EXPECT_TRUE(fs::is_regular_file(corrupted_path(root / "out", CorruptionKind::gaussian_noise, 3, "P0001")));
}

TEST(CliCorrupt, UnknownKindIsUsageErrorListingKinds) {
  const auto root = make_dataset("cli_corrupt_bad");
  const auto r = run_cli("corrupt --in " + root.string() + " --out " + (root / "out").string() + " --kinds haze", root);
  EXPECT_EQ(r.code, 2);
  for (auto n : kKindNames) EXPECT_NE(r.output.find(std::string(n)), std::string::npos) << n;
  EXPECT_FALSE(fs::exists(root / "out"));
}

TEST(CliCorrupt, UnreadableImageIsPartialFailure) {
  const auto root = make_dataset("cli_corrupt_partial");
  std::ofstream(root / "images" / "P0003.png") << "garbage";
  const auto r = run_cli("corrupt --in " + root.string() + " --out " + (root / "out").string() +
                             " --kinds fog --severities 1",
                         root);
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("P0003.png"), std::string::npos);
  EXPECT_EQ(load_json(root / "out" / "corrupt_report.json")["outputs"], 2u);
}

TEST(CliCorrupt, RerunIsByteIdentical) {
  const auto root = make_dataset("cli_corrupt_rerun");
  for (const char* out : {"a", "b"}) {
    const auto r = run_cli("corrupt --in " + root.string() + " --out " + (root / out).string() +
                               " --kinds motion_blur,spatter,jpeg_compression --seed 5 --threads 1",
                           root);
    ASSERT_EQ(r.code, 0) << r.output;
  }
  for (auto kind : {CorruptionKind::motion_blur, CorruptionKind::spatter, CorruptionKind::jpeg_compression})
    for (int s = 1; s <= 5; ++s)
      EXPECT_EQ(read_file(corrupted_path(root / "a", kind, s, "P0001")),
                read_file(corrupted_path(root / "b", kind, s, "P0001")));
  auto ja = load_json(root / "a" / "corrupt_report.json");
  auto jb = load_json(root / "b" / "corrupt_report.json");
  EXPECT_EQ(ja["schedule_checksum"], jb["schedule_checksum"]);
  EXPECT_EQ(ja["per_kind_counts"], jb["per_kind_counts"]);
}

TEST(CliCorrupt, ConfigFileWithFlagOverride) {
  const auto root = make_dataset("cli_config");
  std::ofstream(root / "run.toml") << "[corrupt]\nin = \"" << root.string() << "\"\nout = \""
                                   << (root / "out").string() << "\"\nkinds = \"fog\"\nseverities = \"1-5\"\n";
  const auto r = run_cli("--config " + (root / "run.toml").string() + " corrupt --severities 2", root);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count_files(root / "out", ".png"), 2u);
  EXPECT_TRUE(fs::is_regular_file(corrupted_path(root / "out", CorruptionKind::fog, 2, "P0002")));
}

fs::path make_pool(const fs::path& root, bool with_clear_sky) {
  write_image(root / "pool" / "c0.png", testing::fixture_cloud(0));
  write_image(root / "pool" / "c1.png", testing::fixture_cloud(1));
  std::ofstream manifest(root / "pool" / "pool.txt");
  manifest << "c0.png\nc1.png 140\n";
  if (with_clear_sky) {
    write_image(root / "pool" / "clear_sky.png", RasterImage(32, 32, 3, std::uint8_t{60}));
    manifest << "clear_sky.png\n";
  }
  return root / "pool" / "pool.txt";
}

TEST(CliCloudify, OneOutputPerImageDeterministic) {
  const auto root = make_dataset("cli_cloudify");
  const auto pool = make_pool(root, false);
  for (const char* out : {"a", "b"}) {
    const auto r = run_cli("cloudify --in " + root.string() + " --pool " + pool.string() + " --out " +
                               (root / out).string() + " --seed 3",
                           root);
    ASSERT_EQ(r.code, 0) << r.output;
  }
  EXPECT_EQ(count_files(root / "a", ".png"), 2u);
  for (const char* id : {"P0001", "P0002"})
    EXPECT_EQ(read_file(clouded_path(root / "a", id)), read_file(clouded_path(root / "b", id)));
  const auto j = load_json(root / "a" / "cloudify_report.json");
  EXPECT_EQ(j["sources"].size(), 2u);
  EXPECT_EQ(j["sources"][1]["gamma"], 140.0);
  EXPECT_EQ(j["assignments"].size(), 2u);
  EXPECT_EQ(j["assignments"], load_json(root / "b" / "cloudify_report.json")["assignments"]);
}

TEST(CliCloudify, CloudlessSourceIsNamed) {
  const auto root = make_dataset("cli_cloudify_bad");
  const auto pool = make_pool(root, true);
  const auto r =
      run_cli("cloudify --in " + root.string() + " --pool " + pool.string() + " --out " + (root / "out").string(), root);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("clear_sky.png"), std::string::npos) << r.output;
}

TEST(CliSplit, TilesNamesAndMissingAnnotation) {
  const auto root = testing::scratch_dir("cli_split");
  write_image(root / "images" / "W.png", RasterImage(2048, 1024, 3, std::uint8_t{90}));
  write_image(root / "images" / "S.png", RasterImage(1024, 1024, 3, std::uint8_t{90}));
  write_image(root / "images" / "N.png", RasterImage(300, 200, 3, std::uint8_t{90}));
  fs::create_directories(root / "labelTxt");
  std::ofstream(root / "labelTxt" / "W.txt") << "900 100 950 100 950 150 900 150 plane 0\n";
  std::ofstream(root / "labelTxt" / "S.txt") << "10 10 20 10 20 20 10 20 car 0\n";
  cli::SplitConfig cfg;
  cfg.images = root;
  cfg.output = root / "out";
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_split(cfg, log), cli::kExitOk);
  for (const char* t : {"W__0__0", "W__824__0", "W__1024__0", "S__0__0", "N__0__0"}) {
    EXPECT_TRUE(fs::is_regular_file(root / "out" / "images" / (std::string(t) + ".png"))) << t;
    EXPECT_TRUE(fs::is_regular_file(root / "out" / "labelTxt" / (std::string(t) + ".txt"))) << t;
  }
  EXPECT_EQ(count_files(root / "out" / "images", ".png"), 5u);
  EXPECT_EQ(slurp(root / "out" / "labelTxt" / "N__0__0.txt"), "");
  EXPECT_NE(slurp(root / "out" / "labelTxt" / "W__824__0.txt").find("76 100"), std::string::npos);
  EXPECT_NE(log.str().find("N: no annotation file"), std::string::npos);
  const auto j = load_json(root / "out" / "split_report.json");
  EXPECT_EQ(j["tiles"], 5u);
  EXPECT_EQ(j["warnings"].size(), 1u);
}

TEST(CliEvaluate, MatrixModeReproducesPublishedRow) {
  const auto root = testing::scratch_dir("cli_eval_matrix");
  const auto& row = testing::benchmark_rows()[1];
  auto m = testing::matrix_from_row(row);
  m.set_clouds(row.ap_clouds);
  const auto path = write_matrix(root / "m.csv", m);
  const auto r = run_cli("evaluate --matrix " + path.string() + " --out " + (root / "out").string(), root);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = load_json(root / "out" / "report.json");
  EXPECT_EQ(j["eval_mode"], "matrix");
  EXPECT_NEAR(j["mPC"].get<double>(), row.mpc, 0.05);
  EXPECT_NEAR(j["rPC"].get<double>(), row.rpc, 0.1);
  EXPECT_NEAR(j["rPC_clouds"].get<double>(), row.rpc_clouds, 0.1);
  EXPECT_TRUE(fs::is_regular_file(root / "out" / "matrix.csv"));
  EXPECT_NE(slurp(root / "out" / "table.txt").find("rPC_weather"), std::string::npos);
}

TEST(CliEvaluate, ConstantMatrix) {
  const auto root = testing::scratch_dir("cli_eval_const");
  EvalMatrix m;
  m.set_clean(80);
  for (auto k : kAllKinds)
    for (int s = 1; s <= 5; ++s) m.set(k, s, 30);
  cli::EvaluateConfig cfg;
  cfg.matrix = write_matrix(root / "m.csv", m);
  cfg.output = root / "out";
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_evaluate(cfg, log), cli::kExitOk);
  const auto j = load_json(root / "out" / "report.json");
  EXPECT_DOUBLE_EQ(j["mPC"].get<double>(), 30.0);
  EXPECT_DOUBLE_EQ(j["rPC"].get<double>(), 37.5);
  EXPECT_FALSE(j.contains("rPC_clouds"));
  for (const auto& v : j["severity_curve"]) EXPECT_DOUBLE_EQ(v.get<double>(), 30.0);
}

// Writes perfect detections for every cell, optionally leaving one out.
fs::path make_det_tree(const fs::path& root, const std::vector<DetectionRecord>& dets, const std::string& skip = "") {
  const auto tree = root / "dets";
  write_detection_dir(tree / "clean", dets);
  write_detection_dir(tree / "clouds", dets);
  for (auto k : kAllKinds)
    for (int s = 1; s <= 5; ++s) {
      const std::string cell = std::string(name(k)) + "/" + std::to_string(s);
      if (cell != skip) write_detection_dir(tree / cell, dets);
    }
  return tree;
}

std::vector<GroundTruthRecord> eval_gt() {
  return {{"A", OrientedBox::axis_aligned(10, 10, 60, 40), "plane", false},
          {"A", OrientedBox::rotated(200, 200, 80, 20, 0.4), "ship", false},
          {"B", OrientedBox::axis_aligned(5, 5, 25, 25), "plane", false},
          {"B", OrientedBox::axis_aligned(100, 5, 125, 25), "plane", true}};
}

void write_gt(const fs::path& dir, const std::vector<GroundTruthRecord>& gts) {
  std::map<std::string, std::vector<GroundTruthRecord>> by_image;
  for (const auto& g : gts) by_image[g.image_id].push_back(g);
  fs::create_directories(dir);
  for (const auto& [id, recs] : by_image) std::ofstream(dir / (id + ".txt")) << emit_annotations(recs);
}

TEST(CliEvaluate, PerfectDetectionsScoreHundred) {
  const auto root = testing::scratch_dir("cli_eval_dets");
  const auto gts = eval_gt();
  write_gt(root / "gt", gts);
  std::vector<DetectionRecord> dets;
  for (const auto& g : gts)
    if (!g.difficult) dets.push_back({g.image_id, g.category, 0.9, g.box});
  const auto tree = make_det_tree(root, dets);
  const auto r = run_cli("evaluate --dets " + tree.string() + " --gt " + (root / "gt").string() +
                             " --classes plane,ship --out " + (root / "out").string(),
                         root);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = load_json(root / "out" / "report.json");
  EXPECT_EQ(j["eval_mode"], "direct");
  EXPECT_DOUBLE_EQ(j["AP_clean"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["mPC"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["rPC"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["rPC_clouds"].get<double>(), 100.0);
}

TEST(CliEvaluate, MissingCellNamedBeforeAnyWork) {
  const auto root = testing::scratch_dir("cli_eval_missing");
  write_gt(root / "gt", eval_gt());
  const auto tree = make_det_tree(root, {}, "fog/4");
  const auto r = run_cli("evaluate --dets " + tree.string() + " --gt " + (root / "gt").string() + " --out " +
                             (root / "out").string(),
                         root);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("fog/4"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(root / "out" / "report.json"));
}

TEST(CliEvaluate, MergedTileDetections) {
  const auto root = testing::scratch_dir("cli_eval_merge");
  write_image(root / "images" / "W.png", RasterImage(2048, 1024, 3, std::uint8_t{90}));
  const std::vector<GroundTruthRecord> gts = {
      {"W", OrientedBox::axis_aligned(900, 100, 950, 150), "plane", false},    // in two tiles
      {"W", OrientedBox::axis_aligned(1500, 600, 1600, 640), "ship", false},   // in two tiles
      {"W", OrientedBox::axis_aligned(100, 900, 140, 1000), "plane", false}};  // in one tile
  write_gt(root / "gt", gts);
  // Tile-space detections: each object reported by every tile that contains it.
  std::vector<DetectionRecord> tile_dets;
  for (const auto& tile : split_ground_truth(gts, plan_tiles(2048, 1024), "W"))
    for (const auto& rec : tile.records)
      if (!rec.difficult) tile_dets.push_back({tile.tile_id, rec.category, 0.8, rec.box});
  ASSERT_EQ(tile_dets.size(), 5u);
  const auto tree = make_det_tree(root, tile_dets);
  const auto r = run_cli("evaluate --dets " + tree.string() + " --gt " + (root / "gt").string() + " --images " +
                             (root / "images").string() + " --classes plane,ship --out " + (root / "out").string(),
                         root);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = load_json(root / "out" / "report.json");
  EXPECT_EQ(j["eval_mode"], "merged");
  // Duplicates from overlapping tiles are suppressed, so AP stays perfect.
  EXPECT_DOUBLE_EQ(j["AP_clean"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["mPC"].get<double>(), 100.0);
}

TEST(CliReport, CurvesAndIdentityFooter) {
  const auto root = testing::scratch_dir("cli_report");
  const auto a = write_matrix(root / "a.csv", testing::matrix_from_row(testing::benchmark_rows()[0]));
  const auto b = write_matrix(root / "b.csv", testing::matrix_from_row(testing::benchmark_rows()[2]));
  const auto r =
      run_cli("report frcnn=" + a.string() + " " + b.string() + " --out " + (root / "out").string(), root);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto curve = slurp(root / "out" / "severity_curve.csv");
  std::istringstream lines(curve);
  std::string line;
  int rows = 0;
  int footers = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "model,severity,mean_ap");
  while (std::getline(lines, line)) {
    if (line.rfind("# ", 0) == 0) {
      ++footers;
      EXPECT_NE(line.find("identity=ok"), std::string::npos) << line;
    } else if (!line.empty()) {
      ++rows;
    }
  }
  EXPECT_EQ(rows, 10);
  EXPECT_EQ(footers, 2);
  EXPECT_NE(curve.find("frcnn,1,"), std::string::npos);
  EXPECT_NE(curve.find("b,5,"), std::string::npos);
  const auto bars = slurp(root / "out" / "category_rpc.csv");
  EXPECT_NE(bars.find("frcnn,noise,"), std::string::npos);
  EXPECT_NE(bars.find("b,digital,"), std::string::npos);
}

TEST(CliReport, MalformedMatrixIsUsageError) {
  const auto root = testing::scratch_dir("cli_report_bad");
  std::ofstream(root / "bad.csv") << "kind,severity,ap\nfog,1,3\nfog,x,4\n";
  const auto r = run_cli("report " + (root / "bad.csv").string() + " --out " + (root / "out").string(), root);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("bad.csv"), std::string::npos) << r.output;
}

TEST(CliMisc, VersionAndUsage) {
  const auto root = testing::scratch_dir("cli_misc");
  const auto v = run_cli("--version", root);
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.output.find(std::string(kVersion)), std::string::npos);
  EXPECT_EQ(run_cli("", root).code, 2);
  EXPECT_EQ(run_cli("corrupt --out x", root).code, 2);
  EXPECT_EQ(run_cli("--help", root).code, 0);
}

TEST(CliHelpers, SeverityAndKindLists) {
  EXPECT_EQ(cli::parse_severity_list("1-5"), (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(cli::parse_severity_list("1,3,5"), (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(cli::parse_severity_list("3"), (std::vector<int>{3}));
  EXPECT_THROW(cli::parse_severity_list("0-2"), ParameterError);
  EXPECT_THROW(cli::parse_severity_list("x"), ParameterError);
  EXPECT_EQ(cli::parse_kind_list("all").size(), 19u);
  EXPECT_EQ(cli::parse_kind_list("fog,snow").size(), 2u);
}

}  // namespace
}  // namespace aerobust
