// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aerobust/codec.hpp"
#include "aerobust/error.hpp"
#include "aerobust/geometry.hpp"

namespace aerobust {

/// The fifteen DOTA-v1.0 categories.
inline const std::vector<std::string>& dota_v1_classes() {
  static const std::vector<std::string> classes = {
      "plane",        "ship",         "storage-tank",       "baseball-diamond", "tennis-court",
      "basketball-court", "ground-track-field", "harbor",   "bridge",           "large-vehicle",
      "small-vehicle", "helicopter",  "roundabout",         "soccer-ball-field", "swimming-pool"};
  return classes;
}

struct GroundTruthRecord {
  std::string image_id;
  OrientedBox box;
  std::string category;
  bool difficult = false;

  friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

struct DetectionRecord {
  std::string image_id;
  std::string category;
  double score = 0.0;
  OrientedBox box;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<std::string> warnings;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline double parse_real(std::string_view tok, std::size_t lineno, std::string_view what) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("non-numeric " + std::string(what) + " '" + std::string(tok) + "'", lineno);
  }
  return v;
}

inline std::array<Point, 4> parse_quad(const std::vector<std::string_view>& tok, std::size_t first,
                                       std::size_t lineno) {
  std::array<Point, 4> v;
  for (int i = 0; i < 4; ++i) {
    v[i].x = parse_real(tok[first + 2 * i], lineno, "coordinate");
    v[i].y = parse_real(tok[first + 2 * i + 1], lineno, "coordinate");
  }
  return v;
}

// Canonicalizes winding and repairs non-convex input, recording warnings.
inline OrientedBox checked_box(const std::array<Point, 4>& v, std::size_t lineno, std::vector<std::string>& warnings) {
  OrientedBox box(v);
  if (box.is_convex()) return box;
  // A self-intersecting quad has near-zero signed area, so judge by its hull.
  const OrientedBox repaired = box.convex_repaired();
  if (repaired.area() <= 1e-12) {
    warnings.push_back("line " + std::to_string(lineno) + ": zero-area box");
    return box;
  }
  warnings.push_back("line " + std::to_string(lineno) + ": non-convex quadrilateral repaired to its convex hull");
  return repaired;
}

inline void append_quad(std::string& out, const OrientedBox& box) {
  for (const auto& p : box.vertices()) {
    out += ' ';
    out += format_number(p.x);
    out += ' ';
    out += format_number(p.y);
  }
}

}  // namespace detail

/// Parses a DOTA label file: optional "imagesource:" / "gsd:" headers, then
/// "x1 y1 x2 y2 x3 y3 x4 y4 category difficult" per line.
inline ParseResult<GroundTruthRecord> parse_annotations(std::string_view text, const std::string& image_id = {}) {
  ParseResult<GroundTruthRecord> result;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (line.starts_with("imagesource:") || line.starts_with("gsd:")) continue;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 10) {
      throw ParseError("expected 10 fields (8 coordinates, category, difficult), got " + std::to_string(tok.size()),
                       lineno);
    }
    GroundTruthRecord rec;
    rec.image_id = image_id;
    rec.box = detail::checked_box(detail::parse_quad(tok, 0, lineno), lineno, result.warnings);
    rec.category = std::string(tok[8]);
    if (tok[9] == "0") rec.difficult = false;
    else if (tok[9] == "1") rec.difficult = true;
    else throw ParseError("difficult flag must be 0 or 1, got '" + std::string(tok[9]) + "'", lineno);
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline std::string emit_annotations(const std::vector<GroundTruthRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    std::string line;
    detail::append_quad(line, r.box);
    out += line.substr(1);
    out += ' ';
    out += r.category;
    out += r.difficult ? " 1\n" : " 0\n";
  }
  return out;
}

/// Parses one Task-1 result file ("image_id score x1 y1 ... x4 y4" per line)
/// whose records all belong to `category`.
inline ParseResult<DetectionRecord> parse_detections(std::string_view text, const std::string& category) {
  ParseResult<DetectionRecord> result;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 10) {
      throw ParseError("expected 10 fields (image_id, score, 8 coordinates), got " + std::to_string(tok.size()),
                       lineno);
    }
    DetectionRecord rec;
    rec.image_id = std::string(tok[0]);
    rec.category = category;
    rec.score = detail::parse_real(tok[1], lineno, "score");
    if (rec.score < 0.0 || rec.score > 1.0) {
      throw ParseError("score " + std::string(tok[1]) + " outside [0, 1]", lineno);
    }
    rec.box = detail::checked_box(detail::parse_quad(tok, 2, lineno), lineno, result.warnings);
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline std::string emit_detections(const std::vector<DetectionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.image_id;
    out += ' ';
    out += format_number(r.score);
    detail::append_quad(out, r.box);
    out += '\n';
  }
  return out;
}

inline constexpr std::string_view kTask1Prefix = "Task1_";

/// Reads every "Task1_<category>.txt" in `dir`. Missing directory yields no records.
inline ParseResult<DetectionRecord> read_detection_dir(const std::filesystem::path& dir) {
  ParseResult<DetectionRecord> all;
  if (!std::filesystem::is_directory(dir)) return all;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto fname = entry.path().filename().string();
    if (entry.is_regular_file() && fname.starts_with(kTask1Prefix) && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string category = f.stem().string().substr(kTask1Prefix.size());
    const auto bytes = read_file(f);
    try {
      auto part = parse_detections(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), category);
      for (auto& w : part.warnings) all.warnings.push_back(f.filename().string() + ": " + w);
      all.records.insert(all.records.end(), part.records.begin(), part.records.end());
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), f.string());
    }
  }
  return all;
}

/// Writes one Task-1 file per category present in `records`.
inline void write_detection_dir(const std::filesystem::path& dir, const std::vector<DetectionRecord>& records) {
  std::map<std::string, std::vector<DetectionRecord>> by_class;
  for (const auto& r : records) by_class[r.category].push_back(r);
  std::filesystem::create_directories(dir);
  for (const auto& [category, recs] : by_class) {
    const std::string text = emit_detections(recs);
    write_file(dir / (std::string(kTask1Prefix) + category + ".txt"),
               std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
}

/// Reads every "<image_id>.txt" label file in `dir`.
inline ParseResult<GroundTruthRecord> read_annotation_dir(const std::filesystem::path& dir) {
  ParseResult<GroundTruthRecord> all;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("annotation directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto bytes = read_file(f);
    try {
      auto part = parse_annotations(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                                    f.stem().string());
      for (auto& w : part.warnings) all.warnings.push_back(f.filename().string() + ": " + w);
      all.records.insert(all.records.end(), part.records.begin(), part.records.end());
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), f.string());
    }
  }
  return all;
}

}  // namespace aerobust
