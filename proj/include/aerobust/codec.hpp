// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "aerobust/error.hpp"
#include "aerobust/raster.hpp"

namespace aerobust {

enum class ImageFormat { png, jpeg };

using Bytes = std::vector<std::uint8_t>;

namespace detail {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_silence(j_common_ptr, int) {}

inline RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    std::string msg = std::string("png: ") + image.message;
    png_image_free(&image);
    throw DecodeError(msg);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = std::string("png: ") + image.message;
    png_image_free(&image);
    throw DecodeError(msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  png_image_free(&image);
  return RasterImage(w, h, 3, std::move(pixels));
}

inline Bytes encode_png(const RasterImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
    throw Error(std::string("png encode: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
    throw Error(std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

// Keep every C++ object that must survive a longjmp declared before setjmp.
inline RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  std::vector<std::uint8_t> pixels;
  int w = 0;
  int h = 0;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    std::optional<std::size_t> offset;
    if (cinfo.src != nullptr) {
      offset = static_cast<std::size_t>(cinfo.src->next_input_byte - bytes.data());
    }
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(std::string("jpeg: ") + err.message, offset);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return RasterImage(w, h, 3, std::move(pixels));
}

inline Bytes encode_jpeg(const RasterImage& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  Bytes out;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(std::string("jpeg encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(img.row(static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  out.assign(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

}  // namespace detail

/// Decodes a PNG or JPEG stream to RGB; grayscale sources are replicated to three channels.
inline RasterImage decode_image(std::span<const std::uint8_t> bytes, ImageFormat format) {
  if (bytes.empty()) throw DecodeError("empty image stream", 0);
  return format == ImageFormat::png ? detail::decode_png(bytes) : detail::decode_jpeg(bytes);
}

/// `quality` must be given for JPEG (1..100) and omitted for PNG.
inline Bytes encode_image(const RasterImage& img, ImageFormat format, std::optional<int> quality = std::nullopt) {
  if (img.channels() != 3) throw ParameterError("encode_image expects an RGB image");
  if (img.empty()) throw ParameterError("cannot encode an empty image");
  if (format == ImageFormat::png) {
    if (quality) throw ParameterError("quality applies only to jpeg");
    return detail::encode_png(img);
  }
  if (!quality) throw ParameterError("jpeg encoding requires a quality");
  if (*quality < 1 || *quality > 100) {
    throw ParameterError("jpeg quality must be in 1..100, got " + std::to_string(*quality));
  }
  return detail::encode_jpeg(img, *quality);
}

/// Format from the file extension (.png, .jpg, .jpeg; case-insensitive).
inline std::optional<ImageFormat> format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return ImageFormat::png;
  if (ext == ".jpg" || ext == ".jpeg") return ImageFormat::jpeg;
  return std::nullopt;
}

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

inline RasterImage read_image(const std::filesystem::path& path) {
  auto format = format_from_path(path);
  if (!format) throw ParameterError("unsupported image extension: " + path.string());
  try {
    return decode_image(read_file(path), *format);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

/// Writes by extension; JPEG files use `jpeg_quality`.
inline void write_image(const std::filesystem::path& path, const RasterImage& img, int jpeg_quality = 95) {
  auto format = format_from_path(path);
  if (!format) throw ParameterError("unsupported image extension: " + path.string());
  auto bytes = *format == ImageFormat::png ? encode_image(img, ImageFormat::png)
                                           : encode_image(img, ImageFormat::jpeg, jpeg_quality);
  write_file(path, bytes);
}

}  // namespace aerobust
