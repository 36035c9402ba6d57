// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "zoomkit/error.hpp"
#include "zoomkit/image.hpp"

namespace zoomkit {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(ErrorCode::kIoFailure, "cannot open image " + path.string());
  return f;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// ---- PPM ----

Image read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open image " + path.string());
  auto next_token = [&]() {
    std::string tok;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(ch);
    }
    return tok;
  };
  if (next_token() != "P6") fail(ErrorCode::kParseError, path.string() + ": only binary P6 PPM is supported");
  Image img;
  try {
    img.width = std::stoll(next_token());
    img.height = std::stoll(next_token());
    if (std::stoi(next_token()) != 255) fail(ErrorCode::kParseError, path.string() + ": maxval must be 255");
  } catch (const std::logic_error&) {
    fail(ErrorCode::kParseError, path.string() + ": malformed PPM header");
  }
  if (img.width <= 0 || img.height <= 0) fail(ErrorCode::kParseError, path.string() + ": empty PPM");
  img.rgb.resize(static_cast<std::size_t>(img.width * img.height * 3));
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!in) fail(ErrorCode::kParseError, path.string() + ": truncated PPM payload");
  return img;
}

void write_ppm(const fs::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + path.string());
}

// ---- PNG ----

Image read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    fail(ErrorCode::kParseError, path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(png.width, png.height);
  if (!png_image_finish_read(&png, nullptr, img.rgb.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    fail(ErrorCode::kParseError, path.string() + ": " + msg);
  }
  return img;
}

void write_png(const fs::path& path, const Image& img) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kIoFailure, path.string() + ": " + png.message);
  }
}

// ---- JPEG ----

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image read_jpeg(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  Image img;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorCode::kParseError, path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  img.width = cinfo.output_width;
  img.height = cinfo.output_height;
  img.rgb.resize(static_cast<std::size_t>(img.width * img.height * 3));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * img.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

Image read_image(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorCode::kIoFailure, "image not found: " + path.string());
  const auto ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".jpg" || ext == ".jpeg") return read_jpeg(path);
  if (ext == ".ppm" || ext == ".pnm") return read_ppm(path);
  fail(ErrorCode::kInvalidArgument, "unsupported image format: " + path.string());
}

void write_image(const fs::path& path, const Image& image) {
  const auto ext = lower_extension(path);
  if (ext == ".png") return write_png(path, image);
  if (ext == ".ppm") return write_ppm(path, image);
  fail(ErrorCode::kInvalidArgument, "unsupported output image format: " + path.string());
}

fs::path find_image(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".jpg", ".jpeg", ".ppm"}) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return {};
}

Image crop_pixels(const Image& image, std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h) {
  Image out(w, h);
  for (std::int64_t r = 0; r < h; ++r) {
    const auto* src = image.rgb.data() + static_cast<std::size_t>(((y + r) * image.width + x) * 3);
    std::copy(src, src + w * 3, out.rgb.data() + static_cast<std::size_t>(r * w * 3));
  }
  return out;
}

}  // namespace zoomkit
