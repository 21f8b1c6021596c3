// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/png_io.hpp"

#include <png.h>

#include <string>

#include "roomtrace/error.hpp"

namespace roomtrace {

void write_png_gray(const ByteRaster& raster, const std::filesystem::path& path) {
  if (raster.empty()) throw Error(ErrorCode::kEmptyRaster, "cannot write an empty raster");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = PNG_FORMAT_GRAY;
  const int ok = png_image_write_to_file(&image, path.string().c_str(), 0, raster.data().data(),
                                         raster.width(), nullptr);
  if (ok == 0) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIoFailure, "writing " + path.string() + ": " + message);
  }
}

ByteRaster read_png_gray(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.string().c_str()) == 0) {
    throw Error(ErrorCode::kDecodeFailure, "reading " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  if (image.width == 0 || image.height == 0 || image.width > (1u << 16) || image.height > (1u << 16)) {
    png_image_free(&image);
    throw Error(ErrorCode::kDecodeFailure, path.string() + ": unsupported image size");
  }
  ByteRaster raster(static_cast<int>(image.width), static_cast<int>(image.height));
  if (png_image_finish_read(&image, nullptr, raster.data().data(), raster.width(), nullptr) == 0) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kDecodeFailure, "decoding " + path.string() + ": " + message);
  }
  return raster;
}

}  // namespace roomtrace
