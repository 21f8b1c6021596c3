// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_PNG_IO_HPP
#define ROOMTRACE_PNG_IO_HPP

#include <filesystem>

#include "roomtrace/raster.hpp"

namespace roomtrace {

/// 8-bit grayscale PNG. Raster row n is written as image row n, so row 0 of
/// the file is the minimum-y edge of the frame. Throws IoFailure.
void write_png_gray(const ByteRaster& raster, const std::filesystem::path& path);

/// Decodes any PNG to 8-bit grayscale. Throws DecodeFailure.
ByteRaster read_png_gray(const std::filesystem::path& path);

}  // namespace roomtrace

#endif  // ROOMTRACE_PNG_IO_HPP
