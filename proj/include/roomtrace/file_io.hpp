// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_FILE_IO_HPP
#define ROOMTRACE_FILE_IO_HPP

#include <filesystem>
#include <string>

namespace roomtrace {

/// Whole-file binary read. Throws IoFailure.
std::string read_text_file(const std::filesystem::path& path);

/// Whole-file binary write, creating parent directories. Throws IoFailure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace roomtrace

#endif  // ROOMTRACE_FILE_IO_HPP
