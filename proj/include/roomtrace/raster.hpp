// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_RASTER_HPP
#define ROOMTRACE_RASTER_HPP

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace roomtrace {

/// Row-major width x height grid addressed as (m, n) = (column, row).
/// Row 0 is the minimum-y edge of the world frame it is registered to.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] bool contains(int m, int n) const noexcept {
    return m >= 0 && n >= 0 && m < width_ && n < height_;
  }
  [[nodiscard]] std::size_t index(int m, int n) const noexcept {
    assert(contains(m, n));
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(m);
  }

  T& at(int m, int n) noexcept { return data_[index(m, n)]; }
  const T& at(int m, int n) const noexcept { return data_[index(m, n)]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  template <typename U>
  [[nodiscard]] bool same_shape(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_{0};
  int height_{0};
  std::vector<T> data_;
};

using ByteRaster = Raster<std::uint8_t>;
using CountRaster = Raster<std::uint32_t>;

}  // namespace roomtrace

#endif  // ROOMTRACE_RASTER_HPP
