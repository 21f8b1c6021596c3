// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/ingest.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>

#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"

namespace roomtrace {
namespace {

bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// ---------------------------------------------------------------------------
// Tokenizing helpers
// ---------------------------------------------------------------------------

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) return std::nullopt;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

 private:
  std::string_view text_;
  std::size_t pos_{0};
};

std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  Tokenizer tok(line);
  while (auto w = tok.next()) words.push_back(*w);
  return words;
}

// ---------------------------------------------------------------------------
// PLY header model
// ---------------------------------------------------------------------------

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::optional<PlyType> ply_type_from_name(std::string_view name) {
  static const std::unordered_map<std::string_view, PlyType> kTypes = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUInt8},   {"uint8", PlyType::kUInt8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUInt16}, {"uint16", PlyType::kUInt16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUInt32},   {"uint32", PlyType::kUInt32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64},
  };
  auto it = kTypes.find(name);
  if (it == kTypes.end()) return std::nullopt;
  return it->second;
}

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8: return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16: return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type{PlyType::kFloat32};
  bool is_list{false};
  PlyType count_type{PlyType::kUInt8};
};

struct PlyElement {
  std::string name;
  std::size_t count{0};
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  CloudFormat format{CloudFormat::kPlyAscii};
  std::vector<PlyElement> elements;
  std::size_t body_offset{0};
};

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedHeader, "PLY: " + what);
}

PlyHeader parse_ply_header(std::string_view bytes) {
  if (bytes.substr(0, 3) != "ply" || bytes.size() < 4 || (bytes[3] != '\n' && bytes[3] != '\r')) {
    malformed("missing 'ply' magic");
  }
  PlyHeader header;
  bool have_format = false;
  std::size_t pos = 0;
  bool first = true;
  while (true) {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) malformed("header not terminated by end_header");
    std::string_view line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (first) {
      first = false;
      continue;
    }
    const auto words = split_words(line);
    if (words.empty()) continue;
    const std::string_view key = words[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (words.size() != 3 || words[2] != "1.0") malformed("bad format line");
      if (words[1] == "ascii") {
        header.format = CloudFormat::kPlyAscii;
      } else if (words[1] == "binary_little_endian") {
        header.format = CloudFormat::kPlyBinaryLE;
      } else {
        malformed("unsupported format '" + std::string(words[1]) + "'");
      }
      have_format = true;
    } else if (key == "element") {
      if (words.size() != 3) malformed("bad element line");
      PlyElement element;
      element.name = std::string(words[1]);
      std::size_t count = 0;
      auto [ptr, ec] = std::from_chars(words[2].data(), words[2].data() + words[2].size(), count);
      if (ec != std::errc() || ptr != words[2].data() + words[2].size()) malformed("bad element count");
      element.count = count;
      header.elements.push_back(std::move(element));
    } else if (key == "property") {
      if (header.elements.empty()) malformed("property before any element");
      PlyProperty prop;
      if (words.size() == 5 && words[1] == "list") {
        auto count_type = ply_type_from_name(words[2]);
        auto item_type = ply_type_from_name(words[3]);
        if (!count_type || !item_type) malformed("unknown list property type");
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        auto type = ply_type_from_name(words[1]);
        if (!type) malformed("unknown property type '" + std::string(words[1]) + "'");
        prop.type = *type;
        prop.name = std::string(words[2]);
      } else {
        malformed("bad property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      malformed("unexpected header keyword '" + std::string(key) + "'");
    }
  }
  if (!have_format) malformed("missing format line");
  header.body_offset = pos;
  return header;
}

struct VertexLayout {
  std::size_t element_index{0};
  int x{-1}, y{-1}, z{-1};
};

VertexLayout find_vertex_layout(const PlyHeader& header) {
  for (std::size_t e = 0; e < header.elements.size(); ++e) {
    const PlyElement& el = header.elements[e];
    if (el.name != "vertex") continue;
    VertexLayout layout;
    layout.element_index = e;
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      const PlyProperty& prop = el.properties[p];
      int* slot = prop.name == "x" ? &layout.x : prop.name == "y" ? &layout.y
                : prop.name == "z" ? &layout.z : nullptr;
      if (slot == nullptr) continue;
      if (prop.is_list || (prop.type != PlyType::kFloat32 && prop.type != PlyType::kFloat64)) {
        malformed("vertex property '" + prop.name + "' must be float or double");
      }
      *slot = static_cast<int>(p);
    }
    if (layout.x < 0 || layout.y < 0 || layout.z < 0) malformed("vertex element lacks x/y/z");
    return layout;
  }
  malformed("no vertex element");
}

// ---------------------------------------------------------------------------
// PLY bodies
// ---------------------------------------------------------------------------

std::vector<Point3> read_ply_ascii(std::string_view body, const PlyHeader& header,
                                   const VertexLayout& layout) {
  Tokenizer tok(body);
  auto next_number = [&]() -> double {
    auto t = tok.next();
    if (!t) malformed("ascii body shorter than declared");
    auto v = parse_double(*t);
    if (!v) malformed("bad ascii number '" + std::string(*t) + "'");
    return *v;
  };
  std::vector<Point3> points;
  for (std::size_t e = 0; e <= layout.element_index; ++e) {
    const PlyElement& el = header.elements[e];
    const bool is_vertex = e == layout.element_index;
    if (is_vertex) points.reserve(el.count);
    for (std::size_t i = 0; i < el.count; ++i) {
      Point3 p;
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        const PlyProperty& prop = el.properties[k];
        if (prop.is_list) {
          const double n = next_number();
          if (n < 0 || n != std::floor(n)) malformed("bad list count");
          for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) next_number();
          continue;
        }
        const double v = next_number();
        if (!is_vertex) continue;
        const int ik = static_cast<int>(k);
        if (ik == layout.x) p.x = v;
        else if (ik == layout.y) p.y = v;
        else if (ik == layout.z) p.z = v;
      }
      if (is_vertex) points.push_back(p);
    }
  }
  return points;
}

double read_le_scalar(const unsigned char* src, PlyType type) {
  // Host is assumed little endian (checked at compile time below).
  switch (type) {
    case PlyType::kInt8: { std::int8_t v; std::memcpy(&v, src, 1); return v; }
    case PlyType::kUInt8: { std::uint8_t v; std::memcpy(&v, src, 1); return v; }
    case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, src, 2); return v; }
    case PlyType::kUInt16: { std::uint16_t v; std::memcpy(&v, src, 2); return v; }
    case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, src, 4); return v; }
    case PlyType::kUInt32: { std::uint32_t v; std::memcpy(&v, src, 4); return v; }
    case PlyType::kFloat32: { float v; std::memcpy(&v, src, 4); return v; }
    case PlyType::kFloat64: { double v; std::memcpy(&v, src, 8); return v; }
  }
  return 0.0;
}

static_assert(std::endian::native == std::endian::little,
              "binary PLY reader assumes a little-endian host");

std::vector<Point3> read_ply_binary(std::string_view body, const PlyHeader& header,
                                    const VertexLayout& layout) {
  const auto* data = reinterpret_cast<const unsigned char*>(body.data());
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > body.size()) malformed("binary body shorter than declared");
  };
  std::vector<Point3> points;
  for (std::size_t e = 0; e <= layout.element_index; ++e) {
    const PlyElement& el = header.elements[e];
    const bool is_vertex = e == layout.element_index;
    if (is_vertex) points.reserve(el.count);
    for (std::size_t i = 0; i < el.count; ++i) {
      Point3 p;
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        const PlyProperty& prop = el.properties[k];
        if (prop.is_list) {
          const std::size_t cs = ply_type_size(prop.count_type);
          need(cs);
          const double n = read_le_scalar(data + pos, prop.count_type);
          pos += cs;
          if (n < 0) malformed("negative list count");
          const std::size_t bytes = static_cast<std::size_t>(n) * ply_type_size(prop.type);
          need(bytes);
          pos += bytes;
          continue;
        }
        const std::size_t sz = ply_type_size(prop.type);
        need(sz);
        if (is_vertex) {
          const double v = read_le_scalar(data + pos, prop.type);
          const int ik = static_cast<int>(k);
          if (ik == layout.x) p.x = v;
          else if (ik == layout.y) p.y = v;
          else if (ik == layout.z) p.z = v;
        }
        pos += sz;
      }
      if (is_vertex) points.push_back(p);
    }
  }
  return points;
}

std::vector<Point3> parse_xyz(std::string_view bytes) {
  std::vector<Point3> points;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    Tokenizer tok(line);
    auto first = tok.next();
    if (!first || first->front() == '#') continue;
    std::array<double, 3> xyz{};
    std::optional<std::string_view> token = first;
    for (int k = 0; k < 3; ++k) {
      if (k > 0) token = tok.next();
      if (!token) {
        throw Error(ErrorCode::kMalformedHeader,
                    "XYZ line " + std::to_string(line_no) + ": expected three coordinates");
      }
      auto v = parse_double(*token);
      if (!v) {
        throw Error(ErrorCode::kMalformedHeader, "XYZ line " + std::to_string(line_no) +
                                                     ": bad number '" + std::string(*token) + "'");
      }
      xyz[static_cast<std::size_t>(k)] = *v;
    }
    points.push_back({xyz[0], xyz[1], xyz[2]});
  }
  return points;
}

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  bounds_ = {points_[0].x, points_[0].x, points_[0].y, points_[0].y, points_[0].z, points_[0].z};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point3& p = points_[i];
    if (!is_finite(p)) {
      throw Error(ErrorCode::kNonFiniteCoordinate,
                  "point " + std::to_string(i) + " has a non-finite coordinate");
    }
    bounds_.x_min = std::min(bounds_.x_min, p.x);
    bounds_.x_max = std::max(bounds_.x_max, p.x);
    bounds_.y_min = std::min(bounds_.y_min, p.y);
    bounds_.y_max = std::max(bounds_.y_max, p.y);
    bounds_.z_min = std::min(bounds_.z_min, p.z);
    bounds_.z_max = std::max(bounds_.z_max, p.z);
  }
}

const Bounds3& PointCloud::bounds() const {
  if (points_.empty()) throw Error(ErrorCode::kEmptyCloud, "empty point cloud has no bounds");
  return bounds_;
}

void PointCloud::require_non_empty(std::string_view stage) const {
  if (points_.empty()) {
    throw Error(ErrorCode::kEmptyCloud, std::string(stage), "point cloud is empty");
  }
}

PointCloud parse_point_cloud(std::string_view bytes, CloudFormat format) {
  std::vector<Point3> points;
  if (format == CloudFormat::kXyzText) {
    points = parse_xyz(bytes);
  } else {
    const PlyHeader header = parse_ply_header(bytes);
    if (header.format != format) {
      malformed("header format does not match the declared format");
    }
    const VertexLayout layout = find_vertex_layout(header);
    const std::string_view body = bytes.substr(header.body_offset);
    points = format == CloudFormat::kPlyAscii ? read_ply_ascii(body, header, layout)
                                              : read_ply_binary(body, header, layout);
  }
  if (points.empty()) throw Error(ErrorCode::kEmptyCloud, "input contains no points");
  return PointCloud(std::move(points));
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".ply") {
    return parse_point_cloud(bytes, parse_ply_header(bytes).format);
  }
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") {
    return parse_point_cloud(bytes, CloudFormat::kXyzText);
  }
  throw Error(ErrorCode::kMalformedHeader, "unrecognised point cloud extension '" + ext + "'");
}

void write_xyz(const PointCloud& cloud, std::ostream& out) {
  std::string line;
  for (const Point3& p : cloud) {
    line.clear();
    append_double(line, p.x);
    line.push_back(' ');
    append_double(line, p.y);
    line.push_back(' ');
    append_double(line, p.z);
    line.push_back('\n');
    out << line;
  }
}

void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  write_xyz(cloud, out);
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

void write_ply_binary(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const Point3& p : cloud) {
    const double xyz[3] = {p.x, p.y, p.z};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0) || !std::isfinite(voxel)) {
    throw Error(ErrorCode::kNonPositiveVoxel, "voxel size must be positive");
  }
  struct Accum {
    double sx{0}, sy{0}, sz{0};
    Point3 lo{}, hi{};
    std::size_t n{0};
  };
  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto v : k) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<std::array<std::int64_t, 3>, std::size_t, KeyHash> slot;
  std::vector<Accum> accum;
  slot.reserve(cloud.size());
  for (const Point3& p : cloud) {
    const std::array<std::int64_t, 3> key = {static_cast<std::int64_t>(std::floor(p.x / voxel)),
                                             static_cast<std::int64_t>(std::floor(p.y / voxel)),
                                             static_cast<std::int64_t>(std::floor(p.z / voxel))};
    auto [it, inserted] = slot.try_emplace(key, accum.size());
    if (inserted) accum.push_back({0, 0, 0, p, p, 0});
    Accum& a = accum[it->second];
    a.sx += p.x;
    a.sy += p.y;
    a.sz += p.z;
    a.lo = {std::min(a.lo.x, p.x), std::min(a.lo.y, p.y), std::min(a.lo.z, p.z)};
    a.hi = {std::max(a.hi.x, p.x), std::max(a.hi.y, p.y), std::max(a.hi.z, p.z)};
    ++a.n;
  }
  std::vector<Point3> out;
  out.reserve(accum.size());
  for (const Accum& a : accum) {
    const double n = static_cast<double>(a.n);
    // The clamp only absorbs rounding in sum/n; the true mean is inside [lo, hi].
    out.push_back({std::clamp(a.sx / n, a.lo.x, a.hi.x), std::clamp(a.sy / n, a.lo.y, a.hi.y),
                   std::clamp(a.sz / n, a.lo.z, a.hi.z)});
  }
  return PointCloud(std::move(out));
}

}  // namespace roomtrace
