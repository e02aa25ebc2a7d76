/* Copyright 2026 The radtr Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "radtr/render.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "radtr/errors.h"
#include "radtr/ptf.h"

namespace radtr {

const std::array<std::array<std::uint8_t, 3>, kNumClasses> kClassColors = {{
    {230, 25, 75},    // person
    {60, 180, 75},    // bicycle
    {0, 130, 200},    // car
    {245, 130, 48},   // motorcycle
    {145, 30, 180},   // bus
    {70, 240, 240},   // truck
}};

namespace {

std::string Header(const char* magic, std::int64_t width, std::int64_t height) {
  return std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) +
         "\n255\n";
}

// Inclusive pixel span covered by [lo, hi) in normalized coordinates.
std::pair<std::int64_t, std::int64_t> PixelSpan(double lo, double hi, std::int64_t n) {
  constexpr double kSlack = 1e-6;
  const auto clamp = [n](double v) {
    return static_cast<std::int64_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  const std::int64_t a = clamp(std::floor(lo * n + kSlack));
  const std::int64_t b = clamp(std::ceil(hi * n - kSlack) - 1);
  return {a, std::max(a, b)};
}

}  // namespace

std::string RenderDetectionMap(const RadCube& cube, const std::vector<Detection>& detections,
                               View view) {
  if (view == View::kRAD) throw ArgumentError("detection maps are drawn in RA or RD");
  const std::int64_t rows = cube.range;
  const std::int64_t cols = view == View::kRA ? cube.azimuth : cube.doppler;
  const std::int64_t depth = view == View::kRA ? cube.doppler : cube.azimuth;
  if (rows <= 0 || cols <= 0 || depth <= 0 ||
      static_cast<std::int64_t>(cube.values.size()) != rows * cols * depth) {
    throw ArgumentError("cube dimensions do not match its values");
  }
  std::vector<float> proj(rows * cols, -std::numeric_limits<float>::infinity());
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      float& v = proj[r * cols + c];
      for (std::int64_t k = 0; k < depth; ++k) {
        v = std::max(v, view == View::kRA ? cube.at(r, c, k) : cube.at(r, k, c));
      }
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(proj.begin(), proj.end());
  const double lo = *lo_it, span = static_cast<double>(*hi_it) - lo;
  std::vector<std::uint8_t> rgb(rows * cols * 3);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const double g = span > 0.0 ? (proj[i] - lo) / span : 0.0;
    const auto level = static_cast<std::uint8_t>(std::lround(255.0 * g));
    rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = level;
  }
  auto paint = [&](std::int64_t r, std::int64_t c, const std::array<std::uint8_t, 3>& color) {
    std::copy(color.begin(), color.end(), rgb.begin() + 3 * (r * cols + c));
  };
  for (const Detection& d : detections) {
    if (d.class_id < 0 || d.class_id >= kNumClasses) {
      throw ArgumentError("detection class out of range");
    }
    const Box2D box = ProjectBox(d.box, view);
    const auto [r0, r1] = PixelSpan(box.Lo(0), box.Hi(0), rows);
    const auto [c0, c1] = PixelSpan(box.Lo(1), box.Hi(1), cols);
    const auto& color = kClassColors[d.class_id];
    for (std::int64_t c = c0; c <= c1; ++c) {
      paint(r0, c, color);
      paint(r1, c, color);
    }
    for (std::int64_t r = r0; r <= r1; ++r) {
      paint(r, c0, color);
      paint(r, c1, color);
    }
  }
  std::string out = Header("P6", cols, rows);
  out.append(rgb.begin(), rgb.end());
  return out;
}

std::string RenderAttentionMap(
    const std::vector<double>& weights, const std::vector<std::int64_t>& level_offsets,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& level_sizes, int level,
    std::int64_t query) {
  if (level_offsets.size() != level_sizes.size() || level_sizes.empty()) {
    throw ArgumentError("token layout is inconsistent");
  }
  if (level < 0 || static_cast<std::size_t>(level) >= level_sizes.size()) {
    throw ArgumentError("attention level " + std::to_string(level) + " out of range");
  }
  std::int64_t tokens = 0;
  for (const auto& [h, w] : level_sizes) tokens += h * w;
  const auto total = static_cast<std::int64_t>(weights.size());
  if (tokens == 0 || total % tokens != 0) {
    throw ArgumentError("attention weights do not match the token count");
  }
  if (query < 0 || query >= total / tokens) {
    throw ArgumentError("query " + std::to_string(query) + " out of range");
  }
  const auto [h, w] = level_sizes[level];
  const double* row = weights.data() + query * tokens + level_offsets[level];
  double peak = 0.0;
  for (std::int64_t t = 0; t < h * w; ++t) peak = std::max(peak, row[t]);
  std::string out = Header("P5", w, h);
  for (std::int64_t r = 0; r < h; ++r) {
    for (std::int64_t c = 0; c < w; ++c) {
      const double v = row[CellToToken(r, c, h)];
      out.push_back(static_cast<char>(peak > 0.0 ? std::lround(255.0 * v / peak) : 0));
    }
  }
  return out;
}

void WriteImage(const std::string& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace radtr
