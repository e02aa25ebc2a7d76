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

// Figure output: detection overlays on RA/RD maps and cross-attention
// heatmaps, written as binary PPM/PGM pixmaps.

#ifndef RADTR_RENDER_H_
#define RADTR_RENDER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "radtr/box.h"
#include "radtr/eval.h"
#include "radtr/frame.h"

namespace radtr {

// RGB box color of each class.
extern const std::array<std::array<std::uint8_t, 3>, kNumClasses> kClassColors;

// P6 image: rows are range bins, columns azimuth (kRA) or Doppler (kRD)
// bins. The background is the cube's max projection over the remaining
// axis, min-max scaled to gray; each detection is a 1-pixel class-colored
// rectangle. Throws ArgumentError for kRAD.
std::string RenderDetectionMap(const RadCube& cube, const std::vector<Detection>& detections,
                               View view);

// P5 image of one query's attention over one pyramid level, reshaped with
// the token layout and scaled so the maximum is 255. `weights` is the
// head-averaged (queries x tokens) cross-attention of a decoder layer.
// Throws ArgumentError for an invalid level or query.
std::string RenderAttentionMap(const std::vector<double>& weights,
                               const std::vector<std::int64_t>& level_offsets,
                               const std::vector<std::pair<std::int64_t, std::int64_t>>& level_sizes,
                               int level, std::int64_t query);

// Throws DataError when the file cannot be written.
void WriteImage(const std::string& bytes, const std::filesystem::path& path);

}  // namespace radtr

#endif  // RADTR_RENDER_H_
