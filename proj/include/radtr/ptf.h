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

// Pyramid token fusion: aligns every pyramid level to the model width, adds
// a tunable sinusoidal positional encoding and a learned per-level
// embedding, and flattens all levels into one token memory.
//
// Token order within a level is column-major: token t sits at
// row = t mod H, col = t div H. Levels are concatenated in pyramid order.

#ifndef RADTR_PTF_H_
#define RADTR_PTF_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radtr/backbone.h"
#include "radtr/nn.h"
#include "radtr/tensor.h"

namespace radtr {

// Positional budget split between the range axis (d_dop) and the azimuth
// axis (d_azi). The first d_dop encoding dims describe the range position,
// the next d_azi the azimuth position.
struct TpeConfig {
  std::int64_t d_pos = 0;
  double alpha = 0.5;
  std::int64_t d_dop = 0;
  std::int64_t d_azi = 0;
};

// d_dop = 2 * round(alpha * d_pos / 2), d_azi = d_pos - d_dop. Throws
// ConfigError for odd or non-positive d_pos or alpha outside [0, 1].
TpeConfig TpeSplit(std::int64_t d_pos, double alpha);

// Sinusoidal encoding of normalized 2D points (range, azimuth) in [0, 1].
// points: (M, 2); returns (M, d_model) with the encoding in the leading
// d_pos dims and zeros after. Each axis maps u to the angle 2*pi*u and emits
// (sin, cos) pairs at frequencies 10000^(-2k / d_axis). Differentiable in
// the points.
Tensor EncodePoints(const Tensor& points, const TpeConfig& tpe,
                    std::int64_t d_model);

// Encoding of every cell center of an H x W grid as (d_pos, H, W).
Tensor SpatialPositionalEncoding(std::int64_t height, std::int64_t width,
                                 const TpeConfig& tpe);

struct LevelAlignParams {
  LinearParams projection;  // 1x1 convolution C_l -> D
  LayerNormParams norm;
  Tensor embedding;  // (D)
};

struct PtfParams {
  std::vector<LevelAlignParams> levels;

  static PtfParams Init(const std::vector<std::int64_t>& channels,
                        std::int64_t d_model, Rng& rng);
  void Visit(const ParameterVisitor& visit);
};

struct TokenMemory {
  Tensor tokens;     // (N, D)
  Tensor positions;  // (N, D) positional encodings of the tokens, constant
  std::vector<std::int64_t> level_offsets;
  std::vector<std::pair<std::int64_t, std::int64_t>> level_sizes;  // (H, W)

  std::int64_t size() const { return tokens.dim(0); }
};

// (C_l, H, W) -> (D, H, W): 1x1 projection then layer norm over channels at
// every position. Throws ConfigError on a channel mismatch.
Tensor AlignChannels(const Tensor& level, const LevelAlignParams& params);

// Token index within a level <-> grid position.
inline std::pair<std::int64_t, std::int64_t> TokenToCell(std::int64_t token,
                                                         std::int64_t height) {
  return {token % height, token / height};
}
inline std::int64_t CellToToken(std::int64_t row, std::int64_t col,
                                std::int64_t height) {
  return col * height + row;
}

// Throws ConfigError when the level count or channels disagree with params.
TokenMemory FuseTokens(const FeaturePyramid& pyramid, const PtfParams& params,
                       const TpeConfig& tpe);

}  // namespace radtr

#endif  // RADTR_PTF_H_
