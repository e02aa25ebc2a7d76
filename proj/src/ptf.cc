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

#include "radtr/ptf.h"

#include <cmath>
#include <numbers>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {
namespace {

constexpr double kPositionBase = 10000.0;

// Angular frequencies of one axis with `dims` encoding dims.
std::vector<double> AxisFrequencies(std::int64_t dims) {
  std::vector<double> f(dims / 2);
  for (std::int64_t k = 0; k < dims / 2; ++k) {
    f[k] = std::pow(kPositionBase, -2.0 * static_cast<double>(k) /
                                       static_cast<double>(dims));
  }
  return f;
}

}  // namespace

TpeConfig TpeSplit(std::int64_t d_pos, double alpha) {
  if (d_pos <= 0 || d_pos % 2 != 0) {
    throw ConfigError("positional dim must be even and positive, got " +
                      std::to_string(d_pos));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("TPE alpha must lie in [0, 1]");
  }
  TpeConfig tpe;
  tpe.d_pos = d_pos;
  tpe.alpha = alpha;
  tpe.d_dop = 2 * static_cast<std::int64_t>(
                      std::round(alpha * static_cast<double>(d_pos) / 2.0));
  tpe.d_azi = d_pos - tpe.d_dop;
  return tpe;
}

Tensor EncodePoints(const Tensor& points, const TpeConfig& tpe,
                    std::int64_t d_model) {
  if (points.rank() != 2 || points.dim(1) != 2) {
    throw ArgumentError("EncodePoints: points must be (M, 2)");
  }
  if (tpe.d_pos > d_model || tpe.d_dop + tpe.d_azi != tpe.d_pos) {
    throw ConfigError("EncodePoints: positional dims exceed model dim");
  }
  const auto m = points.dim(0);
  const std::int64_t axis_dims[2] = {tpe.d_dop, tpe.d_azi};
  const std::int64_t axis_offset[2] = {0, tpe.d_dop};
  const std::vector<double> freqs[2] = {AxisFrequencies(tpe.d_dop),
                                        AxisFrequencies(tpe.d_azi)};
  const auto p = points.data();
  std::vector<double> out(m * d_model, 0.0);
  for (std::int64_t i = 0; i < m; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      const double angle = 2.0 * std::numbers::pi * p[i * 2 + axis];
      for (std::int64_t k = 0; k < axis_dims[axis] / 2; ++k) {
        const auto base = i * d_model + axis_offset[axis] + 2 * k;
        out[base] = std::sin(freqs[axis][k] * angle);
        out[base + 1] = std::cos(freqs[axis][k] * angle);
      }
    }
  }
  auto forward = out;
  return internal::MakeResult(
      {m, d_model}, std::move(out), {points},
      [m, d_model, y = std::move(forward), axis_dims0 = axis_dims[0],
       axis_dims1 = axis_dims[1], offset1 = axis_offset[1],
       f0 = freqs[0], f1 = freqs[1]](std::span<const double> g, auto& gin) {
        const std::int64_t dims[2] = {axis_dims0, axis_dims1};
        const std::int64_t offsets[2] = {0, offset1};
        const std::vector<double>* fs[2] = {&f0, &f1};
        for (std::int64_t i = 0; i < m; ++i) {
          for (int axis = 0; axis < 2; ++axis) {
            double acc = 0.0;
            for (std::int64_t k = 0; k < dims[axis] / 2; ++k) {
              const auto base = i * d_model + offsets[axis] + 2 * k;
              const double w = (*fs[axis])[k] * 2.0 * std::numbers::pi;
              // d sin = cos * w, d cos = -sin * w
              acc += g[base] * y[base + 1] * w - g[base + 1] * y[base] * w;
            }
            gin[0][i * 2 + axis] += acc;
          }
        }
      });
}

Tensor SpatialPositionalEncoding(std::int64_t height, std::int64_t width,
                                 const TpeConfig& tpe) {
  std::vector<double> cells(height * width * 2);
  for (std::int64_t r = 0; r < height; ++r)
    for (std::int64_t c = 0; c < width; ++c) {
      cells[(r * width + c) * 2] = (static_cast<double>(r) + 0.5) / height;
      cells[(r * width + c) * 2 + 1] = (static_cast<double>(c) + 0.5) / width;
    }
  NoGradScope no_grad;
  const Tensor enc =
      EncodePoints(Tensor({height * width, 2}, std::move(cells)), tpe, tpe.d_pos);
  return Reshape(Transpose(enc), {tpe.d_pos, height, width});
}

PtfParams PtfParams::Init(const std::vector<std::int64_t>& channels,
                          std::int64_t d_model, Rng& rng) {
  PtfParams p;
  for (auto c : channels) {
    p.levels.push_back({LinearParams::Init(c, d_model, rng),
                        LayerNormParams::Init(d_model),
                        NormalInit({d_model}, 0.02, rng)});
  }
  return p;
}

void PtfParams::Visit(const ParameterVisitor& visit) {
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string prefix = "ptf.level" + std::to_string(l);
    levels[l].projection.Visit(prefix + ".align", visit);
    levels[l].norm.Visit(prefix + ".norm", visit);
    visit(prefix + ".embedding", levels[l].embedding);
  }
}

namespace {

// (C, H, W) -> (H*W, D) with row-major positions.
Tensor AlignedRows(const Tensor& level, const LevelAlignParams& params) {
  if (level.rank() != 3) throw ArgumentError("pyramid level must be (C, H, W)");
  const auto c = level.dim(0);
  if (params.projection.weight.dim(0) != c) {
    throw ConfigError("level has " + std::to_string(c) +
                      " channels but the projection expects " +
                      std::to_string(params.projection.weight.dim(0)));
  }
  const auto hw = level.dim(1) * level.dim(2);
  const Tensor rows = Transpose(Reshape(level, {c, hw}));
  return params.norm(params.projection(rows));
}

}  // namespace

Tensor AlignChannels(const Tensor& level, const LevelAlignParams& params) {
  const Tensor rows = AlignedRows(level, params);
  return Reshape(Transpose(rows), {rows.dim(1), level.dim(1), level.dim(2)});
}

TokenMemory FuseTokens(const FeaturePyramid& pyramid, const PtfParams& params,
                       const TpeConfig& tpe) {
  ValidatePyramid(pyramid);
  if (pyramid.levels.size() != params.levels.size()) {
    throw ConfigError("pyramid has " + std::to_string(pyramid.levels.size()) +
                      " levels but PTF is configured for " +
                      std::to_string(params.levels.size()));
  }
  TokenMemory memory;
  std::vector<Tensor> level_tokens;
  std::vector<Tensor> level_positions;
  std::int64_t offset = 0;
  for (std::size_t l = 0; l < pyramid.levels.size(); ++l) {
    const Tensor& level = pyramid.levels[l];
    const auto h = level.dim(1), w = level.dim(2);
    const Tensor aligned = AlignedRows(level, params.levels[l]);
    const auto d_model = aligned.dim(1);
    // Encoding per row-major cell, zero-padded to the model width.
    std::vector<double> cells(h * w * 2);
    for (std::int64_t r = 0; r < h; ++r)
      for (std::int64_t c = 0; c < w; ++c) {
        cells[(r * w + c) * 2] = (static_cast<double>(r) + 0.5) / h;
        cells[(r * w + c) * 2 + 1] = (static_cast<double>(c) + 0.5) / w;
      }
    Tensor pe;
    {
      NoGradScope no_grad;
      pe = EncodePoints(Tensor({h * w, 2}, std::move(cells)), tpe, d_model);
    }
    const Tensor encoded =
        AddTrailing(Add(aligned, pe), params.levels[l].embedding);
    // Column-major flattening: token t <- row-major cell (t mod H, t div H).
    std::vector<std::int64_t> order(h * w * d_model);
    std::vector<double> pos(h * w * d_model);
    const auto pe_data = pe.data();
    for (std::int64_t t = 0; t < h * w; ++t) {
      const auto [row, col] = TokenToCell(t, h);
      const auto src = row * w + col;
      for (std::int64_t j = 0; j < d_model; ++j) {
        order[t * d_model + j] = src * d_model + j;
        pos[t * d_model + j] = pe_data[src * d_model + j];
      }
    }
    level_tokens.push_back(Gather(encoded, std::move(order), {h * w, d_model}));
    level_positions.push_back(Tensor({h * w, d_model}, std::move(pos)));
    memory.level_offsets.push_back(offset);
    memory.level_sizes.emplace_back(h, w);
    offset += h * w;
  }
  memory.tokens = level_tokens.size() == 1 ? level_tokens[0] : Concat(level_tokens, 0);
  NoGradScope no_grad;
  memory.positions =
      level_positions.size() == 1 ? level_positions[0] : Concat(level_positions, 0);
  return memory;
}

}  // namespace radtr
