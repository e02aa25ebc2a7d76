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

#include "radtr/backbone.h"

#include <cmath>
#include <string>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {

void ValidatePyramid(const FeaturePyramid& pyramid) {
  if (pyramid.levels.empty()) throw ArgumentError("pyramid has no levels");
  for (std::size_t l = 0; l < pyramid.levels.size(); ++l) {
    const auto& t = pyramid.levels[l];
    if (t.rank() != 3) throw ArgumentError("pyramid level must be (C, H, W)");
    if (l > 0) {
      const auto& prev = pyramid.levels[l - 1];
      if (t.dim(1) >= prev.dim(1) || t.dim(2) >= prev.dim(2)) {
        throw ArgumentError("pyramid spatial sizes must strictly decrease");
      }
    }
  }
}

std::vector<std::pair<std::int64_t, std::int64_t>> PyramidSizes(
    const BackboneConfig& config) {
  const auto levels = static_cast<std::int64_t>(config.channels.size());
  if (levels == 0) throw ConfigError("backbone needs at least one level");
  if (config.first_stride <= 0) throw ConfigError("first stride must be positive");
  const std::int64_t deepest = config.first_stride << (levels - 1);
  if (config.range % deepest != 0 || config.azimuth % deepest != 0) {
    throw ConfigError("cube " + std::to_string(config.range) + "x" +
                      std::to_string(config.azimuth) +
                      " is not divisible by backbone stride " +
                      std::to_string(deepest));
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> sizes;
  std::int64_t h = config.range / config.first_stride;
  std::int64_t w = config.azimuth / config.first_stride;
  for (std::int64_t l = 0; l < levels; ++l) {
    sizes.emplace_back(h, w);
    h /= 2;
    w /= 2;
  }
  return sizes;
}

Tensor CubeToChannels(const RadCube& cube) {
  const auto n = cube.range * cube.azimuth * cube.doppler;
  double mean = 0.0;
  for (float v : cube.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (float v : cube.values) var += (v - mean) * (v - mean);
  const double inv_std = 1.0 / std::sqrt(var / static_cast<double>(n) + 1e-12);
  std::vector<double> data(n);
  for (std::int64_t r = 0; r < cube.range; ++r)
    for (std::int64_t a = 0; a < cube.azimuth; ++a)
      for (std::int64_t d = 0; d < cube.doppler; ++d)
        data[(d * cube.range + r) * cube.azimuth + a] =
            (cube.at(r, a, d) - mean) * inv_std;
  return Tensor({cube.doppler, cube.range, cube.azimuth}, std::move(data));
}

ReferenceBackbone::ReferenceBackbone(const BackboneConfig& config, Rng& rng)
    : config_(config) {
  PyramidSizes(config_);
  if (config_.doppler <= 0) throw ConfigError("Doppler bins must be positive");
  std::int64_t in = config_.doppler;
  for (std::size_t l = 0; l < config_.channels.size(); ++l) {
    const std::int64_t out = config_.channels[l];
    if (out <= 0) throw ConfigError("backbone channels must be positive");
    const int k = l == 0 ? static_cast<int>(config_.first_stride) : 2;
    const std::int64_t fan_in = in * k * k;
    // He-uniform for the ReLU stages.
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> w(out * fan_in);
    for (auto& v : w) v = rng.Uniform(-limit, limit);
    stages_.push_back({Tensor({out, in, k, k}, std::move(w), true),
                       Tensor::Zeros({out}, true), k});
    in = out;
  }
}

FeaturePyramid ReferenceBackbone::Extract(const RadCube& cube) const {
  if (cube.range != config_.range || cube.azimuth != config_.azimuth ||
      cube.doppler != config_.doppler) {
    throw ConfigError("cube dimensions do not match the backbone config");
  }
  FeaturePyramid pyramid;
  Tensor x = CubeToChannels(cube);
  for (const auto& stage : stages_) {
    x = Relu(Conv2d(x, stage.weight, stage.bias, stage.stride));
    pyramid.levels.push_back(x);
  }
  return pyramid;
}

void ReferenceBackbone::Visit(const ParameterVisitor& visit) {
  for (std::size_t l = 0; l < stages_.size(); ++l) {
    const std::string prefix = "backbone.stage" + std::to_string(l);
    visit(prefix + ".weight", stages_[l].weight);
    visit(prefix + ".bias", stages_[l].bias);
  }
}

}  // namespace radtr
