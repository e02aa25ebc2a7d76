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

// Feature-pyramid extraction from a RAD cube.
//
// Any implementation of Backbone may feed the detector. ReferenceBackbone
// folds the Doppler bins into channels, so its maps are 2D over
// (range, azimuth), and builds levels with strided convolutions.

#ifndef RADTR_BACKBONE_H_
#define RADTR_BACKBONE_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "radtr/frame.h"
#include "radtr/nn.h"
#include "radtr/tensor.h"

namespace radtr {

// Levels ordered finest first, coarsest last. Each level is (C, H, W).
struct FeaturePyramid {
  std::vector<Tensor> levels;
};

// Throws ArgumentError unless there is at least one rank-3 level and spatial
// sizes strictly decrease from level to level.
void ValidatePyramid(const FeaturePyramid& pyramid);

class Backbone {
 public:
  virtual ~Backbone() = default;
  virtual FeaturePyramid Extract(const RadCube& cube) const = 0;
  // Channels C_l per level, finest first.
  virtual std::vector<std::int64_t> LevelChannels() const = 0;
  virtual void Visit(const ParameterVisitor& visit) = 0;
  virtual std::unique_ptr<Backbone> Clone() const = 0;
};

struct BackboneConfig {
  std::int64_t range = 64;
  std::int64_t azimuth = 64;
  std::int64_t doppler = 16;
  // Stride of the first level relative to the cube; each further level
  // halves the resolution.
  std::int64_t first_stride = 8;
  std::vector<std::int64_t> channels = {32, 32, 32};
};

// (H, W) of every level for `config`. Throws ConfigError when the cube's
// range or azimuth size is not divisible by the deepest stride.
std::vector<std::pair<std::int64_t, std::int64_t>> PyramidSizes(
    const BackboneConfig& config);

// Per-cube standardized log-magnitudes as a (Doppler, range, azimuth) tensor.
Tensor CubeToChannels(const RadCube& cube);

class ReferenceBackbone : public Backbone {
 public:
  ReferenceBackbone(const BackboneConfig& config, Rng& rng);

  FeaturePyramid Extract(const RadCube& cube) const override;
  std::vector<std::int64_t> LevelChannels() const override {
    return config_.channels;
  }
  void Visit(const ParameterVisitor& visit) override;
  std::unique_ptr<Backbone> Clone() const override {
    return std::make_unique<ReferenceBackbone>(*this);
  }

  const BackboneConfig& config() const { return config_; }

 private:
  struct Stage {
    Tensor weight;  // (out, in, k, k)
    Tensor bias;
    int stride;
  };
  BackboneConfig config_;
  std::vector<Stage> stages_;
};

}  // namespace radtr

#endif  // RADTR_BACKBONE_H_
