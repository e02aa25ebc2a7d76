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

#include "radtr/detector.h"

#include "radtr/errors.h"
#include "radtr/rng.h"

namespace radtr {

DecoderConfig MakeDecoderConfig(const ModelConfig& config) {
  if (config.d_model <= 0 || config.heads <= 0 || config.d_model % config.heads != 0) {
    throw ConfigError("d_model must be a positive multiple of heads");
  }
  DecoderConfig dc;
  dc.d_model = config.d_model;
  dc.heads = config.heads;
  dc.layers = config.layers;
  dc.queries = config.queries;
  dc.ffn_dim = config.ffn_dim;
  dc.num_classes = kNumClasses;
  const auto d_pos = config.d_pos == 0 ? config.d_model : config.d_pos;
  if (d_pos > config.d_model) throw ConfigError("d_pos must not exceed d_model");
  dc.tpe = TpeSplit(d_pos, config.tpe_alpha);
  if (dc.layers <= 0 || dc.queries <= 0 || dc.ffn_dim <= 0) {
    throw ConfigError("layers, queries and ffn_dim must be positive");
  }
  return dc;
}

Detector::Detector(const ModelConfig& config, std::uint64_t seed)
    : config_(config), decoder_config_(MakeDecoderConfig(config)) {
  Rng rng(MixSeed(seed));
  backbone_ = std::make_unique<ReferenceBackbone>(config.backbone, rng);
  ptf_ = PtfParams::Init(backbone_->LevelChannels(), config.d_model, rng);
  decoder_ = DecoderParams::Init(decoder_config_, rng);
}

Detector::Detector(const ModelConfig& config, std::unique_ptr<Backbone> backbone,
                   std::uint64_t seed)
    : config_(config),
      decoder_config_(MakeDecoderConfig(config)),
      backbone_(std::move(backbone)) {
  if (!backbone_) throw ConfigError("null backbone");
  Rng rng(MixSeed(seed));
  ptf_ = PtfParams::Init(backbone_->LevelChannels(), config.d_model, rng);
  decoder_ = DecoderParams::Init(decoder_config_, rng);
}

Detector::Detector(const Detector& other)
    : config_(other.config_),
      decoder_config_(other.decoder_config_),
      backbone_(other.backbone_->Clone()),
      ptf_(other.ptf_),
      decoder_(other.decoder_) {}

Detector& Detector::operator=(const Detector& other) {
  if (this != &other) *this = Detector(other);
  return *this;
}

ForwardResult Detector::Forward(const RadCube& cube) const {
  ForwardResult result;
  result.memory = FuseTokens(backbone_->Extract(cube), ptf_, decoder_config_.tpe);
  result.output = RunDecoder(result.memory, decoder_, decoder_config_);
  return result;
}

void Detector::Visit(const ParameterVisitor& visit) {
  backbone_->Visit(visit);
  ptf_.Visit(visit);
  decoder_.Visit(visit);
}

std::int64_t Detector::ParameterCount() {
  std::int64_t n = 0;
  Visit([&n](const std::string&, Tensor& t) { n += t.size(); });
  return n;
}

}  // namespace radtr
