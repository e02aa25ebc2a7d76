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

// End-to-end detector: backbone -> pyramid token fusion -> decoder.

#ifndef RADTR_DETECTOR_H_
#define RADTR_DETECTOR_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "radtr/backbone.h"
#include "radtr/decoder.h"
#include "radtr/frame.h"
#include "radtr/ptf.h"

namespace radtr {

struct ModelConfig {
  BackboneConfig backbone;
  std::int64_t d_model = 32;
  int heads = 4;
  int layers = 3;
  std::int64_t queries = 10;
  std::int64_t ffn_dim = 64;
  double tpe_alpha = 0.6;
  // 0 means d_model.
  std::int64_t d_pos = 0;
};

// Resolves the decoder settings of a model config. Throws ConfigError.
DecoderConfig MakeDecoderConfig(const ModelConfig& config);

struct ForwardResult {
  TokenMemory memory;
  DecoderOutput output;
};

class Detector {
 public:
  // Uses ReferenceBackbone.
  Detector(const ModelConfig& config, std::uint64_t seed);
  Detector(const ModelConfig& config, std::unique_ptr<Backbone> backbone,
           std::uint64_t seed);
  Detector(const Detector& other);
  Detector& operator=(const Detector& other);
  Detector(Detector&&) = default;
  Detector& operator=(Detector&&) = default;

  ForwardResult Forward(const RadCube& cube) const;

  // Visits backbone, PTF and decoder parameters in a fixed order.
  void Visit(const ParameterVisitor& visit);
  std::int64_t ParameterCount();

  const ModelConfig& config() const { return config_; }
  const DecoderConfig& decoder_config() const { return decoder_config_; }
  DecoderParams& decoder() { return decoder_; }
  PtfParams& ptf() { return ptf_; }

 private:
  ModelConfig config_;
  DecoderConfig decoder_config_;
  std::unique_ptr<Backbone> backbone_;
  PtfParams ptf_;
  DecoderParams decoder_;
};

}  // namespace radtr

#endif  // RADTR_DETECTOR_H_
