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

// Training configuration and its flat "key = value" text form.

#ifndef RADTR_CONFIG_H_
#define RADTR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "radtr/detector.h"
#include "radtr/losses.h"
#include "radtr/synth.h"

namespace radtr {

struct TrainConfig {
  ModelConfig model;
  LossOptions loss;
  SceneSpec scene;

  int epochs = 250;
  int batch_size = 4;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double grad_clip = 1.0;
  std::uint64_t seed = 1;

  // Either a directory written by `gen`, or in-memory synthetic frames drawn
  // from `scene` with `data_seed` when the directory is empty.
  std::string train_data;
  int train_frames = 8;
  std::string heldout_data;
  int heldout_frames = 0;
  std::uint64_t data_seed = 1;

  int eval_every = 0;  // steps between held-out evaluations; 0 disables
  double score_floor = 0.05;
};

// Throws ConfigError for values outside their ranges or an inconsistent
// model.
void ValidateTrainConfig(const TrainConfig& config);

// Parses "key = value" lines; '#' starts a comment. Keys missing from the
// text keep their defaults. Throws ConfigError on unknown or repeated keys
// and malformed values, naming the line.
TrainConfig ParseConfig(std::string_view text);
TrainConfig LoadConfig(const std::filesystem::path& path);

// Every key in a fixed order; doubles are written with round-trip precision.
std::string SerializeConfig(const TrainConfig& config);

// FNV-1a of SerializeConfig.
std::uint64_t ConfigHash(const TrainConfig& config);

}  // namespace radtr

#endif  // RADTR_CONFIG_H_
