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

// Training loop, data loading and detector evaluation.

#ifndef RADTR_TRAINER_H_
#define RADTR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "radtr/checkpoint.h"
#include "radtr/config.h"
#include "radtr/detector.h"
#include "radtr/eval.h"
#include "radtr/frame.h"
#include "radtr/losses.h"
#include "radtr/optimizer.h"

namespace radtr {

struct StepRecord {
  std::int64_t step = 0;  // 1-based index of the completed step
  std::int64_t epoch = 0;
  double loss = 0.0;      // batch mean of the total loss
  LossTerms terms;        // batch means
  double grad_norm = 0.0; // before clipping
};

// Frame visiting order of `epoch`: a Fisher-Yates permutation of [0, n)
// that depends only on (seed, epoch).
std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::int64_t epoch);

// Training frames from `train_data`, or synthesized from `data_seed`.
// Throws DataError when a dataset cannot be read.
std::vector<Frame> LoadTrainingFrames(const TrainConfig& config);
// Held-out frames from `heldout_data`, or synthesized from a seed stream
// disjoint from the training one.
std::vector<Frame> LoadHeldoutFrames(const TrainConfig& config);

// Detections of the final decoder layer for every frame.
std::vector<FrameDetections> Predict(const Detector& model, const std::vector<Frame>& frames,
                                     double score_floor);

EvalReport Evaluate(const Detector& model, const std::vector<Frame>& frames,
                    const EvalConfig& config);

class Trainer {
 public:
  Trainer(const TrainConfig& config, std::vector<Frame> frames);

  // Forward, loss and backward over `batch` (indices into the training
  // frames), then one clipped AdamW update. Throws NumericError naming the
  // frame when a loss or gradient is non-finite, TrainingError when a frame
  // holds more objects than queries.
  StepRecord TrainStep(const std::vector<std::size_t>& batch);

  // Frames of global step `step` (0-based) under the epoch shuffling.
  std::vector<std::size_t> BatchAt(std::int64_t step) const;

  // Continues until `total_steps()` or until `max_steps` more steps ran
  // (negative means no limit). Calls `on_step` after each step.
  void Run(std::int64_t max_steps = -1,
           const std::function<void(const StepRecord&)>& on_step = {});

  std::int64_t steps_per_epoch() const;
  std::int64_t total_steps() const;
  std::int64_t step() const { return optimizer_.step(); }

  const TrainConfig& config() const { return config_; }
  const Detector& model() const { return model_; }
  const std::vector<Frame>& frames() const { return frames_; }

  Checkpoint Save();
  // Throws ConfigError when the checkpoint came from another configuration,
  // DataError when its parameters do not match the model.
  void Restore(const Checkpoint& checkpoint);

 private:
  std::vector<Tensor*> Parameters();

  TrainConfig config_;
  std::vector<Frame> frames_;
  Detector model_;
  AdamW optimizer_;
};

// Rebuilds a detector from a checkpoint's embedded configuration.
Detector LoadDetector(const Checkpoint& checkpoint);

struct TrainingSummary {
  std::int64_t steps = 0;
  double final_loss = 0.0;
  std::filesystem::path checkpoint;
};

// Trains from scratch and writes checkpoint.bin, loss_log.csv (one row per
// step) and, when held-out frames are configured, eval_log.csv into `out`.
TrainingSummary RunTraining(const TrainConfig& config, const std::filesystem::path& out);

}  // namespace radtr

#endif  // RADTR_TRAINER_H_
