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

#include "radtr/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include "radtr/errors.h"
#include "radtr/rng.h"
#include "radtr/synth.h"

namespace radtr {

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::int64_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(MixSeed(seed) ^ MixSeed(static_cast<std::uint64_t>(epoch) + 0x5eed));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

std::vector<Frame> Synthesize(const TrainConfig& config, std::int64_t first, std::int64_t count) {
  std::vector<Frame> frames;
  for (std::int64_t i = 0; i < count; ++i) {
    frames.push_back(SynthScene(FrameSeed(config.data_seed, first + i), config.scene));
  }
  return frames;
}

}  // namespace

std::vector<Frame> LoadTrainingFrames(const TrainConfig& config) {
  if (!config.train_data.empty()) return ReadDataset(config.train_data);
  return Synthesize(config, 0, config.train_frames);
}

std::vector<Frame> LoadHeldoutFrames(const TrainConfig& config) {
  if (!config.heldout_data.empty()) return ReadDataset(config.heldout_data);
  return Synthesize(config, config.train_frames, config.heldout_frames);
}

std::vector<FrameDetections> Predict(const Detector& model, const std::vector<Frame>& frames,
                                     double score_floor) {
  std::vector<FrameDetections> out;
  NoGradScope no_grad;
  for (const Frame& f : frames) {
    const ForwardResult r = model.Forward(f.cube);
    const LayerPrediction& p = r.output.final();
    out.push_back(ExtractDetections(p.class_logits, p.boxes, score_floor));
  }
  return out;
}

EvalReport Evaluate(const Detector& model, const std::vector<Frame>& frames,
                    const EvalConfig& config) {
  std::vector<FrameObjects> objects;
  for (const Frame& f : frames) objects.push_back(f.objects);
  return MeanAveragePrecision(Predict(model, frames, config.score_floor), objects, config);
}

Trainer::Trainer(const TrainConfig& config, std::vector<Frame> frames)
    : config_(config),
      frames_(std::move(frames)),
      model_(config.model, config.seed),
      optimizer_(AdamWConfig{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay}) {
  ValidateTrainConfig(config_);
  if (frames_.empty()) throw DataError("no training frames");
}

std::vector<Tensor*> Trainer::Parameters() {
  std::vector<Tensor*> params;
  model_.Visit([&](const std::string&, Tensor& p) { params.push_back(&p); });
  return params;
}

std::int64_t Trainer::steps_per_epoch() const {
  const auto n = static_cast<std::int64_t>(frames_.size());
  return (n + config_.batch_size - 1) / config_.batch_size;
}

std::int64_t Trainer::total_steps() const { return steps_per_epoch() * config_.epochs; }

std::vector<std::size_t> Trainer::BatchAt(std::int64_t step) const {
  const std::int64_t per_epoch = steps_per_epoch();
  const std::int64_t epoch = step / per_epoch;
  const std::int64_t slot = step % per_epoch;
  const auto order = EpochOrder(frames_.size(), config_.seed, epoch);
  const auto begin = static_cast<std::size_t>(slot * config_.batch_size);
  const auto end = std::min(order.size(), begin + static_cast<std::size_t>(config_.batch_size));
  return {order.begin() + static_cast<std::ptrdiff_t>(begin),
          order.begin() + static_cast<std::ptrdiff_t>(end)};
}

StepRecord Trainer::TrainStep(const std::vector<std::size_t>& batch) {
  if (batch.empty()) throw ArgumentError("empty batch");
  const std::vector<Tensor*> params = Parameters();
  std::vector<std::vector<double>> grads(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) grads[i].assign(params[i]->size(), 0.0);

  StepRecord record;
  record.epoch = optimizer_.step() / steps_per_epoch();
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t index : batch) {
    const Frame& frame = frames_.at(index);
    const std::string where = "training frame " + std::to_string(index);
    try {
      Tape tape;
      LossResult loss;
      {
        TapeScope scope(tape);
        const ForwardResult fwd = model_.Forward(frame.cube);
        loss = TotalLoss(fwd.output, frame.objects, config_.loss);
      }
      const Gradients g = tape.Backward(loss.total);
      for (std::size_t i = 0; i < params.size(); ++i) {
        const std::vector<double> gi = g.Of(*params[i]);
        for (std::size_t j = 0; j < gi.size(); ++j) {
          if (!std::isfinite(gi[j])) throw NumericError("non-finite gradient");
          grads[i][j] += inv * gi[j];
        }
      }
      record.loss += inv * loss.total.item();
      record.terms.rad += inv * loss.terms.rad;
      record.terms.ra += inv * loss.terms.ra;
      record.terms.rd += inv * loss.terms.rd;
      record.terms.cls += inv * loss.terms.cls;
    } catch (const NumericError& e) {
      throw NumericError(where + " at step " + std::to_string(optimizer_.step() + 1) +
                         ": " + e.what());
    } catch (const TrainingError& e) {
      throw TrainingError(where + ": " + e.what());
    }
  }
  record.grad_norm = ClipGlobalNorm(grads, config_.grad_clip);
  optimizer_.Step(params, grads);
  record.step = optimizer_.step();
  return record;
}

void Trainer::Run(std::int64_t max_steps,
                  const std::function<void(const StepRecord&)>& on_step) {
  std::int64_t done = 0;
  while (step() < total_steps() && (max_steps < 0 || done < max_steps)) {
    const StepRecord r = TrainStep(BatchAt(step()));
    ++done;
    if (on_step) on_step(r);
  }
}

Checkpoint Trainer::Save() {
  Checkpoint c;
  c.config_text = SerializeConfig(config_);
  c.config_hash = ConfigHash(config_);
  c.step = optimizer_.step();
  const auto& m = optimizer_.first_moments();
  const auto& v = optimizer_.second_moments();
  std::size_t i = 0;
  model_.Visit([&](const std::string& name, Tensor& p) {
    CheckpointEntry e{name, p.shape(), {p.data().begin(), p.data().end()}, {}, {}};
    if (!m.empty()) {
      e.first_moment = m[i];
      e.second_moment = v[i];
    }
    c.entries.push_back(std::move(e));
    ++i;
  });
  return c;
}

namespace {

// Copies checkpoint values into the model, matching names and shapes in
// visiting order.
void LoadParameters(Detector& model, const Checkpoint& c) {
  std::size_t i = 0;
  model.Visit([&](const std::string& name, Tensor& p) {
    if (i >= c.entries.size()) throw DataError("checkpoint is missing " + name);
    const CheckpointEntry& e = c.entries[i++];
    if (e.name != name || e.shape != p.shape()) {
      throw DataError("checkpoint entry " + e.name + " " + ShapeString(e.shape) +
                      " does not match " + name + " " + ShapeString(p.shape()));
    }
    p = Tensor(e.shape, e.values, true);
  });
  if (i != c.entries.size()) throw DataError("checkpoint has extra entries");
}

}  // namespace

void Trainer::Restore(const Checkpoint& c) {
  if (c.config_hash != ConfigHash(config_)) {
    throw ConfigError("checkpoint was written under a different configuration");
  }
  LoadParameters(model_, c);
  std::vector<std::vector<double>> m, v;
  for (const auto& e : c.entries) {
    if (e.first_moment.empty()) continue;
    m.push_back(e.first_moment);
    v.push_back(e.second_moment);
  }
  if (!m.empty() && m.size() != c.entries.size()) {
    throw DataError("checkpoint has partial optimizer state");
  }
  optimizer_.Restore(c.step, std::move(m), std::move(v));
}

Detector LoadDetector(const Checkpoint& checkpoint) {
  const TrainConfig config = ParseConfig(checkpoint.config_text);
  if (ConfigHash(config) != checkpoint.config_hash) {
    throw DataError("checkpoint configuration hash mismatch");
  }
  Detector model(config.model, config.seed);
  LoadParameters(model, checkpoint);
  return model;
}

TrainingSummary RunTraining(const TrainConfig& config, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  Trainer trainer(config, LoadTrainingFrames(config));
  const std::vector<Frame> heldout =
      config.heldout_frames > 0 || !config.heldout_data.empty() ? LoadHeldoutFrames(config)
                                                                : std::vector<Frame>{};
  std::ofstream loss_log(out / "loss_log.csv");
  if (!loss_log) throw DataError("cannot write logs in " + out.string());
  loss_log << "step,epoch,loss,bbox_rad,bbox_ra,bbox_rd,cls,grad_norm\n";
  std::ofstream eval_log;
  if (!heldout.empty()) {
    eval_log.open(out / "eval_log.csv");
    eval_log << "step,map_rad,map_rad_50\n";
  }
  const EvalConfig eval_config = [&] {
    EvalConfig e = EvalConfig::Default(View::kRAD);
    e.score_floor = config.score_floor;
    return e;
  }();
  auto evaluate = [&](std::int64_t step) {
    const EvalReport r = Evaluate(trainer.model(), heldout, eval_config);
    char line[96];
    std::snprintf(line, sizeof(line), "%lld,%.6f,%.6f\n", static_cast<long long>(step), r.map,
                  r.MapAt(1));
    eval_log << line;
  };

  TrainingSummary summary;
  trainer.Run(-1, [&](const StepRecord& r) {
    char line[256];
    std::snprintf(line, sizeof(line), "%lld,%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  static_cast<long long>(r.step), static_cast<long long>(r.epoch), r.loss,
                  r.terms.rad, r.terms.ra, r.terms.rd, r.terms.cls, r.grad_norm);
    loss_log << line;
    summary.final_loss = r.loss;
    if (!heldout.empty() && config.eval_every > 0 && r.step % config.eval_every == 0) {
      evaluate(r.step);
    }
  });
  if (!heldout.empty()) evaluate(trainer.step());
  summary.steps = trainer.step();
  summary.checkpoint = out / "checkpoint.bin";
  SaveCheckpoint(trainer.Save(), summary.checkpoint);
  return summary;
}

}  // namespace radtr
