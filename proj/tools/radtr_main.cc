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

// radtr command-line tool: synthetic data generation, training, evaluation,
// inference and figure rendering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radtr/checkpoint.h"
#include "radtr/config.h"
#include "radtr/errors.h"
#include "radtr/eval.h"
#include "radtr/render.h"
#include "radtr/synth.h"
#include "radtr/trainer.h"

namespace radtr {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string FormatDetections(const FrameDetections& dets) {
  std::string out;
  char line[256];
  for (const Detection& d : dets) {
    const auto p = d.box.Params();
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", d.class_id,
                  d.score, p[0], p[1], p[2], p[3], p[4], p[5]);
    out += line;
  }
  return out;
}

FrameDetections ParseDetections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read detections " + path.string());
  FrameDetections dets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        v.clear();
        break;
      }
    }
    if (v.size() != 8 || v[0] < 0 || v[0] >= kNumClasses || v[0] != static_cast<int>(v[0])) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected class,score and six box values");
    }
    std::array<double, 6> p{};
    std::copy(v.begin() + 2, v.end(), p.begin());
    dets.push_back({static_cast<int>(v[0]), v[1], Box3D::FromParams(p)});
  }
  return dets;
}

int Gen(const std::filesystem::path& out, std::int64_t count, std::uint64_t seed,
        const std::string& config_path) {
  const TrainConfig config = config_path.empty() ? TrainConfig{} : LoadConfig(config_path);
  std::filesystem::create_directories(out);
  WriteDataset(out, count, seed, config.scene);
  std::cout << "wrote " << count << " frames to " << out.string() << "\n";
  return 0;
}

int Train(const std::string& config_path, std::optional<std::uint64_t> seed,
          const std::filesystem::path& out) {
  TrainConfig config = LoadConfig(config_path);
  if (seed) config.seed = *seed;
  const TrainingSummary s = RunTraining(config, out);
  std::cout << "trained " << s.steps << " steps, final loss " << s.final_loss
            << ", checkpoint " << s.checkpoint.string() << "\n";
  return 0;
}

int Eval(const std::filesystem::path& checkpoint, const std::filesystem::path& data,
         const std::string& view_name, const std::filesystem::path& csv) {
  const Checkpoint ck = LoadCheckpoint(checkpoint);
  const TrainConfig config = ParseConfig(ck.config_text);
  const Detector model = LoadDetector(ck);
  EvalConfig eval = EvalConfig::Default(ParseView(view_name));
  eval.score_floor = config.score_floor;
  const EvalReport report = Evaluate(model, ReadDataset(data), eval);
  std::cout << FormatReportTable(report);
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw DataError("cannot write " + csv.string());
    f << FormatReportCsv(report);
  }
  return 0;
}

int Infer(const std::filesystem::path& checkpoint, const std::filesystem::path& frame,
          const std::filesystem::path& out) {
  const Checkpoint ck = LoadCheckpoint(checkpoint);
  const TrainConfig config = ParseConfig(ck.config_text);
  const Detector model = LoadDetector(ck);
  const auto dets = Predict(model, {LoadFrame(frame)}, config.score_floor);
  const std::string text = FormatDetections(dets.front());
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot write " + out.string());
    f << text;
  }
  return 0;
}

int Render(const std::filesystem::path& frame_path, const std::filesystem::path& detections,
           const std::filesystem::path& out, const std::filesystem::path& checkpoint,
           int level, std::int64_t query) {
  const Frame frame = LoadFrame(frame_path);
  const FrameDetections dets =
      detections.empty() ? FrameDetections{} : ParseDetections(detections);
  std::filesystem::create_directories(out);
  WriteImage(RenderDetectionMap(frame.cube, dets, View::kRA), out / "ra.ppm");
  WriteImage(RenderDetectionMap(frame.cube, dets, View::kRD), out / "rd.ppm");
  if (!checkpoint.empty()) {
    const Detector model = LoadDetector(LoadCheckpoint(checkpoint));
    NoGradScope no_grad;
    const ForwardResult r = model.Forward(frame.cube);
    const std::string name =
        "attention_l" + std::to_string(level) + "_q" + std::to_string(query) + ".pgm";
    WriteImage(RenderAttentionMap(r.output.cross_attention.back(), r.memory.level_offsets,
                                  r.memory.level_sizes, level, query),
               out / name);
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Radar detection transformer toolkit"};
  app.require_subcommand(1);

  std::filesystem::path gen_out;
  std::int64_t gen_count = 8;
  std::uint64_t gen_seed = 1;
  std::string gen_config;
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--count", gen_count, "Number of frames")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Base seed");
  gen->add_option("--config", gen_config, "Config whose scene settings are used");

  std::string train_config;
  std::optional<std::uint64_t> train_seed;
  std::filesystem::path train_out = "run";
  auto* train = app.add_subcommand("train", "Train a detector");
  train->add_option("config", train_config, "Config file")->required();
  train->add_option("--seed", train_seed, "Override the config seed");
  train->add_option("--out", train_out, "Output directory");

  std::filesystem::path eval_ck, eval_data, eval_csv;
  std::string eval_view = "rad";
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", eval_ck, "Checkpoint file")->required();
  eval->add_option("--data", eval_data, "Dataset directory")->required();
  eval->add_option("--view", eval_view, "rad, ra or rd");
  eval->add_option("--csv", eval_csv, "Also write the metric grid here");

  std::filesystem::path infer_ck, infer_frame, infer_out;
  auto* infer = app.add_subcommand("infer", "Detect objects in one frame");
  infer->add_option("--checkpoint", infer_ck, "Checkpoint file")->required();
  infer->add_option("--frame", infer_frame, "Frame file")->required();
  infer->add_option("--out", infer_out, "Write detections here instead of stdout");

  std::filesystem::path render_frame, render_dets, render_out, render_ck;
  int render_level = 0;
  std::int64_t render_query = 0;
  auto* render = app.add_subcommand("render", "Draw RA/RD maps and attention heatmaps");
  render->add_option("--frame", render_frame, "Frame file")->required();
  render->add_option("--detections", render_dets, "Detections from infer");
  render->add_option("--out", render_out, "Output directory")->required();
  render->add_option("--checkpoint", render_ck, "Also draw a final-layer attention map");
  render->add_option("--level", render_level, "Pyramid level of the attention map");
  render->add_option("--query", render_query, "Query of the attention map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return Gen(gen_out, gen_count, gen_seed, gen_config);
    if (*train) return Train(train_config, train_seed, train_out);
    if (*eval) return Eval(eval_ck, eval_data, eval_view, eval_csv);
    if (*infer) return Infer(infer_ck, infer_frame, infer_out);
    if (*render) {
      return Render(render_frame, render_dets, render_out, render_ck, render_level,
                    render_query);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace radtr

int main(int argc, char** argv) { return radtr::Main(argc, argv); }
