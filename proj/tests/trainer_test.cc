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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "radtr/checkpoint.h"
#include "radtr/config.h"
#include "radtr/detector.h"
#include "radtr/errors.h"
#include "radtr/losses.h"
#include "radtr/optimizer.h"
#include "radtr/render.h"
#include "radtr/synth.h"
#include "radtr/trainer.h"

namespace radtr {
namespace {

constexpr char kTinyConfig[] = R"(
# Small enough for unit tests.
range = 32
azimuth = 32
doppler = 8
first_stride = 8
channels = 8, 8
d_model = 8
heads = 2
layers = 2
queries = 4
ffn_dim = 16
epochs = 2
batch_size = 2
train_frames = 3
max_objects = 2
seed = 7
)";

TEST(ConfigTest, DefaultsMatchDeskScale) {
  const TrainConfig c = ParseConfig("");
  EXPECT_EQ(c.model.backbone.range, 64);
  EXPECT_EQ(c.model.backbone.azimuth, 64);
  EXPECT_EQ(c.model.backbone.doppler, 16);
  EXPECT_EQ(c.model.d_model, 32);
  EXPECT_EQ(c.model.heads, 4);
  EXPECT_EQ(c.model.layers, 3);
  EXPECT_EQ(c.model.queries, 10);
  EXPECT_EQ(c.batch_size, 4);
  EXPECT_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.grad_clip, 1.0);
  EXPECT_EQ(c.loss.weights.rad, 40.0);
}

TEST(ConfigTest, ParsesAndRoundTrips) {
  const TrainConfig c = ParseConfig(kTinyConfig);
  EXPECT_EQ(c.scene.range, 32);
  EXPECT_EQ(c.model.backbone.channels, (std::vector<std::int64_t>{8, 8}));
  EXPECT_EQ(c.model.queries, 4);
  const TrainConfig again = ParseConfig(SerializeConfig(c));
  EXPECT_EQ(SerializeConfig(again), SerializeConfig(c));
  EXPECT_EQ(ConfigHash(again), ConfigHash(c));
  TrainConfig other = c;
  other.learning_rate = 0.1 + 0.2;
  EXPECT_NE(ConfigHash(other), ConfigHash(c));
  EXPECT_EQ(ParseConfig(SerializeConfig(other)).learning_rate, 0.1 + 0.2);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(ParseConfig("unknown_key = 1"), ConfigError);
  EXPECT_THROW(ParseConfig("epochs = 1\nepochs = 2"), ConfigError);
  EXPECT_THROW(ParseConfig("epochs = ten"), ConfigError);
  EXPECT_THROW(ParseConfig("epochs"), ConfigError);
  EXPECT_THROW(ParseConfig("learning_rate = -1"), ConfigError);
  EXPECT_THROW(ParseConfig("d_model = 30\nheads = 4"), ConfigError);
  EXPECT_THROW(ParseConfig("range = 60"), ConfigError);
  EXPECT_THROW(ParseConfig("queries = 2"), ConfigError);
  try {
    ParseConfig("epochs = 3\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ConfigTest, ShippedConfigsLoad) {
  const auto root = std::filesystem::path(RADTR_SOURCE_DIR) / "configs";
  const TrainConfig desk = LoadConfig(root / "desk.cfg");
  EXPECT_EQ(desk.model.d_model, 32);
  EXPECT_EQ(desk.epochs * ((desk.train_frames + desk.batch_size - 1) / desk.batch_size), 500);
  const TrainConfig full = LoadConfig(root / "full.cfg");
  EXPECT_EQ(full.model.d_model, 128);
  EXPECT_EQ(full.learning_rate, 1e-4);
  EXPECT_EQ(full.batch_size, 8);
  EXPECT_EQ(full.epochs, 150);
  EXPECT_EQ(full.model.tpe_alpha, 0.6);
}

TEST(AdamWTest, FirstStepMovesByLearningRate) {
  // Quadratic probe: the first bias-corrected update is lr * g / |g|.
  Tensor p = Tensor::Vector({3.0, -2.0, 0.5}, true);
  AdamW opt({0.1, 0.9, 0.999, 1e-8, 0.0});
  std::vector<std::vector<double>> g = {{6.0, -4.0, 1.0}};  // d/dp of p^2
  opt.Step({&p}, g);
  EXPECT_NEAR(p[0], 3.0 - 0.1, 1e-8);
  EXPECT_NEAR(p[1], -2.0 + 0.1, 1e-8);
  EXPECT_NEAR(p[2], 0.5 - 0.1, 1e-8);
  EXPECT_EQ(opt.step(), 1);
  EXPECT_TRUE(p.requires_grad());
}

TEST(AdamWTest, ZeroLearningRateKeepsParameters) {
  Tensor p = Tensor::Vector({1.0, 2.0}, true);
  AdamW opt({0.0, 0.9, 0.999, 1e-8, 0.5});
  for (int i = 0; i < 3; ++i) opt.Step({&p}, {{0.3, -0.7}});
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 2.0);
}

TEST(AdamWTest, DecoupledWeightDecay) {
  Tensor p = Tensor::Vector({2.0}, true);
  AdamW opt({0.1, 0.9, 0.999, 1e-8, 0.5});
  opt.Step({&p}, {{0.0}});
  EXPECT_NEAR(p[0], 2.0 - 0.1 * 0.5 * 2.0, 1e-15);
}

TEST(AdamWTest, ClipGlobalNorm) {
  std::vector<std::vector<double>> g = {{3.0}, {4.0}};
  EXPECT_EQ(ClipGlobalNorm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0][0], 0.6, 1e-15);
  EXPECT_NEAR(g[1][0], 0.8, 1e-15);
  std::vector<std::vector<double>> small = {{0.3}};
  ClipGlobalNorm(small, 1.0);
  EXPECT_EQ(small[0][0], 0.3);
}

TEST(EpochOrderTest, DeterministicPermutation) {
  const auto a = EpochOrder(10, 3, 0);
  EXPECT_EQ(a, EpochOrder(10, 3, 0));
  EXPECT_NE(a, EpochOrder(10, 3, 1));
  EXPECT_NE(a, EpochOrder(10, 4, 0));
  std::vector<bool> seen(10, false);
  for (auto i : a) seen[i] = true;
  for (bool s : seen) EXPECT_TRUE(s);
}

TEST(CheckpointTest, RoundTripAndErrors) {
  Checkpoint c;
  c.config_text = "epochs = 1\n";
  c.config_hash = 42;
  c.step = 9;
  c.entries.push_back({"w", {2, 2}, {1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4}, {1, 1, 1, 1}});
  c.entries.push_back({"b", {1}, {5}, {}, {}});
  const std::string bytes = EncodeCheckpoint(c);
  EXPECT_EQ(DecodeCheckpoint(bytes), c);
  EXPECT_THROW(DecodeCheckpoint("XXXX" + bytes.substr(4)), FormatError);
  EXPECT_THROW(DecodeCheckpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
  EXPECT_THROW(DecodeCheckpoint(bytes + "x"), FormatError);
}

TEST(TrainerTest, StepsAreFiniteAndDeterministic) {
  const TrainConfig c = ParseConfig(kTinyConfig);
  Trainer a(c, LoadTrainingFrames(c));
  Trainer b(c, LoadTrainingFrames(c));
  EXPECT_EQ(a.steps_per_epoch(), 2);
  EXPECT_EQ(a.total_steps(), 4);
  std::vector<double> la, lb;
  a.Run(-1, [&](const StepRecord& r) { la.push_back(r.loss); });
  b.Run(-1, [&](const StepRecord& r) { lb.push_back(r.loss); });
  ASSERT_EQ(la.size(), 4u);
  EXPECT_EQ(la, lb);
  for (double l : la) EXPECT_TRUE(std::isfinite(l));
  EXPECT_EQ(EncodeCheckpoint(a.Save()), EncodeCheckpoint(b.Save()));
}

TEST(TrainerTest, ZeroEpochsKeepsInitialModel) {
  TrainConfig c = ParseConfig(kTinyConfig);
  c.epochs = 0;
  Trainer t(c, LoadTrainingFrames(c));
  int calls = 0;
  t.Run(-1, [&](const StepRecord&) { ++calls; });
  EXPECT_EQ(calls, 0);
  const Checkpoint ck = t.Save();
  EXPECT_EQ(ck.step, 0);
  Detector fresh(c.model, c.seed);
  std::size_t i = 0;
  fresh.Visit([&](const std::string&, Tensor& p) {
    EXPECT_EQ(std::vector<double>(p.data().begin(), p.data().end()), ck.entries[i++].values);
  });
}

TEST(TrainerTest, ResumeReproducesTrajectory) {
  TrainConfig c = ParseConfig(kTinyConfig);
  c.epochs = 3;
  Trainer full(c, LoadTrainingFrames(c));
  std::vector<double> full_losses;
  full.Run(-1, [&](const StepRecord& r) { full_losses.push_back(r.loss); });

  Trainer first(c, LoadTrainingFrames(c));
  first.Run(3);
  const Checkpoint ck = DecodeCheckpoint(EncodeCheckpoint(first.Save()));
  Trainer resumed(c, LoadTrainingFrames(c));
  resumed.Restore(ck);
  EXPECT_EQ(resumed.step(), 3);
  std::vector<double> tail;
  resumed.Run(-1, [&](const StepRecord& r) { tail.push_back(r.loss); });
  ASSERT_EQ(tail.size(), full_losses.size() - 3);
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], full_losses[i + 3]);
  EXPECT_EQ(EncodeCheckpoint(resumed.Save()), EncodeCheckpoint(full.Save()));

  TrainConfig other = c;
  other.learning_rate = 0.5;
  Trainer mismatch(other, LoadTrainingFrames(other));
  EXPECT_THROW(mismatch.Restore(ck), ConfigError);
}

TEST(TrainerTest, NonFiniteInputNamesTheFrame) {
  const TrainConfig c = ParseConfig(kTinyConfig);
  std::vector<Frame> frames = LoadTrainingFrames(c);
  frames[1].cube.values[5] = std::numeric_limits<float>::quiet_NaN();
  Trainer t(c, frames);
  try {
    t.TrainStep({0, 1});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("training frame 1"), std::string::npos) << e.what();
  }
}

TEST(TrainerTest, TooManyObjectsIsATrainingError) {
  const TrainConfig c = ParseConfig(kTinyConfig);
  std::vector<Frame> frames = LoadTrainingFrames(c);
  frames[0].objects.assign(5, frames[0].objects.front());
  Trainer t(c, frames);
  EXPECT_THROW(t.TrainStep({0}), TrainingError);
}

TEST(TrainerTest, LoadDetectorMatchesTrainedModel) {
  const TrainConfig c = ParseConfig(kTinyConfig);
  Trainer t(c, LoadTrainingFrames(c));
  t.Run(2);
  const Detector loaded = LoadDetector(t.Save());
  NoGradScope no_grad;
  const Frame& f = t.frames()[0];
  const auto a = t.model().Forward(f.cube).output.final().boxes;
  const auto b = loaded.Forward(f.cube).output.final().boxes;
  EXPECT_EQ(std::vector<double>(a.data().begin(), a.data().end()),
            std::vector<double>(b.data().begin(), b.data().end()));
}

RadCube Ramp(std::int64_t r, std::int64_t a, std::int64_t d) {
  RadCube cube{r, a, d, std::vector<float>(r * a * d)};
  for (std::int64_t i = 0; i < r; ++i)
    for (std::int64_t j = 0; j < a; ++j)
      for (std::int64_t k = 0; k < d; ++k) cube.values[cube.Index(i, j, k)] = float(i + j + k);
  return cube;
}

std::string Pixels(const std::string& image, const std::string& header) {
  EXPECT_EQ(image.substr(0, header.size()), header);
  return image.substr(header.size());
}

TEST(RenderTest, EmptyDetectionsGiveBackgroundOnly) {
  const RadCube cube = Ramp(4, 3, 2);
  const std::string px = Pixels(RenderDetectionMap(cube, {}, View::kRA), "P6\n3 4\n255\n");
  ASSERT_EQ(px.size(), 4u * 3 * 3);
  // RA background at (r, a) is max over Doppler: r + a + 1, scaled over [1, 6].
  for (int r = 0; r < 4; ++r) {
    for (int a = 0; a < 3; ++a) {
      const auto v = static_cast<unsigned char>(px[3 * (r * 3 + a)]);
      EXPECT_EQ(v, std::lround(255.0 * (r + a) / 5.0));
      EXPECT_EQ(px[3 * (r * 3 + a)], px[3 * (r * 3 + a) + 1]);
    }
  }
  const std::string rd = Pixels(RenderDetectionMap(cube, {}, View::kRD), "P6\n2 4\n255\n");
  EXPECT_EQ(rd.size(), 4u * 2 * 3);
  EXPECT_THROW(RenderDetectionMap(cube, {}, View::kRAD), ArgumentError);
}

TEST(RenderTest, FullFrameBoxHugsBorder) {
  const RadCube cube{6, 5, 2, std::vector<float>(60, 0.0f)};
  const Detection d{2, 0.9, Box3D{{0.5, 0.5, 0.5}, {1, 1, 1}}};
  const std::string px = Pixels(RenderDetectionMap(cube, {d}, View::kRA), "P6\n5 6\n255\n");
  for (int r = 0; r < 6; ++r) {
    for (int a = 0; a < 5; ++a) {
      const bool border = r == 0 || r == 5 || a == 0 || a == 4;
      const auto* p = reinterpret_cast<const unsigned char*>(px.data()) + 3 * (r * 5 + a);
      if (border) {
        EXPECT_EQ(p[0], kClassColors[2][0]);
        EXPECT_EQ(p[1], kClassColors[2][1]);
        EXPECT_EQ(p[2], kClassColors[2][2]);
      } else {
        EXPECT_EQ(p[0] + p[1] + p[2], 0);
      }
    }
  }
}

TEST(RenderTest, GroundTruthBoxOutlinesItsBins) {
  const RadCube cube{16, 16, 4, std::vector<float>(16 * 16 * 4, 0.0f)};
  // Bins 4..7 in range and 2..9 in azimuth.
  const Detection d{0, 1.0, Box3D{{6.0 / 16, 6.0 / 16, 0.5}, {4.0 / 16, 8.0 / 16, 0.5}}};
  const std::string px = Pixels(RenderDetectionMap(cube, {d}, View::kRA), "P6\n16 16\n255\n");
  auto red = [&](int r, int a) { return static_cast<unsigned char>(px[3 * (r * 16 + a)]); };
  EXPECT_EQ(red(4, 2), kClassColors[0][0]);
  EXPECT_EQ(red(7, 9), kClassColors[0][0]);
  EXPECT_EQ(red(5, 5), 0);
  EXPECT_EQ(red(3, 2), 0);
  EXPECT_EQ(red(8, 9), 0);
}

TEST(RenderTest, AttentionMaps) {
  // Two levels: 4x2 then 2x1, two queries.
  const std::vector<std::int64_t> offsets = {0, 8};
  const std::vector<std::pair<std::int64_t, std::int64_t>> sizes = {{4, 2}, {2, 1}};
  std::vector<double> w(2 * 10, 0.1);
  std::string px = Pixels(RenderAttentionMap(w, offsets, sizes, 0, 1), "P5\n2 4\n255\n");
  EXPECT_EQ(px, std::string(8, static_cast<char>(255)));

  // One-hot on token 5 of level 0: column 5 / 4 = 1, row 5 % 4 = 1.
  std::fill(w.begin(), w.end(), 0.0);
  w[10 + 5] = 1.0;
  px = Pixels(RenderAttentionMap(w, offsets, sizes, 0, 1), "P5\n2 4\n255\n");
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) {
      EXPECT_EQ(static_cast<unsigned char>(px[r * 2 + c]), r == 1 && c == 1 ? 255 : 0);
    }
  }
  EXPECT_THROW(RenderAttentionMap(w, offsets, sizes, 2, 0), ArgumentError);
  EXPECT_THROW(RenderAttentionMap(w, offsets, sizes, 0, 2), ArgumentError);
}

// Integer-valued cube, so the background is exact in single precision.
RadCube FixtureCube() {
  RadCube cube{24, 20, 6, std::vector<float>(24 * 20 * 6)};
  for (int r = 0; r < 24; ++r) {
    for (int a = 0; a < 20; ++a) {
      for (int d = 0; d < 6; ++d) {
        cube.values[cube.Index(r, a, d)] = static_cast<float>((7 * r + 5 * d) % 13 + a % 4);
      }
    }
  }
  return cube;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Set RADTR_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
TEST(RenderTest, MatchesGoldenFiles) {
  const std::vector<Detection> detections = {
      {0, 0.9, Box3D{{0.3, 0.4, 0.5}, {0.25, 0.3, 0.5}}},
      {4, 0.6, Box3D{{0.7, 0.65, 0.3}, {0.2, 0.4, 0.25}}}};
  const auto dir = std::filesystem::path(RADTR_SOURCE_DIR) / "tests" / "golden";
  for (const auto& [view, name] : {std::pair{View::kRA, "fixture_ra.ppm"},
                                   std::pair{View::kRD, "fixture_rd.ppm"}}) {
    const std::string image = RenderDetectionMap(FixtureCube(), detections, view);
    if (std::getenv("RADTR_UPDATE_GOLDEN") != nullptr) WriteImage(image, dir / name);
    EXPECT_EQ(image, ReadFile(dir / name)) << name;
  }
}

bool CellTouchesBox(std::int64_t r, std::int64_t c, std::int64_t h, std::int64_t w,
                    const Box3D& box) {
  const auto overlaps = [](double lo, double hi, const Box3D& b, int axis) {
    return lo < b.center[axis] + 0.5 * b.size[axis] && hi > b.center[axis] - 0.5 * b.size[axis];
  };
  return overlaps(static_cast<double>(r) / h, static_cast<double>(r + 1) / h, box, 0) &&
         overlaps(static_cast<double>(c) / w, static_cast<double>(c + 1) / w, box, 1);
}

TEST(RenderTest, TrainedAttentionPeaksOnTheObject) {
  const TrainConfig config =
      LoadConfig(std::filesystem::path(RADTR_SOURCE_DIR) / "configs" / "desk.cfg");
  Trainer trainer(config, LoadTrainingFrames(config));
  trainer.Run(-1, nullptr);
  int checked = 0;
  for (const Frame& frame : trainer.frames()) {
    if (frame.objects.size() != 1) continue;
    NoGradScope no_grad;
    const ForwardResult r = trainer.model().Forward(frame.cube);
    const auto query = TotalLoss(r.output, frame.objects, config.loss).matches.back().pairs[0].first;
    const auto [h, w] = r.memory.level_sizes[0];
    const std::string px = Pixels(
        RenderAttentionMap(r.output.cross_attention.back(), r.memory.level_offsets,
                           r.memory.level_sizes, 0, query),
        "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n");
    const auto peak = std::max_element(px.begin(), px.end(), [](char a, char b) {
                        return static_cast<unsigned char>(a) < static_cast<unsigned char>(b);
                      }) - px.begin();
    EXPECT_TRUE(CellTouchesBox(peak / w, peak % w, h, w, frame.objects[0].box))
        << "peak at cell (" << peak / w << ", " << peak % w << ")";
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

}  // namespace
}  // namespace radtr
