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
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "radtr/errors.h"
#include "radtr/eval.h"
#include "radtr/rng.h"

namespace radtr {
namespace {

Box3D Cube(double r, double a, double d, double s) { return Box3D{{r, a, d}, {s, s, s}}; }

TEST(IouTest, Examples) {
  const Box2D a{{1, 1}, {2, 2}}, b{{2, 2}, {2, 2}};
  EXPECT_NEAR(Iou(a, b), 1.0 / 7.0, 1e-15);
  EXPECT_EQ(Iou(a, a), 1.0);
  EXPECT_EQ(Iou(a, Box2D{{5, 5}, {1, 1}}), 0.0);
  EXPECT_THROW(Iou(a, Box2D{{0, 0}, {0, 1}}), ArgumentError);
}

TEST(AveragePrecisionTest, SingleHit) {
  const Box3D box = Cube(0.5, 0.5, 0.5, 0.2);
  EXPECT_EQ(AveragePrecision({{{0, 0.9, box}}}, {{{0, box}}}, 0, 0.5, View::kRAD), 1.0);
}

TEST(AveragePrecisionTest, NoObjectsGivesZero) {
  const Box3D box = Cube(0.5, 0.5, 0.5, 0.2);
  EXPECT_EQ(AveragePrecision({{{1, 0.9, box}}}, {{{0, box}}}, 1, 0.5, View::kRAD), 0.0);
  EXPECT_EQ(AveragePrecision({{}}, {{{0, box}}}, 0, 0.5, View::kRAD), 0.0);
}

TEST(AveragePrecisionTest, HandCase) {
  // Ranked TP, FP, TP against two objects: PR points (P, R) of (1, 0.5),
  // (0.5, 0.5), (2/3, 1) integrate to 0.5 + 0.5 * 2/3.
  const Box3D g1 = Cube(0.2, 0.2, 0.2, 0.1), g2 = Cube(0.7, 0.7, 0.7, 0.1);
  const FrameDetections dets = {{0, 0.9, g1}, {0, 0.8, Cube(0.45, 0.45, 0.45, 0.1)},
                                {0, 0.7, g2}};
  EXPECT_NEAR(AveragePrecision({dets}, {{{0, g1}, {0, g2}}}, 0, 0.5, View::kRAD),
              0.8333, 1e-4);
  EXPECT_NEAR(AveragePrecision({dets}, {{{0, g1}, {0, g2}}}, 0, 0.5, View::kRAD),
              0.5 + 0.5 * 2.0 / 3.0, 1e-15);
}

TEST(AveragePrecisionTest, GreedyPicksHighestIou) {
  // The detection overlaps both objects; it must claim the closer one so the
  // second detection can still match the other.
  const Box3D g1{{0.50, 0.5, 0.5}, {0.2, 0.2, 0.2}}, g2{{0.56, 0.5, 0.5}, {0.2, 0.2, 0.2}};
  const FrameDetections dets = {{0, 0.9, Box3D{{0.555, 0.5, 0.5}, {0.2, 0.2, 0.2}}},
                                {0, 0.8, Box3D{{0.49, 0.5, 0.5}, {0.2, 0.2, 0.2}}}};
  EXPECT_EQ(AveragePrecision({dets}, {{{0, g1}, {0, g2}}}, 0, 0.7, View::kRAD), 1.0);
}

TEST(AveragePrecisionTest, MatchesWithinFrameOnly) {
  const Box3D box = Cube(0.5, 0.5, 0.5, 0.2);
  EXPECT_EQ(AveragePrecision({{}, {{0, 0.9, box}}}, {{{0, box}}, {}}, 0, 0.5, View::kRAD),
            0.0);
}

struct Fixture {
  std::vector<FrameDetections> dets;
  std::vector<FrameObjects> gts;
};

Fixture RandomFixture(Rng& rng, int frames) {
  Fixture f;
  for (int i = 0; i < frames; ++i) {
    FrameObjects g;
    FrameDetections d;
    const int n = static_cast<int>(rng.UniformInt(0, 3));
    for (int k = 0; k < n; ++k) {
      Box3D b;
      for (int j = 0; j < 3; ++j) {
        b.center[j] = rng.Uniform(0.2, 0.8);
        b.size[j] = rng.Uniform(0.1, 0.3);
      }
      const int cls = static_cast<int>(rng.UniformInt(0, 2));
      g.push_back({cls, b});
      // A jittered true positive candidate, sometimes with the wrong class.
      Box3D p = b;
      for (int j = 0; j < 3; ++j) {
        p.center[j] += rng.Uniform(-0.05, 0.05);
        p.size[j] *= rng.Uniform(0.8, 1.2);
      }
      d.push_back({rng.Uniform() < 0.8 ? cls : 2, rng.Uniform(), p});
    }
    const int spurious = static_cast<int>(rng.UniformInt(0, 2));
    for (int k = 0; k < spurious; ++k) {
      d.push_back({static_cast<int>(rng.UniformInt(0, 2)), rng.Uniform(),
                   Cube(rng.Uniform(0.2, 0.8), rng.Uniform(0.2, 0.8), rng.Uniform(0.2, 0.8),
                        rng.Uniform(0.1, 0.3))});
    }
    f.gts.push_back(std::move(g));
    f.dets.push_back(std::move(d));
  }
  if (f.gts[0].empty()) f.gts[0].push_back({0, Cube(0.5, 0.5, 0.5, 0.2)});
  return f;
}

TEST(MeanAveragePrecisionTest, DegenerateMeans) {
  const Box3D a = Cube(0.3, 0.3, 0.3, 0.2), b = Cube(0.7, 0.7, 0.7, 0.2);
  EvalConfig cfg = EvalConfig::Default(View::kRAD);
  cfg.iou_thresholds = {0.5};
  // Class 0 perfect; class 1 has a higher-scoring false positive first.
  const std::vector<FrameDetections> dets = {
      {{0, 0.9, a}, {1, 0.8, Cube(0.1, 0.1, 0.1, 0.05)}, {1, 0.7, b}}};
  const std::vector<FrameObjects> gts = {{{0, a}, {1, b}}};
  const EvalReport r = MeanAveragePrecision(dets, gts, cfg);
  ASSERT_EQ(r.classes, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.ap[0][0], 1.0);
  EXPECT_EQ(r.ap[1][0], 0.5);
  EXPECT_EQ(r.map, 0.75);

  const EvalReport single = MeanAveragePrecision({{{0, 0.9, a}}}, {{{0, a}}}, cfg);
  EXPECT_EQ(single.map, single.ap[0][0]);
}

TEST(MeanAveragePrecisionTest, Errors) {
  const EvalConfig cfg = EvalConfig::Default(View::kRA);
  EXPECT_THROW(MeanAveragePrecision({}, {}, cfg), EvaluationError);
  EXPECT_THROW(MeanAveragePrecision({{}}, {{}}, cfg), EvaluationError);
  EvalConfig bad = cfg;
  bad.iou_thresholds = {0.5, 0.5};
  EXPECT_THROW(ValidateEvalConfig(bad), ArgumentError);
  bad.iou_thresholds = {1.0};
  EXPECT_THROW(ValidateEvalConfig(bad), ArgumentError);
}

TEST(MeanAveragePrecisionTest, Properties) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Fixture f = RandomFixture(rng, 6);
    for (View view : {View::kRAD, View::kRA, View::kRD}) {
      for (int c = 0; c < 3; ++c) {
        double prev = 2.0;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
          const double ap = AveragePrecision(f.dets, f.gts, c, t, view);
          EXPECT_GE(ap, 0.0);
          EXPECT_LE(ap, 1.0 + 1e-12);
          EXPECT_LE(ap, prev + 1e-12);
          prev = ap;
        }
      }
    }
    const EvalConfig cfg = EvalConfig::Default(View::kRAD);
    const double base = MeanAveragePrecision(f.dets, f.gts, cfg).map;

    // Frame and detection order do not matter.
    Fixture g = f;
    std::reverse(g.dets.begin(), g.dets.end());
    std::reverse(g.gts.begin(), g.gts.end());
    for (auto& d : g.dets) std::reverse(d.begin(), d.end());
    EXPECT_EQ(MeanAveragePrecision(g.dets, g.gts, cfg).map, base);

    // A lower-scoring duplicate never helps.
    Fixture h = f;
    for (auto& d : h.dets) {
      if (!d.empty()) {
        Detection dup = d[0];
        dup.score *= 0.5;
        d.push_back(dup);
      }
    }
    EXPECT_LE(MeanAveragePrecision(h.dets, h.gts, cfg).map, base + 1e-12);
  }
}

TEST(ExtractDetectionsTest, ArgmaxAndFloor) {
  // Query 0 favors class 2, query 1 favors no-object but class 1 clears the
  // floor, query 2 is uniform over 7 classes (1/7 > 0.05).
  const Tensor logits({3, 7}, {0, 0, 3, 0, 0, 0, 0,  //
                               -9, -2, -9, -9, -9, -9, 5,  //
                               0, 0, 0, 0, 0, 0, 0});
  const Tensor boxes = Tensor::Full({3, 6}, 0.25);
  const auto dets = ExtractDetections(logits, boxes, 0.05);
  ASSERT_EQ(dets.size(), 2u);
  EXPECT_EQ(dets[0].class_id, 2);
  EXPECT_NEAR(dets[0].score, std::exp(3.0) / (std::exp(3.0) + 6.0), 1e-12);
  EXPECT_EQ(dets[1].class_id, 0);
  EXPECT_NEAR(dets[1].score, 1.0 / 7.0, 1e-12);
  EXPECT_EQ(dets[1].box.size[2], 0.25);
  EXPECT_EQ(ExtractDetections(logits, boxes, 0.0).size(), 3u);
}

TEST(ReportTest, Formats) {
  const Box3D a = Cube(0.3, 0.3, 0.3, 0.2);
  const EvalReport r =
      MeanAveragePrecision({{{3, 0.9, a}}}, {{{3, a}}}, EvalConfig::Default(View::kRD));
  const std::string csv = FormatReportCsv(r);
  EXPECT_EQ(csv,
            "class,0.50,0.60,0.70,0.80,0.90\n"
            "motorcycle,1.000000,1.000000,1.000000,1.000000,1.000000\n"
            "mean,1.000000,1.000000,1.000000,1.000000,1.000000\n"
            "mAP,1.000000\n");
  const std::string table = FormatReportTable(r);
  EXPECT_NE(table.find("motorcycle"), std::string::npos);
  EXPECT_NE(table.find("mAP 1.0000"), std::string::npos);
}

}  // namespace
}  // namespace radtr
