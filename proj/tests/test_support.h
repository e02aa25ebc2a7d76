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

// Fixtures and independent oracles shared by the unit tests and the
// acceptance binary.

#ifndef RADTR_TESTS_TEST_SUPPORT_H_
#define RADTR_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radtr/decoder.h"
#include "radtr/eval.h"
#include "radtr/frame.h"
#include "radtr/grad_check.h"
#include "radtr/hungarian.h"
#include "radtr/losses.h"
#include "radtr/rng.h"
#include "radtr/tensor.h"

namespace radtr::testing {

// Costs drawn from U[0, 10].
CostMatrix RandomCostMatrix(Rng& rng, std::int64_t queries, std::int64_t objects);

// Minimum over every injective object -> query map, summing costs in object
// order.
double BruteForceMatchCost(const CostMatrix& cost);

// Random decoder output with `layers` layers plus `objects` ground truths.
struct LossFixture {
  DecoderOutput out;
  std::vector<GroundTruthObject> gts;
};
LossFixture MakeLossFixture(Rng& rng, std::int64_t queries, std::int64_t objects,
                            int layers);

DecoderOutput SingleLayer(const Tensor& logits, const Tensor& boxes);

// True when every matched pair of `layer` keeps every L1, min and max
// argument at least `margin` away from its kink.
bool AwayFromKinks(const LossFixture& f, const std::vector<MatchAssignment>& matches,
                   double margin = 1e-3);

// A scalar function and the point at which to check it.
struct GradProblem {
  ScalarFunction f;
  Tensor x;
};

struct GradCase {
  std::string name;
  std::function<GradProblem(Rng&)> make;
};

// One entry per differentiable tensor operation. Inputs are drawn away from
// kinks by a margin far larger than the finite-difference step.
const std::vector<GradCase>& OpCatalog();

// Pyramid -> token fusion -> decoder -> weighted head outputs, as a function
// of the pyramid values.
GradProblem PtfDecoderProblem(Rng& rng);

// Total set loss with a frozen assignment, as a function of the concatenated
// class logits and boxes of every layer.
GradProblem TotalLossProblem(Rng& rng);

// AP by direct enumeration of true-positive ranks, with its own IoU and
// matching loops. Assumes distinct detection scores.
double OracleAveragePrecision(const std::vector<FrameDetections>& detections,
                              const std::vector<FrameObjects>& objects, int class_id,
                              double iou_threshold, View view);

// Mean over ground-truth classes of the threshold-averaged oracle AP.
double OracleMeanAveragePrecision(const std::vector<FrameDetections>& detections,
                                  const std::vector<FrameObjects>& objects,
                                  const std::vector<double>& thresholds, View view);

// Frames of jittered true positives, wrong-class hits and spurious boxes with
// distinct scores. Frame 0 always holds an object.
struct EvalFixture {
  std::vector<FrameDetections> detections;
  std::vector<FrameObjects> objects;
};
EvalFixture MakeEvalFixture(Rng& rng, int frames, int classes);

}  // namespace radtr::testing

#endif  // RADTR_TESTS_TEST_SUPPORT_H_
