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

// Set-prediction training objective.

#ifndef RADTR_LOSSES_H_
#define RADTR_LOSSES_H_

#include <span>
#include <vector>

#include "radtr/decoder.h"
#include "radtr/frame.h"
#include "radtr/giou.h"
#include "radtr/hungarian.h"
#include "radtr/tensor.h"

namespace radtr {

struct FocalParams {
  double gamma = 2.0;
  // One weight per class including the trailing no-object class.
  std::vector<double> alpha;

  // alpha = 0.25 for every object class and 0.75 for no-object.
  static FocalParams Default(int num_classes);
};

// Throws ArgumentError for gamma < 0 or weights outside [0, 1].
void ValidateFocalParams(const FocalParams& fp, int num_classes);

// -alpha_t (1 - p_t)^gamma log(p_t) with p_t clamped at kFocalMinProb.
// Throws ArgumentError unless `probs` sums to 1 within 1e-5.
double FocalLoss(std::span<const double> probs, int target, const FocalParams& fp);

inline constexpr double kFocalMinProb = 1e-12;

// (M, G) matching cost on the RAD boxes:
// cls * (1 - p_class) + l1 * L1 + giou * GIoU.
CostMatrix MatchingCost(const LayerPrediction& pred,
                        const std::vector<GroundTruthObject>& gts,
                        const LossWeights& w);

// Unweighted components averaged over the supervised layers.
struct LossTerms {
  double rad = 0.0;
  double ra = 0.0;
  double rd = 0.0;
  double cls = 0.0;
};

struct LossResult {
  Tensor total;
  LossTerms terms;
  std::vector<MatchAssignment> matches;  // one per supervised layer
};

struct LossOptions {
  LossWeights weights;
  FocalParams focal = FocalParams::Default(kNumClasses);
  bool deep_supervision = true;
};

// Weighted multi-view loss of one layer for a fixed assignment.
Tensor LayerLoss(const LayerPrediction& pred, const std::vector<GroundTruthObject>& gts,
                 const MatchAssignment& match, const LossOptions& opt,
                 LossTerms* terms = nullptr);

// Matches every supervised layer and averages LayerLoss across them. Throws
// TrainingError when there are more objects than queries.
LossResult TotalLoss(const DecoderOutput& out, const std::vector<GroundTruthObject>& gts,
                     const LossOptions& opt);

// As TotalLoss with the assignments supplied, one per supervised layer.
LossResult TotalLossWithMatches(const DecoderOutput& out,
                                const std::vector<GroundTruthObject>& gts,
                                const std::vector<MatchAssignment>& matches,
                                const LossOptions& opt);

}  // namespace radtr

#endif  // RADTR_LOSSES_H_
