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

#include "radtr/losses.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {

FocalParams FocalParams::Default(int num_classes) {
  FocalParams fp;
  fp.alpha.assign(num_classes, 0.25);
  fp.alpha.push_back(0.75);
  return fp;
}

void ValidateFocalParams(const FocalParams& fp, int num_classes) {
  if (!std::isfinite(fp.gamma) || fp.gamma < 0.0) {
    throw ArgumentError("focal gamma must be nonnegative");
  }
  if (static_cast<int>(fp.alpha.size()) != num_classes + 1) {
    throw ArgumentError("focal alpha needs " + std::to_string(num_classes + 1) +
                        " weights, got " + std::to_string(fp.alpha.size()));
  }
  for (double a : fp.alpha) {
    if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("focal alpha must lie in [0, 1]");
  }
}

double FocalLoss(std::span<const double> probs, int target, const FocalParams& fp) {
  if (target < 0 || static_cast<std::size_t>(target) >= probs.size() ||
      fp.alpha.size() != probs.size()) {
    throw ArgumentError("focal target or alpha does not match the class count");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("probability outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-5) {
    throw ArgumentError("probabilities sum to " + std::to_string(total));
  }
  const double pt = std::max(probs[target], kFocalMinProb);
  return -fp.alpha[target] * std::pow(1.0 - pt, fp.gamma) * std::log(pt);
}

namespace {

Box3D PredictedBox(std::span<const double> rows, std::int64_t q) {
  std::array<double, 6> p{};
  for (int i = 0; i < 6; ++i) p[i] = rows[q * 6 + i];
  return Box3D::FromParams(p);
}

void CheckPrediction(const LayerPrediction& pred) {
  if (pred.class_logits.rank() != 2 || pred.boxes.rank() != 2 ||
      pred.boxes.dim(1) != 6 || pred.boxes.dim(0) != pred.class_logits.dim(0)) {
    throw ArgumentError("prediction shapes " + ShapeString(pred.class_logits.shape()) +
                        " and " + ShapeString(pred.boxes.shape()) + " do not agree");
  }
}

void CheckObjects(const LayerPrediction& pred, const std::vector<GroundTruthObject>& gts) {
  const std::int64_t m = pred.boxes.dim(0);
  if (static_cast<std::int64_t>(gts.size()) > m) {
    throw TrainingError(std::to_string(gts.size()) + " objects exceed " +
                        std::to_string(m) + " queries");
  }
  const std::int64_t classes = pred.class_logits.dim(1) - 1;
  for (const auto& g : gts) {
    if (g.class_id < 0 || g.class_id >= classes) {
      throw ArgumentError("object class " + std::to_string(g.class_id) + " out of range");
    }
  }
}

std::vector<const LayerPrediction*> Supervised(const DecoderOutput& out, bool deep) {
  if (out.layers.empty()) throw ArgumentError("decoder output has no layers");
  std::vector<const LayerPrediction*> layers;
  if (deep) {
    for (const auto& l : out.layers) layers.push_back(&l);
  } else {
    layers.push_back(&out.layers.back());
  }
  return layers;
}

}  // namespace

CostMatrix MatchingCost(const LayerPrediction& pred,
                        const std::vector<GroundTruthObject>& gts,
                        const LossWeights& w) {
  CheckPrediction(pred);
  CheckObjects(pred, gts);
  const std::int64_t m = pred.boxes.dim(0);
  const std::int64_t k = pred.class_logits.dim(1);
  const auto logits = pred.class_logits.data();
  const auto boxes = pred.boxes.data();
  CostMatrix cost;
  cost.queries = m;
  cost.objects = static_cast<std::int64_t>(gts.size());
  cost.values.resize(m * cost.objects);
  std::vector<double> probs(k);
  for (std::int64_t q = 0; q < m; ++q) {
    double hi = logits[q * k];
    for (std::int64_t c = 1; c < k; ++c) hi = std::max(hi, logits[q * k + c]);
    double z = 0.0;
    for (std::int64_t c = 0; c < k; ++c) z += probs[c] = std::exp(logits[q * k + c] - hi);
    for (double& p : probs) p /= z;
    const Box3D box = PredictedBox(boxes, q);
    for (std::int64_t g = 0; g < cost.objects; ++g) {
      const auto& obj = gts[g];
      cost.values[q * cost.objects + g] =
          w.cls * (1.0 - probs[obj.class_id]) + BoxLoss(box, obj.box, w);
    }
  }
  return cost;
}

Tensor LayerLoss(const LayerPrediction& pred, const std::vector<GroundTruthObject>& gts,
                 const MatchAssignment& match, const LossOptions& opt,
                 LossTerms* terms) {
  CheckPrediction(pred);
  CheckObjects(pred, gts);
  const std::int64_t m = pred.boxes.dim(0);
  const std::int64_t k = pred.class_logits.dim(1);
  ValidateFocalParams(opt.focal, static_cast<int>(k - 1));
  if (match.pairs.size() != gts.size()) {
    throw ArgumentError("assignment does not cover every object");
  }

  std::vector<std::int64_t> target(m, k - 1);
  std::vector<std::int64_t> rows;
  std::vector<double> gt_params;
  for (const auto& [q, g] : match.pairs) {
    if (q < 0 || q >= m || g < 0 || g >= static_cast<std::int64_t>(gts.size()) ||
        target[q] != k - 1) {
      throw ArgumentError("assignment is not injective or out of range");
    }
    target[q] = gts[g].class_id;
    for (int i = 0; i < 6; ++i) rows.push_back(q * 6 + i);
    const auto p = gts[g].box.Params();
    gt_params.insert(gt_params.end(), p.begin(), p.end());
  }

  // Classification over every query, normalized by M.
  std::vector<std::int64_t> pick(m);
  std::vector<double> alpha(m);
  for (std::int64_t q = 0; q < m; ++q) {
    pick[q] = q * k + target[q];
    alpha[q] = opt.focal.alpha[target[q]];
  }
  const Tensor pt =
      ClampMin(Gather(Softmax(pred.class_logits, 1), std::move(pick), {m}), kFocalMinProb);
  const Tensor modulation = PowScalar(AddScalar(Neg(pt), 1.0), opt.focal.gamma);
  const Tensor per_query = Mul(Mul(Tensor::Vector(alpha), modulation), Log(pt));
  const Tensor cls = MulScalar(Sum(per_query), -1.0 / static_cast<double>(m));

  const LossWeights& w = opt.weights;
  Tensor total = MulScalar(cls, w.cls);
  LossTerms t;
  t.cls = cls.item();
  if (!match.pairs.empty()) {
    const std::int64_t g = static_cast<std::int64_t>(match.pairs.size());
    const Tensor p = Gather(pred.boxes, std::move(rows), {g, 6});
    const Tensor y(Shape{g, 6}, std::move(gt_params));
    const Tensor rad = MeanBoxLoss(p, y, 3, w);
    const Tensor ra = MeanBoxLoss(ProjectBoxRows(p, View::kRA), ProjectBoxRows(y, View::kRA), 2, w);
    const Tensor rd = MeanBoxLoss(ProjectBoxRows(p, View::kRD), ProjectBoxRows(y, View::kRD), 2, w);
    total = Add(total, Add(MulScalar(rad, w.rad),
                           Add(MulScalar(ra, w.ra), MulScalar(rd, w.rd))));
    t.rad = rad.item();
    t.ra = ra.item();
    t.rd = rd.item();
  }
  if (terms != nullptr) *terms = t;
  return total;
}

LossResult TotalLoss(const DecoderOutput& out, const std::vector<GroundTruthObject>& gts,
                     const LossOptions& opt) {
  ValidateLossWeights(opt.weights);
  std::vector<MatchAssignment> matches;
  for (const LayerPrediction* layer : Supervised(out, opt.deep_supervision)) {
    matches.push_back(HungarianMatch(MatchingCost(*layer, gts, opt.weights)));
  }
  return TotalLossWithMatches(out, gts, matches, opt);
}

LossResult TotalLossWithMatches(const DecoderOutput& out,
                                const std::vector<GroundTruthObject>& gts,
                                const std::vector<MatchAssignment>& matches,
                                const LossOptions& opt) {
  ValidateLossWeights(opt.weights);
  const auto layers = Supervised(out, opt.deep_supervision);
  if (matches.size() != layers.size()) {
    throw ArgumentError("expected " + std::to_string(layers.size()) + " assignments");
  }
  LossResult result;
  const double inv = 1.0 / static_cast<double>(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LossTerms t;
    const Tensor loss = LayerLoss(*layers[l], gts, matches[l], opt, &t);
    result.total = l == 0 ? loss : Add(result.total, loss);
    result.terms.rad += inv * t.rad;
    result.terms.ra += inv * t.ra;
    result.terms.rd += inv * t.rd;
    result.terms.cls += inv * t.cls;
  }
  result.total = MulScalar(result.total, inv);
  result.matches = matches;
  return result;
}

}  // namespace radtr
