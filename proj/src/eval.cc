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

#include "radtr/eval.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "radtr/errors.h"

namespace radtr {

EvalConfig EvalConfig::Default(View view) {
  EvalConfig cfg;
  cfg.view = view;
  cfg.iou_thresholds = view == View::kRAD
                           ? std::vector<double>{0.4, 0.5, 0.6, 0.7}
                           : std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9};
  return cfg;
}

void ValidateEvalConfig(const EvalConfig& cfg) {
  if (cfg.iou_thresholds.empty()) throw ArgumentError("no IoU thresholds");
  for (std::size_t i = 0; i < cfg.iou_thresholds.size(); ++i) {
    const double t = cfg.iou_thresholds[i];
    if (!(t > 0.0 && t < 1.0)) throw ArgumentError("IoU threshold outside (0, 1)");
    if (i > 0 && !(t > cfg.iou_thresholds[i - 1])) {
      throw ArgumentError("IoU thresholds must be strictly increasing");
    }
  }
  if (!(cfg.score_floor >= 0.0 && cfg.score_floor <= 1.0)) {
    throw ArgumentError("score floor outside [0, 1]");
  }
}

FrameDetections ExtractDetections(const Tensor& class_logits, const Tensor& boxes,
                                  double score_floor) {
  if (class_logits.rank() != 2 || class_logits.dim(1) < 2 || boxes.rank() != 2 ||
      boxes.dim(1) != 6 || boxes.dim(0) != class_logits.dim(0)) {
    throw ArgumentError("cannot extract detections from " +
                        ShapeString(class_logits.shape()) + " and " +
                        ShapeString(boxes.shape()));
  }
  const std::int64_t m = class_logits.dim(0), k = class_logits.dim(1);
  const auto logits = class_logits.data();
  const auto b = boxes.data();
  FrameDetections out;
  std::vector<double> p(k);
  for (std::int64_t q = 0; q < m; ++q) {
    const double hi = *std::max_element(logits.begin() + q * k, logits.begin() + (q + 1) * k);
    double z = 0.0;
    for (std::int64_t c = 0; c < k; ++c) z += p[c] = std::exp(logits[q * k + c] - hi);
    int best = 0;
    for (std::int64_t c = 1; c < k - 1; ++c) {
      if (p[c] > p[best]) best = static_cast<int>(c);
    }
    const double score = p[best] / z;
    if (score < score_floor) continue;
    std::array<double, 6> params{};
    for (int i = 0; i < 6; ++i) params[i] = b[q * 6 + i];
    out.push_back({best, score, Box3D::FromParams(params)});
  }
  return out;
}

double ViewIou(const Box3D& a, const Box3D& b, View view) {
  if (view == View::kRAD) return Iou(a, b);
  return Iou(ProjectBox(a, view), ProjectBox(b, view));
}

namespace {

std::uint64_t BoxHash(const Box3D& box) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : box.Params()) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 1099511628211ull;
  }
  return h;
}

struct Ranked {
  double score;
  std::uint64_t hash;
  std::size_t frame;
  const Box3D* box;
};

}  // namespace

double AveragePrecision(const std::vector<FrameDetections>& detections,
                        const std::vector<FrameObjects>& objects, int class_id,
                        double iou_threshold, View view) {
  if (detections.size() != objects.size()) {
    throw ArgumentError("detections cover " + std::to_string(detections.size()) +
                        " frames but objects cover " + std::to_string(objects.size()));
  }
  std::vector<std::vector<const Box3D*>> gts(objects.size());
  std::size_t positives = 0;
  for (std::size_t f = 0; f < objects.size(); ++f) {
    for (const auto& o : objects[f]) {
      if (o.class_id == class_id) gts[f].push_back(&o.box);
    }
    positives += gts[f].size();
  }
  std::vector<Ranked> ranked;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    for (const auto& d : detections[f]) {
      if (d.class_id == class_id) ranked.push_back({d.score, BoxHash(d.box), f, &d.box});
    }
  }
  if (positives == 0 || ranked.empty()) return 0.0;
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.hash < b.hash;
  });

  std::vector<std::vector<bool>> taken(gts.size());
  for (std::size_t f = 0; f < gts.size(); ++f) taken[f].assign(gts[f].size(), false);
  double tp = 0.0;
  double prev_recall = 0.0, prev_precision = -1.0, ap = 0.0;
  for (std::size_t n = 0; n < ranked.size(); ++n) {
    const Ranked& r = ranked[n];
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < gts[r.frame].size(); ++j) {
      if (taken[r.frame][j]) continue;
      const double iou = ViewIou(*r.box, *gts[r.frame][j], view);
      if (iou > best) {
        best = iou;
        best_j = j;
      }
    }
    if (best >= iou_threshold) {
      taken[r.frame][best_j] = true;
      tp += 1.0;
    }
    const double precision = tp / static_cast<double>(n + 1);
    const double recall = tp / static_cast<double>(positives);
    // The virtual start point carries the first precision at zero recall.
    if (prev_precision < 0.0) prev_precision = precision;
    ap += (recall - prev_recall) * std::max(precision, prev_precision);
    prev_recall = recall;
    prev_precision = precision;
  }
  return ap;
}

double EvalReport::MapAt(std::size_t threshold_index) const {
  double sum = 0.0;
  for (const auto& row : ap) sum += row.at(threshold_index);
  return ap.empty() ? 0.0 : sum / static_cast<double>(ap.size());
}

EvalReport MeanAveragePrecision(const std::vector<FrameDetections>& detections,
                                const std::vector<FrameObjects>& objects,
                                const EvalConfig& cfg) {
  ValidateEvalConfig(cfg);
  if (objects.empty()) throw EvaluationError("empty dataset");
  if (detections.size() != objects.size()) {
    throw ArgumentError("detections cover " + std::to_string(detections.size()) +
                        " frames but objects cover " + std::to_string(objects.size()));
  }
  EvalReport report;
  report.view = cfg.view;
  report.thresholds = cfg.iou_thresholds;
  std::vector<bool> present(kNumClasses, false);
  for (const auto& frame : objects) {
    for (const auto& o : frame) {
      if (o.class_id < 0 || o.class_id >= kNumClasses) {
        throw ArgumentError("object class " + std::to_string(o.class_id) + " out of range");
      }
      present[o.class_id] = true;
    }
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (present[c]) report.classes.push_back(c);
  }
  if (report.classes.empty()) throw EvaluationError("no ground-truth objects to evaluate");

  double total = 0.0;
  for (int c : report.classes) {
    std::vector<double> row;
    double sum = 0.0;
    for (double t : cfg.iou_thresholds) {
      row.push_back(AveragePrecision(detections, objects, c, t, cfg.view));
      sum += row.back();
    }
    total += sum / static_cast<double>(row.size());
    report.ap.push_back(std::move(row));
  }
  report.map = total / static_cast<double>(report.classes.size());
  return report;
}

namespace {

std::string Fixed(double v, int precision) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

std::string FormatReportTable(const EvalReport& report) {
  std::string out = std::string(ViewName(report.view)) + " AP\n";
  char cell[64];
  std::snprintf(cell, sizeof(cell), "%-12s", "class");
  out += cell;
  for (double t : report.thresholds) {
    std::snprintf(cell, sizeof(cell), " %8s", ("@" + Fixed(t, 2)).c_str());
    out += cell;
  }
  out += "\n";
  auto row = [&](const std::string& name, auto value) {
    std::snprintf(cell, sizeof(cell), "%-12s", name.c_str());
    out += cell;
    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
      std::snprintf(cell, sizeof(cell), " %8.4f", value(i));
      out += cell;
    }
    out += "\n";
  };
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    row(std::string(kClassNames[report.classes[c]]), [&](std::size_t i) { return report.ap[c][i]; });
  }
  row("mean", [&](std::size_t i) { return report.MapAt(i); });
  out += "mAP " + Fixed(report.map, 4) + "\n";
  return out;
}

std::string FormatReportCsv(const EvalReport& report) {
  std::string out = "class";
  for (double t : report.thresholds) out += "," + Fixed(t, 2);
  out += "\n";
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    out += kClassNames[report.classes[c]];
    for (double v : report.ap[c]) out += "," + Fixed(v, 6);
    out += "\n";
  }
  out += "mean";
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) out += "," + Fixed(report.MapAt(i), 6);
  out += "\nmAP," + Fixed(report.map, 6) + "\n";
  return out;
}

}  // namespace radtr
