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

// Detection metrics: interpolated average precision and its class and
// threshold mean for the RAD, RA and RD views.

#ifndef RADTR_EVAL_H_
#define RADTR_EVAL_H_

#include <string>
#include <vector>

#include "radtr/box.h"
#include "radtr/frame.h"
#include "radtr/tensor.h"

namespace radtr {

struct Detection {
  int class_id = 0;
  double score = 0.0;  // in [0, 1]
  Box3D box;
};

using FrameDetections = std::vector<Detection>;
using FrameObjects = std::vector<GroundTruthObject>;

struct EvalConfig {
  std::vector<double> iou_thresholds;  // strictly increasing, in (0, 1)
  View view = View::kRAD;
  double score_floor = 0.05;

  // {0.4, 0.5, 0.6, 0.7} for kRAD, {0.5, ..., 0.9} for the 2D views.
  static EvalConfig Default(View view);
};

// Throws ArgumentError on an invalid threshold list or score floor.
void ValidateEvalConfig(const EvalConfig& cfg);

// One detection per query whose best non-background class scores at least
// `score_floor`. `class_logits` is (M, C + 1), `boxes` is (M, 6).
FrameDetections ExtractDetections(const Tensor& class_logits, const Tensor& boxes,
                                  double score_floor);

// IoU in the chosen view.
double ViewIou(const Box3D& a, const Box3D& b, View view);

// Interpolated AP of `class_id` with detections pooled across frames and
// matched greedily within each frame. Zero when the class has no objects.
double AveragePrecision(const std::vector<FrameDetections>& detections,
                        const std::vector<FrameObjects>& objects, int class_id,
                        double iou_threshold, View view);

struct EvalReport {
  View view = View::kRAD;
  std::vector<double> thresholds;
  std::vector<int> classes;             // classes present in the ground truth
  std::vector<std::vector<double>> ap;  // [class][threshold]
  double map = 0.0;

  // Mean over classes at one threshold.
  double MapAt(std::size_t threshold_index) const;
};

// Throws EvaluationError when there are no frames or no ground-truth
// objects, ArgumentError when the frame counts differ.
EvalReport MeanAveragePrecision(const std::vector<FrameDetections>& detections,
                                const std::vector<FrameObjects>& objects,
                                const EvalConfig& cfg);

// Human-readable class x threshold table.
std::string FormatReportTable(const EvalReport& report);
// Comma-separated grid: header row of thresholds, one row per class, a
// per-threshold mean row and a final "mAP,<value>" line.
std::string FormatReportCsv(const EvalReport& report);

}  // namespace radtr

#endif  // RADTR_EVAL_H_
