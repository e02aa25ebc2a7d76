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

// Generalized IoU loss and the combined box regression loss.

#ifndef RADTR_GIOU_H_
#define RADTR_GIOU_H_

#include <array>
#include <cstddef>
#include <cstdint>

#include "radtr/box.h"
#include "radtr/tensor.h"

namespace radtr {

struct LossWeights {
  double rad = 40.0;  // beta1
  double ra = 15.0;   // beta2
  double rd = 15.0;   // beta3
  double cls = 10.0;  // beta4
  double giou = 5.0;
  double l1 = 5.0;
};

// Throws ArgumentError when any weight is negative or non-finite.
void ValidateLossWeights(const LossWeights& w);

// 1 - IoU + |C \ (A u B)| / |C| with C the smallest enclosing box. Throws
// ArgumentError on a non-positive size.
template <std::size_t N>
double GiouLoss(const Box<N>& p, const Box<N>& g);

// giou * GiouLoss + l1 * sum |p_i - g_i| over (center, size) parameters.
template <std::size_t N>
double BoxLoss(const Box<N>& p, const Box<N>& g, const LossWeights& w);

// Row-wise GIoU loss for (K, 2 * dims) center-size rows; returns (K).
// Sizes must be positive.
Tensor GiouLoss(const Tensor& pred, const Tensor& target, int dims);

// Mean over rows of the combined box loss; `pred` and `target` are
// (K, 2 * dims) with K > 0.
Tensor MeanBoxLoss(const Tensor& pred, const Tensor& target, int dims,
                   const LossWeights& w);

// Selects the (K, 4) parameters of a 2D view from (K, 6) 3D rows.
Tensor ProjectBoxRows(const Tensor& boxes, View view);

}  // namespace radtr

#endif  // RADTR_GIOU_H_
