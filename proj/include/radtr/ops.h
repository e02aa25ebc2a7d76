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

// Differentiable tensor operations.
//
// No general broadcasting: binary elementwise ops require equal shapes, and
// the only implicit broadcast is a vector applied along the trailing axis
// (AddTrailing, MulTrailing, Linear, LayerNorm).

#ifndef RADTR_OPS_H_
#define RADTR_OPS_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "radtr/tensor.h"

namespace radtr {

inline constexpr double kLayerNormEps = 1e-5;

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Div(const Tensor& a, const Tensor& b);
Tensor Minimum(const Tensor& a, const Tensor& b);
Tensor Maximum(const Tensor& a, const Tensor& b);

Tensor AddScalar(const Tensor& x, double s);
Tensor MulScalar(const Tensor& x, double s);
Tensor Neg(const Tensor& x);
// x^p for x >= 0.
Tensor PowScalar(const Tensor& x, double p);

Tensor Relu(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Exp(const Tensor& x);
Tensor Log(const Tensor& x);
Tensor Abs(const Tensor& x);
Tensor ClampMin(const Tensor& x, double lo);

// Full reductions to a scalar.
Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);
Tensor Prod(const Tensor& x);

// a: (m, k), b: (k, n).
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);
// x: (..., in), w: (in, out), bias: (out) or undefined.
Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& bias);

// x: (..., n), v: (n).
Tensor AddTrailing(const Tensor& x, const Tensor& v);
Tensor MulTrailing(const Tensor& x, const Tensor& v);

Tensor Reshape(const Tensor& x, Shape shape);
// out.flat[i] = x.flat[indices[i]]; the backward pass scatter-adds.
Tensor Gather(const Tensor& x, std::vector<std::int64_t> indices, Shape shape);
Tensor Slice(const Tensor& x, int axis, std::int64_t start, std::int64_t length);
Tensor Concat(const std::vector<Tensor>& parts, int axis);
// Single element as a scalar tensor.
Tensor Element(const Tensor& x, std::int64_t flat_index);

// Max-shifted softmax along `axis`.
Tensor Softmax(const Tensor& x, int axis);
// Normalizes over the trailing axis with epsilon kLayerNormEps, then applies
// gamma and beta.
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta);

// x: (C, H, W), w: (O, C, K, K), bias: (O). Zero padding.
Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride,
              int padding = 0);

// While alive, records on this thread the smallest distance of any Relu,
// Abs or ClampMin argument from its kink and of any Minimum or Maximum
// operand pair from a tie. Monitors nest; inner ones also report outward.
class KinkMonitor {
 public:
  KinkMonitor();
  ~KinkMonitor();
  KinkMonitor(const KinkMonitor&) = delete;
  KinkMonitor& operator=(const KinkMonitor&) = delete;

  double min_distance() const { return min_distance_; }
  void Note(double distance);

 private:
  KinkMonitor* previous_;
  double min_distance_ = std::numeric_limits<double>::infinity();
};

}  // namespace radtr

#endif  // RADTR_OPS_H_
