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

#ifndef RADTR_GRAD_CHECK_H_
#define RADTR_GRAD_CHECK_H_

#include <functional>

#include "radtr/tensor.h"

namespace radtr {

inline constexpr double kDefaultGradCheckStep = 1e-4;

// Scalar-valued function of one tensor, built from differentiable ops.
using ScalarFunction = std::function<Tensor(const Tensor&)>;

// Compares the tape gradient of f at x with central differences of step h.
// Returns max_i |analytic_i - numeric_i| / max(1, |analytic_i|, |numeric_i|).
// Throws NumericError if f is non-finite anywhere it is evaluated.
double GradCheck(const ScalarFunction& f, const Tensor& x,
                 double h = kDefaultGradCheckStep);

// Smallest distance from a kink seen while evaluating f(x); infinity when f
// has none. Central differences are only meaningful when this exceeds the
// step times the local sensitivity.
double KinkDistance(const ScalarFunction& f, const Tensor& x);

}  // namespace radtr

#endif  // RADTR_GRAD_CHECK_H_
