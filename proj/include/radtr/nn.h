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

// Parameter containers and initializers shared by the model components.

#ifndef RADTR_NN_H_
#define RADTR_NN_H_

#include <cstdint>
#include <functional>
#include <string>

#include "radtr/rng.h"
#include "radtr/tensor.h"

namespace radtr {

// Called once per trainable tensor with a stable, unique name. The visitor
// may replace the tensor (optimizer updates, checkpoint restore).
using ParameterVisitor = std::function<void(const std::string& name, Tensor& param)>;

Tensor XavierUniform(std::int64_t fan_in, std::int64_t fan_out, Rng& rng);
Tensor NormalInit(Shape shape, double stddev, Rng& rng);

struct LinearParams {
  Tensor weight;  // (in, out)
  Tensor bias;    // (out)

  static LinearParams Init(std::int64_t in, std::int64_t out, Rng& rng);
  // All-zero weights and bias.
  static LinearParams Zero(std::int64_t in, std::int64_t out);
  Tensor operator()(const Tensor& x) const;
  void Visit(const std::string& prefix, const ParameterVisitor& visit);
};

struct LayerNormParams {
  Tensor gamma;
  Tensor beta;

  static LayerNormParams Init(std::int64_t n);
  Tensor operator()(const Tensor& x) const;
  void Visit(const std::string& prefix, const ParameterVisitor& visit);
};

}  // namespace radtr

#endif  // RADTR_NN_H_
