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

#include "radtr/nn.h"

#include <cmath>
#include <vector>

#include "radtr/ops.h"

namespace radtr {

Tensor XavierUniform(std::int64_t fan_in, std::int64_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(fan_in * fan_out);
  for (auto& v : data) v = rng.Uniform(-limit, limit);
  return Tensor({fan_in, fan_out}, std::move(data), true);
}

Tensor NormalInit(Shape shape, double stddev, Rng& rng) {
  std::vector<double> data(NumElements(shape));
  for (auto& v : data) v = rng.Normal(0.0, stddev);
  return Tensor(std::move(shape), std::move(data), true);
}

LinearParams LinearParams::Init(std::int64_t in, std::int64_t out, Rng& rng) {
  return {XavierUniform(in, out, rng), Tensor::Zeros({out}, true)};
}

LinearParams LinearParams::Zero(std::int64_t in, std::int64_t out) {
  return {Tensor::Zeros({in, out}, true), Tensor::Zeros({out}, true)};
}

Tensor LinearParams::operator()(const Tensor& x) const {
  return Linear(x, weight, bias);
}

void LinearParams::Visit(const std::string& prefix, const ParameterVisitor& visit) {
  visit(prefix + ".weight", weight);
  visit(prefix + ".bias", bias);
}

LayerNormParams LayerNormParams::Init(std::int64_t n) {
  return {Tensor::Full({n}, 1.0, true), Tensor::Zeros({n}, true)};
}

Tensor LayerNormParams::operator()(const Tensor& x) const {
  return LayerNorm(x, gamma, beta);
}

void LayerNormParams::Visit(const std::string& prefix,
                            const ParameterVisitor& visit) {
  visit(prefix + ".gamma", gamma);
  visit(prefix + ".beta", beta);
}

}  // namespace radtr
