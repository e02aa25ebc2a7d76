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

#include "radtr/attention.h"

#include <cmath>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {

AttentionParams AttentionParams::Init(std::int64_t dim, Rng& rng) {
  AttentionParams p;
  p.query = LinearParams::Init(dim, dim, rng);
  p.key = LinearParams::Init(dim, dim, rng);
  p.value = LinearParams::Init(dim, dim, rng);
  p.output = LinearParams::Init(dim, dim, rng);
  return p;
}

void AttentionParams::Visit(const std::string& prefix,
                            const ParameterVisitor& visit) {
  query.Visit(prefix + ".q", visit);
  key.Visit(prefix + ".k", visit);
  value.Visit(prefix + ".v", visit);
  output.Visit(prefix + ".o", visit);
}

AttentionResult MultiHeadAttention(const Tensor& q, const Tensor& k,
                                   const Tensor& v, int heads,
                                   const AttentionParams& params) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) {
    throw ArgumentError("MultiHeadAttention: rank-2 inputs required");
  }
  const auto dim = q.dim(1);
  if (heads <= 0 || dim % heads != 0) {
    throw ConfigError("MultiHeadAttention: model dim " + std::to_string(dim) +
                      " not divisible by " + std::to_string(heads) + " heads");
  }
  if (k.dim(0) != v.dim(0)) {
    throw ArgumentError("MultiHeadAttention: key/value length mismatch");
  }
  const auto head_dim = dim / heads;
  const auto mq = q.dim(0);
  const auto nk = k.dim(0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  const Tensor qp = params.query(q);
  const Tensor kp = params.key(k);
  const Tensor vp = params.value(v);

  AttentionResult result;
  result.weights.assign(mq * nk, 0.0);
  std::vector<Tensor> head_outputs;
  head_outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    const Tensor qh = Slice(qp, 1, h * head_dim, head_dim);
    const Tensor kh = Slice(kp, 1, h * head_dim, head_dim);
    const Tensor vh = Slice(vp, 1, h * head_dim, head_dim);
    const Tensor logits = MulScalar(MatMul(qh, Transpose(kh)), scale);
    const Tensor attn = Softmax(logits, 1);
    const auto w = attn.data();
    for (std::size_t i = 0; i < w.size(); ++i) result.weights[i] += w[i] / heads;
    head_outputs.push_back(MatMul(attn, vh));
  }
  const Tensor concat = heads == 1 ? head_outputs[0] : Concat(head_outputs, 1);
  result.output = params.output(concat);
  return result;
}

}  // namespace radtr
