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

#ifndef RADTR_ATTENTION_H_
#define RADTR_ATTENTION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "radtr/nn.h"
#include "radtr/tensor.h"

namespace radtr {

struct AttentionParams {
  LinearParams query;
  LinearParams key;
  LinearParams value;
  LinearParams output;

  static AttentionParams Init(std::int64_t dim, Rng& rng);
  void Visit(const std::string& prefix, const ParameterVisitor& visit);
};

struct AttentionResult {
  Tensor output;  // same shape as the query input
  // Softmax weights averaged over heads, row-major (queries, keys).
  std::vector<double> weights;
};

// Scaled dot-product attention over `heads` heads.
// q: (Mq, D), k and v: (Nk, D). Each head attends with
// softmax(Q_h K_h^T / sqrt(D / heads)) V_h; head outputs are concatenated and
// passed through the output projection.
AttentionResult MultiHeadAttention(const Tensor& q, const Tensor& k,
                                   const Tensor& v, int heads,
                                   const AttentionParams& params);

}  // namespace radtr

#endif  // RADTR_ATTENTION_H_
