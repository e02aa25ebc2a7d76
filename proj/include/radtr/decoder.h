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

// Conditional transformer decoder head.
//
// Learnable object queries carry a content embedding and a reference point
// on the (range, azimuth) plane. Each pre-norm decoder layer runs
// self-attention among queries, cross-attention into the token memory with
// queries conditioned on their reference points, and a feed-forward block,
// each with a residual connection. Shared heads turn every layer's queries
// into class logits (C + 1, the last being "no object") and sigmoid-bounded
// 3D boxes whose (range, azimuth) center is an offset from the reference
// point.

#ifndef RADTR_DECODER_H_
#define RADTR_DECODER_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radtr/attention.h"
#include "radtr/box.h"
#include "radtr/nn.h"
#include "radtr/ptf.h"
#include "radtr/tensor.h"

namespace radtr {

struct DecoderConfig {
  std::int64_t d_model = 32;
  int heads = 4;
  int layers = 3;
  std::int64_t queries = 10;
  std::int64_t ffn_dim = 64;
  int num_classes = 6;
  TpeConfig tpe;
};

struct DecoderLayerParams {
  LayerNormParams self_norm;
  AttentionParams self_attention;
  LayerNormParams cross_norm;
  AttentionParams cross_attention;
  // T(f): elementwise modulation of the reference-point encoding.
  LinearParams position_scale1;
  LinearParams position_scale2;
  LayerNormParams ffn_norm;
  LinearParams ffn1;
  LinearParams ffn2;

  static DecoderLayerParams Init(const DecoderConfig& config, Rng& rng);
  void Visit(const std::string& prefix, const ParameterVisitor& visit);
};

// Initial odds of "no object" against each object class.
inline constexpr double kClassPriorOdds = 99.0;

// Init draws the class head with the prior bias above and zeroes the last box
// layer, so every query starts on its reference point.
struct DecoderParams {
  Tensor query_content;     // (M, D)
  Tensor reference_logits;  // (M, 2); sigmoid gives (range, azimuth)
  std::vector<DecoderLayerParams> layers;
  LayerNormParams output_norm;
  LinearParams class_head;  // D -> C + 1
  LinearParams box_head1;   // D -> D
  LinearParams box_head2;   // D -> D
  LinearParams box_head3;   // D -> 6

  static DecoderParams Init(const DecoderConfig& config, Rng& rng);
  void Visit(const ParameterVisitor& visit);
};

struct LayerPrediction {
  Tensor class_logits;  // (M, C + 1)
  Tensor boxes;         // (M, 6): center r, a, d then size sr, sa, sd
};

struct DecoderOutput {
  std::vector<LayerPrediction> layers;  // one per decoder layer, last is final
  Tensor reference_points;              // (M, 2)
  // Head-averaged cross-attention weights per layer, row-major (M, N).
  std::vector<std::vector<double>> cross_attention;

  const LayerPrediction& final() const { return layers.back(); }
};

// p_q = T(f) * PE(s), where T is a two-layer MLP applied to the query feature
// f and PE the reference-point encoding. f: (M, D); point_encoding: (M, D).
Tensor ConditionalPositionalQuery(const Tensor& point_encoding,
                                  const Tensor& features,
                                  const DecoderLayerParams& params);

struct DecoderLayerResult {
  Tensor queries;
  std::vector<double> cross_attention;
};

// One decoder layer; queries: (M, D), point_encoding: PE of the reference
// points (M, D). Throws ConfigError for M = 0.
DecoderLayerResult DecoderLayer(const Tensor& queries, const Tensor& point_encoding,
                                const TokenMemory& memory, int heads,
                                const DecoderLayerParams& params);

// Heads applied to one layer's queries.
LayerPrediction PredictHeads(const Tensor& queries, const Tensor& reference_logits,
                             const DecoderParams& params);

DecoderOutput RunDecoder(const TokenMemory& memory, const DecoderParams& params,
                         const DecoderConfig& config);

// Reads a (M, 6) box tensor into boxes.
std::vector<Box3D> BoxesFromTensor(const Tensor& boxes);

// RA and RD projections of every query's final box.
std::pair<std::vector<Box2D>, std::vector<Box2D>> DecomposeViews(
    const DecoderOutput& output);

}  // namespace radtr

#endif  // RADTR_DECODER_H_
