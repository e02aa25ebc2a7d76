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

#include "radtr/decoder.h"

#include <cmath>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {

DecoderLayerParams DecoderLayerParams::Init(const DecoderConfig& config, Rng& rng) {
  const auto d = config.d_model;
  DecoderLayerParams p;
  p.self_norm = LayerNormParams::Init(d);
  p.self_attention = AttentionParams::Init(d, rng);
  p.cross_norm = LayerNormParams::Init(d);
  p.cross_attention = AttentionParams::Init(d, rng);
  p.position_scale1 = LinearParams::Init(d, d, rng);
  p.position_scale2 = LinearParams::Init(d, d, rng);
  p.ffn_norm = LayerNormParams::Init(d);
  p.ffn1 = LinearParams::Init(d, config.ffn_dim, rng);
  p.ffn2 = LinearParams::Init(config.ffn_dim, d, rng);
  return p;
}

void DecoderLayerParams::Visit(const std::string& prefix,
                               const ParameterVisitor& visit) {
  self_norm.Visit(prefix + ".self_norm", visit);
  self_attention.Visit(prefix + ".self_attn", visit);
  cross_norm.Visit(prefix + ".cross_norm", visit);
  cross_attention.Visit(prefix + ".cross_attn", visit);
  position_scale1.Visit(prefix + ".pos_scale1", visit);
  position_scale2.Visit(prefix + ".pos_scale2", visit);
  ffn_norm.Visit(prefix + ".ffn_norm", visit);
  ffn1.Visit(prefix + ".ffn1", visit);
  ffn2.Visit(prefix + ".ffn2", visit);
}

DecoderParams DecoderParams::Init(const DecoderConfig& config, Rng& rng) {
  if (config.queries <= 0) throw ConfigError("decoder needs at least one query");
  if (config.layers <= 0) throw ConfigError("decoder needs at least one layer");
  const auto d = config.d_model;
  DecoderParams p;
  p.query_content = NormalInit({config.queries, d}, 1.0, rng);
  // Reference points start spread uniformly over the (range, azimuth) plane.
  std::vector<double> logits(config.queries * 2);
  for (auto& v : logits) {
    const double u = rng.Uniform(0.05, 0.95);
    v = std::log(u / (1.0 - u));
  }
  p.reference_logits = Tensor({config.queries, 2}, std::move(logits), true);
  for (int l = 0; l < config.layers; ++l) {
    p.layers.push_back(DecoderLayerParams::Init(config, rng));
  }
  p.output_norm = LayerNormParams::Init(d);
  // Object classes start near a 1% prior against "no object", and boxes
  // start centered on their reference points.
  p.class_head = LinearParams::Init(d, config.num_classes + 1, rng);
  std::vector<double> prior(config.num_classes + 1, -std::log(kClassPriorOdds));
  prior.back() = 0.0;
  p.class_head.bias = Tensor::Vector(std::move(prior), true);
  p.box_head1 = LinearParams::Init(d, d, rng);
  p.box_head2 = LinearParams::Init(d, d, rng);
  p.box_head3 = LinearParams::Zero(d, 6);
  return p;
}

void DecoderParams::Visit(const ParameterVisitor& visit) {
  visit("decoder.query_content", query_content);
  visit("decoder.reference_logits", reference_logits);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].Visit("decoder.layer" + std::to_string(l), visit);
  }
  output_norm.Visit("decoder.output_norm", visit);
  class_head.Visit("decoder.class_head", visit);
  box_head1.Visit("decoder.box_head1", visit);
  box_head2.Visit("decoder.box_head2", visit);
  box_head3.Visit("decoder.box_head3", visit);
}

Tensor ConditionalPositionalQuery(const Tensor& point_encoding,
                                  const Tensor& features,
                                  const DecoderLayerParams& params) {
  const Tensor scale =
      params.position_scale2(Relu(params.position_scale1(features)));
  return Mul(scale, point_encoding);
}

DecoderLayerResult DecoderLayer(const Tensor& queries, const Tensor& point_encoding,
                                const TokenMemory& memory, int heads,
                                const DecoderLayerParams& params) {
  if (queries.rank() != 2 || queries.dim(0) == 0) {
    throw ConfigError("decoder layer needs a non-empty (M, D) query set");
  }
  // Self-attention: queries and keys carry the reference-point encoding.
  Tensor x = params.self_norm(queries);
  const Tensor qk = Add(x, point_encoding);
  const Tensor after_self = Add(
      queries, MultiHeadAttention(qk, qk, x, heads, params.self_attention).output);

  // Cross-attention into the memory, conditioned on the reference point.
  x = params.cross_norm(after_self);
  const Tensor q = Add(x, ConditionalPositionalQuery(point_encoding, x, params));
  const Tensor k = Add(memory.tokens, memory.positions);
  auto cross = MultiHeadAttention(q, k, memory.tokens, heads, params.cross_attention);
  const Tensor after_cross = Add(after_self, cross.output);

  x = params.ffn_norm(after_cross);
  const Tensor out = Add(after_cross, params.ffn2(Relu(params.ffn1(x))));
  return {out, std::move(cross.weights)};
}

LayerPrediction PredictHeads(const Tensor& queries, const Tensor& reference_logits,
                             const DecoderParams& params) {
  const Tensor x = params.output_norm(queries);
  LayerPrediction pred;
  pred.class_logits = params.class_head(x);
  const Tensor reg = params.box_head3(
      Relu(params.box_head2(Relu(params.box_head1(x)))));
  const Tensor center = Sigmoid(Add(Slice(reg, 1, 0, 2), reference_logits));
  const Tensor rest = Sigmoid(Slice(reg, 1, 2, 4));
  pred.boxes = Concat({center, rest}, 1);
  return pred;
}

DecoderOutput RunDecoder(const TokenMemory& memory, const DecoderParams& params,
                         const DecoderConfig& config) {
  DecoderOutput out;
  out.reference_points = Sigmoid(params.reference_logits);
  const Tensor point_encoding =
      EncodePoints(out.reference_points, config.tpe, config.d_model);
  Tensor q = params.query_content;
  for (const auto& layer : params.layers) {
    auto result = DecoderLayer(q, point_encoding, memory, config.heads, layer);
    q = result.queries;
    out.cross_attention.push_back(std::move(result.cross_attention));
    out.layers.push_back(PredictHeads(q, params.reference_logits, params));
  }
  return out;
}

std::vector<Box3D> BoxesFromTensor(const Tensor& boxes) {
  if (boxes.rank() != 2 || boxes.dim(1) != 6) {
    throw ArgumentError("box tensor must be (M, 6)");
  }
  std::vector<Box3D> out(boxes.dim(0));
  const auto d = boxes.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<double, 6> p{};
    for (int j = 0; j < 6; ++j) p[j] = d[i * 6 + j];
    out[i] = Box3D::FromParams(p);
  }
  return out;
}

std::pair<std::vector<Box2D>, std::vector<Box2D>> DecomposeViews(
    const DecoderOutput& output) {
  std::pair<std::vector<Box2D>, std::vector<Box2D>> views;
  for (const auto& b : BoxesFromTensor(output.final().boxes)) {
    views.first.push_back(ProjectBox(b, View::kRA));
    views.second.push_back(ProjectBox(b, View::kRD));
  }
  return views;
}

}  // namespace radtr
