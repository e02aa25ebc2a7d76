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

#include "radtr/giou.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {

void ValidateLossWeights(const LossWeights& w) {
  for (double v : {w.rad, w.ra, w.rd, w.cls, w.giou, w.l1}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ArgumentError("loss weights must be finite and nonnegative");
    }
  }
}

template <std::size_t N>
double GiouLoss(const Box<N>& p, const Box<N>& g) {
  RequirePositiveSize(p);
  RequirePositiveSize(g);
  double inter = 1.0, vp = 1.0, vg = 1.0, hull = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    inter *= std::max(0.0, std::min(p.Hi(i), g.Hi(i)) - std::max(p.Lo(i), g.Lo(i)));
    vp *= p.Hi(i) - p.Lo(i);
    vg *= g.Hi(i) - g.Lo(i);
    hull *= std::max(p.Hi(i), g.Hi(i)) - std::min(p.Lo(i), g.Lo(i));
  }
  const double uni = vp + vg - inter;
  return 1.0 - inter / uni + (hull - uni) / hull;
}

template <std::size_t N>
double BoxLoss(const Box<N>& p, const Box<N>& g, const LossWeights& w) {
  const auto a = p.Params();
  const auto b = g.Params();
  double l1 = 0.0;
  for (std::size_t i = 0; i < 2 * N; ++i) l1 += std::abs(a[i] - b[i]);
  return w.giou * GiouLoss(p, g) + w.l1 * l1;
}

template double GiouLoss<2>(const Box<2>&, const Box<2>&);
template double GiouLoss<3>(const Box<3>&, const Box<3>&);
template double BoxLoss<2>(const Box<2>&, const Box<2>&, const LossWeights&);
template double BoxLoss<3>(const Box<3>&, const Box<3>&, const LossWeights&);

namespace {

Tensor Column(const Tensor& x, std::int64_t j) {
  return Reshape(Slice(x, 1, j, 1), {x.dim(0)});
}

void CheckRows(const Tensor& pred, const Tensor& target, int dims) {
  if (dims <= 0 || pred.rank() != 2 || pred.dim(1) != 2 * dims ||
      pred.shape() != target.shape()) {
    throw ArgumentError("box rows must be (K, " + std::to_string(2 * dims) +
                        "), got " + ShapeString(pred.shape()) + " and " +
                        ShapeString(target.shape()));
  }
}

}  // namespace

Tensor GiouLoss(const Tensor& pred, const Tensor& target, int dims) {
  CheckRows(pred, target, dims);
  for (const Tensor* t : {&pred, &target}) {
    const auto d = t->data();
    for (std::int64_t k = 0; k < t->dim(0); ++k) {
      for (int i = 0; i < dims; ++i) {
        if (!(d[k * 2 * dims + dims + i] > 0.0)) {
          throw ArgumentError("GIoU requires positive box sizes");
        }
      }
    }
  }
  Tensor inter, vp, vg, hull;
  for (int i = 0; i < dims; ++i) {
    const Tensor hp = MulScalar(Column(pred, dims + i), 0.5);
    const Tensor hg = MulScalar(Column(target, dims + i), 0.5);
    const Tensor lo_p = Sub(Column(pred, i), hp), hi_p = Add(Column(pred, i), hp);
    const Tensor lo_g = Sub(Column(target, i), hg), hi_g = Add(Column(target, i), hg);
    const Tensor side = Relu(Sub(Minimum(hi_p, hi_g), Maximum(lo_p, lo_g)));
    const Tensor span = Sub(Maximum(hi_p, hi_g), Minimum(lo_p, lo_g));
    const Tensor ep = Sub(hi_p, lo_p), eg = Sub(hi_g, lo_g);
    inter = i == 0 ? side : Mul(inter, side);
    hull = i == 0 ? span : Mul(hull, span);
    vp = i == 0 ? ep : Mul(vp, ep);
    vg = i == 0 ? eg : Mul(vg, eg);
  }
  const Tensor uni = Sub(Add(vp, vg), inter);
  const Tensor iou = Div(inter, uni);
  return Add(Neg(iou), AddScalar(Div(Sub(hull, uni), hull), 1.0));
}

Tensor MeanBoxLoss(const Tensor& pred, const Tensor& target, int dims,
                   const LossWeights& w) {
  CheckRows(pred, target, dims);
  const double inv_k = 1.0 / static_cast<double>(pred.dim(0));
  const Tensor giou = MulScalar(Sum(GiouLoss(pred, target, dims)), w.giou * inv_k);
  const Tensor l1 = MulScalar(Sum(Abs(Sub(pred, target))), w.l1 * inv_k);
  return Add(giou, l1);
}

Tensor ProjectBoxRows(const Tensor& boxes, View view) {
  if (boxes.rank() != 2 || boxes.dim(1) != 6) {
    throw ArgumentError("expected (K, 6) boxes, got " + ShapeString(boxes.shape()));
  }
  if (view == View::kRAD) return boxes;
  const std::int64_t keep = view == View::kRA ? 1 : 2;
  const std::int64_t k = boxes.dim(0);
  std::vector<std::int64_t> idx;
  idx.reserve(k * 4);
  for (std::int64_t r = 0; r < k; ++r) {
    for (std::int64_t c : {std::int64_t{0}, keep, std::int64_t{3}, 3 + keep}) {
      idx.push_back(r * 6 + c);
    }
  }
  return Gather(boxes, std::move(idx), {k, 4});
}

}  // namespace radtr
