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

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "radtr/attention.h"
#include "radtr/errors.h"
#include "radtr/grad_check.h"
#include "radtr/ops.h"
#include "radtr/rng.h"
#include "radtr/tensor.h"

namespace radtr {
namespace {

Tensor RandomTensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> data(NumElements(shape));
  for (auto& v : data) v = rng.Uniform(lo, hi);
  return Tensor(std::move(shape), std::move(data));
}

TEST(TensorTest, RejectsShapeMismatch) {
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ArgumentError);
  EXPECT_THROW(Tensor({0}, {}), ArgumentError);
}

TEST(TensorTest, ForwardOpsRejectNonFinite) {
  const Tensor x = Tensor::Vector({1000.0});
  EXPECT_THROW(Exp(x), NumericError);
}

TEST(SoftmaxTest, Examples) {
  auto y = Softmax(Tensor::Vector({0, 0}), 0);
  EXPECT_DOUBLE_EQ(y[0], 0.5);
  EXPECT_DOUBLE_EQ(y[1], 0.5);

  y = Softmax(Tensor::Vector({1000, 1000, 1000}), 0);
  for (double v : y.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

  y = Softmax(Tensor::Vector({1, 2, 3}), 0);
  EXPECT_NEAR(y[0], 0.09003, 1e-5);
  EXPECT_NEAR(y[1], 0.24473, 1e-5);
  EXPECT_NEAR(y[2], 0.66524, 1e-5);
}

TEST(SoftmaxTest, InvalidAxis) {
  EXPECT_THROW(Softmax(Tensor::Vector({1, 2}), 1), ArgumentError);
  EXPECT_THROW(Softmax(Tensor::Vector({1, 2}), -2), ArgumentError);
}

TEST(SoftmaxTest, SlicesSumToOneAtLargeMagnitude) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = RandomTensor({3, 5, 4}, rng, -1e3, 1e3);
    for (int axis = 0; axis < 3; ++axis) {
      const Tensor y = Softmax(x, axis);
      const auto& s = x.shape();
      std::int64_t outer = 1, inner = 1;
      for (int i = 0; i < axis; ++i) outer *= s[i];
      for (int i = axis + 1; i < 3; ++i) inner *= s[i];
      for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t i = 0; i < inner; ++i) {
          double sum = 0.0;
          for (std::int64_t a = 0; a < s[axis]; ++a) {
            const double v = y[(o * s[axis] + a) * inner + i];
            EXPECT_GE(v, 0.0);
            sum += v;
          }
          EXPECT_NEAR(sum, 1.0, 1e-6);
        }
    }
  }
}

TEST(LayerNormTest, Examples) {
  const Tensor ones = Tensor::Full({2}, 1.0);
  const Tensor zeros = Tensor::Zeros({2});
  auto y = LayerNorm(Tensor({2, 2}, {3, 3, -1, -1}), ones, zeros);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);

  y = LayerNorm(Tensor::Vector({1, 3}), ones, zeros);
  EXPECT_NEAR(y[0], -1.0, 1e-4);
  EXPECT_NEAR(y[1], 1.0, 1e-4);
  // Epsilon shrinks the result slightly: 1/sqrt(1 + 1e-5).
  EXPECT_NEAR(y[1], 1.0 / std::sqrt(1.0 + kLayerNormEps), 1e-12);

  y = LayerNorm(Tensor::Vector({0.3, -2.0}), zeros, Tensor::Full({2}, 5.0));
  for (double v : y.data()) EXPECT_EQ(v, 5.0);
}

TEST(LayerNormTest, ShapeMismatch) {
  EXPECT_THROW(LayerNorm(Tensor::Zeros({2, 3}), Tensor::Zeros({2}),
                         Tensor::Zeros({3})),
               ArgumentError);
}

TEST(LayerNormTest, NormalizedMoments) {
  Rng rng(3);
  const Tensor x = RandomTensor({6, 16}, rng, -4.0, 9.0);
  const Tensor y = LayerNorm(x, Tensor::Full({16}, 1.0), Tensor::Zeros({16}));
  for (int r = 0; r < 6; ++r) {
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < 16; ++i) mean += y[r * 16 + i];
    mean /= 16;
    for (int i = 0; i < 16; ++i) sq += (y[r * 16 + i] - mean) * (y[r * 16 + i] - mean);
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(sq / 16, 1.0, 1e-4);
  }
}

TEST(AttentionTest, SingleKeyReturnsProjectedValue) {
  Rng rng(11);
  const AttentionParams p = AttentionParams::Init(8, rng);
  const Tensor q = RandomTensor({5, 8}, rng);
  const Tensor kv = RandomTensor({1, 8}, rng);
  const auto out = MultiHeadAttention(q, kv, kv, 2, p).output;
  const Tensor projected = p.output(p.value(kv));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(out[i * 8 + j], projected[j], 1e-12);
}

TEST(AttentionTest, IdenticalKeysAverageValues) {
  Rng rng(12);
  const AttentionParams p = AttentionParams::Init(4, rng);
  const Tensor q = RandomTensor({3, 4}, rng);
  std::vector<double> keys;
  for (int i = 0; i < 3; ++i) keys.insert(keys.end(), {0.1, -0.2, 0.3, 0.4});
  const Tensor k({3, 4}, keys);
  const Tensor v = RandomTensor({3, 4}, rng);
  const auto out = MultiHeadAttention(q, k, v, 2, p).output;
  // Mean of values, then the (affine) projections.
  std::vector<double> mean(4, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) mean[j] += v[i * 4 + j] / 3.0;
  const Tensor expected = p.output(p.value(Tensor({1, 4}, mean)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(out[i * 4 + j], expected[j], 1e-12);
}

TEST(AttentionTest, HandComputedTwoByThree) {
  // D = 2, one head. Hand-set projections.
  AttentionParams p;
  p.query = {Tensor({2, 2}, {1.0, 0.5, -0.5, 2.0}), Tensor::Vector({0.1, 0.0})};
  p.key = {Tensor({2, 2}, {0.3, 0.0, 1.0, -1.0}), Tensor::Vector({0.0, 0.2})};
  p.value = {Tensor({2, 2}, {2.0, 1.0, 0.0, 1.0}), Tensor::Vector({0.0, -0.1})};
  p.output = {Tensor({2, 2}, {1.0, -1.0, 0.5, 0.5}), Tensor::Vector({0.05, 0.0})};
  const std::vector<double> q = {0.2, -0.4, 1.0, 0.3};
  const std::vector<double> k = {0.5, 0.5, -1.0, 0.2, 0.0, 1.5};
  const std::vector<double> v = {1.0, 2.0, -0.5, 0.0, 0.3, -1.2};

  auto proj = [](const std::vector<double>& x, int rows, const LinearParams& lp) {
    std::vector<double> y(rows * 2);
    for (int r = 0; r < rows; ++r)
      for (int j = 0; j < 2; ++j) {
        double s = lp.bias[j];
        for (int i = 0; i < 2; ++i) s += x[r * 2 + i] * lp.weight[i * 2 + j];
        y[r * 2 + j] = s;
      }
    return y;
  };
  const auto qp = proj(q, 2, p.query);
  const auto kp = proj(k, 3, p.key);
  const auto vp = proj(v, 3, p.value);
  std::vector<double> mixed(4, 0.0);
  for (int i = 0; i < 2; ++i) {
    double logits[3];
    double mx = -1e300;
    for (int j = 0; j < 3; ++j) {
      logits[j] = (qp[i * 2] * kp[j * 2] + qp[i * 2 + 1] * kp[j * 2 + 1]) /
                  std::sqrt(2.0);
      mx = std::max(mx, logits[j]);
    }
    double z = 0.0;
    for (double& l : logits) z += (l = std::exp(l - mx));
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 2; ++c) mixed[i * 2 + c] += logits[j] / z * vp[j * 2 + c];
  }
  const auto expected = proj(mixed, 2, p.output);

  const auto out = MultiHeadAttention(Tensor({2, 2}, q), Tensor({3, 2}, k),
                                      Tensor({3, 2}, v), 1, p);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(out.output[i], expected[i], 1e-6);
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += out.weights[i * 3 + j];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(AttentionTest, HeadsMustDivideDim) {
  Rng rng(1);
  const AttentionParams p = AttentionParams::Init(6, rng);
  const Tensor x = Tensor::Zeros({2, 6});
  EXPECT_THROW(MultiHeadAttention(x, x, x, 4, p), ConfigError);
}

TEST(GradCheckTest, QuadraticIsExact) {
  const Tensor x = Tensor::Vector({1.0, 2.0});
  const auto f = [](const Tensor& t) { return Sum(Mul(t, t)); };
  Tape tape;
  Tensor param = x.AsParameter();
  {
    TapeScope scope(tape);
    const auto g = tape.Backward(f(param)).Of(param);
    EXPECT_DOUBLE_EQ(g[0], 2.0);
    EXPECT_DOUBLE_EQ(g[1], 4.0);
  }
  EXPECT_LT(GradCheck(f, x), 1e-8);
}

TEST(GradCheckTest, FocalOfSoftmax) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor logits = RandomTensor({7}, rng, -3.0, 3.0);
    const int target = static_cast<int>(rng.UniformInt(0, 6));
    const auto f = [target](const Tensor& z) {
      const Tensor pt = ClampMin(Element(Softmax(z, 0), target), 1e-12);
      const Tensor mod = PowScalar(AddScalar(Neg(pt), 1.0), 2.0);
      return MulScalar(Mul(mod, Log(pt)), -0.25);
    };
    EXPECT_LT(GradCheck(f, logits), 1e-4);
  }
}

TEST(GradCheckTest, NonFiniteThrows) {
  const auto f = [](const Tensor& t) { return Sum(Log(t)); };
  EXPECT_THROW(GradCheck(f, Tensor::Vector({-1.0})), ArgumentError);
}

TEST(TapeTest, UnreachedTensorHasZeroGradient) {
  const Tensor a = Tensor::Vector({1.0, 2.0}, true);
  const Tensor b = Tensor::Vector({3.0}, true);
  Tape tape;
  TapeScope scope(tape);
  const Tensor loss = Sum(Mul(a, a));
  const Tensor unused = Sum(b);
  const auto grads = tape.Backward(loss);
  EXPECT_FALSE(grads.Has(b));
  EXPECT_EQ(grads.Of(b), std::vector<double>{0.0});
  (void)unused;
}

TEST(TapeTest, BackwardIsLinearInTheLoss) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = RandomTensor({4, 3}, rng).AsParameter();
    const Tensor w = RandomTensor({3, 3}, rng).AsParameter();
    Tape tape;
    TapeScope scope(tape);
    const Tensor h = Sigmoid(MatMul(x, w));
    const Tensor l1 = Sum(Mul(h, h));
    const Tensor l2 = Mean(Softmax(h, 1));
    const Tensor l12 = Add(l1, MulScalar(l2, 3.0));
    const auto g1 = tape.Backward(l1).Of(w);
    const auto g2 = tape.Backward(l2).Of(w);
    const auto g12 = tape.Backward(l12).Of(w);
    for (std::size_t i = 0; i < g12.size(); ++i) {
      EXPECT_NEAR(g12[i], g1[i] + 3.0 * g2[i], 1e-10);
    }
  }
}

TEST(TapeTest, NoRecordingWithoutActiveTape) {
  const Tensor a = Tensor::Vector({1.0}, true);
  EXPECT_FALSE(Mul(a, a).requires_grad());
  Tape tape;
  {
    TapeScope scope(tape);
    EXPECT_TRUE(Mul(a, a).requires_grad());
    NoGradScope off;
    EXPECT_FALSE(Mul(a, a).requires_grad());
  }
  EXPECT_EQ(tape.size(), 1u);
}

TEST(OpsTest, ConvMatchesDirectSum) {
  Rng rng(9);
  const Tensor x = RandomTensor({2, 5, 6}, rng);
  const Tensor w = RandomTensor({3, 2, 3, 3}, rng);
  const Tensor b = RandomTensor({3}, rng);
  const Tensor y = Conv2d(x, w, b, 2, 1);
  ASSERT_EQ(y.shape(), (Shape{3, 3, 3}));
  for (int o = 0; o < 3; ++o)
    for (int oy = 0; oy < 3; ++oy)
      for (int ox = 0; ox < 3; ++ox) {
        double s = b[o];
        for (int c = 0; c < 2; ++c)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              const int iy = oy * 2 + ky - 1, ix = ox * 2 + kx - 1;
              if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
              s += x[(c * 5 + iy) * 6 + ix] * w[((o * 2 + c) * 3 + ky) * 3 + kx];
            }
        EXPECT_NEAR(y[(o * 3 + oy) * 3 + ox], s, 1e-12);
      }
}

TEST(OpsTest, ConcatAndSliceInvert) {
  Rng rng(4);
  const Tensor a = RandomTensor({3, 2, 4}, rng);
  const Tensor b = RandomTensor({3, 5, 4}, rng);
  const Tensor c = Concat({a, b}, 1);
  ASSERT_EQ(c.shape(), (Shape{3, 7, 4}));
  const Tensor a2 = Slice(c, 1, 0, 2);
  const Tensor b2 = Slice(c, 1, 2, 5);
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], a2[i]);
  for (int i = 0; i < b.size(); ++i) EXPECT_EQ(b[i], b2[i]);
}

TEST(OpsTest, ForwardIsDeterministic) {
  auto run = [] {
    Rng rng(99);
    const AttentionParams p = AttentionParams::Init(8, rng);
    const Tensor q = RandomTensor({4, 8}, rng);
    const Tensor kv = RandomTensor({6, 8}, rng);
    const Tensor out = MultiHeadAttention(q, kv, kv, 4, p).output;
    return std::vector<double>(out.data().begin(), out.data().end());
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace radtr
