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

#include "radtr/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>

#include "radtr/errors.h"

namespace radtr {

using internal::MakeResult;

namespace {

thread_local KinkMonitor* active_monitor = nullptr;

// Reports |v - kink| for every element to the active monitor.
void NoteKinks(std::span<const double> values, double kink) {
  if (active_monitor == nullptr) return;
  for (double v : values) active_monitor->Note(std::abs(v - kink));
}

void NoteGaps(std::span<const double> a, std::span<const double> b) {
  if (active_monitor == nullptr) return;
  for (std::size_t i = 0; i < a.size(); ++i) active_monitor->Note(std::abs(a[i] - b[i]));
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ArgumentError(std::string(op) + ": shape mismatch " +
                        ShapeString(a.shape()) + " vs " +
                        ShapeString(b.shape()));
  }
}

int NormalizeAxis(int axis, int rank, const char* op) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) {
    throw ArgumentError(std::string(op) + ": invalid axis for rank " +
                        std::to_string(rank));
  }
  return axis;
}

// Elementwise binary op with local partial derivatives da(x, y), db(x, y).
template <typename F, typename DA, typename DB>
Tensor Binary(const Tensor& a, const Tensor& b, const char* name, F f, DA da,
              DB db) {
  RequireSameShape(a, b, name);
  const auto x = a.data();
  const auto y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], y[i]);
  return MakeResult(a.shape(), std::move(out), {a, b},
                    [a, b, da, db](std::span<const double> g, auto& gin) {
                      const auto x = a.data();
                      const auto y = b.data();
                      if (!gin[0].empty()) {
                        for (std::size_t i = 0; i < g.size(); ++i)
                          gin[0][i] += g[i] * da(x[i], y[i]);
                      }
                      if (!gin[1].empty()) {
                        for (std::size_t i = 0; i < g.size(); ++i)
                          gin[1][i] += g[i] * db(x[i], y[i]);
                      }
                    });
}

// Elementwise unary op; df receives (input, output).
template <typename F, typename DF>
Tensor Unary(const Tensor& x, F f, DF df) {
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  auto result_data = out;
  return MakeResult(x.shape(), std::move(out), {x},
                    [x, df, y = std::move(result_data)](
                        std::span<const double> g, auto& gin) {
                      const auto in = x.data();
                      for (std::size_t i = 0; i < g.size(); ++i)
                        gin[0][i] += g[i] * df(in[i], y[i]);
                    });
}

}  // namespace

KinkMonitor::KinkMonitor() : previous_(active_monitor) { active_monitor = this; }

KinkMonitor::~KinkMonitor() { active_monitor = previous_; }

void KinkMonitor::Note(double distance) {
  min_distance_ = std::min(min_distance_, distance);
  if (previous_ != nullptr) previous_->Note(distance);
}

Tensor Add(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "Add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "Sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "Mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor Div(const Tensor& a, const Tensor& b) {
  for (double v : b.data()) {
    if (v == 0.0) throw NumericError("Div: division by zero");
  }
  return Binary(
      a, b, "Div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

// Ties route the gradient to the first argument.
Tensor Minimum(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) NoteGaps(a.data(), b.data());
  return Binary(
      a, b, "Minimum", [](double x, double y) { return x <= y ? x : y; },
      [](double x, double y) { return x <= y ? 1.0 : 0.0; },
      [](double x, double y) { return x <= y ? 0.0 : 1.0; });
}

Tensor Maximum(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) NoteGaps(a.data(), b.data());
  return Binary(
      a, b, "Maximum", [](double x, double y) { return x >= y ? x : y; },
      [](double x, double y) { return x >= y ? 1.0 : 0.0; },
      [](double x, double y) { return x >= y ? 0.0 : 1.0; });
}

Tensor AddScalar(const Tensor& x, double s) {
  return Unary(
      x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Tensor MulScalar(const Tensor& x, double s) {
  return Unary(
      x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Tensor Neg(const Tensor& x) { return MulScalar(x, -1.0); }

Tensor PowScalar(const Tensor& x, double p) {
  for (double v : x.data()) {
    if (v < 0.0) throw ArgumentError("PowScalar: negative base");
  }
  if (p == 0.0) {
    return Unary(
        x, [](double) { return 1.0; }, [](double, double) { return 0.0; });
  }
  return Unary(
      x, [p](double v) { return std::pow(v, p); },
      [p](double v, double) { return p * std::pow(v, p - 1.0); });
}

Tensor Relu(const Tensor& x) {
  NoteKinks(x.data(), 0.0);
  return Unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor& x) {
  return Unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Exp(const Tensor& x) {
  return Unary(
      x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor Log(const Tensor& x) {
  for (double v : x.data()) {
    if (v <= 0.0) throw ArgumentError("Log: non-positive input");
  }
  return Unary(
      x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Tensor Abs(const Tensor& x) {
  NoteKinks(x.data(), 0.0);
  return Unary(
      x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor ClampMin(const Tensor& x, double lo) {
  NoteKinks(x.data(), lo);
  return Unary(
      x, [lo](double v) { return v < lo ? lo : v; },
      [lo](double v, double) { return v < lo ? 0.0 : 1.0; });
}

Tensor Sum(const Tensor& x) {
  const auto in = x.data();
  const double s = std::accumulate(in.begin(), in.end(), 0.0);
  return MakeResult({}, {s}, {x}, [](std::span<const double> g, auto& gin) {
    for (auto& v : gin[0]) v += g[0];
  });
}

Tensor Mean(const Tensor& x) {
  return MulScalar(Sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor Prod(const Tensor& x) {
  const auto in = x.data();
  double p = 1.0;
  for (double v : in) p *= v;
  return MakeResult({}, {p}, {x}, [x](std::span<const double> g, auto& gin) {
    const auto in = x.data();
    const std::size_t n = in.size();
    // Prefix/suffix products avoid dividing by zero entries.
    std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * in[i];
    for (std::size_t i = n; i > 0; --i) suffix[i - 1] = suffix[i] * in[i - 1];
    for (std::size_t i = 0; i < n; ++i) gin[0][i] += g[0] * prefix[i] * suffix[i + 1];
  });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ArgumentError("MatMul: incompatible shapes " + ShapeString(a.shape()) +
                        " x " + ShapeString(b.shape()));
  }
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  const auto x = a.data();
  const auto y = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t p = 0; p < k; ++p) {
      const double xv = x[i * k + p];
      if (xv == 0.0) continue;
      const double* yrow = &y[p * n];
      double* orow = &out[i * n];
      for (std::int64_t j = 0; j < n; ++j) orow[j] += xv * yrow[j];
    }
  }
  return MakeResult(
      {m, n}, std::move(out), {a, b},
      [a, b, m, k, n](std::span<const double> g, auto& gin) {
        const auto x = a.data();
        const auto y = b.data();
        if (!gin[0].empty()) {
          // dA = G * B^T
          for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t p = 0; p < k; ++p) {
              double s = 0.0;
              for (std::int64_t j = 0; j < n; ++j) s += g[i * n + j] * y[p * n + j];
              gin[0][i * k + p] += s;
            }
        }
        if (!gin[1].empty()) {
          // dB = A^T * G
          for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t p = 0; p < k; ++p) {
              const double xv = x[i * k + p];
              if (xv == 0.0) continue;
              for (std::int64_t j = 0; j < n; ++j)
                gin[1][p * n + j] += xv * g[i * n + j];
            }
        }
      });
}

Tensor Transpose(const Tensor& a) {
  if (a.rank() != 2) throw ArgumentError("Transpose: rank-2 tensor required");
  const auto m = a.dim(0), n = a.dim(1);
  std::vector<std::int64_t> idx(m * n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j) idx[i * m + j] = j * n + i;
  return Gather(a, std::move(idx), {n, m});
}

Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  if (w.rank() != 2 || x.rank() < 1 || x.dim(-1) != w.dim(0)) {
    throw ArgumentError("Linear: input " + ShapeString(x.shape()) +
                        " incompatible with weight " + ShapeString(w.shape()));
  }
  const auto in = w.dim(0);
  const auto rows = x.size() / in;
  Shape out_shape = x.shape();
  out_shape.back() = w.dim(1);
  Tensor y = MatMul(Reshape(x, {rows, in}), w);
  if (bias.defined()) y = AddTrailing(y, bias);
  return Reshape(y, std::move(out_shape));
}

Tensor AddTrailing(const Tensor& x, const Tensor& v) {
  if (v.rank() != 1 || x.rank() < 1 || x.dim(-1) != v.dim(0)) {
    throw ArgumentError("AddTrailing: " + ShapeString(x.shape()) + " vs " +
                        ShapeString(v.shape()));
  }
  const auto n = v.dim(0);
  const auto in = x.data();
  const auto vv = v.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] + vv[i % n];
  return MakeResult(x.shape(), std::move(out), {x, v},
                    [n](std::span<const double> g, auto& gin) {
                      if (!gin[0].empty())
                        for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
                      if (!gin[1].empty())
                        for (std::size_t i = 0; i < g.size(); ++i) gin[1][i % n] += g[i];
                    });
}

Tensor MulTrailing(const Tensor& x, const Tensor& v) {
  if (v.rank() != 1 || x.rank() < 1 || x.dim(-1) != v.dim(0)) {
    throw ArgumentError("MulTrailing: " + ShapeString(x.shape()) + " vs " +
                        ShapeString(v.shape()));
  }
  const auto n = v.dim(0);
  const auto in = x.data();
  const auto vv = v.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * vv[i % n];
  return MakeResult(x.shape(), std::move(out), {x, v},
                    [x, v, n](std::span<const double> g, auto& gin) {
                      const auto in = x.data();
                      const auto vv = v.data();
                      if (!gin[0].empty())
                        for (std::size_t i = 0; i < g.size(); ++i)
                          gin[0][i] += g[i] * vv[i % n];
                      if (!gin[1].empty())
                        for (std::size_t i = 0; i < g.size(); ++i)
                          gin[1][i % n] += g[i] * in[i];
                    });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (NumElements(shape) != x.size()) {
    throw ArgumentError("Reshape: " + ShapeString(x.shape()) + " to " +
                        ShapeString(shape));
  }
  if (shape == x.shape()) return x;
  std::vector<double> out(x.data().begin(), x.data().end());
  return MakeResult(std::move(shape), std::move(out), {x},
                    [](std::span<const double> g, auto& gin) {
                      for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
                    });
}

Tensor Gather(const Tensor& x, std::vector<std::int64_t> indices, Shape shape) {
  if (NumElements(shape) != static_cast<std::int64_t>(indices.size())) {
    throw ArgumentError("Gather: index count does not match shape " +
                        ShapeString(shape));
  }
  const auto in = x.data();
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto j = indices[i];
    if (j < 0 || j >= x.size()) throw ArgumentError("Gather: index out of range");
    out[i] = in[j];
  }
  return MakeResult(std::move(shape), std::move(out), {x},
                    [idx = std::move(indices)](std::span<const double> g, auto& gin) {
                      for (std::size_t i = 0; i < g.size(); ++i) gin[0][idx[i]] += g[i];
                    });
}

Tensor Slice(const Tensor& x, int axis, std::int64_t start, std::int64_t length) {
  axis = NormalizeAxis(axis, x.rank(), "Slice");
  const auto& s = x.shape();
  if (start < 0 || length <= 0 || start + length > s[axis]) {
    throw ArgumentError("Slice: range out of bounds");
  }
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[i];
  for (int i = axis + 1; i < x.rank(); ++i) inner *= s[i];
  std::vector<std::int64_t> idx;
  idx.reserve(outer * length * inner);
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t a = start; a < start + length; ++a)
      for (std::int64_t i = 0; i < inner; ++i)
        idx.push_back((o * s[axis] + a) * inner + i);
  Shape out_shape = s;
  out_shape[axis] = length;
  return Gather(x, std::move(idx), std::move(out_shape));
}

Tensor Concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ArgumentError("Concat: no inputs");
  const int rank = parts[0].rank();
  axis = NormalizeAxis(axis, rank, "Concat");
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != rank) throw ArgumentError("Concat: rank mismatch");
    for (int i = 0; i < rank; ++i) {
      if (i != axis && p.dim(i) != parts[0].dim(i)) {
        throw ArgumentError("Concat: shape mismatch " + ShapeString(p.shape()));
      }
    }
    out_shape[axis] += p.dim(axis);
  }
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= out_shape[i];
  for (int i = axis + 1; i < rank; ++i) inner *= out_shape[i];
  std::vector<double> out;
  out.reserve(NumElements(out_shape));
  for (std::int64_t o = 0; o < outer; ++o) {
    for (const auto& p : parts) {
      const auto chunk = p.dim(axis) * inner;
      const auto d = p.data();
      out.insert(out.end(), d.begin() + o * chunk, d.begin() + (o + 1) * chunk);
    }
  }
  std::vector<std::int64_t> chunks;
  for (const auto& p : parts) chunks.push_back(p.dim(axis) * inner);
  return MakeResult(std::move(out_shape), std::move(out), parts,
                    [outer, chunks](std::span<const double> g, auto& gin) {
                      std::size_t pos = 0;
                      for (std::int64_t o = 0; o < outer; ++o) {
                        for (std::size_t p = 0; p < chunks.size(); ++p) {
                          if (!gin[p].empty()) {
                            for (std::int64_t i = 0; i < chunks[p]; ++i)
                              gin[p][o * chunks[p] + i] += g[pos + i];
                          }
                          pos += chunks[p];
                        }
                      }
                    });
}

Tensor Element(const Tensor& x, std::int64_t flat_index) {
  return Gather(x, {flat_index}, {});
}

Tensor Softmax(const Tensor& x, int axis) {
  axis = NormalizeAxis(axis, x.rank(), "Softmax");
  const auto& s = x.shape();
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[i];
  for (int i = axis + 1; i < x.rank(); ++i) inner *= s[i];
  const auto n = s[axis];
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::int64_t o = 0; o < outer; ++o) {
    for (std::int64_t i = 0; i < inner; ++i) {
      const auto base = o * n * inner + i;
      double mx = in[base];
      for (std::int64_t a = 1; a < n; ++a) mx = std::max(mx, in[base + a * inner]);
      double z = 0.0;
      for (std::int64_t a = 0; a < n; ++a) {
        const double e = std::exp(in[base + a * inner] - mx);
        out[base + a * inner] = e;
        z += e;
      }
      for (std::int64_t a = 0; a < n; ++a) out[base + a * inner] /= z;
    }
  }
  auto y = out;
  return MakeResult(s, std::move(out), {x},
                    [y = std::move(y), outer, inner, n](std::span<const double> g,
                                                        auto& gin) {
                      for (std::int64_t o = 0; o < outer; ++o) {
                        for (std::int64_t i = 0; i < inner; ++i) {
                          const auto base = o * n * inner + i;
                          double dot = 0.0;
                          for (std::int64_t a = 0; a < n; ++a)
                            dot += g[base + a * inner] * y[base + a * inner];
                          for (std::int64_t a = 0; a < n; ++a) {
                            const auto k = base + a * inner;
                            gin[0][k] += y[k] * (g[k] - dot);
                          }
                        }
                      }
                    });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
  if (x.rank() < 1 || gamma.rank() != 1 || beta.rank() != 1 ||
      gamma.dim(0) != x.dim(-1) || beta.dim(0) != x.dim(-1)) {
    throw ArgumentError("LayerNorm: gamma/beta must match trailing axis of " +
                        ShapeString(x.shape()));
  }
  const auto n = x.dim(-1);
  const auto rows = x.size() / n;
  const auto in = x.data();
  const auto gm = gamma.data();
  const auto bt = beta.data();
  std::vector<double> xhat(in.size()), inv_std(rows), out(in.size());
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = &in[r * n];
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mean += row[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i) var += (row[i] - mean) * (row[i] - mean);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::int64_t i = 0; i < n; ++i) {
      xhat[r * n + i] = (row[i] - mean) * inv_std[r];
      out[r * n + i] = xhat[r * n + i] * gm[i] + bt[i];
    }
  }
  return MakeResult(
      x.shape(), std::move(out), {x, gamma, beta},
      [gamma, xhat = std::move(xhat), inv_std = std::move(inv_std), n, rows](
          std::span<const double> g, auto& gin) {
        const auto gm = gamma.data();
        for (std::int64_t r = 0; r < rows; ++r) {
          if (!gin[0].empty()) {
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
              const double dy = g[r * n + i] * gm[i];
              sum_dy += dy;
              sum_dy_xhat += dy * xhat[r * n + i];
            }
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::int64_t i = 0; i < n; ++i) {
              const double dy = g[r * n + i] * gm[i];
              gin[0][r * n + i] += inv_std[r] * (dy - inv_n * sum_dy -
                                                 xhat[r * n + i] * inv_n * sum_dy_xhat);
            }
          }
          for (std::int64_t i = 0; i < n; ++i) {
            if (!gin[1].empty()) gin[1][i] += g[r * n + i] * xhat[r * n + i];
            if (!gin[2].empty()) gin[2][i] += g[r * n + i];
          }
        }
      });
}

Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride,
              int padding) {
  if (x.rank() != 3 || w.rank() != 4 || w.dim(1) != x.dim(0) ||
      w.dim(2) != w.dim(3) || bias.rank() != 1 || bias.dim(0) != w.dim(0)) {
    throw ArgumentError("Conv2d: input " + ShapeString(x.shape()) +
                        " incompatible with weight " + ShapeString(w.shape()));
  }
  if (stride <= 0 || padding < 0) throw ArgumentError("Conv2d: bad stride/padding");
  const auto cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const auto cout = w.dim(0), k = w.dim(2);
  const auto ho = (h + 2 * padding - k) / stride + 1;
  const auto wo = (wd + 2 * padding - k) / stride + 1;
  if (ho <= 0 || wo <= 0) throw ArgumentError("Conv2d: kernel larger than input");
  const auto in = x.data();
  const auto wt = w.data();
  const auto bs = bias.data();
  std::vector<double> out(cout * ho * wo);
  // Visits every (output position, input tap) pair in a fixed order.
  auto for_each_tap = [=](auto&& fn) {
    for (std::int64_t oy = 0; oy < ho; ++oy)
      for (std::int64_t ox = 0; ox < wo; ++ox)
        for (std::int64_t c = 0; c < cin; ++c)
          for (std::int64_t ky = 0; ky < k; ++ky) {
            const auto iy = oy * stride + ky - padding;
            if (iy < 0 || iy >= h) continue;
            for (std::int64_t kx = 0; kx < k; ++kx) {
              const auto ix = ox * stride + kx - padding;
              if (ix < 0 || ix >= wd) continue;
              fn(oy * wo + ox, (c * h + iy) * wd + ix, (c * k + ky) * k + kx);
            }
          }
  };
  const auto wstride = cin * k * k;
  const auto plane = ho * wo;
  for (std::int64_t o = 0; o < cout; ++o)
    for (std::int64_t p = 0; p < plane; ++p) out[o * plane + p] = bs[o];
  for_each_tap([&](std::int64_t p, std::int64_t xi, std::int64_t wi) {
    const double xv = in[xi];
    for (std::int64_t o = 0; o < cout; ++o) out[o * plane + p] += xv * wt[o * wstride + wi];
  });
  return MakeResult(
      {cout, ho, wo}, std::move(out), {x, w, bias},
      [x, w, for_each_tap, cout, plane, wstride](std::span<const double> g,
                                                 auto& gin) {
        const auto in = x.data();
        const auto wt = w.data();
        const bool need_x = !gin[0].empty();
        const bool need_w = !gin[1].empty();
        if (need_x || need_w) {
          for_each_tap([&](std::int64_t p, std::int64_t xi, std::int64_t wi) {
            double acc = 0.0;
            for (std::int64_t o = 0; o < cout; ++o) {
              const double go = g[o * plane + p];
              if (need_w) gin[1][o * wstride + wi] += go * in[xi];
              acc += go * wt[o * wstride + wi];
            }
            if (need_x) gin[0][xi] += acc;
          });
        }
        if (!gin[2].empty()) {
          for (std::int64_t o = 0; o < cout; ++o)
            for (std::int64_t p = 0; p < plane; ++p) gin[2][o] += g[o * plane + p];
        }
      });
}

}  // namespace radtr
