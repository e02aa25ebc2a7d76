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

#include "radtr/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "radtr/errors.h"
#include "radtr/ops.h"

namespace radtr {
namespace {

double Evaluate(const ScalarFunction& f, const Tensor& x) {
  NoGradScope no_grad;
  const double v = f(x).item();
  if (!std::isfinite(v)) throw NumericError("GradCheck: non-finite f(x)");
  return v;
}

}  // namespace

double GradCheck(const ScalarFunction& f, const Tensor& x, double h) {
  const Tensor param = x.AsParameter();
  std::vector<double> analytic;
  {
    Tape tape;
    TapeScope scope(tape);
    const Tensor y = f(param);
    if (!std::isfinite(y.item())) throw NumericError("GradCheck: non-finite f(x)");
    analytic = tape.Backward(y).Of(param);
  }
  std::vector<double> values(x.data().begin(), x.data().end());
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double plus = Evaluate(f, Tensor(x.shape(), values));
    values[i] = saved - h;
    const double minus = Evaluate(f, Tensor(x.shape(), values));
    values[i] = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double denom =
        std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

double KinkDistance(const ScalarFunction& f, const Tensor& x) {
  KinkMonitor monitor;
  NoGradScope no_grad;
  f(x);
  return monitor.min_distance();
}

}  // namespace radtr
