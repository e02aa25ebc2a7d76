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

#include "radtr/optimizer.h"

#include <cmath>
#include <string>
#include <utility>

#include "radtr/errors.h"

namespace radtr {

void ValidateAdamW(const AdamWConfig& c) {
  if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError("learning rate must be finite and nonnegative");
  }
  if (!(c.weight_decay >= 0.0) || !std::isfinite(c.weight_decay)) {
    throw ConfigError("weight decay must be finite and nonnegative");
  }
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(c.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

double ClipGlobalNorm(std::vector<std::vector<double>>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double v : g) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads) {
      for (double& v : g) v *= scale;
    }
  }
  return norm;
}

AdamW::AdamW(const AdamWConfig& config) : config_(config) { ValidateAdamW(config); }

void AdamW::Step(const std::vector<Tensor*>& params,
                 const std::vector<std::vector<double>>& grads) {
  if (params.size() != grads.size()) {
    throw ArgumentError("parameter and gradient counts differ");
  }
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->size(), 0.0);
      v_.emplace_back(p->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) {
    throw ArgumentError("optimizer state holds " + std::to_string(m_.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  ++step_;
  const auto& c = config_;
  const double t = static_cast<double>(step_);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const auto& g = grads[i];
    if (static_cast<std::int64_t>(g.size()) != p.size() ||
        static_cast<std::int64_t>(m_[i].size()) != p.size()) {
      throw ArgumentError("gradient size does not match parameter " + std::to_string(i));
    }
    const auto old = p.data();
    std::vector<double> next(old.begin(), old.end());
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < next.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double mhat = m[j] / correct1;
      const double vhat = v[j] / correct2;
      next[j] -= c.learning_rate *
                 (mhat / (std::sqrt(vhat) + c.epsilon) + c.weight_decay * next[j]);
    }
    p = Tensor(p.shape(), std::move(next), true);
  }
}

void AdamW::Restore(std::int64_t step, std::vector<std::vector<double>> m,
                    std::vector<std::vector<double>> v) {
  if (m.size() != v.size()) throw ArgumentError("moment counts differ");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != v[i].size()) throw ArgumentError("moment sizes differ");
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace radtr
