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

// AdamW with decoupled weight decay and global-norm gradient clipping.

#ifndef RADTR_OPTIMIZER_H_
#define RADTR_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "radtr/tensor.h"

namespace radtr {

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-4;
};

// Throws ConfigError on a negative rate or decay, or betas outside [0, 1).
void ValidateAdamW(const AdamWConfig& config);

// Scales `grads` in place so their joint L2 norm is at most `max_norm`
// (no-op when max_norm <= 0). Returns the norm before clipping.
double ClipGlobalNorm(std::vector<std::vector<double>>& grads, double max_norm);

class AdamW {
 public:
  explicit AdamW(const AdamWConfig& config);

  // Applies one update. `params` are replaced by new trainable tensors;
  // `grads[i]` matches params[i] in size. Moments are allocated on the first
  // call and keep their order afterwards.
  void Step(const std::vector<Tensor*>& params,
            const std::vector<std::vector<double>>& grads);

  std::int64_t step() const { return step_; }
  const AdamWConfig& config() const { return config_; }

  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  // Restores state saved from another instance. Throws ArgumentError when
  // the moment vectors differ in count or size from each other.
  void Restore(std::int64_t step, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  AdamWConfig config_;
  std::int64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace radtr

#endif  // RADTR_OPTIMIZER_H_
