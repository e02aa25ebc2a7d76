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

#include "radtr/tensor.h"

#include <atomic>
#include <cmath>
#include <sstream>
#include <utility>

#include "radtr/errors.h"

namespace radtr {
namespace {

std::atomic<std::uint64_t> next_id{1};
thread_local Tape* active_tape = nullptr;

void CheckFinite(std::span<const double> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError("non-finite tensor value at index " +
                         std::to_string(i));
    }
  }
}

}  // namespace

std::int64_t NumElements(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  for (auto d : shape) {
    if (d <= 0) throw ArgumentError("non-positive dimension in " + ShapeString(shape));
  }
  if (NumElements(shape) != static_cast<std::int64_t>(data.size())) {
    throw ArgumentError("data length " + std::to_string(data.size()) +
                        " does not match shape " + ShapeString(shape));
  }
  CheckFinite(data);
  auto impl = std::make_shared<Impl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  impl->id = next_id.fetch_add(1, std::memory_order_relaxed);
  impl_ = std::move(impl);
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  const auto n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return Tensor({}, {value}, requires_grad);
}

Tensor Tensor::Vector(std::vector<double> values, bool requires_grad) {
  const auto n = static_cast<std::int64_t>(values.size());
  return Tensor({n}, std::move(values), requires_grad);
}

const Shape& Tensor::shape() const {
  if (!impl_) throw ArgumentError("undefined tensor");
  return impl_->shape;
}

std::int64_t Tensor::dim(int axis) const {
  const int r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) {
    throw ArgumentError("axis " + std::to_string(axis) + " out of range for " +
                        ShapeString(shape()));
  }
  return impl_->shape[axis];
}

std::int64_t Tensor::size() const {
  return static_cast<std::int64_t>(data().size());
}

std::span<const double> Tensor::data() const {
  if (!impl_) throw ArgumentError("undefined tensor");
  return impl_->data;
}

double Tensor::item() const {
  if (size() != 1) {
    throw ArgumentError("item() on tensor of shape " + ShapeString(shape()));
  }
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

std::uint64_t Tensor::id() const { return impl_ ? impl_->id : 0; }

Tensor Tensor::Detach() const {
  if (!requires_grad()) return *this;
  return Tensor(shape(), impl_->data, false);
}

Tensor Tensor::AsParameter() const { return Tensor(shape(), impl_->data, true); }

std::vector<double> Gradients::Of(const Tensor& t) const {
  auto it = grads_.find(t.id());
  if (it == grads_.end()) return std::vector<double>(t.size(), 0.0);
  return it->second;
}

Tensor Gradients::TensorOf(const Tensor& t) const {
  return Tensor(t.shape(), Of(t));
}

void Tape::Record(const Tensor& output, std::vector<Tensor> inputs,
                  BackwardFn backward) {
  records_.push_back({output, std::move(inputs), std::move(backward)});
}

Gradients Tape::Backward(const Tensor& loss) const {
  if (loss.size() != 1) {
    throw ArgumentError("Backward needs a single-element loss, got " +
                        ShapeString(loss.shape()));
  }
  Gradients result;
  result.grads_[loss.id()] = {1.0};
  std::vector<std::vector<double>> grad_in;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    auto found = result.grads_.find(it->output.id());
    if (found == result.grads_.end()) continue;
    // Copy: the map may rehash while accumulating inputs below.
    const std::vector<double> grad_out = found->second;
    grad_in.assign(it->inputs.size(), {});
    for (std::size_t i = 0; i < it->inputs.size(); ++i) {
      if (it->inputs[i].requires_grad()) {
        grad_in[i].assign(it->inputs[i].size(), 0.0);
      }
    }
    it->backward(grad_out, grad_in);
    for (std::size_t i = 0; i < it->inputs.size(); ++i) {
      if (grad_in[i].empty()) continue;
      auto& acc = result.grads_[it->inputs[i].id()];
      if (acc.empty()) {
        acc = std::move(grad_in[i]);
      } else {
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += grad_in[i][j];
      }
    }
  }
  return result;
}

Tape* Tape::Active() { return active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(active_tape) {
  active_tape = &tape;
}

TapeScope::~TapeScope() { active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(active_tape) { active_tape = nullptr; }

NoGradScope::~NoGradScope() { active_tape = previous_; }

namespace internal {

Tensor MakeResult(Shape shape, std::vector<double> data,
                  const std::vector<Tensor>& inputs,
                  Tape::BackwardFn backward) {
  Tape* tape = Tape::Active();
  bool needs_grad = false;
  if (tape != nullptr) {
    for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
  }
  Tensor out(std::move(shape), std::move(data), needs_grad);
  if (needs_grad) tape->Record(out, inputs, std::move(backward));
  return out;
}

}  // namespace internal
}  // namespace radtr
