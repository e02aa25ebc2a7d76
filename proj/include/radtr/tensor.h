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

// Dense double-precision tensors with tape-based reverse-mode
// differentiation.
//
// A Tensor is an immutable value: a shape plus a shared, read-only data
// buffer. Operations in ops.h produce new tensors and, while a Tape is
// active on the calling thread and some input requires a gradient, append a
// backward record to that tape. Tape::Backward replays the records in exact
// reverse order and returns the accumulated gradients.

#ifndef RADTR_TENSOR_H_
#define RADTR_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace radtr {

using Shape = std::vector<std::int64_t>;

std::int64_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

class Tensor {
 public:
  // An undefined tensor. Most accessors require defined().
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  static Tensor Vector(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  // Size of `axis`; negative axes count from the back.
  std::int64_t dim(int axis) const;
  std::int64_t size() const;
  std::span<const double> data() const;
  double operator[](std::int64_t i) const { return data()[i]; }
  // Value of a single-element tensor.
  double item() const;

  bool requires_grad() const;
  // Identity of the underlying buffer; stable across copies of the handle.
  std::uint64_t id() const;

  // Same values, detached from any gradient computation.
  Tensor Detach() const;
  // Same values as a fresh leaf that requires a gradient.
  Tensor AsParameter() const;

 private:
  struct Impl {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::uint64_t id = 0;
  };
  std::shared_ptr<const Impl> impl_;
};

class Gradients {
 public:
  // Gradient of the loss with respect to `t`; zeros when `t` does not lie
  // on any path to the loss.
  std::vector<double> Of(const Tensor& t) const;
  Tensor TensorOf(const Tensor& t) const;
  bool Has(const Tensor& t) const { return grads_.count(t.id()) != 0; }

 private:
  friend class Tape;
  std::unordered_map<std::uint64_t, std::vector<double>> grads_;
};

class Tape {
 public:
  // grad_in[i] is empty when input i does not need a gradient; otherwise it
  // is zero-initialized with the input's size and the function accumulates
  // into it.
  using BackwardFn =
      std::function<void(std::span<const double> grad_out,
                         std::vector<std::vector<double>>& grad_in)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void Record(const Tensor& output, std::vector<Tensor> inputs,
              BackwardFn backward);

  // Reverse pass from a single-element tensor. Does not modify the tape, so
  // it may be called repeatedly.
  Gradients Backward(const Tensor& loss) const;

  std::size_t size() const { return records_.size(); }
  void Clear() { records_.clear(); }

  // Innermost tape activated on this thread, or nullptr.
  static Tape* Active();

 private:
  friend class TapeScope;
  struct Record_ {
    Tensor output;
    std::vector<Tensor> inputs;
    BackwardFn backward;
  };
  std::vector<Record_> records_;
};

// Activates a tape for the current thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

// Suspends recording for the scope's lifetime.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  Tape* previous_;
};

namespace internal {

// Builds an op result. When a tape is active and any input requires a
// gradient, the result requires one too and `backward` is recorded.
Tensor MakeResult(Shape shape, std::vector<double> data,
                  const std::vector<Tensor>& inputs, Tape::BackwardFn backward);

}  // namespace internal
}  // namespace radtr

#endif  // RADTR_TENSOR_H_
