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

// Axis-aligned center-size boxes in normalized RAD coordinates.

#ifndef RADTR_BOX_H_
#define RADTR_BOX_H_

#include <array>
#include <cstddef>
#include <string_view>

namespace radtr {

// Coordinate order is (range, azimuth, Doppler) for 3D boxes.
template <std::size_t N>
struct Box {
  std::array<double, N> center{};
  std::array<double, N> size{};

  double Lo(std::size_t i) const { return center[i] - 0.5 * size[i]; }
  double Hi(std::size_t i) const { return center[i] + 0.5 * size[i]; }
  double Volume() const {
    double v = 1.0;
    for (double s : size) v *= s;
    return v;
  }
  // Parameters as (center..., size...).
  std::array<double, 2 * N> Params() const {
    std::array<double, 2 * N> p{};
    for (std::size_t i = 0; i < N; ++i) {
      p[i] = center[i];
      p[N + i] = size[i];
    }
    return p;
  }
  static Box FromParams(const std::array<double, 2 * N>& p) {
    Box b;
    for (std::size_t i = 0; i < N; ++i) {
      b.center[i] = p[i];
      b.size[i] = p[N + i];
    }
    return b;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

using Box3D = Box<3>;
using Box2D = Box<2>;

enum class View { kRAD, kRA, kRD };

std::string_view ViewName(View view);
// Parses "rad", "ra" or "rd" (case-insensitive). Throws ArgumentError.
View ParseView(std::string_view name);

// RA keeps (range, azimuth); RD keeps (range, Doppler). Throws ArgumentError
// for kRAD.
Box2D ProjectBox(const Box3D& box, View view);

// Throws ArgumentError unless every size is positive and finite.
template <std::size_t N>
void RequirePositiveSize(const Box<N>& box);

// True when centers lie in [0, 1] and sizes in (0, 1].
bool IsNormalized(const Box3D& box);

// Axis-aligned intersection over union. Throws ArgumentError on a
// non-positive size.
double Iou(const Box3D& a, const Box3D& b);
double Iou(const Box2D& a, const Box2D& b);

}  // namespace radtr

#endif  // RADTR_BOX_H_
