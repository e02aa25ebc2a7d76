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

#include "radtr/box.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "radtr/errors.h"

namespace radtr {

std::string_view ViewName(View view) {
  switch (view) {
    case View::kRAD:
      return "RAD";
    case View::kRA:
      return "RA";
    case View::kRD:
      return "RD";
  }
  return "?";
}

View ParseView(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(c));
  if (lower == "rad") return View::kRAD;
  if (lower == "ra") return View::kRA;
  if (lower == "rd") return View::kRD;
  throw ArgumentError("unknown view '" + std::string(name) + "'");
}

Box2D ProjectBox(const Box3D& box, View view) {
  std::size_t second;
  switch (view) {
    case View::kRA:
      second = 1;
      break;
    case View::kRD:
      second = 2;
      break;
    default:
      throw ArgumentError("ProjectBox: view must be RA or RD");
  }
  Box2D out;
  out.center = {box.center[0], box.center[second]};
  out.size = {box.size[0], box.size[second]};
  return out;
}

template <std::size_t N>
void RequirePositiveSize(const Box<N>& box) {
  for (std::size_t i = 0; i < N; ++i) {
    if (!(box.size[i] > 0.0) || !std::isfinite(box.size[i]) ||
        !std::isfinite(box.center[i])) {
      throw ArgumentError("box has non-positive or non-finite extent");
    }
  }
}

template void RequirePositiveSize<2>(const Box<2>&);
template void RequirePositiveSize<3>(const Box<3>&);

bool IsNormalized(const Box3D& box) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(box.center[i] >= 0.0 && box.center[i] <= 1.0)) return false;
    if (!(box.size[i] > 0.0 && box.size[i] <= 1.0)) return false;
  }
  return true;
}

namespace {

template <std::size_t N>
double IouImpl(const Box<N>& a, const Box<N>& b) {
  RequirePositiveSize(a);
  RequirePositiveSize(b);
  // Volumes from corner differences so identical boxes give exactly 1.
  double inter = 1.0, va = 1.0, vb = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double side = std::min(a.Hi(i), b.Hi(i)) - std::max(a.Lo(i), b.Lo(i));
    if (side <= 0.0) return 0.0;
    inter *= side;
    va *= a.Hi(i) - a.Lo(i);
    vb *= b.Hi(i) - b.Lo(i);
  }
  const double uni = va + vb - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace

double Iou(const Box3D& a, const Box3D& b) { return IouImpl(a, b); }
double Iou(const Box2D& a, const Box2D& b) { return IouImpl(a, b); }

}  // namespace radtr
