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

// Radar frames and the RADF file format.
//
// Layout (little-endian):
//   "RADF" | u32 version = 1 | u32 R | u32 A | u32 Dp | u8 flag |
//   payload | u16 object count | objects
// flag 0: payload is R*A*Dp complex samples as interleaved f32 (re, im);
// flag 1: payload is R*A*Dp preprocessed f32 log-magnitudes.
// Samples are ordered range-major, Doppler fastest. Each object is a u8
// class followed by six f32: center (r, a, d) then size (sr, sa, sd).

#ifndef RADTR_FRAME_H_
#define RADTR_FRAME_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radtr/box.h"

namespace radtr {

inline constexpr int kNumClasses = 6;
inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "person", "bicycle", "car", "motorcycle", "bus", "truck"};

inline constexpr double kMagnitudeFloor = 1e-10;
inline constexpr std::uint32_t kFrameVersion = 1;

// Log10 magnitudes over (range, azimuth, Doppler) bins.
struct RadCube {
  std::int64_t range = 0;
  std::int64_t azimuth = 0;
  std::int64_t doppler = 0;
  std::vector<float> values;  // range-major, Doppler fastest

  std::int64_t Index(std::int64_t r, std::int64_t a, std::int64_t d) const {
    return (r * azimuth + a) * doppler + d;
  }
  float at(std::int64_t r, std::int64_t a, std::int64_t d) const {
    return values[Index(r, a, d)];
  }
  friend bool operator==(const RadCube&, const RadCube&) = default;
};

struct GroundTruthObject {
  int class_id = 0;
  Box3D box;
  friend bool operator==(const GroundTruthObject&, const GroundTruthObject&) = default;
};

struct Frame {
  RadCube cube;
  std::vector<GroundTruthObject> objects;
  friend bool operator==(const Frame&, const Frame&) = default;
};

// out = log10(sqrt(re^2 + im^2) + 1e-10) per bin. `interleaved` holds
// range*azimuth*doppler (re, im) pairs. Throws DataError on non-finite input
// or a length mismatch.
RadCube PreprocessLogMagnitude(std::int64_t range, std::int64_t azimuth,
                               std::int64_t doppler,
                               std::span<const float> interleaved);

// Encodes with flag 1. Box parameters are stored as f32.
std::string EncodeFrame(const Frame& frame);
// Encodes raw complex samples with flag 0.
std::string EncodeRawFrame(std::int64_t range, std::int64_t azimuth,
                           std::int64_t doppler,
                           std::span<const float> interleaved,
                           const std::vector<GroundTruthObject>& objects);
// Throws FormatError carrying the byte offset of the first problem. Raw
// payloads are preprocessed on load.
Frame DecodeFrame(std::string_view bytes);

void SaveFrame(const Frame& frame, const std::filesystem::path& path);
Frame LoadFrame(const std::filesystem::path& path);

}  // namespace radtr

#endif  // RADTR_FRAME_H_
