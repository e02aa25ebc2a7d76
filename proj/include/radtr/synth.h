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

// Synthetic RAD scenes and on-disk datasets.

#ifndef RADTR_SYNTH_H_
#define RADTR_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radtr/frame.h"

namespace radtr {

// Blob extent in bins (range, azimuth, Doppler) and peak amplitude for one
// class. Classes are told apart by the shape and strength of their returns.
struct ClassTemplate {
  std::array<std::int64_t, 3> extent{};
  double amplitude = 0.0;
};

struct SceneSpec {
  std::int64_t range = 64;
  std::int64_t azimuth = 64;
  std::int64_t doppler = 16;
  int min_objects = 1;
  int max_objects = 3;
  // RMS magnitude of the complex Gaussian background.
  double noise_floor = 1.0;
  std::array<ClassTemplate, kNumClasses> classes = {{
      {{6, 6, 4}, 12.0},    // person
      {{8, 6, 2}, 14.0},    // bicycle
      {{12, 10, 4}, 24.0},  // car
      {{8, 8, 6}, 16.0},    // motorcycle
      {{20, 12, 4}, 30.0},  // bus
      {{16, 16, 6}, 28.0},  // truck
  }};
  int max_placement_attempts = 200;
};

// Explicit object position: first bin on each axis plus extent in bins.
struct Placement {
  int class_id = 0;
  std::array<std::int64_t, 3> start{};
  std::array<std::int64_t, 3> extent{};
};

// Throws SpecError when the spec cannot be realized (extents exceeding the
// cube, bad object counts, non-positive amplitudes).
void ValidateSceneSpec(const SceneSpec& spec);

// Renders separable raised-cosine blobs over the placements plus complex
// Gaussian noise with random phases, then applies the log-magnitude
// transform. Ground-truth boxes are exactly the blob supports. Pure in
// (seed, spec, placements).
Frame RenderScene(std::uint64_t seed, const SceneSpec& spec,
                  const std::vector<Placement>& placements);

// Draws an object count, classes and non-overlapping placements from the
// seed, then renders. Pure in (seed, spec).
Frame SynthScene(std::uint64_t seed, const SceneSpec& spec);

struct DatasetEntry {
  std::string file;
  std::uint64_t seed = 0;
};

// Seed of frame `index` in a dataset generated from `base_seed`.
std::uint64_t FrameSeed(std::uint64_t base_seed, std::int64_t index);

// Writes frame_0000.radf ... plus index.txt ("<file> <seed>" per line).
std::vector<DatasetEntry> WriteDataset(const std::filesystem::path& dir,
                                       std::int64_t count,
                                       std::uint64_t base_seed,
                                       const SceneSpec& spec);
// Reads index.txt and every listed frame. Throws DataError.
std::vector<Frame> ReadDataset(const std::filesystem::path& dir);

}  // namespace radtr

#endif  // RADTR_SYNTH_H_
