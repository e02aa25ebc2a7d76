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

#include "radtr/synth.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "radtr/errors.h"
#include "radtr/rng.h"

namespace radtr {
namespace {

// Raised-cosine weight of bin `i` for a support of `extent` bins starting at
// `start`. Positive inside the support, zero outside.
double Profile(std::int64_t i, std::int64_t start, std::int64_t extent) {
  if (i < start || i >= start + extent) return 0.0;
  const double t = (static_cast<double>(i - start) + 0.5) / static_cast<double>(extent);
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t);
}

bool Overlaps(const Placement& a, const Placement& b) {
  for (int i = 0; i < 3; ++i) {
    if (a.start[i] + a.extent[i] <= b.start[i] ||
        b.start[i] + b.extent[i] <= a.start[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace

void ValidateSceneSpec(const SceneSpec& spec) {
  const std::array<std::int64_t, 3> dims = {spec.range, spec.azimuth, spec.doppler};
  for (auto d : dims) {
    if (d <= 0) throw SpecError("cube dimensions must be positive");
  }
  if (spec.min_objects < 0 || spec.max_objects < spec.min_objects) {
    throw SpecError("invalid object count range");
  }
  if (!(spec.noise_floor >= 0.0)) throw SpecError("noise floor must be >= 0");
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& t = spec.classes[c];
    if (!(t.amplitude > 0.0)) throw SpecError("class amplitude must be positive");
    for (int i = 0; i < 3; ++i) {
      if (t.extent[i] <= 0 || t.extent[i] > dims[i]) {
        throw SpecError("extent of class " + std::string(kClassNames[c]) +
                        " does not fit in the cube");
      }
    }
  }
}

Frame RenderScene(std::uint64_t seed, const SceneSpec& spec,
                  const std::vector<Placement>& placements) {
  ValidateSceneSpec(spec);
  const std::array<std::int64_t, 3> dims = {spec.range, spec.azimuth, spec.doppler};
  Frame frame;
  for (const auto& p : placements) {
    if (p.class_id < 0 || p.class_id >= kNumClasses) {
      throw SpecError("placement class out of range");
    }
    GroundTruthObject obj;
    obj.class_id = p.class_id;
    for (int i = 0; i < 3; ++i) {
      if (p.extent[i] <= 0 || p.start[i] < 0 || p.start[i] + p.extent[i] > dims[i]) {
        throw SpecError("placement box exceeds the cube");
      }
      const double n = static_cast<double>(dims[i]);
      // Stored as f32 on disk; keep frames exactly representable.
      obj.box.center[i] = static_cast<float>(
          (static_cast<double>(p.start[i]) + 0.5 * static_cast<double>(p.extent[i])) / n);
      obj.box.size[i] = static_cast<float>(static_cast<double>(p.extent[i]) / n);
    }
    frame.objects.push_back(obj);
  }

  const auto n = spec.range * spec.azimuth * spec.doppler;
  std::vector<double> magnitude(n, 0.0);
  for (const auto& p : placements) {
    const double amp = spec.classes[p.class_id].amplitude;
    for (auto r = p.start[0]; r < p.start[0] + p.extent[0]; ++r) {
      const double wr = Profile(r, p.start[0], p.extent[0]);
      for (auto a = p.start[1]; a < p.start[1] + p.extent[1]; ++a) {
        const double wa = Profile(a, p.start[1], p.extent[1]);
        for (auto d = p.start[2]; d < p.start[2] + p.extent[2]; ++d) {
          magnitude[(r * spec.azimuth + a) * spec.doppler + d] +=
              amp * wr * wa * Profile(d, p.start[2], p.extent[2]);
        }
      }
    }
  }

  Rng rng(MixSeed(seed ^ 0x6e6f697365ULL));
  const double sigma = spec.noise_floor / std::numbers::sqrt2;
  std::vector<float> raw(2 * n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const double re = magnitude[i] * std::cos(phase) + rng.Normal(0.0, sigma);
    const double im = magnitude[i] * std::sin(phase) + rng.Normal(0.0, sigma);
    raw[2 * i] = static_cast<float>(re);
    raw[2 * i + 1] = static_cast<float>(im);
  }
  frame.cube = PreprocessLogMagnitude(spec.range, spec.azimuth, spec.doppler, raw);
  return frame;
}

Frame SynthScene(std::uint64_t seed, const SceneSpec& spec) {
  ValidateSceneSpec(spec);
  Rng rng(MixSeed(seed));
  const auto count = rng.UniformInt(spec.min_objects, spec.max_objects);
  const std::array<std::int64_t, 3> dims = {spec.range, spec.azimuth, spec.doppler};
  std::vector<Placement> placements;
  for (std::int64_t k = 0; k < count; ++k) {
    const int cls = static_cast<int>(rng.UniformInt(0, kNumClasses - 1));
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_placement_attempts && !placed; ++attempt) {
      Placement p;
      p.class_id = cls;
      p.extent = spec.classes[cls].extent;
      for (int i = 0; i < 3; ++i) p.start[i] = rng.UniformInt(0, dims[i] - p.extent[i]);
      placed = true;
      for (const auto& q : placements) placed = placed && !Overlaps(p, q);
      if (placed) placements.push_back(p);
    }
    if (!placed) {
      throw SpecError("could not place " + std::to_string(count) +
                      " non-overlapping objects in the cube");
    }
  }
  return RenderScene(seed, spec, placements);
}

std::uint64_t FrameSeed(std::uint64_t base_seed, std::int64_t index) {
  return MixSeed(base_seed * 0x100000001b3ULL + static_cast<std::uint64_t>(index));
}

std::vector<DatasetEntry> WriteDataset(const std::filesystem::path& dir,
                                       std::int64_t count,
                                       std::uint64_t base_seed,
                                       const SceneSpec& spec) {
  std::filesystem::create_directories(dir);
  std::vector<DatasetEntry> entries;
  std::ofstream index(dir / "index.txt");
  if (!index) throw DataError("cannot write index in " + dir.string());
  for (std::int64_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04lld.radf", static_cast<long long>(i));
    const auto seed = FrameSeed(base_seed, i);
    SaveFrame(SynthScene(seed, spec), dir / name);
    index << name << ' ' << seed << '\n';
    entries.push_back({name, seed});
  }
  return entries;
}

std::vector<Frame> ReadDataset(const std::filesystem::path& dir) {
  std::ifstream index(dir / "index.txt");
  if (!index) throw DataError("cannot read " + (dir / "index.txt").string());
  std::vector<Frame> frames;
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string file;
    fields >> file;
    frames.push_back(LoadFrame(dir / file));
  }
  if (frames.empty()) throw DataError("dataset " + dir.string() + " is empty");
  return frames;
}

}  // namespace radtr
