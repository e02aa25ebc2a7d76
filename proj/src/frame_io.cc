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

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "byte_io.h"
#include "radtr/errors.h"
#include "radtr/frame.h"

namespace radtr {
namespace {

using internal::Reader;
using internal::Writer;

constexpr char kMagic[4] = {'R', 'A', 'D', 'F'};
constexpr std::uint8_t kFlagRaw = 0;
constexpr std::uint8_t kFlagLogMagnitude = 1;

void WriteHeader(Writer& w, std::int64_t r, std::int64_t a, std::int64_t d,
                 std::uint8_t flag) {
  for (auto v : {r, a, d}) {
    if (v <= 0 || v > std::numeric_limits<std::uint32_t>::max()) {
      throw ArgumentError("frame dimension out of range");
    }
  }
  w.Bytes(kMagic, 4);
  w.U32(kFrameVersion);
  w.U32(static_cast<std::uint32_t>(r));
  w.U32(static_cast<std::uint32_t>(a));
  w.U32(static_cast<std::uint32_t>(d));
  w.U8(flag);
}

void WriteObjects(Writer& w, const std::vector<GroundTruthObject>& objects) {
  if (objects.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ArgumentError("too many objects for frame format");
  }
  w.U16(static_cast<std::uint16_t>(objects.size()));
  for (const auto& obj : objects) {
    if (obj.class_id < 0 || obj.class_id >= kNumClasses) {
      throw ArgumentError("object class out of range");
    }
    w.U8(static_cast<std::uint8_t>(obj.class_id));
    for (double v : obj.box.Params()) w.F32(static_cast<float>(v));
  }
}

}  // namespace

RadCube PreprocessLogMagnitude(std::int64_t range, std::int64_t azimuth,
                               std::int64_t doppler,
                               std::span<const float> interleaved) {
  if (range <= 0 || azimuth <= 0 || doppler <= 0) {
    throw DataError("cube dimensions must be positive");
  }
  const auto n = range * azimuth * doppler;
  if (static_cast<std::int64_t>(interleaved.size()) != 2 * n) {
    throw DataError("raw cube holds " + std::to_string(interleaved.size()) +
                    " floats, expected " + std::to_string(2 * n));
  }
  RadCube cube{range, azimuth, doppler, std::vector<float>(n)};
  for (std::int64_t i = 0; i < n; ++i) {
    const double re = interleaved[2 * i];
    const double im = interleaved[2 * i + 1];
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw DataError("non-finite raw sample at bin " + std::to_string(i));
    }
    cube.values[i] =
        static_cast<float>(std::log10(std::hypot(re, im) + kMagnitudeFloor));
  }
  return cube;
}

std::string EncodeFrame(const Frame& frame) {
  const auto& c = frame.cube;
  if (static_cast<std::int64_t>(c.values.size()) != c.range * c.azimuth * c.doppler) {
    throw ArgumentError("cube value count does not match its dimensions");
  }
  Writer w;
  WriteHeader(w, c.range, c.azimuth, c.doppler, kFlagLogMagnitude);
  for (float v : c.values) w.F32(v);
  WriteObjects(w, frame.objects);
  return w.Take();
}

std::string EncodeRawFrame(std::int64_t range, std::int64_t azimuth,
                           std::int64_t doppler,
                           std::span<const float> interleaved,
                           const std::vector<GroundTruthObject>& objects) {
  if (static_cast<std::int64_t>(interleaved.size()) != 2 * range * azimuth * doppler) {
    throw ArgumentError("raw sample count does not match dimensions");
  }
  Writer w;
  WriteHeader(w, range, azimuth, doppler, kFlagRaw);
  for (float v : interleaved) w.F32(v);
  WriteObjects(w, objects);
  return w.Take();
}

Frame DecodeFrame(std::string_view bytes) {
  Reader r(bytes);
  const auto magic = r.Take(4, "magic");
  if (magic != std::string_view(kMagic, 4)) throw FormatError("bad magic", 0);
  const auto version_at = r.offset();
  const auto version = r.U32("version");
  if (version != kFrameVersion) {
    throw FormatError("unsupported version " + std::to_string(version), version_at);
  }
  std::int64_t dims[3];
  for (auto& d : dims) {
    const auto at = r.offset();
    d = r.U32("dimensions");
    if (d == 0) throw FormatError("zero cube dimension", at);
  }
  const auto flag_at = r.offset();
  const auto flag = r.U8("flag");
  if (flag != kFlagRaw && flag != kFlagLogMagnitude) {
    throw FormatError("unknown payload flag " + std::to_string(flag), flag_at);
  }
  const std::uint64_t n = static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
  const std::uint64_t floats = flag == kFlagRaw ? 2 * n : n;
  if (floats > (bytes.size() - r.offset()) / 4) {
    throw FormatError("truncated payload for dimensions " + std::to_string(dims[0]) +
                          "x" + std::to_string(dims[1]) + "x" + std::to_string(dims[2]),
                      r.offset());
  }
  std::vector<float> payload(floats);
  for (auto& v : payload) {
    const auto at = r.offset();
    v = r.F32("payload");
    if (flag == kFlagLogMagnitude && !std::isfinite(v)) {
      throw FormatError("non-finite cube value", at);
    }
  }
  Frame frame;
  if (flag == kFlagRaw) {
    try {
      frame.cube = PreprocessLogMagnitude(dims[0], dims[1], dims[2], payload);
    } catch (const DataError& e) {
      throw FormatError(e.what(), flag_at + 1);
    }
  } else {
    frame.cube = RadCube{dims[0], dims[1], dims[2], std::move(payload)};
  }
  const auto count = r.U16("object count");
  for (std::uint16_t i = 0; i < count; ++i) {
    const auto at = r.offset();
    GroundTruthObject obj;
    obj.class_id = r.U8("object class");
    std::array<double, 6> p{};
    for (auto& v : p) v = r.F32("object box");
    obj.box = Box3D::FromParams(p);
    if (obj.class_id >= kNumClasses) throw FormatError("object class out of range", at);
    if (!IsNormalized(obj.box)) throw FormatError("object box not normalized", at);
    frame.objects.push_back(obj);
  }
  if (!r.AtEnd()) throw FormatError("trailing bytes after objects", r.offset());
  return frame;
}

void SaveFrame(const Frame& frame, const std::filesystem::path& path) {
  const std::string bytes = EncodeFrame(frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Frame LoadFrame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeFrame(bytes);
}

}  // namespace radtr
