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

#include "radtr/checkpoint.h"

#include <cmath>
#include <fstream>
#include <iterator>

#include "byte_io.h"
#include "radtr/errors.h"

namespace radtr {
namespace {

using internal::Reader;
using internal::Writer;

constexpr char kMagic[4] = {'R', 'D', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void WriteString(Writer& w, std::string_view s) {
  w.U32(static_cast<std::uint32_t>(s.size()));
  w.Bytes(s.data(), s.size());
}

void WriteDoubles(Writer& w, const std::vector<double>& v) {
  w.U64(v.size());
  for (double x : v) w.F64(x);
}

std::vector<double> ReadDoubles(Reader& r, const char* what) {
  const std::uint64_t offset = r.offset();
  const std::uint64_t n = r.U64(what);
  r.Need(n > (1ull << 40) ? ~std::size_t{0} : n * 8, what);
  std::vector<double> v(n);
  for (double& x : v) {
    x = r.F64(what);
    if (!std::isfinite(x)) throw FormatError(std::string("non-finite ") + what, offset);
  }
  return v;
}

}  // namespace

std::string EncodeCheckpoint(const Checkpoint& c) {
  Writer w;
  w.Bytes(kMagic, 4);
  w.U32(kVersion);
  w.U64(c.config_hash);
  w.U64(static_cast<std::uint64_t>(c.step));
  WriteString(w, c.config_text);
  w.U32(static_cast<std::uint32_t>(c.entries.size()));
  for (const auto& e : c.entries) {
    WriteString(w, e.name);
    w.U32(static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) w.U64(static_cast<std::uint64_t>(d));
    WriteDoubles(w, e.values);
    WriteDoubles(w, e.first_moment);
    WriteDoubles(w, e.second_moment);
  }
  return w.Take();
}

Checkpoint DecodeCheckpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.Take(4, "magic") != std::string_view(kMagic, 4)) {
    throw FormatError("not a checkpoint (bad magic)", 0);
  }
  if (const auto offset = r.offset(); r.U32("version") != kVersion) {
    throw FormatError("unsupported checkpoint version", offset);
  }
  Checkpoint c;
  c.config_hash = r.U64("config hash");
  c.step = static_cast<std::int64_t>(r.U64("step"));
  c.config_text = std::string(r.Take(r.U32("config length"), "config"));
  const std::uint32_t count = r.U32("entry count");
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto offset = r.offset();
    e.name = std::string(r.Take(r.U32("name length"), "name"));
    const std::uint32_t rank = r.U32("rank");
    for (std::uint32_t k = 0; k < rank; ++k) {
      e.shape.push_back(static_cast<std::int64_t>(r.U64("shape")));
    }
    e.values = ReadDoubles(r, "values");
    e.first_moment = ReadDoubles(r, "first moment");
    e.second_moment = ReadDoubles(r, "second moment");
    const auto n = static_cast<std::size_t>(NumElements(e.shape));
    if (e.values.size() != n || (!e.first_moment.empty() && e.first_moment.size() != n) ||
        e.second_moment.size() != e.first_moment.size()) {
      throw FormatError("entry " + e.name + " has inconsistent sizes", offset);
    }
    c.entries.push_back(std::move(e));
  }
  if (!r.AtEnd()) throw FormatError("trailing bytes", r.offset());
  return c;
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = EncodeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes);
}

}  // namespace radtr
