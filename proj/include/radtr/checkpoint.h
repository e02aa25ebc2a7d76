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

// Binary training checkpoints: parameters, optimizer moments, step counter
// and the configuration that produced them.

#ifndef RADTR_CHECKPOINT_H_
#define RADTR_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "radtr/tensor.h"

namespace radtr {

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<double> values;
  // Empty before the first optimizer step.
  std::vector<double> first_moment;
  std::vector<double> second_moment;

  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

struct Checkpoint {
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::int64_t step = 0;
  std::vector<CheckpointEntry> entries;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Little-endian "RDCK" container, version 1.
std::string EncodeCheckpoint(const Checkpoint& checkpoint);
// Throws FormatError with the byte offset of the first problem.
Checkpoint DecodeCheckpoint(std::string_view bytes);

// Throw DataError when the file cannot be written or read.
void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace radtr

#endif  // RADTR_CHECKPOINT_H_
