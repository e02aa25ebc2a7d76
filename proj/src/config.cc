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

#include "radtr/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "radtr/errors.h"
#include "radtr/optimizer.h"

namespace radtr {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("malformed number '" + std::string(s) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("non-finite number '" + std::string(s) + "'");
  }
  return value;
}

bool ParseBool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("malformed boolean '" + std::string(s) + "'");
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field Number(const char* key, T TrainConfig::*member) {
  return {key, [member](TrainConfig& c, std::string_view v) { c.*member = ParseNumber<T>(v); },
          [member](const TrainConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return FormatDouble(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <typename T>
Field Nested(const char* key, std::function<T&(TrainConfig&)> ref) {
  return {key, [ref](TrainConfig& c, std::string_view v) { ref(c) = ParseNumber<T>(v); },
          [ref](const TrainConfig& c) {
            const T value = ref(const_cast<TrainConfig&>(c));
            if constexpr (std::is_floating_point_v<T>) return FormatDouble(value);
            else return std::to_string(value);
          }};
}

Field Text(const char* key, std::string TrainConfig::*member) {
  return {key, [member](TrainConfig& c, std::string_view v) { c.*member = std::string(v); },
          [member](const TrainConfig& c) { return c.*member; }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    // Cube dimensions drive both the generator and the backbone.
    f.push_back({"range",
                 [](TrainConfig& c, std::string_view v) {
                   c.model.backbone.range = c.scene.range = ParseNumber<std::int64_t>(v);
                 },
                 [](const TrainConfig& c) { return std::to_string(c.model.backbone.range); }});
    f.push_back({"azimuth",
                 [](TrainConfig& c, std::string_view v) {
                   c.model.backbone.azimuth = c.scene.azimuth = ParseNumber<std::int64_t>(v);
                 },
                 [](const TrainConfig& c) { return std::to_string(c.model.backbone.azimuth); }});
    f.push_back({"doppler",
                 [](TrainConfig& c, std::string_view v) {
                   c.model.backbone.doppler = c.scene.doppler = ParseNumber<std::int64_t>(v);
                 },
                 [](const TrainConfig& c) { return std::to_string(c.model.backbone.doppler); }});
    f.push_back(Nested<std::int64_t>("first_stride", [](TrainConfig& c) -> std::int64_t& {
      return c.model.backbone.first_stride;
    }));
    f.push_back({"channels",
                 [](TrainConfig& c, std::string_view v) {
                   std::vector<std::int64_t> channels;
                   while (!v.empty()) {
                     const auto comma = v.find(',');
                     channels.push_back(ParseNumber<std::int64_t>(Trim(v.substr(0, comma))));
                     v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
                   }
                   c.model.backbone.channels = std::move(channels);
                 },
                 [](const TrainConfig& c) {
                   std::string s;
                   for (auto ch : c.model.backbone.channels) {
                     s += (s.empty() ? "" : ",") + std::to_string(ch);
                   }
                   return s;
                 }});
    f.push_back(Nested<std::int64_t>("d_model", [](TrainConfig& c) -> std::int64_t& { return c.model.d_model; }));
    f.push_back(Nested<int>("heads", [](TrainConfig& c) -> int& { return c.model.heads; }));
    f.push_back(Nested<int>("layers", [](TrainConfig& c) -> int& { return c.model.layers; }));
    f.push_back(Nested<std::int64_t>("queries", [](TrainConfig& c) -> std::int64_t& { return c.model.queries; }));
    f.push_back(Nested<std::int64_t>("ffn_dim", [](TrainConfig& c) -> std::int64_t& { return c.model.ffn_dim; }));
    f.push_back(Nested<double>("tpe_alpha", [](TrainConfig& c) -> double& { return c.model.tpe_alpha; }));
    f.push_back(Nested<std::int64_t>("d_pos", [](TrainConfig& c) -> std::int64_t& { return c.model.d_pos; }));
    f.push_back(Nested<double>("beta_rad", [](TrainConfig& c) -> double& { return c.loss.weights.rad; }));
    f.push_back(Nested<double>("beta_ra", [](TrainConfig& c) -> double& { return c.loss.weights.ra; }));
    f.push_back(Nested<double>("beta_rd", [](TrainConfig& c) -> double& { return c.loss.weights.rd; }));
    f.push_back(Nested<double>("beta_cls", [](TrainConfig& c) -> double& { return c.loss.weights.cls; }));
    f.push_back(Nested<double>("beta_giou", [](TrainConfig& c) -> double& { return c.loss.weights.giou; }));
    f.push_back(Nested<double>("beta_l1", [](TrainConfig& c) -> double& { return c.loss.weights.l1; }));
    f.push_back(Nested<double>("focal_gamma", [](TrainConfig& c) -> double& { return c.loss.focal.gamma; }));
    f.push_back({"focal_alpha",
                 [](TrainConfig& c, std::string_view v) {
                   const double a = ParseNumber<double>(v);
                   for (std::size_t i = 0; i + 1 < c.loss.focal.alpha.size(); ++i) c.loss.focal.alpha[i] = a;
                 },
                 [](const TrainConfig& c) { return FormatDouble(c.loss.focal.alpha.front()); }});
    f.push_back(Nested<double>("focal_alpha_background",
                               [](TrainConfig& c) -> double& { return c.loss.focal.alpha.back(); }));
    f.push_back({"deep_supervision",
                 [](TrainConfig& c, std::string_view v) { c.loss.deep_supervision = ParseBool(v); },
                 [](const TrainConfig& c) {
                   return std::string(c.loss.deep_supervision ? "true" : "false");
                 }});
    f.push_back(Nested<int>("min_objects", [](TrainConfig& c) -> int& { return c.scene.min_objects; }));
    f.push_back(Nested<int>("max_objects", [](TrainConfig& c) -> int& { return c.scene.max_objects; }));
    f.push_back(Nested<double>("noise_floor", [](TrainConfig& c) -> double& { return c.scene.noise_floor; }));
    f.push_back(Number("epochs", &TrainConfig::epochs));
    f.push_back(Number("batch_size", &TrainConfig::batch_size));
    f.push_back(Number("learning_rate", &TrainConfig::learning_rate));
    f.push_back(Number("weight_decay", &TrainConfig::weight_decay));
    f.push_back(Number("grad_clip", &TrainConfig::grad_clip));
    f.push_back(Number("seed", &TrainConfig::seed));
    f.push_back(Text("train_data", &TrainConfig::train_data));
    f.push_back(Number("train_frames", &TrainConfig::train_frames));
    f.push_back(Text("heldout_data", &TrainConfig::heldout_data));
    f.push_back(Number("heldout_frames", &TrainConfig::heldout_frames));
    f.push_back(Number("data_seed", &TrainConfig::data_seed));
    f.push_back(Number("eval_every", &TrainConfig::eval_every));
    f.push_back(Number("score_floor", &TrainConfig::score_floor));
    return f;
  }();
  return fields;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& c) {
  if (c.epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (c.batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(c.grad_clip >= 0.0)) throw ConfigError("grad_clip must be nonnegative");
  if (c.train_data.empty() && c.train_frames <= 0) {
    throw ConfigError("train_frames must be positive without train_data");
  }
  if (c.heldout_frames < 0) throw ConfigError("heldout_frames must be nonnegative");
  if (c.eval_every < 0) throw ConfigError("eval_every must be nonnegative");
  if (!(c.score_floor >= 0.0 && c.score_floor <= 1.0)) {
    throw ConfigError("score_floor must lie in [0, 1]");
  }
  AdamWConfig adam;
  adam.learning_rate = c.learning_rate;
  adam.weight_decay = c.weight_decay;
  ValidateAdamW(adam);
  try {
    ValidateLossWeights(c.loss.weights);
    ValidateFocalParams(c.loss.focal, kNumClasses);
    ValidateSceneSpec(c.scene);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const SpecError& e) {
    throw ConfigError(e.what());
  }
  if (c.scene.max_objects > c.model.queries) {
    throw ConfigError("max_objects exceeds the number of queries");
  }
  MakeDecoderConfig(c.model);
  PyramidSizes(c.model.backbone);
}

TrainConfig ParseConfig(std::string_view text) {
  TrainConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : Fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where + "repeated key '" + std::string(key) + "'");
    }
    try {
      field->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + std::string(key) + ": " + e.what());
    }
  }
  ValidateTrainConfig(config);
  return config;
}

TrainConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string SerializeConfig(const TrainConfig& config) {
  std::string out;
  for (const auto& f : Fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

std::uint64_t ConfigHash(const TrainConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : SerializeConfig(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace radtr
