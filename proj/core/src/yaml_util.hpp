// Copyright 2026 The hima-sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small helpers shared by the YAML loaders. Private to the core library.
#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "hima/error.hpp"

namespace hima::yaml {

inline void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed) {
  if (!node.IsMap())
    throw Error(Errc::kConfigError, fmt::format("line {}: expected a mapping", node.Mark().line + 1));
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (ok.count(key) == 0)
      throw Error(Errc::kConfigError,
                  fmt::format("line {}: unknown key '{}'", kv.first.Mark().line + 1, key));
  }
}

template <typename T>
void get(const YAML::Node& node, const char* key, T& out) {
  if (const auto v = node[key]) out = v.as<T>();
}

template <typename T>
T require(const YAML::Node& node, const char* key) {
  const auto v = node[key];
  if (!v)
    throw Error(Errc::kConfigError,
                fmt::format("line {}: missing key '{}'", node.Mark().line + 1, key));
  return v.as<T>();
}

inline std::vector<YAML::Node> seq(const YAML::Node& node, const char* key) {
  std::vector<YAML::Node> out;
  const auto v = node[key];
  if (!v) return out;
  if (!v.IsSequence())
    throw Error(Errc::kConfigError,
                fmt::format("line {}: '{}' must be a list", v.Mark().line + 1, key));
  for (const auto& item : v) out.push_back(item);
  return out;
}

/// Runs `fn`, turning yaml-cpp exceptions into ConfigError.
template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const YAML::Exception& e) {
    throw Error(Errc::kConfigError, e.what());
  }
}

}  // namespace hima::yaml
