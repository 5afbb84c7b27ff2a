// Copyright 2026 The semigrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Batch runner behind the `semigrav` executable: one JSON scenario file per
// run, a manifest echoing every resolved parameter, and CSV/JSON artifacts.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace semigrav::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kConfigError = 2,
  kDomainError = 3,
  kInvariantViolation = 4,
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Reads mode parameters and records every key it hands out together with
/// the value actually used (explicit or default). Physical quantities must
/// carry a `_si` or `_internal` suffix.
class ParamReader {
 public:
  explicit ParamReader(nlohmann::json params);

  double quantity(const std::string& key, double fallback);
  double positive_quantity(const std::string& key, double fallback);
  std::vector<double> quantities(const std::string& key,
                                 std::vector<double> fallback);
  std::size_t count(const std::string& key, std::size_t fallback);
  std::vector<std::size_t> counts(const std::string& key,
                                  std::vector<std::size_t> fallback);
  std::string text(const std::string& key, const std::string& fallback);
  bool flag(const std::string& key, bool fallback);

  /// Throws ConfigError naming keys that no mode consumed.
  void finish() const;

  const nlohmann::json& resolved() const { return resolved_; }
  std::vector<std::string> consumed() const;

 private:
  const nlohmann::json* find(const std::string& key);
  void require_unit_suffix(const std::string& key) const;
  template <class T>
  T record(const std::string& key, T value);

  nlohmann::json params_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool quiet = false;
};

struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::vector<std::string> consumed_keys;
  std::filesystem::path manifest;
};

inline const std::vector<std::string>& modes() {
  static const std::vector<std::string> names{
      "pld-scan", "simulate", "ensemble-check",
      "rates",    "csl-curve", "noise-scaling"};
  return names;
}

/// Loads the scenario, dispatches to the mode and writes artifacts plus
/// manifest.json into out_dir. Never throws; errors map to ExitCode values
/// and a message. Progress goes to `log` unless quiet.
RunResult run(const RunOptions& options, std::ostream& log);

/// Prints the SI constants table with sources.
void print_constants(std::ostream& out);

/// SHA-1 of "blob <size>\0" + content, as git computes object ids.
std::string git_blob_sha1(std::string_view content);

}  // namespace semigrav::cli
