// Copyright 2026 The bitgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bitgate {

/// Invalid run configuration or parameter combination.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (missing file, unwritable output, ...).
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs are well-formed but the requested quantity is undefined for them
/// (no certifiable modes, all-zero efficiencies, uncertifiable test pulse).
class analysis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Detector curve file rejected during parse or validation.
class curve_error : public config_error {
 public:
  enum class kind {
    bad_header,
    bad_row,
    too_few_samples,
    non_monotone_grid,
    value_out_of_range,
    theta_in_window,
    window_out_of_bounds,
  };

  curve_error(kind k, const std::string& what) : config_error(what), kind_(k) {}

  kind which() const noexcept { return kind_; }

 private:
  kind kind_;
};

// Process exit codes used by the CLI.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int analysis = 4;
}  // namespace exit_code

}  // namespace bitgate
