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

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bitgate/errors.hpp"
#include "bitgate/quantum_measure.hpp"

namespace bitgate::temporal {

// Inside the bit-mapped window the selector angle must be exactly zero up to
// numerical noise.
inline constexpr double kThetaWindowTol = 1e-12;

/// Interval (ns) over which software and optical bit-mapping are forced to
/// coincide.
struct BitmappedWindow {
  double t_start;
  double t_end;
};

/// Sampled detector efficiencies and basis-selector transition angle over one
/// gate period. Temporal modes are represented by the finite sample grid; all
/// min/max scans below are taken over samples, with no interpolation, so the
/// resulting blinding parameter is an estimate from characterization data.
/// Immutable after construction; operations on it are pure.
class TemporalResponse {
 public:
  TemporalResponse(std::vector<double> t_grid, std::vector<double> eta_a,
                   std::vector<double> eta_b, std::vector<double> theta,
                   BitmappedWindow window)
      : t_grid_(std::move(t_grid)),
        eta_a_(std::move(eta_a)),
        eta_b_(std::move(eta_b)),
        theta_(std::move(theta)),
        window_(window) {
    validate();
  }

  std::size_t size() const { return t_grid_.size(); }
  const std::vector<double>& t_grid() const { return t_grid_; }
  const std::vector<double>& eta_a() const { return eta_a_; }
  const std::vector<double>& eta_b() const { return eta_b_; }
  const std::vector<double>& theta() const { return theta_; }
  const BitmappedWindow& window() const { return window_; }

  bool in_window(double t) const {
    return t >= window_.t_start && t <= window_.t_end;
  }

  double window_center() const { return 0.5 * (window_.t_start + window_.t_end); }

  /// Index of the grid sample closest to t (earlier sample on ties).
  /// t outside [t_grid.front(), t_grid.back()] is a configuration error.
  std::size_t nearest_sample(double t) const {
    if (t < t_grid_.front() || t > t_grid_.back()) {
      throw config_error("time " + std::to_string(t) +
                         " ns outside the sampled gate period");
    }
    const auto it = std::lower_bound(t_grid_.begin(), t_grid_.end(), t);
    if (it == t_grid_.begin()) return 0;
    const std::size_t hi = static_cast<std::size_t>(it - t_grid_.begin());
    if (it == t_grid_.end()) return hi - 1;
    const std::size_t lo = hi - 1;
    return (t - t_grid_[lo] <= t_grid_[hi] - t) ? lo : hi;
  }

  quantum::MeasurementSetting setting_at(std::size_t i) const {
    return {eta_a_.at(i), eta_b_.at(i), theta_.at(i)};
  }

 private:
  void validate() const {
    const std::size_t n = t_grid_.size();
    if (n < 2) {
      throw curve_error(curve_error::kind::too_few_samples,
                        "curve needs at least 2 samples");
    }
    if (eta_a_.size() != n || eta_b_.size() != n || theta_.size() != n) {
      throw curve_error(curve_error::kind::bad_row,
                        "value arrays do not match the time grid length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(t_grid_[i])) {
        throw curve_error(curve_error::kind::value_out_of_range,
                          "non-finite time sample (row " + std::to_string(i + 1) +
                              ")");
      }
      if (i > 0 && !(t_grid_[i] > t_grid_[i - 1])) {
        throw curve_error(curve_error::kind::non_monotone_grid,
                          "t_ns must be strictly increasing (row " +
                              std::to_string(i + 1) + ")");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(eta_a_[i] >= 0.0 && eta_a_[i] <= 1.0) ||
          !(eta_b_[i] >= 0.0 && eta_b_[i] <= 1.0)) {
        throw curve_error(curve_error::kind::value_out_of_range,
                          "efficiency outside [0, 1] at t = " +
                              std::to_string(t_grid_[i]) + " ns");
      }
      if (!(theta_[i] >= 0.0 && theta_[i] <= std::numbers::pi / 2 + 1e-12)) {
        throw curve_error(curve_error::kind::value_out_of_range,
                          "theta outside [0, pi/2] at t = " +
                              std::to_string(t_grid_[i]) + " ns");
      }
    }
    if (!std::isfinite(window_.t_start) || !std::isfinite(window_.t_end) ||
        window_.t_start > window_.t_end ||
        window_.t_start < t_grid_.front() || window_.t_end > t_grid_.back()) {
      throw curve_error(curve_error::kind::window_out_of_bounds,
                        "bit-mapped window outside the sampled gate period");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (in_window(t_grid_[i]) && std::abs(theta_[i]) > kThetaWindowTol) {
        throw curve_error(curve_error::kind::theta_in_window,
                          "theta != 0 inside the bit-mapped window at t = " +
                              std::to_string(t_grid_[i]) + " ns");
      }
    }
  }

  std::vector<double> t_grid_;
  std::vector<double> eta_a_;
  std::vector<double> eta_b_;
  std::vector<double> theta_;
  BitmappedWindow window_;
};

/// Selection of temporal modes: one flag per grid sample.
struct ModeSubset {
  std::vector<bool> mask;

  static ModeSubset all(std::size_t n) { return {std::vector<bool>(n, true)}; }
  static ModeSubset none(std::size_t n) { return {std::vector<bool>(n, false)}; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  }
};

/// Blinding parameter over the selected modes: the minimum efficiency over
/// included samples and both detectors divided by the maximum over the same
/// range. With the all-true subset this is the global parameter; restricted
/// subsets give the certified-mode variant.
inline double blinding_parameter(const TemporalResponse& resp,
                                 const ModeSubset& subset) {
  if (subset.mask.size() != resp.size()) {
    throw std::domain_error("mode subset does not match the sample grid");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < resp.size(); ++i) {
    if (!subset.mask[i]) continue;
    any = true;
    lo = std::min({lo, resp.eta_a()[i], resp.eta_b()[i]});
    hi = std::max({hi, resp.eta_a()[i], resp.eta_b()[i]});
  }
  if (!any) {
    throw std::domain_error("empty mode subset");
  }
  if (hi <= 0.0) {
    throw analysis_error("efficiencies are all zero on the selected modes");
  }
  return lo / hi;
}

/// Modes whose forced minimum error rate (1 - cos theta)/2 lies strictly
/// below the threshold. Threshold must be in (0, 1/2].
inline ModeSubset subset_where_qber_below(const TemporalResponse& resp,
                                          double threshold_e_prime) {
  if (!(threshold_e_prime > 0.0 && threshold_e_prime <= 0.5)) {
    throw std::domain_error("threshold must lie in (0, 1/2]");
  }
  ModeSubset subset = ModeSubset::none(resp.size());
  for (std::size_t i = 0; i < resp.size(); ++i) {
    subset.mask[i] = quantum::qber_min(resp.theta()[i]) < threshold_e_prime;
  }
  return subset;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw curve_error(curve_error::kind::bad_row,
                      "unparsable number '" + std::string(field) + "' on line " +
                          std::to_string(line_no));
  }
  return value;
}

}  // namespace detail

/// Parse a curve file (CSV, header `t_ns,eta_a,eta_b,theta_rad`) into a
/// validated response. The bit-mapped window comes from the run
/// configuration, not the file.
inline TemporalResponse load_response(std::string_view text,
                                      BitmappedWindow window) {
  std::vector<double> t, ea, eb, th;
  std::size_t line_no = 0;
  bool header_seen = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != "t_ns,eta_a,eta_b,theta_rad") {
        throw curve_error(curve_error::kind::bad_header,
                          "expected header 't_ns,eta_a,eta_b,theta_rad'");
      }
      header_seen = true;
      continue;
    }

    std::array<std::string_view, 4> fields;
    std::size_t start = 0, count = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (count == 4) {
          throw curve_error(curve_error::kind::bad_row,
                            "expected 4 fields on line " + std::to_string(line_no));
        }
        fields[count++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (count != 4) {
      throw curve_error(curve_error::kind::bad_row,
                        "expected 4 fields on line " + std::to_string(line_no));
    }
    t.push_back(detail::parse_field(fields[0], line_no));
    ea.push_back(detail::parse_field(fields[1], line_no));
    eb.push_back(detail::parse_field(fields[2], line_no));
    th.push_back(detail::parse_field(fields[3], line_no));
  }

  if (!header_seen) {
    throw curve_error(curve_error::kind::bad_header, "empty curve file");
  }
  return TemporalResponse(std::move(t), std::move(ea), std::move(eb),
                          std::move(th), window);
}

inline TemporalResponse load_response_file(const std::filesystem::path& path,
                                           BitmappedWindow window) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open curve file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_response(buf.str(), window);
}

}  // namespace bitgate::temporal
