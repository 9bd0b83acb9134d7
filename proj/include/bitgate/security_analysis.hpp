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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bitgate/errors.hpp"
#include "bitgate/temporal_model.hpp"

namespace bitgate::security {

/// Binary Shannon entropy in bits, with h(0) = h(1) = 0 by continuity.
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("probability outside [0, 1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Key rate -h(E) + eta (1 - h(E)) from the global blinding parameter,
/// clamped at zero.
inline double rate_unpatched(double qber, double eta) {
  if (!(qber >= 0.0 && qber <= 0.5)) {
    throw std::domain_error("error rate outside [0, 1/2]");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("blinding parameter outside [0, 1]");
  }
  const double h = binary_entropy(qber);
  return std::max(0.0, -h + eta * (1.0 - h));
}

/// Fraction of detections certified to lie in the modes below the threshold:
/// (E' - E) / E', clamped to 0 when E >= E'.
inline double in_gate_fraction(double qber, double e_prime) {
  if (!(e_prime > 0.0 && e_prime <= 0.5)) {
    throw std::domain_error("threshold must lie in (0, 1/2]");
  }
  if (!(qber >= 0.0 && qber <= 1.0)) {
    throw std::domain_error("error rate outside [0, 1]");
  }
  return std::max(0.0, (e_prime - qber) / e_prime);
}

/// Key rate -h(E) + f eta' (1 - h(E)) with the certified fraction and the
/// restricted blinding parameter, clamped at zero.
inline double rate_patched(double qber, double fraction, double eta_restricted) {
  if (!(qber >= 0.0 && qber <= 0.5)) {
    throw std::domain_error("error rate outside [0, 1/2]");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::domain_error("certified fraction outside [0, 1]");
  }
  if (!(eta_restricted >= 0.0 && eta_restricted <= 1.0)) {
    throw std::domain_error("blinding parameter outside [0, 1]");
  }
  const double h = binary_entropy(qber);
  return std::max(0.0, -h + fraction * eta_restricted * (1.0 - h));
}

/// Worst-case mode coupling: a fraction delta of certified detections may
/// have hit the detector outside the gate, so f -> f (1 - delta).
inline double apply_mode_coupling(double fraction, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::domain_error("mode coupling outside [0, 1]");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::domain_error("certified fraction outside [0, 1]");
  }
  return fraction * (1.0 - delta);
}

/// All security quantities for one (E, E') choice. `e_stderr` carries the
/// binomial standard error of a simulated E; it is reported but not
/// propagated into the rates, which are asymptotic.
struct SecurityReport {
  double e = 0.0;
  double e_prime = 0.0;
  double f = 0.0;
  double eta_global = 0.0;
  double eta_restricted = 0.0;
  double delta = 0.0;
  double f_adjusted = 0.0;
  double effective_blinding = 0.0;
  double rate_unpatched = 0.0;
  double rate_patched = 0.0;
  std::string e_source = "supplied";  // "supplied" | "simulated"
  std::optional<double> e_stderr;
};

/// One row of the threshold scan used to pick E'.
struct ThresholdScanRow {
  double e_prime = 0.0;
  double f = 0.0;
  double eta_restricted = 0.0;
  double objective = 0.0;  // f (1 - delta) eta_restricted
};

inline SecurityReport make_report(const temporal::TemporalResponse& resp,
                                  double qber, double e_prime, double delta,
                                  std::string e_source = "supplied",
                                  std::optional<double> e_stderr = std::nullopt) {
  const auto subset = temporal::subset_where_qber_below(resp, e_prime);
  if (subset.count() == 0) {
    throw analysis_error("no certifiable modes below threshold " +
                         std::to_string(e_prime));
  }
  SecurityReport r;
  r.e = qber;
  r.e_prime = e_prime;
  r.delta = delta;
  r.eta_global = temporal::blinding_parameter(resp, temporal::ModeSubset::all(resp.size()));
  r.eta_restricted = temporal::blinding_parameter(resp, subset);
  r.f = in_gate_fraction(qber, e_prime);
  r.f_adjusted = apply_mode_coupling(r.f, delta);
  r.effective_blinding = r.f_adjusted * r.eta_restricted;
  r.rate_unpatched = rate_unpatched(qber, r.eta_global);
  r.rate_patched = rate_patched(qber, r.f_adjusted, r.eta_restricted);
  r.e_source = std::move(e_source);
  r.e_stderr = e_stderr;
  return r;
}

struct OptimizeResult {
  double best_e_prime = 0.0;
  SecurityReport report;
  std::vector<ThresholdScanRow> scan;  // grid points with a non-empty subset
};

/// Scan the threshold grid and pick the E' maximizing f (1 - delta) eta',
/// tie-broken toward the smallest E'. Grid points whose subset is empty (or
/// has all-zero efficiency) cannot certify anything and are dropped from the
/// scan; if that happens for every point the analysis fails.
inline OptimizeResult optimize_threshold(const temporal::TemporalResponse& resp,
                                         double qber,
                                         const std::vector<double>& e_prime_grid,
                                         double delta,
                                         std::string e_source = "supplied",
                                         std::optional<double> e_stderr = std::nullopt) {
  if (e_prime_grid.empty()) {
    throw analysis_error("empty threshold grid");
  }
  if (!(qber >= 0.0 && qber <= 0.5)) {
    throw std::domain_error("error rate outside [0, 1/2]");
  }

  std::vector<double> grid = e_prime_grid;
  std::sort(grid.begin(), grid.end());

  OptimizeResult out;
  bool found = false;
  double best_objective = -1.0;
  for (double e_prime : grid) {
    const auto subset = temporal::subset_where_qber_below(resp, e_prime);
    if (subset.count() == 0) continue;
    double eta_restricted;
    try {
      eta_restricted = temporal::blinding_parameter(resp, subset);
    } catch (const analysis_error&) {
      continue;  // zero efficiency everywhere below this threshold
    }
    ThresholdScanRow row;
    row.e_prime = e_prime;
    row.f = in_gate_fraction(qber, e_prime);
    row.eta_restricted = eta_restricted;
    row.objective = apply_mode_coupling(row.f, delta) * eta_restricted;
    out.scan.push_back(row);
    if (!found || row.objective > best_objective) {
      found = true;
      best_objective = row.objective;
      out.best_e_prime = e_prime;
    }
  }
  if (!found) {
    throw analysis_error("no certifiable modes for any threshold in the grid");
  }
  out.report = make_report(resp, qber, out.best_e_prime, delta,
                           std::move(e_source), e_stderr);
  return out;
}

/// Default threshold grid: step 0.01 over (0, 0.5].
inline std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(i * 0.01);
  return grid;
}

}  // namespace bitgate::security
