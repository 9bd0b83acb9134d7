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
#include <cstdint>
#include <limits>

#include "bitgate/errors.hpp"
#include "bitgate/protocol_engine.hpp"

namespace bitgate::monitor {

/// Calibrated-source self-test configuration. A faint Poissonian pulse of
/// mean photon number mu is fired into the detectors at secret random gates
/// (each gate is a test gate with probability p_test); a detector that stops
/// clicking on them is flagged at significance alpha.
struct MonitorConfig {
  double mu = 1.0;
  double p_test = 0.01;
  double alpha = 1e-6;
  double eta_expected = 0.1;  // in-gate efficiency seen by the test pulse
};

inline void validate(const MonitorConfig& cfg) {
  if (!(cfg.mu > 0.0)) throw config_error("mu must be positive");
  if (!(cfg.p_test >= 0.0 && cfg.p_test < 1.0)) {
    throw config_error("p_test must lie in [0, 1)");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw config_error("alpha must lie in (0, 1)");
  }
  if (!(cfg.eta_expected > 0.0 && cfg.eta_expected <= 1.0)) {
    throw config_error("eta_expected must lie in (0, 1]");
  }
}

/// Probability a Poissonian pulse of mean mu causes a click on a detector of
/// efficiency eta: 1 - exp(-mu eta).
inline double click_probability(double mu, double eta) {
  if (!(mu > 0.0)) throw std::domain_error("mu must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("efficiency outside [0, 1]");
  }
  return -std::expm1(-mu * eta);
}

/// Smallest K such that K consecutive test-pulse non-detections reject
/// "single-photon sensitive" at level alpha: (1 - q)^K <= alpha with
/// q = click_probability(mu, eta).
inline std::uint64_t required_test_pulses(double mu, double eta, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::domain_error("alpha must lie in (0, 1]");
  }
  if (click_probability(mu, eta) <= 0.0) {
    throw analysis_error("test pulse cannot certify: click probability is zero");
  }
  if (alpha >= 1.0) return 0;  // degenerate level, flags immediately

  const double log_miss = -mu * eta;  // log(1 - q)
  auto k = static_cast<std::uint64_t>(
      std::ceil(std::log(alpha) / log_miss));
  while (k > 0 && std::exp(static_cast<double>(k - 1) * log_miss) <= alpha) --k;
  while (std::exp(static_cast<double>(k) * log_miss) > alpha) ++k;
  return k;
}

inline std::uint64_t required_test_pulses(const MonitorConfig& cfg) {
  return required_test_pulses(cfg.mu, cfg.eta_expected, cfg.alpha);
}

/// Binary sensitivity state per detector; blind means zero click probability
/// for faint pulses.
struct DetectorSensitivityState {
  bool a_sensitive = true;
  bool b_sensitive = true;

  static DetectorSensitivityState under(const protocol::AttackStrategy& s) {
    const bool blinding = s.tag == protocol::AttackStrategy::Tag::blinding;
    return {!(blinding && s.blind_a), !(blinding && s.blind_b)};
  }
};

enum class Verdict : std::uint8_t { sensitive, blind, unknown };

inline constexpr std::uint64_t kNoFlag = std::numeric_limits<std::uint64_t>::max();

struct MonitorResult {
  Verdict verdict = Verdict::unknown;
  bool flagged_a = false;
  bool flagged_b = false;
  std::uint64_t first_flag_gate = kNoFlag;
  std::uint64_t n_gates = 0;
  std::uint64_t n_test_gates = 0;
  std::uint64_t n_test_clicks_a = 0;
  std::uint64_t n_test_clicks_b = 0;
  std::uint64_t required_streak = 0;  // K
  std::uint64_t max_streak_a = 0;
  std::uint64_t max_streak_b = 0;
  std::uint64_t seed = 0;
  protocol::SimResult key_result;  // accumulated over non-test gates only
};

namespace detail {
// Test-gate decisions use a salted stream so they stay independent of the
// per-gate protocol streams (and invisible to the attack strategies).
inline constexpr std::uint64_t kMonitorSalt = 0x5bd1e995c3a94ull;
}  // namespace detail

/// Interleave calibrated test pulses with protocol gates. Test-gate outcomes
/// feed only the streak statistics and never the key counts; a detector
/// reaching K consecutive misses is flagged blind.
inline MonitorResult run_monitor(const temporal::TemporalResponse& resp,
                                 const protocol::AttackStrategy& strat,
                                 const MonitorConfig& cfg,
                                 const protocol::EngineConfig& engine) {
  validate(cfg);
  protocol::detail::validate_config(engine);
  const protocol::detail::Precomp pre = protocol::detail::precompute(resp, strat);

  const std::uint64_t k = required_test_pulses(cfg);
  const double q = click_probability(cfg.mu, cfg.eta_expected);
  const DetectorSensitivityState sens = DetectorSensitivityState::under(strat);

  MonitorResult out;
  out.required_streak = k;
  out.seed = engine.seed;
  out.n_gates = engine.n_gates;

  protocol::detail::Counters key_counts(resp.size());
  std::uint64_t streak_a = 0, streak_b = 0;

  for (std::uint64_t i = 0; i < engine.n_gates; ++i) {
    SplitMix64 m = SplitMix64::keyed(engine.seed ^ detail::kMonitorSalt, i);
    if (cfg.p_test > 0.0 && m.bernoulli(cfg.p_test)) {
      ++out.n_test_gates;
      const bool click_a = sens.a_sensitive && m.bernoulli(q);
      const bool click_b = sens.b_sensitive && m.bernoulli(q);
      out.n_test_clicks_a += click_a ? 1 : 0;
      out.n_test_clicks_b += click_b ? 1 : 0;
      streak_a = click_a ? 0 : streak_a + 1;
      streak_b = click_b ? 0 : streak_b + 1;
      out.max_streak_a = std::max(out.max_streak_a, streak_a);
      out.max_streak_b = std::max(out.max_streak_b, streak_b);

      const bool flag_a = streak_a >= k && k > 0;
      const bool flag_b = streak_b >= k && k > 0;
      if ((flag_a || flag_b) && out.first_flag_gate == kNoFlag) {
        out.first_flag_gate = i;
      }
      out.flagged_a = out.flagged_a || flag_a;
      out.flagged_b = out.flagged_b || flag_b;
    } else {
      protocol::detail::simulate_gate(resp, strat, pre, engine, i, key_counts,
                                      nullptr);
    }
  }

  out.key_result.n_gates = key_counts.n_gates;
  out.key_result.n_detected = key_counts.n_detected;
  out.key_result.n_sifted = key_counts.n_sifted;
  out.key_result.n_errors = key_counts.n_errors;
  out.key_result.n_double_clicks = key_counts.n_double_clicks;
  out.key_result.seed = engine.seed;
  out.key_result.histogram = std::move(key_counts.histogram);
  out.key_result.histogram_t = resp.t_grid();
  if (out.key_result.n_sifted > 0) {
    out.key_result.empirical_qber =
        static_cast<double>(out.key_result.n_errors) /
        static_cast<double>(out.key_result.n_sifted);
    out.key_result.qber_stderr = std::sqrt(
        out.key_result.empirical_qber * (1.0 - out.key_result.empirical_qber) /
        static_cast<double>(out.key_result.n_sifted));
  }

  if (out.flagged_a || out.flagged_b) {
    out.verdict = Verdict::blind;
  } else if (out.n_test_gates > 0) {
    out.verdict = Verdict::sensitive;
  } else {
    out.verdict = Verdict::unknown;  // monitor inert without test pulses
  }
  return out;
}

struct FalseAlarmStats {
  std::uint64_t n_pulses = 0;
  std::uint64_t k = 0;
  std::uint64_t windows = 0;  // decision windows per detector
  std::uint64_t alarms_a = 0; // disjoint runs of k consecutive misses
  std::uint64_t alarms_b = 0;
  double alarm_rate = 0.0;    // (alarms_a + alarms_b) / (2 windows)
  std::uint64_t seed = 0;
};

/// Simulate only the test-pulse stream of an honest (sensitive) detector pair
/// and count false blind-flags. Used to budget the monitor's false-alarm rate
/// over large pulse counts without simulating the interleaved protocol gates.
inline FalseAlarmStats false_alarm_stats(const MonitorConfig& cfg,
                                         std::uint64_t n_pulses,
                                         std::uint64_t seed) {
  validate(cfg);
  FalseAlarmStats out;
  out.n_pulses = n_pulses;
  out.k = required_test_pulses(cfg);
  out.seed = seed;
  out.windows = (n_pulses >= out.k && out.k > 0) ? n_pulses - out.k + 1 : 0;

  const double q = click_probability(cfg.mu, cfg.eta_expected);
  SplitMix64 g = SplitMix64::keyed(seed, detail::kMonitorSalt);
  std::uint64_t streak_a = 0, streak_b = 0;
  for (std::uint64_t i = 0; i < n_pulses; ++i) {
    streak_a = g.bernoulli(q) ? 0 : streak_a + 1;
    streak_b = g.bernoulli(q) ? 0 : streak_b + 1;
    if (streak_a >= out.k) {
      ++out.alarms_a;
      streak_a = 0;
    }
    if (streak_b >= out.k) {
      ++out.alarms_b;
      streak_b = 0;
    }
  }
  if (out.windows > 0) {
    out.alarm_rate = static_cast<double>(out.alarms_a + out.alarms_b) /
                     (2.0 * static_cast<double>(out.windows));
  }
  return out;
}

}  // namespace bitgate::monitor
