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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitgate/blindness_monitor.hpp"
#include "bitgate/errors.hpp"
#include "bitgate/multiphoton_oracle.hpp"
#include "bitgate/protocol_engine.hpp"
#include "bitgate/security_analysis.hpp"
#include "bitgate/temporal_model.hpp"

namespace bitgate {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw io_error("cannot open file for writing: " + path.string());
  }
  out << content;
  if (!out) {
    throw io_error("write failed: " + path.string());
  }
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("invalid JSON in " + origin + ": " + e.what());
  }
}

/// Shortest representation that round-trips a double through strtod.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace bitgate

// ---------------------------------------------------------------------------
// JSON mappings (ADL hooks live next to their types' namespaces)
// ---------------------------------------------------------------------------

namespace bitgate::protocol {

inline const char* to_string(AttackStrategy::Tag tag) {
  switch (tag) {
    case AttackStrategy::Tag::honest: return "honest";
    case AttackStrategy::Tag::time_shift: return "time_shift";
    case AttackStrategy::Tag::after_gate: return "after_gate";
    case AttackStrategy::Tag::optimal_state: return "optimal_state";
    case AttackStrategy::Tag::blinding: return "blinding";
  }
  return "honest";
}

inline void to_json(json& j, const AttackStrategy& s) {
  j = json{{"tag", to_string(s.tag)}};
  switch (s.tag) {
    case AttackStrategy::Tag::honest:
      if (s.arrival_time) j["time"] = *s.arrival_time;
      break;
    case AttackStrategy::Tag::time_shift:
      j["t_early"] = s.t_early;
      j["t_late"] = s.t_late;
      j["selection"] =
          s.rule == AttackStrategy::TimeShiftRule::by_bit ? "by_bit" : "random";
      break;
    case AttackStrategy::Tag::after_gate:
      j["t_outside"] = s.t_outside;
      break;
    case AttackStrategy::Tag::optimal_state:
      j["times"] = s.times;
      break;
    case AttackStrategy::Tag::blinding:
      j["blind_a"] = s.blind_a;
      j["blind_b"] = s.blind_b;
      break;
  }
}

inline void from_json(const json& j, AttackStrategy& s) {
  const std::string tag = j.at("tag").get<std::string>();
  s = AttackStrategy{};
  if (tag == "honest") {
    s.tag = AttackStrategy::Tag::honest;
    if (j.contains("time")) s.arrival_time = j.at("time").get<double>();
  } else if (tag == "time_shift") {
    s.tag = AttackStrategy::Tag::time_shift;
    s.t_early = j.at("t_early").get<double>();
    s.t_late = j.at("t_late").get<double>();
    const std::string rule = j.value("selection", "by_bit");
    if (rule == "by_bit") {
      s.rule = AttackStrategy::TimeShiftRule::by_bit;
    } else if (rule == "random") {
      s.rule = AttackStrategy::TimeShiftRule::random;
    } else {
      throw config_error("unknown time_shift selection rule: " + rule);
    }
  } else if (tag == "after_gate") {
    s.tag = AttackStrategy::Tag::after_gate;
    s.t_outside = j.at("t_outside").get<double>();
  } else if (tag == "optimal_state") {
    s.tag = AttackStrategy::Tag::optimal_state;
    s.times = j.at("times").get<std::vector<double>>();
  } else if (tag == "blinding") {
    s.tag = AttackStrategy::Tag::blinding;
    s.blind_a = j.value("blind_a", true);
    s.blind_b = j.value("blind_b", true);
  } else {
    throw config_error("unknown strategy tag: " + tag);
  }
}

inline void to_json(json& j, const SimResult& r) {
  j = json{{"n_gates", r.n_gates},
           {"n_detected", r.n_detected},
           {"n_sifted", r.n_sifted},
           {"n_errors", r.n_errors},
           {"n_double_clicks", r.n_double_clicks},
           {"seed", r.seed},
           {"empirical_qber", r.empirical_qber},
           {"qber_stderr", r.qber_stderr},
           {"histogram_t", r.histogram_t},
           {"histogram", r.histogram}};
}

inline void from_json(const json& j, SimResult& r) {
  j.at("n_gates").get_to(r.n_gates);
  j.at("n_detected").get_to(r.n_detected);
  j.at("n_sifted").get_to(r.n_sifted);
  j.at("n_errors").get_to(r.n_errors);
  j.at("n_double_clicks").get_to(r.n_double_clicks);
  j.at("seed").get_to(r.seed);
  j.at("empirical_qber").get_to(r.empirical_qber);
  j.at("qber_stderr").get_to(r.qber_stderr);
  j.at("histogram_t").get_to(r.histogram_t);
  j.at("histogram").get_to(r.histogram);
}

}  // namespace bitgate::protocol

namespace bitgate::security {

inline void to_json(json& j, const SecurityReport& r) {
  j = json{{"E", r.e},
           {"E_prime", r.e_prime},
           {"f", r.f},
           {"eta_global", r.eta_global},
           {"eta_restricted", r.eta_restricted},
           {"delta", r.delta},
           {"f_adjusted", r.f_adjusted},
           {"effective_blinding", r.effective_blinding},
           {"rate_unpatched", r.rate_unpatched},
           {"rate_patched", r.rate_patched},
           {"e_source", r.e_source}};
  if (r.e_stderr) {
    j["e_stderr"] = *r.e_stderr;
  } else {
    j["e_stderr"] = nullptr;
  }
}

inline void from_json(const json& j, SecurityReport& r) {
  j.at("E").get_to(r.e);
  j.at("E_prime").get_to(r.e_prime);
  j.at("f").get_to(r.f);
  j.at("eta_global").get_to(r.eta_global);
  j.at("eta_restricted").get_to(r.eta_restricted);
  j.at("delta").get_to(r.delta);
  j.at("f_adjusted").get_to(r.f_adjusted);
  j.at("effective_blinding").get_to(r.effective_blinding);
  j.at("rate_unpatched").get_to(r.rate_unpatched);
  j.at("rate_patched").get_to(r.rate_patched);
  j.at("e_source").get_to(r.e_source);
  if (j.contains("e_stderr") && !j.at("e_stderr").is_null()) {
    r.e_stderr = j.at("e_stderr").get<double>();
  } else {
    r.e_stderr.reset();
  }
}

inline void to_json(json& j, const ThresholdScanRow& row) {
  j = json{{"E_prime", row.e_prime},
           {"f", row.f},
           {"eta_restricted", row.eta_restricted},
           {"objective", row.objective}};
}

inline void from_json(const json& j, ThresholdScanRow& row) {
  j.at("E_prime").get_to(row.e_prime);
  j.at("f").get_to(row.f);
  j.at("eta_restricted").get_to(row.eta_restricted);
  j.at("objective").get_to(row.objective);
}

inline void to_json(json& j, const OptimizeResult& r) {
  j = json{{"best_E_prime", r.best_e_prime},
           {"report", r.report},
           {"scan", r.scan}};
}

inline void from_json(const json& j, OptimizeResult& r) {
  j.at("best_E_prime").get_to(r.best_e_prime);
  j.at("report").get_to(r.report);
  j.at("scan").get_to(r.scan);
}

}  // namespace bitgate::security

namespace bitgate::monitor {

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::sensitive: return "sensitive";
    case Verdict::blind: return "blind";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

inline void to_json(json& j, const MonitorResult& r) {
  j = json{{"verdict", to_string(r.verdict)},
           {"flagged_a", r.flagged_a},
           {"flagged_b", r.flagged_b},
           {"first_flag_gate",
            r.first_flag_gate == kNoFlag ? json(nullptr) : json(r.first_flag_gate)},
           {"n_gates", r.n_gates},
           {"n_test_gates", r.n_test_gates},
           {"n_test_clicks_a", r.n_test_clicks_a},
           {"n_test_clicks_b", r.n_test_clicks_b},
           {"required_streak", r.required_streak},
           {"max_streak_a", r.max_streak_a},
           {"max_streak_b", r.max_streak_b},
           {"seed", r.seed},
           {"key_result", r.key_result}};
}

inline void from_json(const json& j, MonitorResult& r) {
  const std::string v = j.at("verdict").get<std::string>();
  if (v == "sensitive") {
    r.verdict = Verdict::sensitive;
  } else if (v == "blind") {
    r.verdict = Verdict::blind;
  } else if (v == "unknown") {
    r.verdict = Verdict::unknown;
  } else {
    throw config_error("unknown verdict: " + v);
  }
  j.at("flagged_a").get_to(r.flagged_a);
  j.at("flagged_b").get_to(r.flagged_b);
  r.first_flag_gate = j.at("first_flag_gate").is_null()
                          ? kNoFlag
                          : j.at("first_flag_gate").get<std::uint64_t>();
  j.at("n_gates").get_to(r.n_gates);
  j.at("n_test_gates").get_to(r.n_test_gates);
  j.at("n_test_clicks_a").get_to(r.n_test_clicks_a);
  j.at("n_test_clicks_b").get_to(r.n_test_clicks_b);
  j.at("required_streak").get_to(r.required_streak);
  j.at("max_streak_a").get_to(r.max_streak_a);
  j.at("max_streak_b").get_to(r.max_streak_b);
  j.at("seed").get_to(r.seed);
  j.at("key_result").get_to(r.key_result);
}

inline void to_json(json& j, const FalseAlarmStats& s) {
  j = json{{"n_pulses", s.n_pulses}, {"k", s.k},
           {"windows", s.windows},   {"alarms_a", s.alarms_a},
           {"alarms_b", s.alarms_b}, {"alarm_rate", s.alarm_rate},
           {"seed", s.seed}};
}

inline void from_json(const json& j, FalseAlarmStats& s) {
  j.at("n_pulses").get_to(s.n_pulses);
  j.at("k").get_to(s.k);
  j.at("windows").get_to(s.windows);
  j.at("alarms_a").get_to(s.alarms_a);
  j.at("alarms_b").get_to(s.alarms_b);
  j.at("alarm_rate").get_to(s.alarm_rate);
  j.at("seed").get_to(s.seed);
}

}  // namespace bitgate::monitor

namespace bitgate::multiphoton {

inline void to_json(json& j, const TwoPhotonScenario& s) {
  j = json{{"q1", s.q1},       {"q2", s.q2},
           {"n1", s.n1},       {"n2", s.n2},
           {"c", s.c},         {"n1_wrong", s.n1_wrong},
           {"n2_wrong", s.n2_wrong}, {"c1_wrong", s.c1_wrong},
           {"c2_wrong", s.c2_wrong}};
}

inline void from_json(const json& j, TwoPhotonScenario& s) {
  j.at("q1").get_to(s.q1);
  j.at("q2").get_to(s.q2);
  j.at("n1").get_to(s.n1);
  j.at("n2").get_to(s.n2);
  j.at("c").get_to(s.c);
  j.at("n1_wrong").get_to(s.n1_wrong);
  j.at("n2_wrong").get_to(s.n2_wrong);
  j.at("c1_wrong").get_to(s.c1_wrong);
  j.at("c2_wrong").get_to(s.c2_wrong);
}

inline void to_json(json& j, const BoundCheckResult& r) {
  j = json{{"q1", r.q1},
           {"q2", r.q2},
           {"budget", r.budget},
           {"slack", r.slack},
           {"holds", r.holds},
           {"vacuous", r.vacuous},
           {"cells_checked", r.cells_checked},
           {"scenarios_checked", r.scenarios_checked},
           {"cells_skipped", r.cells_skipped},
           {"violations", r.violations},
           {"min_value", r.min_value},
           {"minimizer", r.minimizer}};
}

inline void from_json(const json& j, BoundCheckResult& r) {
  j.at("q1").get_to(r.q1);
  j.at("q2").get_to(r.q2);
  j.at("budget").get_to(r.budget);
  j.at("slack").get_to(r.slack);
  j.at("holds").get_to(r.holds);
  j.at("vacuous").get_to(r.vacuous);
  j.at("cells_checked").get_to(r.cells_checked);
  j.at("scenarios_checked").get_to(r.scenarios_checked);
  j.at("cells_skipped").get_to(r.cells_skipped);
  j.at("violations").get_to(r.violations);
  j.at("min_value").get_to(r.min_value);
  j.at("minimizer").get_to(r.minimizer);
}

inline void to_json(json& j, const InductiveCheckResult& r) {
  j = json{{"holds", r.holds},
           {"bound", r.bound},
           {"slack", r.slack},
           {"stages", r.stages}};
}

}  // namespace bitgate::multiphoton

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

namespace bitgate {

inline std::string histogram_csv(const protocol::SimResult& r) {
  std::string out = "t_ns,detections\n";
  for (std::size_t i = 0; i < r.histogram.size(); ++i) {
    out += format_double(r.histogram_t[i]);
    out += ',';
    out += std::to_string(r.histogram[i]);
    out += '\n';
  }
  return out;
}

inline std::string qber_min_csv(const temporal::TemporalResponse& resp) {
  std::string out = "t_ns,qber_min\n";
  for (std::size_t i = 0; i < resp.size(); ++i) {
    out += format_double(resp.t_grid()[i]);
    out += ',';
    out += format_double(quantum::qber_min(resp.theta()[i]));
    out += '\n';
  }
  return out;
}

inline std::string threshold_scan_csv(
    const std::vector<security::ThresholdScanRow>& rows) {
  std::string out = "E_prime,f,eta_restricted,objective\n";
  for (const auto& row : rows) {
    out += format_double(row.e_prime);
    out += ',';
    out += format_double(row.f);
    out += ',';
    out += format_double(row.eta_restricted);
    out += ',';
    out += format_double(row.objective);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// Threshold grid: either explicit values or a start/stop/step range.
struct GridSpec {
  double start = 0.01;
  double stop = 0.5;
  double step = 0.01;
  bool use_explicit = false;
  std::vector<double> explicit_values;

  std::vector<double> values() const {
    if (use_explicit) return explicit_values;
    if (!(step > 0.0)) throw config_error("grid step must be positive");
    std::vector<double> out;
    for (int i = 0;; ++i) {
      const double v = start + i * step;
      if (v > stop + 1e-12) break;
      out.push_back(std::min(v, stop));
    }
    return out;
  }
};

struct RunConfig {
  std::filesystem::path curve_file;
  temporal::BitmappedWindow window{0.0, 0.0};
  protocol::AttackStrategy strategy;
  protocol::EngineConfig engine;
  std::optional<double> e;
  std::optional<std::filesystem::path> sim_result_file;
  std::optional<double> e_prime;
  GridSpec grid;
  double delta = 0.0;
  monitor::MonitorConfig monitor_cfg;
  std::filesystem::path out_dir = ".";
};

inline RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  try {
    cfg.curve_file = j.at("curve_file").get<std::string>();
    const auto win = j.at("bitmapped_window");
    if (!win.is_array() || win.size() != 2) {
      throw config_error("bitmapped_window must be a [t_start, t_end] pair");
    }
    cfg.window = {win[0].get<double>(), win[1].get<double>()};

    if (j.contains("strategy")) cfg.strategy = j.at("strategy").get<protocol::AttackStrategy>();
    cfg.engine.n_gates = j.value("n_gates", std::uint64_t{100000});
    cfg.engine.seed = j.value("seed", std::uint64_t{1});
    cfg.engine.dark_count_prob = j.value("dark_count_prob", 0.0);
    cfg.engine.transmittance = j.value("transmittance", 1.0);
    cfg.engine.threads = j.value("threads", 0u);

    if (j.contains("e")) cfg.e = j.at("e").get<double>();
    if (j.contains("sim_result_file")) {
      cfg.sim_result_file = j.at("sim_result_file").get<std::string>();
    }
    if (j.contains("e_prime")) cfg.e_prime = j.at("e_prime").get<double>();
    if (j.contains("e_prime_grid")) {
      const auto& g = j.at("e_prime_grid");
      if (g.is_array()) {
        cfg.grid.use_explicit = true;
        cfg.grid.explicit_values = g.get<std::vector<double>>();
      } else {
        cfg.grid.start = g.value("start", 0.01);
        cfg.grid.stop = g.value("stop", 0.5);
        cfg.grid.step = g.value("step", 0.01);
      }
    }
    cfg.delta = j.value("delta", 0.0);
    if (j.contains("monitor")) {
      const auto& m = j.at("monitor");
      cfg.monitor_cfg.mu = m.value("mu", 1.0);
      cfg.monitor_cfg.p_test = m.value("p_test", 0.01);
      cfg.monitor_cfg.alpha = m.value("alpha", 1e-6);
      cfg.monitor_cfg.eta_expected = m.value("eta_expected", 0.1);
    }
    if (j.contains("out_dir")) {
      cfg.out_dir = j.at("out_dir").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad run config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(parse_json(read_text_file(path), path.string()));
}

}  // namespace bitgate
