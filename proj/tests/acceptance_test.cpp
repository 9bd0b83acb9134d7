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

// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. argv[1] must point at the command-line binary (used by the
// reproducibility criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "bitgate/bitgate.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace bitgate;
using fixtures::kPi;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_work;

class Criterion {
 public:
  Criterion(int number, std::string description, double time_limit_ms = 0.0)
      : number_(number),
        description_(std::move(description)),
        time_limit_ms_(time_limit_ms),
        start_(std::chrono::steady_clock::now()) {}

  void require(bool ok, const std::string& detail) {
    if (!ok) {
      failed_ = true;
      details_ += "  - " + detail + "\n";
    }
  }

  ~Criterion() {
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
    if (time_limit_ms_ > 0.0 && ms > time_limit_ms_) {
      failed_ = true;
      details_ += "  - exceeded the " + std::to_string(time_limit_ms_ / 1000.0) +
                  " s runtime limit\n";
    }
    std::printf("[%s] criterion %d: %s (%.0f ms)\n", failed_ ? "FAIL" : "PASS",
                number_, description_.c_str(), ms);
    if (failed_) {
      std::fputs(details_.c_str(), stdout);
      ++g_failures;
    }
  }

 private:
  int number_;
  std::string description_;
  double time_limit_ms_;
  std::chrono::steady_clock::time_point start_;
  bool failed_ = false;
  std::string details_;
};

double sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

void criterion_1_worked_example() {
  Criterion c(1, "worked example: certified blinding and patched rate", 1000.0);

  const auto resp = fixtures::certified_fixture();
  const auto report = security::make_report(resp, 0.0568, 0.45, 0.0);
  c.require(report.effective_blinding >= 0.784 && report.effective_blinding <= 0.788,
            "effective blinding " + format_double(report.effective_blinding) +
                " outside [0.784, 0.788]");
  c.require(report.rate_patched >= 0.222 && report.rate_patched <= 0.229,
            "patched rate " + format_double(report.rate_patched) +
                " outside [0.222, 0.229]");

  const auto gauss = fixtures::gaussian_dem_curve();
  const double eta = temporal::blinding_parameter(
      gauss, temporal::ModeSubset::all(gauss.size()));
  c.require(eta < 0.01, "gaussian fixture ratio " + format_double(eta) +
                            " not below 0.01");
  c.require(security::rate_unpatched(0.0568, eta) == 0.0,
            "unpatched rate did not clamp to exactly 0");
}

void criterion_2_spectra() {
  Criterion c(2, "bit-operator spectra match the closed form", 1000.0);

  std::mt19937_64 rng(260811);
  double worst_spec = 0.0, worst_complete = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = fixtures::random_setting(rng);
    const auto povm = quantum::averaged_povm(s);
    worst_complete = std::max(
        worst_complete,
        (povm.e0 + povm.e1 + povm.ev).max_abs_diff(Mat2::identity()));

    const double p_det = 0.5 * (s.eta_a + s.eta_b);
    const double lo = 0.5 * p_det * (1.0 - std::cos(s.theta));
    const double hi = 0.5 * p_det * (1.0 + std::cos(s.theta));
    for (const Mat2* op : {&povm.e0, &povm.e1}) {
      const Eigen2 eig = eigen_hermitian(*op);
      worst_spec = std::max({worst_spec, std::abs(eig.lambda_min - lo),
                             std::abs(eig.lambda_max - hi)});
    }
  }
  c.require(worst_spec <= 1e-10, "spectrum deviation " +
                                     format_double(worst_spec) + " > 1e-10");
  c.require(worst_complete <= 1e-12, "completeness deviation " +
                                         format_double(worst_complete) +
                                         " > 1e-12");
}

void criterion_3_state_independence() {
  Criterion c(3, "detection probability is state-independent");

  std::mt19937_64 rng(31337);
  double worst_spread = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto s = fixtures::random_setting(rng);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double p =
          quantum::detection_probability(s, fixtures::random_state(rng));
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    worst_spread = std::max(worst_spread, hi - lo);
  }
  c.require(worst_spread < 1e-12,
            "spread " + format_double(worst_spread) + " >= 1e-12");
}

protocol::SimResult run_attack(const temporal::TemporalResponse& resp,
                               const protocol::AttackStrategy& strat,
                               std::uint64_t n_gates, std::uint64_t seed) {
  protocol::EngineConfig cfg;
  cfg.n_gates = n_gates;
  cfg.seed = seed;
  return protocol::run_simulation(resp, strat, cfg);
}

void criterion_4_qber_floor() {
  Criterion c(4, "Monte Carlo error floor at pi/6, pi/3, pi/2", 60000.0);

  const auto resp = fixtures::angle_probe_curve();
  const struct {
    double time;
    double theta;
  } probes[] = {{0.6, kPi / 6}, {0.7, kPi / 3}, {0.8, kPi / 2}};

  for (const auto& probe : probes) {
    protocol::AttackStrategy strat;
    strat.tag = protocol::AttackStrategy::Tag::optimal_state;
    strat.times = {probe.time};
    const auto r = run_attack(resp, strat, 1000000, 42);
    const double floor = 0.5 * (1.0 - std::cos(probe.theta));
    const double s = sigma(floor, static_cast<double>(r.n_sifted));
    c.require(std::abs(r.empirical_qber - floor) <= 5 * s,
              "optimal state at theta=" + format_double(probe.theta) +
                  ": qber " + format_double(r.empirical_qber) +
                  " not within 5 sigma of " + format_double(floor));
  }

  // no strategy in the suite dips below its own floor
  protocol::AttackStrategy honest;
  protocol::AttackStrategy shift;
  shift.tag = protocol::AttackStrategy::Tag::time_shift;
  shift.t_early = 0.6;
  shift.t_late = 0.7;
  protocol::AttackStrategy after;
  after.tag = protocol::AttackStrategy::Tag::after_gate;
  after.t_outside = 0.9;

  const struct {
    const protocol::AttackStrategy* strat;
    double floor;
    const char* name;
  } floors[] = {{&honest, 0.0, "honest"},
                {&shift, 0.5 * (1.0 - std::cos(kPi / 6)), "time_shift"},
                {&after, 0.5, "after_gate"}};
  for (const auto& f : floors) {
    const auto r = run_attack(resp, *f.strat, 300000, 43);
    const double s = sigma(std::max(f.floor, 1e-6),
                           static_cast<double>(std::max<std::uint64_t>(r.n_sifted, 1)));
    c.require(r.empirical_qber >= f.floor - 5 * s,
              std::string(f.name) + " dipped below its floor");
  }
}

void criterion_5_after_gate_exposure() {
  Criterion c(5, "after-gate photons read as noise on the patched receiver");

  protocol::AttackStrategy after;
  after.tag = protocol::AttackStrategy::Tag::after_gate;
  after.t_outside = 0.9;  // theta = pi/2 on the probe curve

  const auto patched = run_attack(fixtures::angle_probe_curve(), after, 400000, 7);
  const double s = sigma(0.5, static_cast<double>(patched.n_sifted));
  c.require(std::abs(patched.empirical_qber - 0.5) <= 5 * s,
            "patched receiver qber " + format_double(patched.empirical_qber) +
                " not within 5 sigma of 1/2");

  const auto unpatched = run_attack(fixtures::unpatched_curve(), after, 400000, 7);
  c.require(unpatched.empirical_qber <= 0.001,
            "same placement without the patch should be error-free, got " +
                format_double(unpatched.empirical_qber));
}

void criterion_6_multiphoton_oracle() {
  Criterion c(6, "multiphoton merge never beats the single-photon floor", 30000.0);

  const double qs[] = {0.0, 0.1, 0.25, 0.3, 0.5};
  for (double q1 : qs) {
    for (double q2 : qs) {
      const auto res = multiphoton::verify_bound(q1, q2, 60);
      const double bound = std::min(q1, q2) - 1.0 / 120.0;
      c.require(res.holds, "violations at (" + format_double(q1) + ", " +
                               format_double(q2) + ")");
      c.require(res.min_value >= bound,
                "minimum " + format_double(res.min_value) + " below " +
                    format_double(bound));
    }
  }

  // two-photon Monte Carlo cross-check
  protocol::AttackStrategy two;
  two.tag = protocol::AttackStrategy::Tag::optimal_state;
  two.times = {0.6, 0.7};  // floors pi/6 and pi/3
  const auto r = run_attack(fixtures::angle_probe_curve(), two, 500000, 20);
  const double floor = 0.5 * (1.0 - std::cos(kPi / 6));
  const double s = sigma(floor, static_cast<double>(r.n_sifted));
  c.require(r.empirical_qber >= floor - 5 * s,
            "two-photon qber " + format_double(r.empirical_qber) +
                " undercuts the floor by more than 5 sigma");
}

void criterion_7_blindness_monitor() {
  Criterion c(7, "blindness monitor: exact streak, detection, false alarms");

  monitor::MonitorConfig mc;  // mu=1, p_test=0.01, alpha=1e-6, eta=0.1
  c.require(monitor::required_test_pulses(mc) == 139,
            "required streak is not 139");

  const auto resp = fixtures::flat_curve(0.5, 0.5);
  protocol::AttackStrategy blind;
  blind.tag = protocol::AttackStrategy::Tag::blinding;

  int flagged = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    protocol::EngineConfig ec;
    ec.n_gates = 100000;
    ec.seed = seed;
    const auto r = monitor::run_monitor(resp, blind, mc, ec);
    if (r.verdict == monitor::Verdict::blind) ++flagged;
  }
  c.require(flagged == 100, "blinding flagged in only " +
                                std::to_string(flagged) + "/100 runs");

  const std::uint64_t n_pulses = 10000000;
  const auto fa = monitor::false_alarm_stats(mc, n_pulses, 987654321);
  const double budget = mc.alpha * static_cast<double>(fa.windows);
  c.require(static_cast<double>(fa.alarms_a) <= budget &&
                static_cast<double>(fa.alarms_b) <= budget,
            "false alarms (" + std::to_string(fa.alarms_a) + ", " +
                std::to_string(fa.alarms_b) + ") exceed the per-window budget " +
                format_double(budget));
  c.require(fa.alarm_rate <= mc.alpha, "aggregate alarm rate above alpha");
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string curve_csv(const temporal::TemporalResponse& resp) {
  std::string out = "t_ns,eta_a,eta_b,theta_rad\n";
  for (std::size_t i = 0; i < resp.size(); ++i) {
    out += format_double(resp.t_grid()[i]) + "," +
           format_double(resp.eta_a()[i]) + "," +
           format_double(resp.eta_b()[i]) + "," +
           format_double(resp.theta()[i]) + "\n";
  }
  return out;
}

void criterion_8_reproducibility() {
  Criterion c(8, "identical config and seed reproduce identical bytes");

  fs::remove_all(g_work);
  fs::create_directories(g_work);
  write_text_file(g_work / "probe.csv",
                  curve_csv(fixtures::angle_probe_curve()));
  write_text_file(g_work / "certified.csv",
                  curve_csv(fixtures::certified_fixture()));

  const json sim_cfg = {
      {"curve_file", (g_work / "probe.csv").string()},
      {"bitmapped_window", {-0.5, 0.5}},
      {"strategy", {{"tag", "optimal_state"}, {"times", {0.6, 0.7}}}},
      {"n_gates", 100000},
      {"seed", 4242},
      {"dark_count_prob", 0.001}};
  write_text_file(g_work / "sim.json", sim_cfg.dump(2));

  const json opt_cfg = {{"curve_file", (g_work / "certified.csv").string()},
                        {"bitmapped_window", {-0.2, 0.2}},
                        {"e", 0.0568}};
  write_text_file(g_work / "opt.json", opt_cfg.dump(2));

  const json mon_cfg = {{"curve_file", (g_work / "probe.csv").string()},
                        {"bitmapped_window", {-0.5, 0.5}},
                        {"strategy", {{"tag", "blinding"}}},
                        {"n_gates", 50000},
                        {"seed", 5}};
  write_text_file(g_work / "mon.json", mon_cfg.dump(2));

  const std::string sim = (g_work / "sim.json").string();
  const std::string opt = (g_work / "opt.json").string();
  const std::string mon = (g_work / "mon.json").string();
  bool rc_ok = true;
  rc_ok &= run_cli("simulate --config " + sim + " --threads 1 --out " +
                   (g_work / "a").string()) == 0;
  rc_ok &= run_cli("simulate --config " + sim + " --threads 1 --out " +
                   (g_work / "b").string()) == 0;
  rc_ok &= run_cli("simulate --config " + sim + " --threads 4 --out " +
                   (g_work / "d").string()) == 0;
  rc_ok &= run_cli("optimize --config " + opt + " --out " +
                   (g_work / "a").string()) == 0;
  rc_ok &= run_cli("optimize --config " + opt + " --out " +
                   (g_work / "b").string()) == 0;
  rc_ok &= run_cli("monitor --config " + mon + " --out " +
                   (g_work / "a").string()) == 0;
  rc_ok &= run_cli("monitor --config " + mon + " --out " +
                   (g_work / "b").string()) == 0;
  c.require(rc_ok, "a CLI invocation failed");
  if (!rc_ok) return;

  for (const char* name : {"sim_result.json", "histogram.csv",
                           "optimize_result.json", "threshold_scan.csv",
                           "monitor_result.json"}) {
    c.require(read_text_file(g_work / "a" / name) ==
                  read_text_file(g_work / "b" / name),
              std::string(name) + " differs between identical runs");
  }
  for (const char* name : {"sim_result.json", "histogram.csv"}) {
    c.require(read_text_file(g_work / "a" / name) ==
                  read_text_file(g_work / "d" / name),
              std::string(name) + " differs across thread counts");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-bitgate-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  g_work = fs::absolute("acceptance_work");

  criterion_1_worked_example();
  criterion_2_spectra();
  criterion_3_state_independence();
  criterion_4_qber_floor();
  criterion_5_after_gate_exposure();
  criterion_6_multiphoton_oracle();
  criterion_7_blindness_monitor();
  criterion_8_reproducibility();

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
