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

// Command-line front end: simulate | analyze | optimize | monitor | figures.
// Configuration comes from a JSON file; --seed/--out/--threads flags override
// the corresponding config fields.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bitgate/bitgate.hpp"

namespace fs = std::filesystem;
using namespace bitgate;

namespace {

int g_log_level = 0;  // 0 quiet, 1 info, 2 debug (BITGATE_LOG=info|debug)

void init_log_level() {
  const char* env = std::getenv("BITGATE_LOG");
  if (env == nullptr) return;
  const std::string v(env);
  if (v == "info") g_log_level = 1;
  if (v == "debug") g_log_level = 2;
}

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::fprintf(stderr, "[bitgate] %s\n", msg.c_str());
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "Override the configured RNG seed");
  cmd->add_option("--out", args.out_dir, "Override the output directory");
  cmd->add_option("--threads", args.threads, "Override the worker thread count");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.seed) cfg.engine.seed = *args.seed;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  if (args.threads) cfg.engine.threads = *args.threads;
  return cfg;
}

temporal::TemporalResponse load_curve(const RunConfig& cfg) {
  log_info("loading curve " + cfg.curve_file.string());
  return temporal::load_response_file(cfg.curve_file, cfg.window);
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw io_error("cannot create output directory: " + cfg.out_dir.string());
  }
}

void write_json(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

struct QberInput {
  double e;
  std::string source;
  std::optional<double> stderr_;
};

QberInput resolve_qber(const RunConfig& cfg) {
  if (cfg.e) {
    return {*cfg.e, "supplied", std::nullopt};
  }
  if (cfg.sim_result_file) {
    const json j = parse_json(read_text_file(*cfg.sim_result_file),
                              cfg.sim_result_file->string());
    const auto sim = j.get<protocol::SimResult>();
    return {sim.empirical_qber, "simulated", sim.qber_stderr};
  }
  throw config_error("provide 'e' or 'sim_result_file' in the config");
}

int cmd_simulate(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto resp = load_curve(cfg);
  const auto result = protocol::run_simulation(resp, cfg.strategy, cfg.engine);

  ensure_out_dir(cfg);
  write_json(cfg.out_dir / "sim_result.json", json(result));
  write_text_file(cfg.out_dir / "histogram.csv", histogram_csv(result));

  std::printf("simulate: seed=%llu n_gates=%llu detected=%llu sifted=%llu "
              "errors=%llu qber=%s\n",
              static_cast<unsigned long long>(result.seed),
              static_cast<unsigned long long>(result.n_gates),
              static_cast<unsigned long long>(result.n_detected),
              static_cast<unsigned long long>(result.n_sifted),
              static_cast<unsigned long long>(result.n_errors),
              format_double(result.empirical_qber).c_str());
  return exit_code::ok;
}

int cmd_analyze(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto resp = load_curve(cfg);
  const QberInput in = resolve_qber(cfg);
  if (!cfg.e_prime) {
    throw config_error("analyze requires 'e_prime' in the config");
  }
  const auto report = security::make_report(resp, in.e, *cfg.e_prime, cfg.delta,
                                            in.source, in.stderr_);

  ensure_out_dir(cfg);
  write_json(cfg.out_dir / "security_report.json", json(report));

  std::printf("analyze: E=%s E_prime=%s effective_blinding=%s rate_patched=%s\n",
              format_double(report.e).c_str(),
              format_double(report.e_prime).c_str(),
              format_double(report.effective_blinding).c_str(),
              format_double(report.rate_patched).c_str());
  return exit_code::ok;
}

int cmd_optimize(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto resp = load_curve(cfg);
  const QberInput in = resolve_qber(cfg);
  const auto result = security::optimize_threshold(
      resp, in.e, cfg.grid.values(), cfg.delta, in.source, in.stderr_);

  ensure_out_dir(cfg);
  write_json(cfg.out_dir / "optimize_result.json", json(result));
  write_text_file(cfg.out_dir / "threshold_scan.csv",
                  threshold_scan_csv(result.scan));

  std::printf("optimize: best_E_prime=%s objective=%s rate_patched=%s\n",
              format_double(result.best_e_prime).c_str(),
              format_double(result.report.effective_blinding).c_str(),
              format_double(result.report.rate_patched).c_str());
  return exit_code::ok;
}

int cmd_monitor(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto resp = load_curve(cfg);
  const auto result =
      monitor::run_monitor(resp, cfg.strategy, cfg.monitor_cfg, cfg.engine);

  ensure_out_dir(cfg);
  write_json(cfg.out_dir / "monitor_result.json", json(result));

  std::printf("monitor: verdict=%s test_gates=%llu required_streak=%llu seed=%llu\n",
              monitor::to_string(result.verdict),
              static_cast<unsigned long long>(result.n_test_gates),
              static_cast<unsigned long long>(result.required_streak),
              static_cast<unsigned long long>(result.seed));
  return exit_code::ok;
}

int cmd_figures(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto resp = load_curve(cfg);

  ensure_out_dir(cfg);
  write_text_file(cfg.out_dir / "qber_min_vs_t.csv", qber_min_csv(resp));

  const QberInput in = resolve_qber(cfg);
  const auto result = security::optimize_threshold(
      resp, in.e, cfg.grid.values(), cfg.delta, in.source, in.stderr_);
  write_text_file(cfg.out_dir / "threshold_scan.csv",
                  threshold_scan_csv(result.scan));

  std::printf("figures: %zu samples, %zu scan rows, best_E_prime=%s\n",
              resp.size(), result.scan.size(),
              format_double(result.best_e_prime).c_str());
  return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
  init_log_level();

  CLI::App app{"Gated-detection security toolkit for BB84 receivers"};
  app.require_subcommand(1);

  CommonArgs sim_args, ana_args, opt_args, mon_args, fig_args;
  CLI::App* sim = app.add_subcommand("simulate", "Run the gate-by-gate Monte Carlo");
  add_common(sim, sim_args);
  CLI::App* ana = app.add_subcommand("analyze", "Compute the security report for a fixed threshold");
  add_common(ana, ana_args);
  CLI::App* opt = app.add_subcommand("optimize", "Scan thresholds and maximize the certified blinding");
  add_common(opt, opt_args);
  CLI::App* mon = app.add_subcommand("monitor", "Run the calibrated-source blindness monitor");
  add_common(mon, mon_args);
  CLI::App* fig = app.add_subcommand("figures", "Export per-mode error floor and threshold scan tables");
  add_common(fig, fig_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage/error message
    return e.get_exit_code() == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (ana->parsed()) return cmd_analyze(ana_args);
    if (opt->parsed()) return cmd_optimize(opt_args);
    if (mon->parsed()) return cmd_monitor(mon_args);
    if (fig->parsed()) return cmd_figures(fig_args);
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::io;
  } catch (const analysis_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::analysis;
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::config;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::config;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return exit_code::internal;
  }
  return exit_code::config;
}
