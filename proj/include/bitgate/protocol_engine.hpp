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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "bitgate/errors.hpp"
#include "bitgate/quantum_measure.hpp"
#include "bitgate/rng.hpp"
#include "bitgate/temporal_model.hpp"

namespace bitgate::protocol {

enum class Basis : std::uint8_t { z = 0, x = 1 };

/// Assignment of detectors a, b to logical bits.
enum class BitMap : std::uint8_t { a0_b1 = 0, a1_b0 = 1 };

enum class Outcome : std::uint8_t { bit0 = 0, bit1 = 1, vacuum = 2, double_click = 3 };

/// Per-gate eavesdropper behaviour. Strategies may condition on Alice's bit
/// and basis (faked-state model) but never see Bob's random draws.
struct AttackStrategy {
  enum class Tag : std::uint8_t { honest, time_shift, after_gate, optimal_state, blinding };
  enum class TimeShiftRule : std::uint8_t { by_bit, random };

  Tag tag = Tag::honest;

  /// honest: arrival time override; defaults to the window center.
  std::optional<double> arrival_time;

  // time_shift: send Alice's state early or late.
  double t_early = 0.0;
  double t_late = 0.0;
  TimeShiftRule rule = TimeShiftRule::by_bit;

  // after_gate: resend Alice's state at a fixed time outside the gate.
  double t_outside = 0.0;

  // optimal_state: one photon per listed arrival time, each prepared in the
  // state minimizing the wrong-bit probability at that mode.
  std::vector<double> times;

  // blinding: which detectors are driven into the insensitive state.
  bool blind_a = true;
  bool blind_b = true;
};

struct EngineConfig {
  std::uint64_t n_gates = 0;
  std::uint64_t seed = 0;
  double dark_count_prob = 0.0;  // per detector per gate
  double transmittance = 1.0;    // survival probability per injected photon
  unsigned threads = 0;          // 0 = automatic
  std::size_t trace_limit = 0;   // record the first N gates when tracing
};

struct DetectorClicks {
  bool a = false;
  bool b = false;
};

/// Full record of one protocol gate, mostly for inspection and tests.
struct GateTrialRecord {
  std::uint64_t gate_index = 0;
  int alice_bit = 0;
  Basis alice_basis = Basis::z;
  Basis bob_basis = Basis::z;
  BitMap software_map = BitMap::a0_b1;
  BitMap optical_map = BitMap::a0_b1;
  AttackStrategy::Tag eve_tag = AttackStrategy::Tag::honest;
  std::vector<double> eve_times;
  int photon_count = 0;
  std::vector<DetectorClicks> clicks;  // one entry per photon slot
  DetectorClicks dark;
  Outcome merged = Outcome::vacuum;
  int resolved_bit = 0;  // meaningful unless merged == vacuum
  bool was_double = false;
};

struct SimResult {
  std::uint64_t n_gates = 0;
  std::uint64_t n_detected = 0;
  std::uint64_t n_sifted = 0;
  std::uint64_t n_errors = 0;
  std::uint64_t n_double_clicks = 0;
  std::uint64_t seed = 0;
  double empirical_qber = 0.0;  // n_errors / n_sifted (0 when nothing sifted)
  double qber_stderr = 0.0;     // binomial standard error
  std::vector<double> histogram_t;         // grid copy, for export
  std::vector<std::uint64_t> histogram;    // detections per temporal mode

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct MergedOutcome {
  Outcome outcome = Outcome::vacuum;
  int bit = 0;
  bool was_double = false;
};

/// Threshold-detector merge: OR the clicks across photon slots per logical
/// bit (after the software mapping); both bits present is a double click and
/// resolves to a uniformly random bit.
inline MergedOutcome merge_clicks(std::span<const DetectorClicks> slots,
                                  BitMap software, SplitMix64& rng) {
  if (slots.empty()) {
    throw std::domain_error("merge needs at least one photon slot");
  }
  bool hit_a = false, hit_b = false;
  for (const DetectorClicks& s : slots) {
    hit_a = hit_a || s.a;
    hit_b = hit_b || s.b;
  }
  const bool hit0 = (software == BitMap::a0_b1) ? hit_a : hit_b;
  const bool hit1 = (software == BitMap::a0_b1) ? hit_b : hit_a;

  if (hit0 && hit1) {
    return {Outcome::double_click, rng.next_bool() ? 1 : 0, true};
  }
  if (hit0) return {Outcome::bit0, 0, false};
  if (hit1) return {Outcome::bit1, 1, false};
  return {Outcome::vacuum, 0, false};
}

struct ClickProbabilities {
  double p_a = 0.0;       // click probability of detector a
  double p_b = 0.0;       // click probability of detector b
  double p_route_a = 0.0; // probability the photon takes detector a's path
  // Joint rule: a single photon takes exactly one path, so the two clicks
  // are mutually exclusive; P(both) = 0.
};

namespace detail {

inline Vec2 bit0_acceptance_ket(Basis basis, double cos_phi, double sin_phi) {
  if (basis == Basis::z) return {cos_phi, sin_phi};
  constexpr double r = std::numbers::sqrt2 / 2.0;
  return {r * (cos_phi + sin_phi), r * (cos_phi - sin_phi)};
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// <v| rho |v> for a real ket.
inline double real_expectation(const Mat2& rho, const Vec2& v) {
  const double va = v.a.real();
  const double vb = v.b.real();
  return rho.m00.real() * va * va + rho.m11.real() * vb * vb +
         2.0 * rho.m01.real() * va * vb;
}

}  // namespace detail

/// Born-rule click probabilities for one drawn measurement branch. The bit-0
/// arm accepts |0> (in Bob's basis) when the drawn optical mapping equals the
/// software mapping, and the state rotated by theta(t) when they differ;
/// theta = 0 inside the bit-mapped window makes a differing draw harmless
/// there, theta = pi/2 turns it into a full bit flip.
inline ClickProbabilities conditional_click_probabilities(
    const temporal::TemporalResponse& resp, double t, Basis bob_basis,
    BitMap software, BitMap optical, const quantum::QubitState& state) {
  const std::size_t i = resp.nearest_sample(t);
  const double theta = (software == optical) ? 0.0 : resp.theta()[i];
  const Vec2 ket0 =
      detail::bit0_acceptance_ket(bob_basis, std::cos(theta), std::sin(theta));

  const double route0 = detail::clamp01(detail::real_expectation(state.rho(), ket0));
  const bool det0_is_a = software == BitMap::a0_b1;
  const double route_a = det0_is_a ? route0 : 1.0 - route0;

  ClickProbabilities out;
  out.p_route_a = route_a;
  out.p_a = route_a * resp.eta_a()[i];
  out.p_b = (1.0 - route_a) * resp.eta_b()[i];
  return out;
}

namespace detail {

struct PhotonPlan {
  std::size_t sample = 0;
  // State by [basis][bit]; null means "Alice's state" (filled from the BB84
  // table at simulation time).
  std::array<std::array<Mat2, 2>, 2> rho{};
  bool use_alice_state = true;
};

inline Mat2 hadamard_conjugate(const Mat2& m) {
  // H m H with H = [[1,1],[1,-1]]/sqrt(2)
  const cx s00 = m.m00 + m.m01 + m.m10 + m.m11;
  const cx s01 = m.m00 - m.m01 + m.m10 - m.m11;
  const cx s10 = m.m00 + m.m01 - m.m10 - m.m11;
  const cx s11 = m.m00 - m.m01 - m.m10 + m.m11;
  return {0.5 * s00, 0.5 * s01, 0.5 * s10, 0.5 * s11};
}

struct Precomp {
  std::array<std::array<Mat2, 2>, 2> bb84{};  // [basis][bit]
  std::vector<PhotonPlan> photons;            // empty for blinding
  std::size_t early_sample = 0, late_sample = 0;
  std::size_t forced_sample = 0;  // where blinding clicks are binned
  std::size_t n_samples = 0;
};

inline Precomp precompute(const temporal::TemporalResponse& resp,
                          const AttackStrategy& strat) {
  Precomp pre;
  pre.n_samples = resp.size();
  pre.forced_sample = resp.nearest_sample(resp.window_center());

  const Mat2 z0 = Mat2::outer({1.0, 0.0});
  const Mat2 z1 = Mat2::outer({0.0, 1.0});
  pre.bb84[0] = {z0, z1};
  pre.bb84[1] = {hadamard_conjugate(z0), hadamard_conjugate(z1)};

  using Tag = AttackStrategy::Tag;
  switch (strat.tag) {
    case Tag::honest: {
      PhotonPlan p;
      p.sample = resp.nearest_sample(
          strat.arrival_time.value_or(resp.window_center()));
      pre.photons.push_back(p);
      break;
    }
    case Tag::time_shift: {
      pre.early_sample = resp.nearest_sample(strat.t_early);
      pre.late_sample = resp.nearest_sample(strat.t_late);
      pre.photons.emplace_back();  // sample chosen per gate
      break;
    }
    case Tag::after_gate: {
      PhotonPlan p;
      p.sample = resp.nearest_sample(strat.t_outside);
      pre.photons.push_back(p);
      break;
    }
    case Tag::optimal_state: {
      if (strat.times.empty() || strat.times.size() > 8) {
        throw config_error("optimal_state strategy needs 1 to 8 photon times");
      }
      for (double t : strat.times) {
        PhotonPlan p;
        p.sample = resp.nearest_sample(t);
        p.use_alice_state = false;
        const auto setting = resp.setting_at(p.sample);
        for (int bit = 0; bit < 2; ++bit) {
          const Mat2 rho_z =
              quantum::optimal_attack_state(setting, bit).state.rho();
          p.rho[0][bit] = rho_z;
          p.rho[1][bit] = hadamard_conjugate(rho_z);
        }
        pre.photons.push_back(p);
      }
      break;
    }
    case Tag::blinding:
      break;
  }
  return pre;
}

struct Counters {
  std::uint64_t n_gates = 0, n_detected = 0, n_sifted = 0, n_errors = 0,
                n_double_clicks = 0;
  std::vector<std::uint64_t> histogram;

  explicit Counters(std::size_t n_samples) : histogram(n_samples, 0) {}

  void absorb(const Counters& o) {
    n_gates += o.n_gates;
    n_detected += o.n_detected;
    n_sifted += o.n_sifted;
    n_errors += o.n_errors;
    n_double_clicks += o.n_double_clicks;
    for (std::size_t i = 0; i < histogram.size(); ++i) histogram[i] += o.histogram[i];
  }
};

// Click slots per gate: up to 8 photons, one forced-click slot, one dark slot.
struct SlotBuffer {
  std::array<DetectorClicks, 10> slots{};
  std::array<std::size_t, 10> sample{};
  std::size_t count = 0;

  void push(DetectorClicks c, std::size_t s) {
    slots[count] = c;
    sample[count] = s;
    ++count;
  }
};

inline void simulate_gate(const temporal::TemporalResponse& resp,
                          const AttackStrategy& strat, const Precomp& pre,
                          const EngineConfig& cfg, std::uint64_t gate_index,
                          Counters& counts, GateTrialRecord* record) {
  SplitMix64 g = SplitMix64::keyed(cfg.seed, gate_index);

  const int alice_bit = g.next_bool() ? 1 : 0;
  const Basis alice_basis = g.next_bool() ? Basis::x : Basis::z;
  const Basis bob_basis = g.next_bool() ? Basis::x : Basis::z;
  const BitMap software = g.next_bool() ? BitMap::a1_b0 : BitMap::a0_b1;
  const BitMap optical = g.next_bool() ? BitMap::a1_b0 : BitMap::a0_b1;

  const bool det0_is_a = software == BitMap::a0_b1;
  const bool sensitive_a = !(strat.tag == AttackStrategy::Tag::blinding && strat.blind_a);
  const bool sensitive_b = !(strat.tag == AttackStrategy::Tag::blinding && strat.blind_b);

  SlotBuffer slots;

  // Quantum photons injected by Eve (or the honest source).
  for (const PhotonPlan& plan : pre.photons) {
    std::size_t sample = plan.sample;
    if (strat.tag == AttackStrategy::Tag::time_shift) {
      const bool late = (strat.rule == AttackStrategy::TimeShiftRule::by_bit)
                            ? alice_bit == 1
                            : g.next_bool();
      sample = late ? pre.late_sample : pre.early_sample;
    }
    if (cfg.transmittance < 1.0 && !g.bernoulli(cfg.transmittance)) {
      slots.push({}, sample);  // photon lost in the channel
      continue;
    }

    const Mat2& rho = plan.use_alice_state
                          ? pre.bb84[static_cast<int>(alice_basis)][alice_bit]
                          : plan.rho[static_cast<int>(alice_basis)][alice_bit];
    const double theta = (software == optical) ? 0.0 : resp.theta()[sample];
    const Vec2 ket0 = bit0_acceptance_ket(bob_basis, std::cos(theta), std::sin(theta));
    const double route0 = clamp01(real_expectation(rho, ket0));

    const bool to_det0 = g.next_double() < route0;
    const bool hits_a = to_det0 == det0_is_a;
    const double eta = hits_a ? resp.eta_a()[sample] : resp.eta_b()[sample];
    const bool sensitive = hits_a ? sensitive_a : sensitive_b;
    const bool clicked = g.bernoulli(eta) && sensitive;

    DetectorClicks c;
    c.a = clicked && hits_a;
    c.b = clicked && !hits_a;
    slots.push(c, sample);
  }

  // Blinding: a bright pulse encoded with Alice's bit and basis forces a
  // click on the targeted (blind) detector whenever Bob's basis matches;
  // otherwise the power splits and neither detector fires.
  if (strat.tag == AttackStrategy::Tag::blinding && bob_basis == alice_basis) {
    const bool target_a = (alice_bit == 0) == det0_is_a;
    const bool works = target_a ? !sensitive_a : !sensitive_b;
    if (works) {
      DetectorClicks c;
      c.a = target_a;
      c.b = !target_a;
      slots.push(c, pre.forced_sample);
    }
  }

  // Dark counts, suppressed on blinded detectors.
  DetectorClicks dark;
  if (cfg.dark_count_prob > 0.0) {
    const bool raw_a = g.bernoulli(cfg.dark_count_prob);
    const bool raw_b = g.bernoulli(cfg.dark_count_prob);
    dark.a = raw_a && sensitive_a;
    dark.b = raw_b && sensitive_b;
    if (dark.a || dark.b) {
      slots.push(dark, g.next_below(pre.n_samples));
    }
  }

  MergedOutcome merged{Outcome::vacuum, 0, false};
  if (slots.count > 0) {
    merged = merge_clicks({slots.slots.data(), slots.count}, software, g);
  }

  ++counts.n_gates;
  if (merged.outcome != Outcome::vacuum) {
    ++counts.n_detected;
    if (merged.was_double) ++counts.n_double_clicks;

    // Bin the detection at the slot that produced the resolved bit.
    for (std::size_t s = 0; s < slots.count; ++s) {
      const bool hit0 = det0_is_a ? slots.slots[s].a : slots.slots[s].b;
      const bool hit1 = det0_is_a ? slots.slots[s].b : slots.slots[s].a;
      if ((merged.bit == 0 && hit0) || (merged.bit == 1 && hit1)) {
        ++counts.histogram[slots.sample[s]];
        break;
      }
    }

    if (bob_basis == alice_basis) {
      ++counts.n_sifted;
      if (merged.bit != alice_bit) ++counts.n_errors;
    }
  }

  if (record != nullptr) {
    record->gate_index = gate_index;
    record->alice_bit = alice_bit;
    record->alice_basis = alice_basis;
    record->bob_basis = bob_basis;
    record->software_map = software;
    record->optical_map = optical;
    record->eve_tag = strat.tag;
    record->eve_times.clear();
    for (std::size_t s = 0; s < pre.photons.size(); ++s) {
      record->eve_times.push_back(resp.t_grid()[slots.sample[s]]);
    }
    record->photon_count = static_cast<int>(pre.photons.size());
    record->clicks.assign(slots.slots.begin(), slots.slots.begin() + slots.count);
    record->dark = dark;
    record->merged = merged.outcome;
    record->resolved_bit = merged.bit;
    record->was_double = merged.was_double;
  }
}

inline void validate_config(const EngineConfig& cfg) {
  if (cfg.n_gates == 0) {
    throw config_error("n_gates must be at least 1");
  }
  if (!(cfg.dark_count_prob >= 0.0 && cfg.dark_count_prob < 1.0)) {
    throw config_error("dark_count_prob must lie in [0, 1)");
  }
  if (!(cfg.transmittance >= 0.0 && cfg.transmittance <= 1.0)) {
    throw config_error("transmittance must lie in [0, 1]");
  }
}

}  // namespace detail

/// Gate-by-gate BB84 simulation with bit-mapped gating. Each gate draws its
/// own keyed RNG stream, so the result is bit-identical for a given seed
/// regardless of the thread count.
inline SimResult run_simulation(const temporal::TemporalResponse& resp,
                                const AttackStrategy& strat,
                                const EngineConfig& cfg,
                                std::vector<GateTrialRecord>* trace = nullptr) {
  detail::validate_config(cfg);
  const detail::Precomp pre = detail::precompute(resp, strat);

  const std::size_t trace_n =
      trace != nullptr
          ? static_cast<std::size_t>(
                std::min<std::uint64_t>(cfg.trace_limit, cfg.n_gates))
          : 0;
  if (trace != nullptr) trace->assign(trace_n, {});

  unsigned workers = cfg.threads;
  if (workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : std::min(hw, 8u);
  }
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, cfg.n_gates));

  std::vector<detail::Counters> parts(workers, detail::Counters(resp.size()));
  {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (cfg.n_gates + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
        const std::uint64_t hi = std::min(cfg.n_gates, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
          GateTrialRecord* rec =
              (i < trace_n) ? &(*trace)[static_cast<std::size_t>(i)] : nullptr;
          detail::simulate_gate(resp, strat, pre, cfg, i, parts[w], rec);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  detail::Counters total(resp.size());
  for (const auto& p : parts) total.absorb(p);

  SimResult out;
  out.n_gates = total.n_gates;
  out.n_detected = total.n_detected;
  out.n_sifted = total.n_sifted;
  out.n_errors = total.n_errors;
  out.n_double_clicks = total.n_double_clicks;
  out.seed = cfg.seed;
  out.histogram = std::move(total.histogram);
  out.histogram_t = resp.t_grid();
  if (out.n_sifted > 0) {
    out.empirical_qber = static_cast<double>(out.n_errors) /
                         static_cast<double>(out.n_sifted);
    out.qber_stderr = std::sqrt(out.empirical_qber * (1.0 - out.empirical_qber) /
                                static_cast<double>(out.n_sifted));
  }
  return out;
}

}  // namespace bitgate::protocol
