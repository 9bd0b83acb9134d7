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
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "bitgate/errors.hpp"

namespace bitgate::multiphoton {

/// Event bookkeeping for a batch of two-photon detections. Out of n_i events
/// where only photon i was detected, n_i_wrong carried the wrong bit; out of
/// the c events where both photons were detected, c_i_wrong is the number of
/// wrong bits on photon i's detector set. Each photon alone cannot do better
/// than its single-photon floor q_i, so n_i_wrong >= ceil(n_i q_i) and
/// c_i_wrong >= ceil(c q_i) regardless of how the two sides are correlated.
struct TwoPhotonScenario {
  double q1 = 0.0;
  double q2 = 0.0;
  std::uint64_t n1 = 0, n2 = 0, c = 0;
  std::uint64_t n1_wrong = 0, n2_wrong = 0, c1_wrong = 0, c2_wrong = 0;
};

namespace detail {

/// Smallest integer k with k >= n * q, robust to rounding in the product.
inline std::uint64_t ceil_count(std::uint64_t n, double q) {
  const double target = static_cast<double>(n) * q;
  auto k = static_cast<std::uint64_t>(std::ceil(target));
  while (k > 0 && static_cast<double>(k - 1) >= target) --k;
  while (static_cast<double>(k) < target) ++k;
  return k;
}

inline void validate_scenario(const TwoPhotonScenario& s) {
  if (!(s.q1 >= 0.0 && s.q1 <= 0.5) || !(s.q2 >= 0.0 && s.q2 <= 0.5)) {
    throw std::domain_error("per-photon error floor outside [0, 1/2]");
  }
  if (s.n1_wrong > s.n1 || s.n2_wrong > s.n2 || s.c1_wrong > s.c ||
      s.c2_wrong > s.c) {
    throw std::invalid_argument("wrong-bit count exceeds its event count");
  }
  if (s.n1_wrong < ceil_count(s.n1, s.q1) ||
      s.n2_wrong < ceil_count(s.n2, s.q2) ||
      s.c1_wrong < ceil_count(s.c, s.q1) ||
      s.c2_wrong < ceil_count(s.c, s.q2)) {
    throw std::invalid_argument("wrong-bit count below the per-photon floor");
  }
}

}  // namespace detail

/// Expected merged error rate when double clicks resolve to a uniformly
/// random bit: (n1_wrong + n2_wrong + (c1_wrong + c2_wrong)/2) / (n1+n2+c).
inline double merged_qber(const TwoPhotonScenario& s) {
  detail::validate_scenario(s);
  const std::uint64_t total = s.n1 + s.n2 + s.c;
  if (total == 0) {
    throw std::domain_error("no detection events");
  }
  const double wrong = static_cast<double>(s.n1_wrong + s.n2_wrong) +
                       0.5 * static_cast<double>(s.c1_wrong + s.c2_wrong);
  return wrong / static_cast<double>(total);
}

struct BoundCheckResult {
  double q1 = 0.0, q2 = 0.0;
  std::uint64_t budget = 0;
  double slack = 0.0;  // 1/(2 budget), the integer-rounding allowance
  bool holds = false;
  bool vacuous = false;  // min(q1,q2) <= slack, nothing to check
  std::uint64_t cells_checked = 0;     // (n1, n2, c) cells
  std::uint64_t scenarios_checked = 0; // full correlation assignments
  std::uint64_t cells_skipped = 0;     // infeasible integer constraints
  std::uint64_t violations = 0;
  double min_value = 0.0;
  TwoPhotonScenario minimizer;
};

namespace detail {

struct CellKey {
  std::uint32_t n1, n2, c, n11, n21, c11, c21;

  bool operator<(const CellKey& o) const {
    return std::tie(n1, n2, c, n11, n21, c11, c21) <
           std::tie(o.n1, o.n2, o.c, o.n11, o.n21, o.c11, o.c21);
  }
};

struct WorkerState {
  std::uint64_t cells = 0, scenarios = 0, skipped = 0, violations = 0;
  bool has_min = false;
  std::uint32_t min_num = 0;   // 2*(n11+n21) + c11 + c21 at the minimizer
  std::uint32_t min_den = 0;   // 2*(n1+n2+c)
  CellKey min_key{};
};

// Rational compare: a_num/a_den < b_num/b_den (denominators <= 2*budget, so
// the cross products stay far from overflow).
inline bool rational_less(std::uint64_t a_num, std::uint64_t a_den,
                          std::uint64_t b_num, std::uint64_t b_den) {
  return a_num * b_den < b_num * a_den;
}

inline void consider_min(WorkerState& w, std::uint32_t num, std::uint32_t den,
                         const CellKey& key) {
  if (!w.has_min || rational_less(num, den, w.min_num, w.min_den) ||
      (!rational_less(w.min_num, w.min_den, num, den) && key < w.min_key)) {
    w.has_min = true;
    w.min_num = num;
    w.min_den = den;
    w.min_key = key;
  }
}

inline void scan_cells_for_n1(std::uint32_t n1, std::uint32_t budget, double q1,
                              double q2, double bound, WorkerState& w) {
  for (std::uint32_t n2 = 0; n1 + n2 <= budget; ++n2) {
    for (std::uint32_t c = 0; n1 + n2 + c <= budget; ++c) {
      const std::uint32_t total = n1 + n2 + c;
      if (total == 0) continue;

      const auto lo11 = static_cast<std::uint32_t>(ceil_count(n1, q1));
      const auto lo21 = static_cast<std::uint32_t>(ceil_count(n2, q2));
      const auto loc1 = static_cast<std::uint32_t>(ceil_count(c, q1));
      const auto loc2 = static_cast<std::uint32_t>(ceil_count(c, q2));
      if (lo11 > n1 || lo21 > n2 || loc1 > c || loc2 > c) {
        ++w.skipped;
        continue;
      }
      ++w.cells;
      w.scenarios += static_cast<std::uint64_t>(n1 - lo11 + 1) *
                     (n2 - lo21 + 1) * (c - loc1 + 1) * (c - loc2 + 1);

      // Exhaustive scan of every correlation assignment in the cell.
      std::uint32_t cell_min = UINT32_MAX;
      for (std::uint32_t n11 = lo11; n11 <= n1; ++n11) {
        for (std::uint32_t n21 = lo21; n21 <= n2; ++n21) {
          const std::uint32_t base2 = 2 * (n11 + n21);
          for (std::uint32_t c11 = loc1; c11 <= c; ++c11) {
            const std::uint32_t base3 = base2 + c11;
            for (std::uint32_t c21 = loc2; c21 <= c; ++c21) {
              const std::uint32_t v = base3 + c21;
              cell_min = v < cell_min ? v : cell_min;
            }
          }
        }
      }

      const std::uint32_t den = 2 * total;
      if (static_cast<double>(cell_min) < bound * static_cast<double>(den)) {
        ++w.violations;
      }
      consider_min(w, cell_min, den, {n1, n2, c, lo11, lo21, loc1, loc2});
    }
  }
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

}  // namespace detail

/// Exhaustively check that no two-photon detection bookkeeping with per-photon
/// floors (q1, q2) merges to an error rate below min(q1, q2) - 1/(2 budget).
/// Every (n1, n2, c) with n1 + n2 + c <= budget and every feasible integer
/// correlation assignment is enumerated. When min(q1, q2) <= 1/(2 budget) the
/// bound cannot fail (rates are nonnegative) and the scan is skipped.
inline BoundCheckResult verify_bound(double q1, double q2, std::uint64_t budget,
                                     unsigned n_threads = 0) {
  if (!(q1 >= 0.0 && q1 <= 0.5) || !(q2 >= 0.0 && q2 <= 0.5)) {
    throw std::domain_error("per-photon error floor outside [0, 1/2]");
  }
  if (budget == 0 || budget > 2000) {
    throw std::domain_error("enumeration budget must lie in [1, 2000]");
  }

  BoundCheckResult out;
  out.q1 = q1;
  out.q2 = q2;
  out.budget = budget;
  out.slack = 0.5 / static_cast<double>(budget);

  const double q_min = std::min(q1, q2);
  const double bound = q_min - out.slack;
  if (bound <= 0.0) {
    out.holds = true;
    out.vacuous = true;
    // Concentrating all events on the lower-floor photon minimizes the rate.
    TwoPhotonScenario& m = out.minimizer;
    m.q1 = q1;
    m.q2 = q2;
    if (q1 <= q2) {
      m.n1 = budget;
      m.n1_wrong = detail::ceil_count(budget, q1);
    } else {
      m.n2 = budget;
      m.n2_wrong = detail::ceil_count(budget, q2);
    }
    out.min_value = merged_qber(m);
    return out;
  }

  const unsigned workers = detail::resolve_threads(n_threads);
  std::vector<detail::WorkerState> states(workers);
  {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint32_t n1 = w; n1 <= budget; n1 += workers) {
          detail::scan_cells_for_n1(n1, static_cast<std::uint32_t>(budget), q1,
                                    q2, bound, states[w]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  detail::WorkerState merged;
  for (const auto& s : states) {
    merged.cells += s.cells;
    merged.scenarios += s.scenarios;
    merged.skipped += s.skipped;
    merged.violations += s.violations;
    if (s.has_min) detail::consider_min(merged, s.min_num, s.min_den, s.min_key);
  }

  out.cells_checked = merged.cells;
  out.scenarios_checked = merged.scenarios;
  out.cells_skipped = merged.skipped;
  out.violations = merged.violations;
  out.holds = merged.violations == 0;

  const detail::CellKey& k = merged.min_key;
  out.minimizer = TwoPhotonScenario{q1,    q2,    k.n1,  k.n2, k.c,
                                    k.n11, k.n21, k.c11, k.c21};
  out.min_value =
      static_cast<double>(merged.min_num) / static_cast<double>(merged.min_den);
  return out;
}

struct InductiveCheckResult {
  bool holds = false;
  double bound = 0.0;  // min over the per-photon floors
  double slack = 0.0;
  std::vector<BoundCheckResult> stages;
};

/// Extend the two-photon bound to 3..4 photons the way the pairwise argument
/// composes: the first k photons, already bounded by min(q_1..q_k), are
/// treated as one aggregated photon and checked against photon k+1.
inline InductiveCheckResult inductive_extension_check(std::span<const double> qs,
                                                      std::uint64_t budget,
                                                      unsigned n_threads = 0) {
  if (qs.size() < 2 || qs.size() > 4) {
    throw std::domain_error("inductive check expects 2 to 4 photons");
  }
  InductiveCheckResult out;
  double aggregated = qs[0];
  bool holds = true;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    BoundCheckResult stage = verify_bound(aggregated, qs[i], budget, n_threads);
    holds = holds && stage.holds;
    aggregated = std::min(aggregated, qs[i]);
    out.stages.push_back(std::move(stage));
  }
  out.holds = holds;
  out.bound = aggregated;
  out.slack = 0.5 / static_cast<double>(budget);
  return out;
}

}  // namespace bitgate::multiphoton
