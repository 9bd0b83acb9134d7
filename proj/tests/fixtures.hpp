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

// Synthetic detector curves and independent oracle helpers shared by the
// test binaries. Everything here stays deliberately dumb: plain scans and
// closed-form arithmetic, no reuse of the code paths under test.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "bitgate/bitgate.hpp"

namespace fixtures {

inline constexpr double kPi = std::numbers::pi;

/// Constant efficiencies, selector angle zero everywhere, grid [-1, 1] ns.
inline bitgate::temporal::TemporalResponse flat_curve(double eta_a, double eta_b,
                                                      std::size_t n = 21) {
  std::vector<double> t(n), ea(n, eta_a), eb(n, eta_b), th(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return {std::move(t), std::move(ea), std::move(eb), std::move(th),
          {-0.5, 0.5}};
}

/// Two Gaussian efficiency curves, peak 0.1, sigma 0.2 ns, centers at
/// -0.15 ns and +0.15 ns, sampled on [-1, 1] ns at 10 ps. The gate edges
/// drive the global min/max ratio far below 0.01.
inline bitgate::temporal::TemporalResponse gaussian_dem_curve() {
  std::vector<double> t, ea, eb, th;
  const double sigma = 0.2;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 0.01 * i;
    t.push_back(x);
    ea.push_back(0.1 * std::exp(-0.5 * std::pow((x + 0.15) / sigma, 2)));
    eb.push_back(0.1 * std::exp(-0.5 * std::pow((x - 0.15) / sigma, 2)));
    th.push_back(0.0);
  }
  return {std::move(t), std::move(ea), std::move(eb), std::move(th),
          {-0.2, 0.2}};
}

/// Transition-shaped curve whose certified modes (threshold 0.45) are exactly
/// the samples with |t| <= 0.48 ns, where eta_a = 0.10 and eta_b = 0.09, so
/// the restricted min/max ratio is 0.9. The tails collapse toward zero, which
/// pushes the global ratio many orders of magnitude below 0.01.
inline bitgate::temporal::TemporalResponse certified_fixture() {
  std::vector<double> t, ea, eb, th;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 0.01 * i;
    const double ax = std::abs(x);
    t.push_back(x);

    double theta = 0.0;
    if (ax >= 0.5) {
      theta = kPi / 2;
    } else if (ax > 0.25) {
      theta = (ax - 0.25) / 0.25 * (kPi / 2);
    }
    th.push_back(theta);

    const double fall =
        ax <= 0.48 ? 1.0 : std::exp(-std::pow((ax - 0.48) / 0.1, 2));
    ea.push_back(0.10 * fall);
    eb.push_back(0.09 * fall);
  }
  return {std::move(t), std::move(ea), std::move(eb), std::move(th),
          {-0.2, 0.2}};
}

/// Curve with explicit samples at selector angles pi/6 (t = 0.6 ns),
/// pi/3 (t = 0.7 ns) and pi/2 (t >= 0.8 ns), equal efficiencies 0.5.
inline bitgate::temporal::TemporalResponse angle_probe_curve() {
  const std::vector<double> t = {-1.0, -0.9, -0.8, -0.7, -0.6, -0.5, -0.25, 0.0,
                                 0.25, 0.5,  0.6,  0.7,  0.8,  0.9,  1.0};
  const std::vector<double> th = {kPi / 2, kPi / 2, kPi / 2, kPi / 3, kPi / 6,
                                  0.0,     0.0,     0.0,     0.0,     0.0,
                                  kPi / 6, kPi / 3, kPi / 2, kPi / 2, kPi / 2};
  std::vector<double> ea(t.size(), 0.5), eb(t.size(), 0.5);
  return {t, std::move(ea), std::move(eb), th, {-0.5, 0.5}};
}

/// Same grid as angle_probe_curve but with the selector pinned to zero
/// everywhere: a receiver without the transition coupling.
inline bitgate::temporal::TemporalResponse unpatched_curve() {
  const auto probe = angle_probe_curve();
  std::vector<double> th(probe.size(), 0.0);
  return {probe.t_grid(), probe.eta_a(), probe.eta_b(), std::move(th),
          probe.window()};
}

/// Brute-force min/max efficiency ratio over the masked samples.
inline double scan_min_max_ratio(const bitgate::temporal::TemporalResponse& resp,
                                 const std::vector<bool>& mask) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < resp.size(); ++i) {
    if (!mask[i]) continue;
    lo = std::min(lo, std::min(resp.eta_a()[i], resp.eta_b()[i]));
    hi = std::max(hi, std::max(resp.eta_a()[i], resp.eta_b()[i]));
  }
  return lo / hi;
}

/// Random density matrix via the Ginibre construction A A^dag / tr.
inline bitgate::quantum::QubitState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  bitgate::cx a(n01(rng), n01(rng)), b(n01(rng), n01(rng));
  bitgate::cx c(n01(rng), n01(rng)), d(n01(rng), n01(rng));
  bitgate::Mat2 g{a, b, c, d};
  const bitgate::Mat2 gd = g.adjoint();
  bitgate::Mat2 rho{
      g.m00 * gd.m00 + g.m01 * gd.m10, g.m00 * gd.m01 + g.m01 * gd.m11,
      g.m10 * gd.m00 + g.m11 * gd.m10, g.m10 * gd.m01 + g.m11 * gd.m11};
  const double tr = rho.trace().real();
  rho = (1.0 / tr) * rho;
  return bitgate::quantum::QubitState(rho.hermitized());
}

inline bitgate::quantum::MeasurementSetting random_setting(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // keep efficiencies away from 0 so detection-conditioned quantities exist
  return {0.05 + 0.95 * u01(rng), 0.05 + 0.95 * u01(rng),
          u01(rng) * kPi / 2};
}

inline double binomial_sigma(double p, double n) {
  return std::sqrt(p * (1.0 - p) / n);
}

}  // namespace fixtures
