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
#include <numbers>
#include <stdexcept>

#include "bitgate/mat2.hpp"

namespace bitgate::quantum {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kCompletenessTol = 1e-12;
inline constexpr double kSpectrumTol = 1e-10;

/// Single-photon polarization/phase qubit as a 2x2 density matrix.
/// Construction validates Hermiticity, positive semidefiniteness and unit
/// trace (each within 1e-12); off-diagonals may be complex.
class QubitState {
 public:
  explicit QubitState(const Mat2& rho) : rho_(rho) {
    if (!rho.is_hermitian(kHermitianTol)) {
      throw std::domain_error("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - cx(1.0)) > kHermitianTol) {
      throw std::domain_error("density matrix trace != 1");
    }
    if (eigen_hermitian(rho).lambda_min < -kPsdTol) {
      throw std::domain_error("density matrix is not positive semidefinite");
    }
  }

  /// Pure state from an unnormalized ket (a, b).
  static QubitState pure(cx a, cx b) {
    const Vec2 ket = Vec2{a, b}.normalized();
    return QubitState(Mat2::outer(ket));
  }

  const Mat2& rho() const { return rho_; }

 private:
  Mat2 rho_;
};

/// Detector efficiencies and basis-selector transition angle at one temporal
/// mode. theta = 0: optical and software bit-mapping coincide; theta = pi/2:
/// they are uncorrelated.
struct MeasurementSetting {
  double eta_a;
  double eta_b;
  double theta;

  MeasurementSetting(double eta_a_, double eta_b_, double theta_)
      : eta_a(eta_a_), eta_b(eta_b_), theta(theta_) {
    if (!(eta_a >= 0.0 && eta_a <= 1.0) || !(eta_b >= 0.0 && eta_b <= 1.0)) {
      throw std::domain_error("detector efficiency outside [0, 1]");
    }
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12)) {
      throw std::domain_error("selector angle outside [0, pi/2]");
    }
  }
};

/// Three-outcome measurement (bit 0, bit 1, vacuum). Construction checks that
/// every element is PSD and that the triple sums to the identity.
struct Povm {
  Mat2 e0, e1, ev;

  Povm(const Mat2& e0_, const Mat2& e1_, const Mat2& ev_)
      : e0(e0_), e1(e1_), ev(ev_) {
    for (const Mat2* op : {&e0, &e1, &ev}) {
      if (!op->is_hermitian(kHermitianTol) ||
          eigen_hermitian(*op).lambda_min < -kPsdTol) {
        throw std::domain_error("POVM element is not a positive operator");
      }
    }
    if ((e0 + e1 + ev).max_abs_diff(Mat2::identity()) > kCompletenessTol) {
      throw std::domain_error("POVM does not sum to identity");
    }
  }
};

/// cos(theta)|0> + sin(theta)|1>
inline Vec2 rotated_ket(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

/// sin(theta)|0> - cos(theta)|1>
inline Vec2 rotated_ket_orth(double theta) {
  return {std::sin(theta), -std::cos(theta)};
}

/// The four conditional measurements a receiver with random software and
/// optical bit-mapping performs at one mode, in the order: both mappings in
/// their first assignment, both swapped, then the two transition cases whose
/// bit-0 acceptance state is rotated by theta.
inline std::array<Povm, 4> conditional_measurements(const MeasurementSetting& s) {
  const Mat2 id = Mat2::identity();
  const Mat2 p0 = Mat2::outer({1.0, 0.0});
  const Mat2 p1 = Mat2::outer({0.0, 1.0});
  const Mat2 pt = Mat2::outer(rotated_ket(s.theta));
  const Mat2 pt_orth = Mat2::outer(rotated_ket_orth(s.theta));

  const auto triple = [&](const Mat2& m0, const Mat2& m1) {
    return Povm(m0, m1, id - m0 - m1);
  };
  return {
      triple(s.eta_a * p0, s.eta_b * p1),
      triple(s.eta_b * p0, s.eta_a * p1),
      triple(s.eta_a * pt, s.eta_b * pt_orth),
      triple(s.eta_b * pt, s.eta_a * pt_orth),
  };
}

/// Detection probability for any single photon: (eta_a + eta_b) / 2.
inline double detection_probability_of(const MeasurementSetting& s) {
  return 0.5 * (s.eta_a + s.eta_b);
}

/// Equal-weight average of the four conditional measurements. The vacuum
/// element is verified to be (1 - (eta_a + eta_b)/2) * I within 1e-12, which
/// is what makes the detection probability state-independent.
inline Povm averaged_povm(const MeasurementSetting& s) {
  const auto ms = conditional_measurements(s);
  Mat2 e0 = Mat2::zero(), e1 = Mat2::zero(), ev = Mat2::zero();
  for (const Povm& m : ms) {
    e0 = e0 + m.e0;
    e1 = e1 + m.e1;
    ev = ev + m.ev;
  }
  Povm out(0.25 * e0, 0.25 * e1, 0.25 * ev);

  const Mat2 expected_ev = (1.0 - detection_probability_of(s)) * Mat2::identity();
  if (out.ev.max_abs_diff(expected_ev) > kCompletenessTol) {
    throw std::logic_error("vacuum element deviates from its closed form");
  }
  return out;
}

/// 1 - Tr(rho * E_v); equals (eta_a + eta_b)/2 for every valid state.
inline double detection_probability(const MeasurementSetting& s,
                                    const QubitState& state) {
  const Povm povm = averaged_povm(s);
  return 1.0 - trace_product(state.rho(), povm.ev).real();
}

struct ExtremalProbabilities {
  double p_min;
  double p_max;
};

/// Minimum and maximum probability of each bit outcome over all single-photon
/// states, obtained by numerically diagonalizing E_0 and E_1. Both operators
/// share the spectrum {p_det (1 - cos theta)/2, p_det (1 + cos theta)/2}; the
/// numeric values are cross-checked against that closed form within 1e-10.
inline ExtremalProbabilities povm_extremal_probabilities(
    const MeasurementSetting& s) {
  const Povm povm = averaged_povm(s);
  const Eigen2 eig0 = eigen_hermitian(povm.e0);
  const Eigen2 eig1 = eigen_hermitian(povm.e1);

  const double p_det = detection_probability_of(s);
  const double expect_min = 0.5 * p_det * (1.0 - std::cos(s.theta));
  const double expect_max = 0.5 * p_det * (1.0 + std::cos(s.theta));
  for (const Eigen2* e : {&eig0, &eig1}) {
    if (std::abs(e->lambda_min - expect_min) > kSpectrumTol ||
        std::abs(e->lambda_max - expect_max) > kSpectrumTol) {
      throw std::logic_error("bit-operator spectrum deviates from closed form");
    }
  }
  return {eig0.lambda_min, eig0.lambda_max};
}

/// Lowest error rate any single photon can achieve at selector angle theta:
/// (1 - cos theta) / 2.
inline double qber_min(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12)) {
    throw std::domain_error("selector angle outside [0, pi/2]");
  }
  return 0.5 * (1.0 - std::cos(theta));
}

struct AttackState {
  QubitState state;
  bool unique;  // false when the wrong-bit operator has a degenerate spectrum
};

/// Pure state minimizing the conditional wrong-bit probability
/// Tr(rho E_wrong) / p_det for the given sent bit. The minimum achieved
/// equals qber_min(theta) within 1e-10 (verified).
inline AttackState optimal_attack_state(const MeasurementSetting& s,
                                        int alice_bit) {
  if (alice_bit != 0 && alice_bit != 1) {
    throw std::domain_error("bit value must be 0 or 1");
  }
  const double p_det = detection_probability_of(s);
  if (p_det <= 0.0) {
    throw std::domain_error("both detectors have zero efficiency");
  }

  const Povm povm = averaged_povm(s);
  const Mat2& wrong = (alice_bit == 0) ? povm.e1 : povm.e0;
  const Eigen2 eig = eigen_hermitian(wrong);

  QubitState state(Mat2::outer(eig.vec_min));
  const double achieved = trace_product(state.rho(), wrong).real() / p_det;
  if (std::abs(achieved - qber_min(s.theta)) > kSpectrumTol) {
    throw std::logic_error("attack state misses the error-rate floor");
  }
  return {state, !eig.degenerate};
}

}  // namespace bitgate::quantum
