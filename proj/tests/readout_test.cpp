// Copyright 2026 The dqdctl Authors
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

#include "dqd/readout.hpp"

#include <gtest/gtest.h>

#include "dqd/calibration.hpp"
#include "test_oracles.hpp"

using namespace dqd;
using namespace dqd::tdse;

namespace {

struct Basis {
  PotentialSpec spec;
  Grid1D grid;
  SpectralPair pair;
  ReadoutCalibration cal;
};

Basis make_basis(PotentialSpec spec, Grid1D grid) {
  Basis b{spec, grid, spectral_pair(spec, grid), {}};
  b.cal = calibrate_readout(b.pair, dot_boundary(spec, grid));
  return b;
}

const Basis& device() {
  static const Basis b = make_basis(PotentialSpec{}, Grid1D{});
  return b;
}

// A cubic tilt of about a tenth of the gap breaks the mirror symmetry.
const Basis& lopsided() {
  static const Basis b = [] {
    PotentialSpec s;
    s.asymmetry = 0.01;
    return make_basis(s, Grid1D{-230, 230, 512});
  }();
  return b;
}

QubitState to_state(const oracle::V2& v) { return QubitState(v(0), v(1)); }

// Right-dot probability by direct density integration of the embedded state.
double simulated_p_right(const Basis& b, const QubitState& q) {
  return measure_p_right(embed_logical(q, b.pair), b.grid, b.cal.split);
}

}  // namespace

TEST(Calibration, MirrorSymmetricDevice) {
  const ReadoutCalibration& c = device().cal;
  EXPECT_EQ(c.split, 0.0);
  EXPECT_NEAR(c.p0r + c.p1r, 1.0, 1e-10);
  EXPECT_LT(c.p0r, 0.01);
  EXPECT_LE(std::abs(c.eta), 8e-4);
  EXPECT_NEAR(c.eta, -c.eta_left, 1e-10);
}

TEST(Calibration, HalfLineOverlapsCancel) {
  for (const Basis* b : {&device(), &lopsided()}) {
    EXPECT_NEAR(b->cal.eta + b->cal.eta_left, 0.0, 1e-10);
    EXPECT_LE(0.0, b->cal.p0r);
    EXPECT_LE(b->cal.p0r, b->cal.p1r);
    EXPECT_LE(b->cal.p1r, 1.0);
  }
  EXPECT_GT(std::abs(lopsided().cal.eta), 1e-6);
}

TEST(Calibration, TallerBarrierSeparatesTheDots) {
  double prev = 1;
  for (double b : {4.08, 6.0, 9.0}) {
    PotentialSpec s;
    s.b_height = b;
    const ReadoutCalibration c = make_basis(s, Grid1D{-230, 230, 512}).cal;
    EXPECT_LT(c.p0r, prev);
    EXPECT_LT(std::abs(c.eta), 1e-12);
    prev = c.p0r;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Boundary, BarrierTopForLopsidedWells) {
  const Basis& b = lopsided();
  const double x = b.cal.split;
  EXPECT_NE(x, 0.0);
  EXPECT_LT(std::abs(x), 20.0);
  EXPECT_NEAR(potential(b.spec, x + 1e-3) - potential(b.spec, x - 1e-3), 0.0, 1e-10);
  EXPECT_GT(potential(b.spec, x), potential(b.spec, x + 5));
  EXPECT_GT(potential(b.spec, x), potential(b.spec, x - 5));
}

TEST(Measure, BondingStateSplitsEvenly) {
  const Basis& b = device();
  const auto psi = real_state(b.pair.psi_bonding);
  EXPECT_NEAR(measure_p_right(psi, b.grid), 0.5, 1e-10);
  // P_L + P_R = 1, checked by mirroring the split.
  const auto zero = real_state(b.pair.logical_zero());
  double left = 0;
  for (int i = 0; i < b.grid.n_points; ++i) {
    if (b.grid.x(i) < 0) left += std::norm(zero[i]) * b.grid.dx();
  }
  EXPECT_NEAR(left + measure_p_right(zero, b.grid), 1.0, 1e-10);
  EXPECT_NEAR(measure_p_right(real_state(b.pair.logical_one()), b.grid), b.cal.p1r, 1e-12);
}

TEST(Identity, RightProbabilityDecomposes) {
  for (const Basis* b : {&device(), &lopsided()}) {
    std::mt19937_64 rng(2026);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
      const QubitState q = to_state(oracle::random_state(rng));
      worst = std::max(worst, std::abs(simulated_p_right(*b, q) - predicted_p_right(q, b->cal)));
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Estimator, ErrorStaysInsideTheBound) {
  for (const Basis* b : {&device(), &lopsided()}) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
      const QubitState q = to_state(oracle::random_state(rng));
      const ReadoutEstimate e = estimate_amplitudes(simulated_p_right(*b, q), b->cal);
      EXPECT_LE(std::abs(e.beta_sq - std::norm(q(1))), b->cal.error_bound() + 1e-9);
      EXPECT_NEAR(e.alpha_sq + e.beta_sq, 1.0, 1e-12);
      EXPECT_GE(e.beta_sq, -e.error_bound - 1e-9);
      EXPECT_LE(e.beta_sq, 1 + e.error_bound + 1e-9);
    }
  }
}

TEST(Estimator, DeviceErrorWithinEta) {
  const Basis& b = device();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const QubitState q = to_state(oracle::random_state(rng));
    const ReadoutEstimate e = estimate_amplitudes(simulated_p_right(b, q), b.cal);
    EXPECT_LE(std::abs(e.beta_sq - std::norm(q(1))), std::abs(b.cal.eta) + 1e-9);
  }
}

TEST(Estimator, MaximalSuperpositionSaturatesTheBound) {
  const Basis& b = lopsided();
  const QubitState plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const ReadoutEstimate e = estimate_amplitudes(simulated_p_right(b, plus), b.cal);
  EXPECT_NEAR(std::abs(e.beta_sq - 0.5), b.cal.error_bound(), 1e-9);
  // The symmetric device recovers the same state exactly.
  const ReadoutEstimate d = estimate_amplitudes(simulated_p_right(device(), plus), device().cal);
  EXPECT_NEAR(d.beta_sq, 0.5, 1e-9);
}

TEST(Estimator, CalibrationPointsMapToTheBasis) {
  const ReadoutCalibration& c = device().cal;
  EXPECT_NEAR(estimate_amplitudes(c.p0r, c).beta_sq, 0.0, 1e-15);
  EXPECT_NEAR(estimate_amplitudes(c.p1r, c).beta_sq, 1.0, 1e-15);
  EXPECT_EQ(estimate_amplitudes(c.p1r, c).error_bound, c.error_bound());
}

TEST(Estimator, OutOfRangeIsFlaggedNotClipped) {
  const ReadoutCalibration& c = device().cal;
  const ReadoutEstimate e = estimate_amplitudes(c.p0r - 1e-3, c);
  EXPECT_TRUE(e.clamped);
  EXPECT_LT(e.beta_sq, 0.0);
  EXPECT_EQ(e.beta_sq_clamped(), 0.0);
  EXPECT_FALSE(estimate_amplitudes(0.5, c).clamped);
}

TEST(Estimator, DegenerateCalibrationIsAnError) {
  ReadoutCalibration c;
  c.p0r = c.p1r = 0.5;
  EXPECT_THROW(estimate_amplitudes(0.5, c), DomainError);
}

// Corrected R_y(pi) through the full solver, read out by dot occupation.
TEST(CrossCheck, RotatedStateReadsOutItsAmplitudes) {
  const Grid1D g{-230, 230, 256};
  const Basis b = make_basis(PotentialSpec{}, g);
  const LabUnits units{b.pair.gap(), calibrate_lambda(b.spec, g, operating_bias_grid(b.spec, g)).lambda, 1.0};
  const QubitParams qp;
  const double tau = reference_taus(qp)[0];
  const DecompositionResult r = decompose_y(kPi);
  std::vector<double> angles;
  for (const auto& p : r.primitives) angles.push_back(p.angle);
  const CalibrationTable table = build_table({tau}, angles, qp, AscentConfig{}, 2).table;
  const DetuningWaveform w = train_waveform(r, RiseSpec{tau}, table, qp);
  const double vmax = max_abs_bias(w, units);
  const QubitState start = QubitState(std::cos(0.4), std::polar(std::sin(0.4), 0.3));
  const Evolution ev = evolve(embed_logical(start, b.pair), b.spec, g, bias_function(w, units), units.ps(w.duration()),
                              0.5 * stability_limit(b.spec, g, vmax), vmax);
  const Projection p = project_logical(ev.psi, b.pair);
  const ReadoutEstimate e = estimate_amplitudes(measure_p_right(ev.psi, g), b.cal);
  EXPECT_NEAR(e.beta_sq, std::norm(p.state(1)), std::abs(b.cal.eta) + 1e-3);
  // And the rotation did what it should.
  EXPECT_NEAR(std::norm(p.state(1)), std::cos(0.4) * std::cos(0.4), 1e-3);
}

TEST(Output, JsonFields) {
  const nlohmann::json j = device().cal;
  for (const char* k : {"p0r", "p1r", "eta", "eta_left", "split_nm", "error_bound"}) EXPECT_TRUE(j.contains(k)) << k;
  const nlohmann::json e = estimate_amplitudes(0.3, device().cal);
  EXPECT_EQ(e["clamped"], false);
  EXPECT_TRUE(e.contains("beta_sq_clamped"));
}
