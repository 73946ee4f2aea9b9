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

#include "dqd/noise.hpp"

#include <gtest/gtest.h>

#include "test_oracles.hpp"

using namespace dqd;

namespace {

const QubitParams kParams{};

// One line of 16 angles at the rise time whose minimum angle is pi/8.
const CalibrationTable& line_table() {
  static const CalibrationTable t = [] {
    std::vector<double> angles;
    for (int k = 1; k <= 16; ++k) angles.push_back(k * kPi / 8);
    return build_table({reference_taus(kParams)[0]}, angles, kParams, AscentConfig{}, 4).table;
  }();
  return t;
}

double tau0() { return reference_taus(kParams)[0]; }

DetuningWaveform x_pi() { return square_waveform({PrimitiveAxis::XPrime, kPi}, kParams); }
Unitary2 x_pi_target() { return primitive_unitary({PrimitiveAxis::XPrime, kPi}); }

}  // namespace

TEST(NoiseModel, Validation) {
  EXPECT_THROW((NoiseModel{-0.1, 1, 10}.validate()), DomainError);
  EXPECT_THROW((NoiseModel{0.1, 1, 0}.validate()), DomainError);
  EXPECT_NO_THROW((NoiseModel{0.0, 1, 1}.validate()));
}

TEST(NormalStream, MatchesTheDocumentedTransform) {
  std::mt19937_64 eng(42);
  auto uni = [&] { return static_cast<double>((eng() >> 11) + 1) / 9007199254740992.0; };
  NormalStream s(42);
  for (int i = 0; i < 50; ++i) {
    const double r = std::sqrt(-2 * std::log(uni()));
    const double a = 2 * oracle::pi * uni();
    EXPECT_DOUBLE_EQ(s.next(), r * std::cos(a));
    EXPECT_DOUBLE_EQ(s.next(), r * std::sin(a));
  }
}

TEST(NormalStream, StandardMoments) {
  NormalStream s(7);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  EXPECT_NEAR(m1 / n, 0, 0.01);
  EXPECT_NEAR(m2 / n, 1, 0.01);
  EXPECT_NEAR(m4 / n, 3, 0.06);
}

TEST(Offsets, ScaleWithSigmaAndGap) {
  QubitParams p;
  p.delta = 2.5;
  const auto a = draw_offsets({0.1, 9, 50}, p);
  const auto b = draw_offsets({0.3, 9, 50}, kParams);
  ASSERT_EQ(a.size(), 50u);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(a[i] / (0.1 * 2.5), b[i] / 0.3, 1e-12);
}

TEST(RunNoisy, ZeroSigmaReproducesNoiselessExactly) {
  const NoiseReport r = run_noisy(x_pi(), x_pi_target(), {0.0, 3, 25}, kParams);
  EXPECT_EQ(r.mean_fidelity, r.noiseless_fidelity);
  EXPECT_EQ(r.std_error, 0.0);
  const DetuningWaveform w = train_waveform(decompose_y(kPi), RiseSpec{tau0()}, line_table(), kParams);
  const NoiseReport c = run_noisy(w, target_unitary(RotationSpec::make(axis_y<double>(), kPi)), {0.0, 3, 10}, kParams);
  EXPECT_EQ(c.mean_fidelity, process_fidelity(realized_unitary(w, kParams),
                                              target_unitary(RotationSpec::make(axis_y<double>(), kPi))));
}

TEST(RunNoisy, BitIdenticalReruns) {
  const NoiseModel m{0.1, 11, 100};
  const NoiseReport a = run_noisy(x_pi(), x_pi_target(), m, kParams);
  const NoiseReport b = run_noisy(x_pi(), x_pi_target(), m, kParams);
  EXPECT_EQ(a.fidelities, b.fidelities);
  EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
  EXPECT_EQ(a.std_error, b.std_error);
  const NoiseReport c = run_noisy(x_pi(), x_pi_target(), m, kParams, 4);
  EXPECT_EQ(a.fidelities, c.fidelities);
  EXPECT_EQ(a.mean_fidelity, c.mean_fidelity);
}

TEST(RunNoisy, PairedVariantsShareTheDrawLog) {
  const NoiseModel m{0.1, 5, 60};
  const NoiseReport a = run_noisy(x_pi(), x_pi_target(), m, kParams);
  const DetuningWaveform w = train_waveform(DecompositionResult{{{PrimitiveAxis::XPrime, kPi}}, SchemeTag::Single},
                                            RiseSpec{tau0()}, line_table(), kParams);
  const NoiseReport b = run_noisy(w, x_pi_target(), m, kParams);
  EXPECT_EQ(a.offsets, b.offsets);
  EXPECT_EQ(a.offsets, draw_offsets(m, kParams));
}

TEST(RunNoisy, ReportStatistics) {
  const NoiseReport r = run_noisy(x_pi(), x_pi_target(), {0.2, 1, 40}, kParams);
  double mean = 0;
  for (double f : r.fidelities) mean += f / 40;
  double ss = 0;
  for (double f : r.fidelities) ss += (f - mean) * (f - mean);
  EXPECT_NEAR(r.mean_fidelity, mean, 1e-15);
  EXPECT_NEAR(r.std_error, std::sqrt(ss / 39) / std::sqrt(40.0), 1e-15);
  EXPECT_GE(r.mean_fidelity, 0.0);
  EXPECT_LE(r.mean_fidelity, 1.0);
  // Each sample matches a direct evaluation at its offset.
  for (int i : {0, 17, 39}) {
    EXPECT_EQ(r.fidelities[i], process_fidelity(realized_unitary(x_pi().with_offset(r.offsets[i]), kParams),
                                                x_pi_target()));
  }
}

TEST(RunNoisy, QuadrupledSamplesHalveTheStandardError) {
  const NoiseReport a = run_noisy(x_pi(), x_pi_target(), {0.1, 21, 400}, kParams);
  const NoiseReport b = run_noisy(x_pi(), x_pi_target(), {0.1, 22, 1600}, kParams);
  EXPECT_NEAR(a.std_error / b.std_error, 2.0, 0.6);
}

TEST(RunNoisy, StateOverload) {
  const QubitState zero(1, 0);
  const QubitState out = propagate(zero, x_pi(), kParams);
  const NoiseReport r = run_noisy(x_pi(), zero, out, {0.0, 1, 5}, kParams);
  EXPECT_NEAR(r.mean_fidelity, 1.0, 1e-14);
  const NoiseReport n = run_noisy(x_pi(), zero, out, {0.1, 1, 50}, kParams);
  EXPECT_LT(n.mean_fidelity, 1.0);
}

TEST(RunNoisy, FreeEvolutionIsFirstOrderInsensitive) {
  // Mean infidelity over sigma shrinks linearly as sigma -> 0: no first-order term.
  const DetuningWaveform idle = constant_waveform(0.0, kParams.t_x() / 3);
  const Unitary2 target = realized_unitary(idle, kParams);
  std::vector<double> slope;
  for (double s : {1e-2, 1e-3, 1e-4}) {
    const NoiseReport r = run_noisy(idle, target, {s, 8, 200}, kParams);
    slope.push_back(r.mean_error() / s);
  }
  EXPECT_NEAR(slope[0] / slope[1], 10, 0.5);
  EXPECT_NEAR(slope[1] / slope[2], 10, 0.5);
  EXPECT_LT(slope[2], 1e-4);
}

TEST(PulseComparison, CorrectedPulsesAreNoMoreFragile) {
  const NoiseModel m{0, 2026, 100};
  for (const DecompositionResult& r : {decompose_y(kPi), decompose_axis(LabAxis::Z, kPi)}) {
    const GainPoint g = pulse_comparison(r, tau0(), {0.1}, m, line_table(), kParams).front();
    EXPECT_LE(std::abs(g.error_base - g.error_variant), 2 * std::hypot(g.std_error_base, g.std_error_variant));
    EXPECT_GT(g.error_base, 0);
  }
}

TEST(SubdivisionGain, ZeroSigmaIsUnitGain) {
  const auto g = subdivision_gain(1.5 * kPi, tau0(), {0.0}, {0, 1, 10}, line_table(), kParams);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].gain, 1.0);
  EXPECT_EQ(g[0].error_base, 0.0);
  EXPECT_EQ(g[0].error_variant, 0.0);
}

TEST(SubdivisionGain, ThreeHalfTurnGainBand) {
  const auto g = subdivision_gain(1.5 * kPi, tau0(), {0.05, 0.2}, {0, 2026, 400}, line_table(), kParams, {}, 4);
  EXPECT_GE(g[1].gain, 1.5);
  EXPECT_LE(g[1].gain, 3.5);
  EXPECT_GT(g[0].gain, 1.0);
  EXPECT_GT(g[1].error_base, g[0].error_base);
}

TEST(SubdivisionGain, ZRotationsDoNotBenefit) {
  const auto g = z_split_gain(1.5 * kPi, 4, tau0(), {0.1, 0.2}, {0, 2026, 200}, line_table(), kParams, {}, 4);
  for (const auto& p : g) EXPECT_LT(p.gain, 1.2);
}

TEST(SubdivisionGain, UnsplittableRotationIsAnError) {
  EXPECT_THROW(subdivision_gain(kPi / 8, tau0(), {0.1}, {0, 1, 10}, line_table(), kParams), DomainError);
  EXPECT_THROW(z_split_gain(kPi, 1, tau0(), {0.1}, {0, 1, 10}, line_table(), kParams), DomainError);
}

TEST(SubdivisionGain, CsvLayout) {
  const std::string csv = gain_csv({{0.1, 0.02, 0.01, 2.0, 0.1, 0, 0}});
  EXPECT_EQ(csv, "sigma,err_square,err_corrected,gain,stderr\n0.10000000000000001,0.02,0.01,2,0.10000000000000001\n");
}
