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

#include "dqd/tdse.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dqd/calibration.hpp"
#include "test_oracles.hpp"

using namespace dqd;
using namespace dqd::tdse;

namespace {

using CVec = std::vector<std::complex<double>>;

// 256 points keep E_max, and so the step count, 16x below the default grid.
Grid1D coarse() { return Grid1D{-230, 230, 256}; }

struct Device {
  PotentialSpec spec;
  Grid1D grid;
  SpectralPair pair;
  LabUnits units;
};

const Device& coarse_setup() {
  static const Device s = [] {
    Device out{PotentialSpec{}, coarse(), {}, {}};
    out.pair = spectral_pair(out.spec, out.grid);
    const LambdaFit f = calibrate_lambda(out.spec, out.grid, operating_bias_grid(out.spec, out.grid));
    out.units = LabUnits{out.pair.gap(), f.lambda, 1.0};
    return out;
  }();
  return s;
}

double half_step(const PotentialSpec& s, const Grid1D& g, double bias = 0) { return 0.5 * stability_limit(s, g, bias); }

std::vector<double> density(const CVec& psi) {
  std::vector<double> d;
  for (const auto& z : psi) d.push_back(std::norm(z));
  return d;
}

double l1(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * dx;
}

double finite_difference_min(const PotentialSpec& s, double lo, double hi) {
  // Golden-section search on V.
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (potential(s, c) < potential(s, d)) b = d; else a = c;
  }
  return 0.5 * (a + b);
}

// Two-level reference by midpoint matrix exponentials, advanced in place.
struct TwoLevelOracle {
  const DetuningWaveform& w;
  QubitParams params;
  oracle::V2 state;
  double t = 0;

  void advance_to(double target) {
    const int n = std::max(1, static_cast<int>(std::ceil((target - t) / (params.t_x() / 20000))));
    const double h = (target - t) / n;
    for (int i = 0; i < n; ++i) {
      state = oracle::expm_hamiltonian(w(t + (i + 0.5) * h), h, params) * state;
    }
    t = target;
  }
};

}  // namespace

TEST(Grid, RejectsDegenerateGrids) {
  EXPECT_THROW((Grid1D{0, 1, 2}.validate()), DomainError);
  EXPECT_THROW((Grid1D{1, 1, 10}.validate()), DomainError);
  EXPECT_NO_THROW(Grid1D{}.validate());
  EXPECT_DOUBLE_EQ(Grid1D{}.dx(), 460.0 / 1023);
}

TEST(Potential, ValueAtOriginIsBarrierHeight) {
  const PotentialSpec s;
  EXPECT_DOUBLE_EQ(potential(s, 0.0), s.b_height);
}

TEST(Potential, MirrorSymmetricWithoutBias) {
  const PotentialSpec s;
  for (double x = 0; x <= 230; x += 7.3) EXPECT_NEAR(potential(s, x), potential(s, -x), 1e-15);
}

TEST(Potential, BiasTiltsLinearly) {
  PotentialSpec s;
  s.v_bias = 1e-4;
  for (double x : {-200.0, -50.0, 10.0, 180.0}) {
    EXPECT_NEAR(potential(s, x) - static_potential(s, x), 1000 * 1e-4 * x / (2 * s.half_width), 1e-15);
  }
}

TEST(Potential, DefaultSpecHasTwoMinima) {
  const PotentialSpec s;
  ASSERT_TRUE(s.double_well());
  const double right = finite_difference_min(s, 1, 230);
  const double left = finite_difference_min(s, -230, -1);
  EXPECT_NEAR(right, -left, 1e-4);
  EXPECT_NEAR(potential(s, right + 1e-3) - potential(s, right - 1e-3), 0, 1e-9);
  EXPECT_GT(right, 50);
  EXPECT_LT(potential(s, right), s.b_height);
  // Minimum, not an end point: the curvature there is positive.
  const double h = 1e-2;
  EXPECT_GT(potential(s, right + h) + potential(s, right - h) - 2 * potential(s, right), 0);
  PotentialSpec flat = s;
  flat.b_height = 0;
  EXPECT_FALSE(flat.double_well());
}

TEST(Potential, RejectsBadParameters) {
  PotentialSpec s;
  s.sigma_width = 0;
  EXPECT_THROW(s.validate(), DomainError);
  s = PotentialSpec{};
  s.b_height = -1;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(Stationary, HarmonicLadderWithoutBarrier) {
  PotentialSpec s;
  s.b_height = 0;
  const auto st = stationary_states(s, Grid1D{}, 6);
  const double hw = std::sqrt(2 * s.a_coef * 2 * s.kinetic_scale());  // hbar sqrt(2A / m*)
  EXPECT_NEAR(st[0].energy / (hw / 2), 1.0, 1e-3);
  for (int n = 0; n + 1 < 6; ++n) EXPECT_NEAR((st[n + 1].energy - st[n].energy) / hw, 1.0, 1e-3) << n;
}

TEST(Stationary, ResidualsAndOrthonormality) {
  const PotentialSpec s;
  const Grid1D g;
  const auto st = stationary_states(s, g, 4);
  for (std::size_t a = 0; a < st.size(); ++a) {
    EXPECT_LT(st[a].residual, 1e-8);
    EXPECT_EQ(st[a].psi.front(), 0.0);
    EXPECT_EQ(st[a].psi.back(), 0.0);
    for (std::size_t b = 0; b < st.size(); ++b) {
      EXPECT_NEAR(weighted_dot(st[a].psi, st[b].psi, g.dx()), a == b ? 1.0 : 0.0, 1e-10);
    }
  }
  for (std::size_t a = 0; a + 1 < st.size(); ++a) EXPECT_LT(st[a].energy, st[a + 1].energy);
}

TEST(Stationary, AgreesWithDenseDiagonalisation) {
  const PotentialSpec s;
  const Grid1D g{-230, 230, 200};
  const int m = g.n_points - 2;
  const double k = s.kinetic_scale() / (g.dx() * g.dx());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    h(i, i) = potential(s, g.x(i + 1)) + 2 * k;
    if (i + 1 < m) h(i, i + 1) = h(i + 1, i) = -k;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const auto st = stationary_states(s, g, 3);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(st[n].energy, es.eigenvalues()[n], 1e-10 * es.eigenvalues()[n]);
}

TEST(Spectral, ParityOfTheBondingPair) {
  for (int n : {256, 255}) {
    const Grid1D g{-230, 230, n};
    const SpectralPair sp = spectral_pair(PotentialSpec{}, g);
    EXPECT_LT(sp.e_bonding, sp.e_antibonding);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(sp.psi_bonding[i], sp.psi_bonding[n - 1 - i], 1e-8);
      EXPECT_NEAR(sp.psi_antibonding[i], -sp.psi_antibonding[n - 1 - i], 1e-8);
    }
    EXPECT_NEAR(weighted_dot(sp.psi_bonding, sp.psi_antibonding, g.dx()), 0, 1e-10);
    EXPECT_NEAR(weighted_dot(sp.psi_bonding, sp.psi_bonding, g.dx()), 1, 1e-10);
    EXPECT_NEAR(weighted_dot(sp.psi_antibonding, sp.psi_antibonding, g.dx()), 1, 1e-10);
    // Parity-sector energies match the unrestricted solve.
    const auto st = stationary_states(PotentialSpec{}, g, 2);
    EXPECT_NEAR(sp.e_bonding, st[0].energy, 1e-11);
    EXPECT_NEAR(sp.e_antibonding, st[1].energy, 1e-11);
  }
}

TEST(Spectral, LogicalZeroSitsInTheLeftDot) {
  const Device& s = coarse_setup();
  const auto zero = s.pair.logical_zero();
  double left = 0;
  for (int i = 0; i < s.grid.n_points; ++i) {
    if (s.grid.x(i) < 0) left += zero[i] * zero[i] * s.grid.dx();
  }
  EXPECT_GT(left, 0.99);
}

TEST(Spectral, GapMatchesTheReferenceDevice) {
  const SpectralPair sp = spectral_pair(PotentialSpec{}, Grid1D{});
  EXPECT_NEAR(sp.gap() * 1000, 11.7, 11.7e-3);  // micro-eV
}

TEST(Spectral, ConvergesUnderGridDoubling) {
  const PotentialSpec s;
  const SpectralPair a = spectral_pair(s, Grid1D{});
  const SpectralPair b = spectral_pair(s, Grid1D{-230, 230, 2047});
  EXPECT_LT(std::abs(a.e_bonding / b.e_bonding - 1), 1e-3);
  EXPECT_LT(std::abs(a.e_antibonding / b.e_antibonding - 1), 1e-3);
}

TEST(Lambda, LinearOverTheOperatingRange) {
  const PotentialSpec s;
  const Grid1D g;
  const LambdaFit f = calibrate_lambda(s, g, operating_bias_grid(s, g));
  EXPECT_LT(f.residual, 1e-6);
  EXPECT_NEAR(f.lambda, 0.421, 0.421e-3);
  // The largest point of the grid sits at |eps| = Delta.
  EXPECT_NEAR(std::abs(f.eps.back()) / f.delta_mev, 1.0, 1e-3);
  for (std::size_t i = 0; i < f.bias.size(); ++i) {
    if (f.bias[i] == 0) EXPECT_EQ(f.eps[i], 0.0);
  }
}

TEST(Lambda, DoublingTheWidthChangesLambdaNotLinearity) {
  PotentialSpec s;
  const Grid1D g = coarse();
  const LambdaFit a = calibrate_lambda(s, g, operating_bias_grid(s, g));
  s.half_width *= 2;
  const LambdaFit b = calibrate_lambda(s, g, operating_bias_grid(s, g));
  EXPECT_GT(std::abs(b.lambda / a.lambda - 1), 0.1);
  EXPECT_LT(a.residual, 1e-6);
  EXPECT_LT(b.residual, 1e-6);
}

TEST(Lambda, RejectsSingleWellsAndLopsidedGrids) {
  PotentialSpec s;
  s.b_height = 0;
  EXPECT_THROW(calibrate_lambda(s, coarse(), {-1e-5, 0, 1e-5}), SolverError);
  EXPECT_THROW(calibrate_lambda(PotentialSpec{}, coarse(), {0, 1e-5}), DomainError);
  EXPECT_THROW(calibrate_lambda(PotentialSpec{}, coarse(), {0}), DomainError);
}

TEST(Leapfrog, SinglePointStencil) {
  PotentialSpec s;
  s.a_coef = 0;
  s.b_height = 0;
  const Grid1D g{0, 10, 11};
  const double k = s.kinetic_scale() / (g.dx() * g.dx());
  const double dt = 0.4 * kHbar / (4 * k);
  const Propagator p(s, g, dt, 0);
  Wavefunction1D wf;
  wf.grid = g;
  wf.dt = dt;
  wf.u.assign(11, 0.0);
  wf.v.assign(11, 0.0);
  wf.v_lag.assign(11, 0.0);
  wf.v[5] = 1;
  p.step(wf, 0, 0);
  const double c = dt / kHbar;
  // u = c H v: 2k on the site, -k on the neighbours.
  EXPECT_NEAR(wf.u[5], c * 2 * k, 1e-15);
  EXPECT_NEAR(wf.u[4], -c * k, 1e-15);
  EXPECT_NEAR(wf.u[6], -c * k, 1e-15);
  EXPECT_EQ(wf.u[3], 0.0);
  // v' = v - c H u' with the fresh u.
  const double cc = c * c * k * k;
  EXPECT_NEAR(wf.v[5], 1 - 6 * cc, 1e-14);
  EXPECT_NEAR(wf.v[4], 4 * cc, 1e-14);
  EXPECT_NEAR(wf.v[3], -cc, 1e-14);
  EXPECT_EQ(wf.v[0], 0.0);
  EXPECT_EQ(wf.v[10], 0.0);
  EXPECT_EQ(wf.v_lag[5], 1.0);
  EXPECT_DOUBLE_EQ(wf.time, dt);
}

TEST(Leapfrog, GershgorinBoundCoversTheSpectrum) {
  PotentialSpec s;
  const Grid1D g{-230, 230, 120};
  for (double bias : {0.0, 1e-3}) {
    s.v_bias = bias;
    const int m = g.n_points - 2;
    const double k = s.kinetic_scale() / (g.dx() * g.dx());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      h(i, i) = potential(s, g.x(i + 1)) + 2 * k;
      if (i + 1 < m) h(i, i + 1) = h(i + 1, i) = -k;
    }
    const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().cwiseAbs().maxCoeff();
    s.v_bias = 0;
    EXPECT_GE(e_max_bound(s, g, bias), top);
    EXPECT_LT(e_max_bound(s, g, bias), 1.1 * top);
  }
}

TEST(Leapfrog, PreflightRejectsUnstableSteps) {
  const PotentialSpec s;
  const Grid1D g = coarse();
  const double limit = stability_limit(s, g, 1e-3);
  EXPECT_NO_THROW(Propagator(s, g, limit, 1e-3));
  EXPECT_THROW(Propagator(s, g, limit * 1.001, 1e-3), StabilityError);
  try {
    Propagator(s, g, 2 * limit, 1e-3);
  } catch (const StabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("hbar/E_max"), std::string::npos);
  }
  EXPECT_THROW(evolve(real_state(coarse_setup().pair.psi_bonding), s, g, {}, 1.0, 2 * limit, 1e-3), StabilityError);
}

TEST(Leapfrog, EigenstateDensityIsStatic) {
  for (const Grid1D& g : {coarse(), Grid1D{}}) {
    const PotentialSpec s;
    const SpectralPair sp = spectral_pair(s, g);
    const double dt = half_step(s, g);
    for (const auto* psi : {&sp.psi_bonding, &sp.psi_antibonding}) {
      std::vector<double> rho0;
      for (double v : *psi) rho0.push_back(v * v);
      const Evolution ev = evolve(real_state(*psi), s, g, {}, 1000 * dt, dt, 0);
      ASSERT_EQ(ev.steps, 1000);
      EXPECT_LT(l1(density(ev.psi), rho0, g.dx()), 1e-8);
    }
  }
}

TEST(Leapfrog, NormChangePerStepIsTiny) {
  const Device& s = coarse_setup();
  const double dt = half_step(s.spec, s.grid, 1e-4);
  const auto bias = [](double t) { return 1e-4 * std::sin(t / 5); };
  double prev = -1, worst = 0;
  evolve(embed_logical(QubitState(1, 0), s.pair), s.spec, s.grid, bias, 2000 * dt, dt, 1e-4,
         [&](double, const CVec& psi) {
           const double n = norm(psi, s.grid.dx());
           if (prev >= 0) worst = std::max(worst, std::abs(n - prev));
           prev = n;
         },
         1);
  EXPECT_LT(worst, 1e-10);
}

TEST(Evolve, FullTurnKeepsNormAndBondingDensity) {
  const Device& s = coarse_setup();
  const double tx = s.units.ps(QubitParams{}.t_x());
  const double dt = half_step(s.spec, s.grid);
  const Evolution ev = evolve(real_state(s.pair.psi_bonding), s.spec, s.grid, {}, tx, dt, 0);
  EXPECT_LT(std::abs(norm(ev.psi, s.grid.dx()) - 1), 1e-6);
  std::vector<double> rho0;
  for (double v : s.pair.psi_bonding) rho0.push_back(v * v);
  EXPECT_LT(l1(density(ev.psi), rho0, s.grid.dx()), 1e-6);
}

TEST(Evolve, HalfTurnMirrorsLogicalZero) {
  const Device& s = coarse_setup();
  const double half = s.units.ps(QubitParams{}.t_x() / 2);
  const Evolution ev = evolve(embed_logical(QubitState(1, 0), s.pair), s.spec, s.grid, {}, half,
                              half_step(s.spec, s.grid), 0);
  const auto rho = density(ev.psi);
  std::vector<double> mirrored;
  const auto zero = s.pair.logical_zero();
  for (int i = s.grid.n_points - 1; i >= 0; --i) mirrored.push_back(zero[i] * zero[i]);
  EXPECT_LT(l1(rho, mirrored, s.grid.dx()), 1e-6);
  const Projection p = project_logical(ev.psi, s.pair);
  EXPECT_GT(std::norm(p.state(1)), 1 - 1e-8);
}

TEST(Evolve, TimeReversalRecoversTheStart) {
  const Device& s = coarse_setup();
  const double dt = half_step(s.spec, s.grid, 2e-4);
  const double span = 1000 * dt;
  const auto fwd = [span](double t) { return 2e-4 * std::sin(3.1 * t / span) * std::exp(-t / span); };
  const auto bwd = [&](double t) { return fwd(span - t); };
  const CVec psi0 = embed_logical(QubitState(std::complex<double>(0.6, 0.1), 0.79372539331937720), s.pair);
  const Evolution a = evolve(psi0, s.spec, s.grid, fwd, span, dt, 2e-4);
  CVec back = a.psi;
  for (auto& z : back) z = std::conj(z);
  const Evolution b = evolve(back, s.spec, s.grid, bwd, span, dt, 2e-4);
  CVec end = b.psi;
  for (auto& z : end) z = std::conj(z);
  EXPECT_GE(overlap(psi0, end, s.grid.dx()) / norm(psi0, s.grid.dx()), 1 - 1e-8);
}

TEST(Projection, BondingStateIsTheEqualSuperposition) {
  const Device& s = coarse_setup();
  const Projection p = project_logical(real_state(s.pair.psi_bonding), s.pair);
  EXPECT_NEAR(p.state(0).real(), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(p.state(1).real(), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_LT(p.leakage, 1e-10);
}

TEST(Projection, ThirdStateLeaksCompletely) {
  const Device& s = coarse_setup();
  const auto st = stationary_states(s.spec, s.grid, 3);
  const Projection p = project_logical(real_state(st[2].psi), s.pair);
  EXPECT_GT(p.leakage, 1 - 1e-10);
  EXPECT_GE(p.leakage, 0.0);
}

TEST(Projection, EmbedRoundTrip) {
  const Device& s = coarse_setup();
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const oracle::V2 q = oracle::random_state_seeded(seed);
    const Projection p = project_logical(embed_logical(QubitState(q(0), q(1)), s.pair), s.pair);
    EXPECT_GT(state_fidelity(p.state, QubitState(q(0), q(1))), 1 - 1e-12);
    EXPECT_LT(p.leakage, 1e-12);
  }
}

// Calibrated preparation pulse on the coarse grid, checked against a
// two-level reference along the whole trajectory.
TEST(Agreement, PreparationPulseFollowsTheTwoLevelModel) {
  const Device& s = coarse_setup();
  const QubitParams qp;
  const AscentConfig cfg;
  const double tau = reference_taus(qp)[0];
  CalibrationTable table(qp, cfg.accept);
  table.insert(calibrate_point(tau, kPi, qp, cfg).entry);
  const DetuningWaveform w = train_waveform(prepare_state(PrepTarget::Zero), RiseSpec{tau}, table, qp, cfg);
  const double vmax = max_abs_bias(w, s.units);
  TwoLevelOracle ref{w, qp, oracle::V2(1, 1) / std::sqrt(2.0)};
  double worst = 0;
  int samples = 0;
  const Evolution ev = evolve(
      real_state(s.pair.psi_bonding), s.spec, s.grid, bias_function(w, s.units), s.units.ps(w.duration()),
      half_step(s.spec, s.grid, vmax), vmax,
      [&](double t, const CVec& psi) {
        ref.advance_to(std::min(s.units.model_time(t), w.duration()));
        const Projection p = project_logical(psi, s.pair);
        worst = std::max(worst, 1 - state_fidelity(p.state, QubitState(ref.state(0), ref.state(1))));
        ++samples;
      },
      5000);
  EXPECT_GT(samples, 40);
  EXPECT_LT(worst, 1e-3);
  const Projection end = project_logical(ev.psi, s.pair);
  EXPECT_GE(state_fidelity(end.state, QubitState(1, 0)), 0.999);
  EXPECT_LT(end.leakage, 1e-3);
}

TEST(Agreement, BiasSignFollowsTheConjugatedFrame) {
  const Device& s = coarse_setup();
  // Model detuning +Delta is an x' rotation: a half turn takes |0> to -x,
  // where the opposite sign would land on +x.
  const QubitParams qp;
  const DetuningWaveform w = constant_waveform(qp.delta, kPi / std::sqrt(2.0));
  const double vmax = max_abs_bias(w, s.units);
  const Evolution ev = evolve(embed_logical(QubitState(1, 0), s.pair), s.spec, s.grid, bias_function(w, s.units),
                              s.units.ps(w.duration()), half_step(s.spec, s.grid, vmax), vmax);
  const Projection p = project_logical(ev.psi, s.pair);
  const QubitState expect = propagate(QubitState(1, 0), w, qp);
  EXPECT_GT(state_fidelity(p.state, expect), 1 - 1e-3);
  EXPECT_LT(bloch_vector(p.state).x(), -0.99);
}

TEST(Output, SnapshotCsv) {
  const Grid1D g{-1, 1, 3};
  const std::string csv = snapshot_csv({0, {0.5, -0.5}, 0}, PotentialSpec{}, g, 0);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,re,im,density,potential");
  EXPECT_NE(csv.find("\n0,0.5,-0.5,0.5,4.08"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Output, JsonRoundTrip) {
  PotentialSpec s;
  s.asymmetry = 0.01;
  s.v_bias = 2e-5;
  const nlohmann::json j = s;
  const PotentialSpec t = j.get<PotentialSpec>();
  EXPECT_EQ(t.asymmetry, s.asymmetry);
  EXPECT_EQ(t.v_bias, s.v_bias);
  EXPECT_EQ(t.sigma_width, s.sigma_width);
  const Grid1D g = nlohmann::json(Grid1D{-100, 100, 64}).get<Grid1D>();
  EXPECT_EQ(g.n_points, 64);
  EXPECT_THROW(nlohmann::json({{"n_points", 2}}).get<Grid1D>(), DomainError);
}
