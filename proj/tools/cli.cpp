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

#include "dqd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "dqd/calibration.hpp"
#include "dqd/fidelity_map.hpp"
#include "dqd/io.hpp"
#include "dqd/noise.hpp"
#include "dqd/readout.hpp"
#include "dqd/tdse.hpp"

namespace dqd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Global {
  std::string config;
  std::string table;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// Failed checks that still produced output.
struct PartialResult : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, bool angles) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    if (angles) {
      out.push_back(parse_angle(item));
    } else {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
        throw DomainError("cannot parse number '" + item + "'");
      }
      out.push_back(v);
    }
  }
  return out;
}

std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// A rotation request resolved to primitives and its ideal unitary.
struct Rotation {
  std::string label;
  DecompositionResult decomposition;
  Unitary2 target;
};

Rotation resolve_rotation(const std::string& axis_text, double angle) {
  std::string a;
  for (char c : axis_text) a += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const double wrapped = wrap_angle(angle);
  Rotation r{a + "(" + fmt(angle) + ")", {}, Unitary2::Identity()};
  if (a == "x" || a == "y" || a == "z") {
    const LabAxis ax = a == "x" ? LabAxis::X : a == "y" ? LabAxis::Y : LabAxis::Z;
    r.decomposition = decompose_axis(ax, wrapped);
    r.target = target_unitary(RotationSpec::make(lab_axis(ax), wrapped));
  } else if (a == "x'" || a == "xp" || a == "z'" || a == "zp") {
    const PrimitiveAxis ax = a[0] == 'x' ? PrimitiveAxis::XPrime : PrimitiveAxis::ZPrime;
    if (wrapped > 0) {
      r.decomposition = DecompositionResult{{{ax, wrapped}}, SchemeTag::Single};
      r.target = primitive_unitary({ax, wrapped});
    }
  } else {
    const std::vector<double> v = parse_list(axis_text, false);
    if (v.size() != 3) throw DomainError("axis must be x, y, z, x', z' or nx,ny,nz");
    const BlochVector n(v[0], v[1], v[2]);
    if (n.norm() == 0) throw DomainError("axis vector is zero");
    const RotationSpec spec = RotationSpec::make(n.normalized(), wrapped);
    r.decomposition = decompose_general_3(spec);
    r.target = target_unitary(spec);
  }
  return r;
}

QubitState parse_state(const std::string& text) {
  const double s = 1 / std::sqrt(2.0);
  if (text == "0") return QubitState(1, 0);
  if (text == "1") return QubitState(0, 1);
  if (text == "+") return QubitState(s, s);
  if (text == "-") return QubitState(s, -s);
  if (text == "+i") return QubitState(s, std::complex<double>(0, s));
  if (text == "-i") return QubitState(s, std::complex<double>(0, -s));
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw DomainError("initial state must be 0, 1, +, -, +i, -i or theta,phi");
  return state_from_angles(parse_angle(text.substr(0, comma)), parse_angle(text.substr(comma + 1)));
}

class Runner {
 public:
  Runner(const Global& g, CLI::App& app, std::ostream& out) : out_(out) {
    cfg_ = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (app.count("--seed")) cfg_.seed = g.seed;
    if (app.count("--out")) cfg_.out = g.out;
    if (app.count("--threads")) cfg_.threads = g.threads;
    table_path_ = g.table;
  }

  RunConfig& cfg() { return cfg_; }

  int calibrate() {
    cfg_.validate();
    const json opts{{"command", "calibrate"}};
    const auto taus = cfg_.tau_values();
    const BuildReport report = build_table(taus, cfg_.angle_values(), cfg_.qubit, AscentConfig{}, cfg_.thread_count());
    json tj = report.table.to_json();
    tj["meta"] = metadata_json(cfg_, opts);
    write_text(path("table.json"), tj.dump(2) + "\n");
    write_text(path("fig2.csv"), metadata_line(cfg_, opts) + "\n" + report.table.to_csv());
    json fails = json::array();
    for (const auto& f : report.failures) {
      fails.push_back({{"tau", f.entry.tau / cfg_.qubit.t_x()},
                       {"angle", f.entry.target_angle},
                       {"residual", f.entry.residual_error},
                       {"evaluations", f.evaluations},
                       {"message", f.message}});
    }
    write_text(path("failures.json"),
               json{{"meta", metadata_json(cfg_, opts)}, {"failures", fails}, {"trend_violations", report.warnings}}
                       .dump(2) +
                   "\n");
    int complements = 0;
    for (const auto& e : report.table.entries()) complements += e.complement;
    out_ << "calibrated " << report.table.entries().size() << " entries over " << taus.size() << " rise times ("
         << complements << " realised with an extra turn)\n";
    out_ << report.failures.size() << " unconverged, " << report.warnings.size() << " delta_t trend violations\n";
    for (const auto& w : report.warnings) out_ << "  trend: " << w << "\n";
    return report.failures.empty() && report.warnings.empty() ? kExitOk : kExitPartial;
  }

  int rotate(const std::string& axis, const std::string& angle_text, const std::string& init_text,
             std::optional<double> tau_tx, bool tdse, int samples) {
    cfg_.validate();
    const double angle = parse_angle(angle_text);
    const Rotation rot = resolve_rotation(axis, angle);
    const QubitState init = parse_state(init_text);
    const double tau = rise_time(tau_tx);
    const json opts{{"command", "rotate"}, {"axis", axis},   {"angle", angle},        {"init", init_text},
                    {"tau", tau / t_x()},  {"tdse", tdse}, {"samples", samples}, {"table", table_tag()}};
    const CalibrationTable table = table_for(tau, {rot.decomposition});
    const DetuningWaveform w = train_waveform(rot.decomposition, RiseSpec{tau}, table, cfg_.qubit);
    const QubitParams& qp = cfg_.qubit;

    std::vector<std::pair<double, QubitState>> path_states{{0.0, init}};
    const QubitState final_state = propagate(init, w, qp, default_dt_max(qp), [&](double t, const QubitState& s) {
      path_states.emplace_back(t, s);
    });
    const std::size_t stride = std::max<std::size_t>(1, path_states.size() / std::max(1, samples));
    std::ostringstream traj;
    traj.precision(17);
    traj << metadata_line(cfg_, opts) << "\nt,nx,ny,nz\n";
    for (std::size_t i = 0; i < path_states.size(); ++i) {
      if (i % stride != 0 && i + 1 != path_states.size()) continue;
      const BlochVector b = bloch_vector(path_states[i].second);
      traj << path_states[i].first / t_x() << ',' << b.x() << ',' << b.y() << ',' << b.z() << '\n';
    }
    write_text(path("trajectory.csv"), traj.str());
    write_text(path("pulse.csv"), pulse_csv(w, opts, samples));

    const Unitary2 u = realized_unitary(w, qp);
    const double fp = process_fidelity(u, rot.target);
    const QubitState expect = rot.target * init;
    const double fs = state_fidelity(final_state, expect);
    const BlochVector fb = bloch_vector(final_state);
    json report{{"meta", metadata_json(cfg_, opts)},
                {"rotation", rot.label},
                {"scheme", std::string(to_string(rot.decomposition.scheme))},
                {"tau", tau / t_x()},
                {"duration", w.duration() / t_x()},
                {"pulses", pulse_train_json(rot.decomposition.primitives,
                                            train_corrections(rot.decomposition, RiseSpec{tau}, table), qp)},
                {"process_fidelity", fp},
                {"state_fidelity", fs},
                {"final_bloch", {fb.x(), fb.y(), fb.z()}}};
    out_ << "rotation " << rot.label << " [" << to_string(rot.decomposition.scheme) << ", "
         << rot.decomposition.primitives.size() << " pulses, tau=" << fmt(tau / t_x(), 6)
         << " t_x, duration=" << fmt(w.duration() / t_x(), 6) << " t_x]\n";
    out_ << "process fidelity " << fmt(fp, 12) << "\nstate fidelity   " << fmt(fs, 12) << "\n";

    if (tdse) report["tdse"] = rotate_tdse(w, init, expect, opts);
    write_text(path("rotate.json"), report.dump(2) + "\n");
    return kExitOk;
  }

  int fidelity_map_cmd(const std::string& axis, const std::string& angle_text, std::optional<double> tau_tx,
                       int points) {
    cfg_.validate();
    const double angle = parse_angle(angle_text);
    const Rotation rot = resolve_rotation(axis, angle);
    const double tau = rise_time(tau_tx);
    const json opts{{"command", "fidelity-map"}, {"axis", axis},     {"angle", angle},
                    {"tau", tau / t_x()},        {"points", points}, {"table", table_tag()}};
    const CalibrationTable table = table_for(tau, {rot.decomposition});
    const DetuningWaveform w = train_waveform(rot.decomposition, RiseSpec{tau}, table, cfg_.qubit);
    const Unitary2 u = realized_unitary(w, cfg_.qubit);
    const FidelityMap map = fidelity_map(u, rot.target, fibonacci_sphere(points));
    write_text(path("fidelity_map.csv"), metadata_line(cfg_, opts) + "\n" + fidelity_map_csv(map));
    const auto worst = std::max_element(map.points.begin(), map.points.end(),
                                        [](const MapPoint& a, const MapPoint& b) { return a.error < b.error; });
    out_ << "rotation " << rot.label << " at tau=" << fmt(tau / t_x(), 6) << " t_x over " << points << " states\n";
    out_ << "process fidelity " << fmt(process_fidelity(u, rot.target), 12) << "\n";
    out_ << "worst error " << fmt(map.max_error(), 6) << " at theta=" << fmt(worst->at.theta, 6)
         << " phi=" << fmt(worst->at.phi, 6) << "\nbest error  " << fmt(map.min_error(), 6) << "\n";
    return kExitOk;
  }

  int noise_sweep(const std::string& angle_text, std::optional<double> tau_tx) {
    cfg_.validate();
    const double angle = parse_angle(angle_text);
    const double tau = rise_time(tau_tx);
    const json opts{{"command", "noise-sweep"}, {"angle", angle}, {"tau", tau / t_x()}, {"table", table_tag()}};
    const SubdivisionPlan plan = subdivide_x(angle, tau, cfg_.qubit);
    if (plan.slices < 2) {
      throw DomainError("R_x(" + fmt(angle) + ") cannot be subdivided at tau=" + fmt(tau / t_x()) + " t_x");
    }
    const DecompositionResult ry = decompose_y(kPi);
    const DecompositionResult rz = decompose_axis(LabAxis::Z, kPi);
    const CalibrationTable table =
        table_for(tau, {decompose_axis(LabAxis::X, angle), DecompositionResult{plan.primitives, SchemeTag::Single},
                        ry, rz});
    const NoiseModel model{0.0, cfg_.seed, cfg_.samples};
    const int threads = cfg_.thread_count();
    const auto gain = subdivision_gain(angle, tau, cfg_.sigmas, model, table, cfg_.qubit, {}, threads);
    write_text(path("gain.csv"), metadata_line(cfg_, opts) + "\n" + gain_csv(gain));

    std::ostringstream pulses;
    pulses.precision(17);
    pulses << metadata_line(cfg_, opts) << "\nrotation,sigma,err_square,err_corrected,diff_over_se\n";
    json agreement = json::array();
    bool agree = true;
    for (const auto& [name, r] : {std::pair{"ry_pi", ry}, std::pair{"rz_pi", rz}}) {
      for (const GainPoint& g : pulse_comparison(r, tau, cfg_.sigmas, model, table, cfg_.qubit, {}, threads)) {
        const double se = std::hypot(g.std_error_base, g.std_error_variant);
        const double z = se > 0 ? std::abs(g.error_base - g.error_variant) / se : 0.0;
        pulses << name << ',' << g.sigma << ',' << g.error_base << ',' << g.error_variant << ',' << z << '\n';
        agreement.push_back({{"rotation", name}, {"sigma", g.sigma}, {"diff_over_se", z}, {"within_2se", z <= 2}});
        agree = agree && z <= 2;
      }
    }
    write_text(path("pulses.csv"), pulses.str());

    json pts = json::array();
    for (const auto& g : gain) {
      pts.push_back({{"sigma", g.sigma},
                     {"err_unsplit", g.error_base},
                     {"err_split", g.error_variant},
                     {"gain", g.gain},
                     {"gain_stderr", g.gain_std_error}});
    }
    write_text(path("noise.json"), json{{"meta", metadata_json(cfg_, opts)},
                                        {"slices", plan.slices},
                                        {"samples", cfg_.samples},
                                        {"gain", pts},
                                        {"square_vs_corrected", agreement}}
                                           .dump(2) +
                                       "\n");
    out_ << "R_x(" << fmt(angle, 6) << ") in " << plan.slices << " slices, tau=" << fmt(tau / t_x(), 6) << " t_x, "
         << cfg_.samples << " samples, seed " << cfg_.seed << "\n";
    out_ << "sigma      err_unsplit    err_split      gain\n";
    for (const auto& g : gain) {
      out_ << std::left << std::setw(10) << fmt(g.sigma, 4) << ' ' << std::setw(14) << fmt(g.error_base, 6) << ' '
           << std::setw(14) << fmt(g.error_variant, 6) << ' ' << fmt(g.gain, 4) << " +- " << fmt(g.gain_std_error, 2)
           << "\n";
    }
    out_ << "square vs corrected R_y(pi), R_z(pi): " << (agree ? "within 2 standard errors" : "DIFFER") << "\n";
    return kExitOk;
  }

  int tdse_validate(std::optional<double> dt_ps) {
    cfg_.validate();
    const json opts{{"command", "tdse-validate"}, {"dt", dt_ps ? json(*dt_ps) : json()}};
    const tdse::PotentialSpec& spec = cfg_.potential;
    const tdse::Grid1D& grid = cfg_.grid;
    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, json detail) {
      detail["name"] = name;
      detail["pass"] = pass;
      checks.push_back(detail);
      all = all && pass;
      out_ << (pass ? "PASS " : "FAIL ") << name << "  " << detail.dump() << "\n";
    };

    // Stationary states.
    const auto states = tdse::stationary_states(spec, grid, 6);
    std::ostringstream spectrum;
    spectrum.precision(17);
    spectrum << metadata_line(cfg_, opts) << "\nn,energy_mev,residual\n";
    double worst_residual = 0;
    for (std::size_t n = 0; n < states.size(); ++n) {
      spectrum << n << ',' << states[n].energy << ',' << states[n].residual << '\n';
      worst_residual = std::max(worst_residual, states[n].residual);
    }
    write_text(path("spectrum.csv"), spectrum.str());
    const tdse::SpectralPair pair = tdse::spectral_pair(spec, grid);
    record("spectrum", worst_residual < 1e-8 && pair.gap() > 0,
           {{"states", states.size()}, {"max_residual", worst_residual}, {"gap_uev", pair.gap() * 1000}});
    write_text(path("ground_state.csv"),
               metadata_line(cfg_, opts) + "\n" + tdse::snapshot_csv(tdse::real_state(pair.psi_bonding), spec, grid, 0));

    if (spec.b_height == 0 && spec.symmetric()) {
      const double expect = std::sqrt(spec.a_coef * spec.kinetic_scale());
      const double rel = std::abs(states[0].energy - expect) / expect;
      record("harmonic_ground", rel < 1e-3, {{"energy_mev", states[0].energy}, {"hbar_omega_half", expect},
                                             {"relative_error", rel}});
    }

    const bool qubit_like = spec.double_well() && grid.symmetric();
    std::optional<tdse::LabUnits> units;
    if (qubit_like) {
      const tdse::LambdaFit fit = tdse::calibrate_lambda(spec, grid, tdse::operating_bias_grid(spec, grid));
      units = tdse::LabUnits{fit.delta_mev, fit.lambda, cfg_.qubit.delta};
      record("lambda_linearity", fit.residual < 1e-6,
             {{"lambda", fit.lambda}, {"delta_uev", fit.delta_mev * 1000}, {"residual", fit.residual},
              {"points", fit.bias.size()}});
    }

    // Pre-flight: the bound must reject a step just above it, and an explicit
    // --dt above it is a usage error.
    const double limit = tdse::stability_limit(spec, grid, 0.0);
    bool rejected = false;
    try {
      tdse::Propagator(spec, grid, 1.01 * limit, 0.0);
    } catch (const tdse::StabilityError&) {
      rejected = true;
    }
    record("stability_preflight", rejected, {{"hbar_over_emax_ps", limit}});
    if (dt_ps) tdse::Propagator(spec, grid, *dt_ps, 0.0);  // throws StabilityError
    const double dt = dt_ps.value_or(cfg_.dt_fraction * limit);

    {
      const auto psi0 = tdse::real_state(pair.psi_bonding);
      double worst = 0;
      tdse::evolve(
          psi0, spec, grid, [](double) { return 0.0; }, 1000 * dt, dt, 0.0,
          [&](double, const std::vector<std::complex<double>>& psi) {
            double d = 0;
            for (std::size_t i = 0; i < psi.size(); ++i) d = std::max(d, std::abs(std::norm(psi[i]) - std::norm(psi0[i])));
            worst = std::max(worst, d * grid.dx());
          },
          100);
      record("stationarity", worst < 1e-8, {{"steps", 1000}, {"max_density_change", worst}});
    }
    {
      // One free precession period of the qubit from the left-localised state.
      const double period = units ? units->ps(t_x()) : tdse::kHbar * kTwoPi / std::max(pair.gap(), 1e-12);
      const auto psi0 = qubit_like ? tdse::real_state(pair.logical_zero()) : tdse::real_state(pair.psi_bonding);
      double worst = 0;
      const auto ev = tdse::evolve(
          psi0, spec, grid, [](double) { return 0.0; }, period, dt, 0.0,
          [&](double, const std::vector<std::complex<double>>& psi) {
            worst = std::max(worst, std::abs(tdse::norm(psi, grid.dx()) - 1));
          },
          1000);
      record("norm_conservation", worst < 1e-6, {{"duration_ps", period}, {"steps", ev.steps}, {"max_drift", worst}});
    }
    if (qubit_like) {
      const double tau = reference_taus(cfg_.qubit)[0];
      CalibrationTable table(cfg_.qubit, AscentConfig{}.accept);
      table.insert(calibrate_point(tau, kPi, cfg_.qubit, AscentConfig{}).entry);
      const DetuningWaveform w = train_waveform(prepare_state(PrepTarget::Zero), RiseSpec{tau}, table, cfg_.qubit);
      const double vmax = tdse::max_abs_bias(w, *units);
      const double step = std::min(dt, cfg_.dt_fraction * tdse::stability_limit(spec, grid, vmax));
      const auto ev = tdse::evolve(tdse::real_state(pair.psi_bonding), spec, grid, tdse::bias_function(w, *units),
                                   units->ps(w.duration()), step, vmax);
      const tdse::Projection p = tdse::project_logical(ev.psi, pair);
      const double f = state_fidelity(p.state, QubitState(1, 0));
      record("preparation_pulse", f >= 0.999 && p.leakage < 1e-3,
             {{"fidelity", f}, {"leakage", p.leakage}, {"duration_ps", units->ps(w.duration())}});
      write_text(path("prepared_state.csv"),
                 metadata_line(cfg_, opts) + "\n" + tdse::snapshot_csv(ev.psi, spec, grid, 0));
    }
    write_text(path("validation.json"),
               json{{"meta", metadata_json(cfg_, opts)}, {"checks", checks}, {"all_pass", all}}.dump(2) + "\n");
    out_ << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? kExitOk : kExitPartial;
  }

  int readout(std::optional<double> p_right) {
    cfg_.validate();
    const json opts{{"command", "readout"}, {"p_right", p_right ? json(*p_right) : json()}};
    const tdse::SpectralPair pair = tdse::spectral_pair(cfg_.potential, cfg_.grid);
    const ReadoutCalibration cal = calibrate_readout(pair, dot_boundary(cfg_.potential, cfg_.grid));
    json j{{"meta", metadata_json(cfg_, opts)}, {"calibration", cal}};
    out_ << "dot boundary at x = " << fmt(cal.split, 6) << " nm\n";
    out_ << "P(right | 0) = " << fmt(cal.p0r, 8) << "\nP(right | 1) = " << fmt(cal.p1r, 8) << "\n";
    out_ << "eta = " << fmt(cal.eta, 6) << ", amplitude error bound " << fmt(cal.error_bound(), 6) << "\n";
    if (p_right) {
      if (!(*p_right >= 0 && *p_right <= 1)) throw DomainError("--p-right must lie in [0, 1]");
      const ReadoutEstimate e = estimate_amplitudes(*p_right, cal);
      j["estimate"] = e;
      out_ << "|alpha|^2 = " << fmt(e.alpha_sq, 8) << ", |beta|^2 = " << fmt(e.beta_sq, 8) << " (+- "
           << fmt(e.error_bound, 3) << ")" << (e.clamped ? ", outside [0, 1]" : "") << "\n";
    }
    write_text(path("readout.json"), j.dump(2) + "\n");
    out_ << j.dump() << "\n";
    return kExitOk;
  }

 private:
  double t_x() const { return cfg_.qubit.t_x(); }
  fs::path path(const std::string& name) const { return fs::path(cfg_.out) / name; }

  double rise_time(std::optional<double> tau_tx) const {
    if (!tau_tx) return cfg_.tau_values().front();
    if (!(*tau_tx >= 0) || *tau_tx > kMaxTauOverTx) throw DomainError("--tau must lie in [0, 0.25] t_x");
    return *tau_tx * t_x();
  }

  json table_tag() const {
    if (table_path_.empty()) return nullptr;
    return hex64(fnv1a64(read_text(table_path_)));
  }

  /// The user's table, or a fresh one covering exactly the needed angles.
  CalibrationTable table_for(double tau, const std::vector<DecompositionResult>& needs) {
    if (!table_path_.empty()) {
      try {
        const CalibrationTable t = CalibrationTable::from_json(json::parse(read_text(table_path_)));
        if (t.params().delta != cfg_.qubit.delta) {
          throw DomainError("table was calibrated for delta=" + fmt(t.params().delta));
        }
        return t;
      } catch (const json::exception& e) {
        throw IoError("malformed table " + table_path_ + ": " + e.what());
      }
    }
    std::set<double> angles;
    for (const auto& r : needs) {
      for (const auto& p : r.primitives) angles.insert(p.angle);
    }
    if (tau == 0 || angles.empty()) return CalibrationTable(cfg_.qubit, AscentConfig{}.accept);
    const BuildReport rep = build_table({tau}, {angles.begin(), angles.end()}, cfg_.qubit, AscentConfig{},
                                        cfg_.thread_count());
    if (!rep.failures.empty()) throw PartialResult("calibration did not converge: " + rep.failures.front().message);
    return rep.table;
  }

  std::string pulse_csv(const DetuningWaveform& w, const json& opts, int samples) const {
    std::ostringstream os;
    os.precision(17);
    os << metadata_line(cfg_, opts) << "\nt,eps\n";
    if (!w.empty()) {
      for (const auto& [t, e] : w.sample(std::max(2, 4 * samples))) os << t / t_x() << ',' << e / cfg_.qubit.delta << '\n';
    }
    return os.str();
  }

  json rotate_tdse(const DetuningWaveform& w, const QubitState& init, const QubitState& expect, const json& opts) {
    const tdse::PotentialSpec& spec = cfg_.potential;
    const tdse::Grid1D& grid = cfg_.grid;
    const tdse::SpectralPair pair = tdse::spectral_pair(spec, grid);
    const tdse::LambdaFit fit = tdse::calibrate_lambda(spec, grid, tdse::operating_bias_grid(spec, grid));
    const tdse::LabUnits units{fit.delta_mev, fit.lambda, cfg_.qubit.delta};
    const double vmax = tdse::max_abs_bias(w, units);
    const double dt = cfg_.dt_fraction * tdse::stability_limit(spec, grid, vmax);
    const double duration = units.ps(w.duration());
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt)));
    const int cadence = cfg_.snapshot_every > 0 ? cfg_.snapshot_every : static_cast<int>(std::max(1L, steps / 400));
    std::ostringstream traj;
    traj.precision(17);
    traj << metadata_line(cfg_, opts) << "\nt,nx,ny,nz,leakage\n";
    const tdse::BiasFunction bias = tdse::bias_function(w, units);
    const tdse::Evolution ev = tdse::evolve(
        tdse::embed_logical(init, pair), spec, grid, bias, duration, dt, vmax,
        [&](double t, const std::vector<std::complex<double>>& psi) {
          const tdse::Projection p = tdse::project_logical(psi, pair);
          const BlochVector b = bloch_vector(p.state);
          traj << units.model_time(t) / t_x() << ',' << b.x() << ',' << b.y() << ',' << b.z() << ',' << p.leakage
               << '\n';
        },
        cadence);
    write_text(path("tdse_trajectory.csv"), traj.str());
    write_text(path("tdse_final.csv"),
               metadata_line(cfg_, opts) + "\n" + tdse::snapshot_csv(ev.psi, spec, grid, bias(duration)));
    const tdse::Projection p = tdse::project_logical(ev.psi, pair);
    const double f = state_fidelity(p.state, expect);
    out_ << "tdse fidelity    " << fmt(f, 12) << "\ntdse leakage     " << fmt(p.leakage, 6) << "\n";
    return {{"fidelity", f}, {"leakage", p.leakage}, {"steps", ev.steps}, {"dt_ps", duration / ev.steps},
            {"lambda", fit.lambda}, {"delta_uev", fit.delta_mev * 1000}};
  }

  RunConfig cfg_;
  std::string table_path_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulse calibration and simulation for double-dot charge qubits.", "dqdctl"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config, "JSON run configuration; flags override its values");
  app.add_option("--table", g.table, "Calibration table JSON written by `calibrate`");
  app.add_option("--out", g.out, "Output directory (default: out)");
  app.add_option("--seed", g.seed, "Seed for noise sampling (default: 2026)");
  app.add_option("--threads", g.threads, "Worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);

  std::function<int(Runner&)> action;

  auto* cal = app.add_subcommand("calibrate", "Calibrate (xi, delta_t) over rise times and angles");
  std::optional<int> tau_ref, angle_count;
  std::string taus_text;
  cal->add_option("--tau-ref", tau_ref, "Use the first N reference rise times (1..5)");
  cal->add_option("--taus", taus_text, "Comma-separated rise times in units of t_x (overrides --tau-ref)");
  cal->add_option("--angles", angle_count, "Angle grid size N: angles 2 pi k / N, k = 1..N");
  cal->callback([&] {
    action = [&](Runner& r) {
      if (tau_ref) {
        r.cfg().tau_ref = *tau_ref;
        r.cfg().taus.clear();
      }
      if (!taus_text.empty()) r.cfg().taus = parse_list(taus_text, false);
      if (angle_count) r.cfg().angle_count = *angle_count;
      return r.calibrate();
    };
  });

  std::string axis = "x", angle = "pi", init = "0";
  std::optional<double> tau;
  bool use_tdse = false;
  int samples = 400, points = 500;
  auto* rot = app.add_subcommand("rotate", "Apply one calibrated rotation and record its Bloch trajectory");
  rot->add_option("--axis", axis, "x, y, z, x', z' or nx,ny,nz")->capture_default_str();
  rot->add_option("--angle", angle, "Rotation angle in radians; accepts pi expressions like 3pi/2")
      ->capture_default_str();
  rot->add_option("--init", init, "Initial state: 0, 1, +, -, +i, -i or theta,phi")->capture_default_str();
  rot->add_option("--tau", tau, "Rise time in units of t_x (default: the first configured rise time)");
  rot->add_option("--samples", samples, "Trajectory samples")->capture_default_str()->check(CLI::PositiveNumber);
  rot->add_flag("--tdse", use_tdse, "Also run the rotation through the full Schroedinger solver");
  rot->callback([&] { action = [&](Runner& r) { return r.rotate(axis, angle, init, tau, use_tdse, samples); }; });

  auto* map = app.add_subcommand("fidelity-map", "State error of a rotation over a Fibonacci sphere of inputs");
  map->add_option("--axis", axis, "x, y, z, x', z' or nx,ny,nz")->capture_default_str();
  map->add_option("--angle", angle, "Rotation angle in radians; accepts pi expressions")->capture_default_str();
  map->add_option("--tau", tau, "Rise time in units of t_x (default: the first configured rise time)");
  map->add_option("--points", points, "Number of input states")->capture_default_str()->check(CLI::PositiveNumber);
  map->callback([&] { action = [&](Runner& r) { return r.fidelity_map_cmd(axis, angle, tau, points); }; });

  std::optional<std::string> sigmas_text;
  std::optional<int> noise_samples;
  std::string noise_angle = "3pi/2";
  std::optional<double> noise_tau;
  auto* noise = app.add_subcommand("noise-sweep", "Quasistatic detuning noise: subdivision gain and pulse comparison");
  noise->add_option("--sigmas", sigmas_text, "Comma-separated noise levels in units of the gap");
  noise->add_option("--samples", noise_samples, "Monte Carlo samples per level (default: 400)");
  noise->add_option("--angle", noise_angle, "R_x angle to subdivide")->capture_default_str();
  noise->add_option("--tau", noise_tau, "Rise time in units of t_x (default: the first configured rise time)");
  noise->callback([&] {
    action = [&](Runner& r) {
      if (sigmas_text) r.cfg().sigmas = parse_list(*sigmas_text, false);
      if (noise_samples) r.cfg().samples = *noise_samples;
      return r.noise_sweep(noise_angle, noise_tau);
    };
  });

  std::optional<double> dt_ps;
  auto* val = app.add_subcommand("tdse-validate", "Self-checks of the one-dimensional solver");
  val->add_option("--dt", dt_ps, "Time step in ps (default: tdse.dt_fraction * hbar / E_max)");
  val->callback([&] { action = [&](Runner& r) { return r.tdse_validate(dt_ps); }; });

  std::optional<double> p_right;
  auto* ro = app.add_subcommand("readout", "Charge readout calibration and amplitude estimate");
  ro->add_option("--p-right", p_right, "Measured right-dot occupation probability");
  ro->callback([&] { action = [&](Runner& r) { return r.readout(p_right); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Runner runner(g, app, out);
    return action(runner);
  } catch (const PartialResult& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitPartial;
  } catch (const IoError& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitIo;
  } catch (const LookupError& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitIo;
  } catch (const tdse::StabilityError& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tdse::SolverError& e) {
    err << "dqdctl: " << e.what() << "\n";
    return kExitPartial;
  } catch (const std::exception& e) {
    err << "dqdctl: internal error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace dqd::cli
