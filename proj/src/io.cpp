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

#include "dqd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "dqd/pulse.hpp"

namespace dqd {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void RunConfig::validate() const {
  qubit.validate();
  grid.validate();
  potential.validate();
  if (taus.empty() && (tau_ref < 1 || tau_ref > 5)) throw DomainError("config: tau_ref must be in 1..5");
  for (double t : taus) {
    if (!(t >= 0) || t > kMaxTauOverTx) throw DomainError("config: taus must lie in [0, 0.25] t_x");
  }
  if (angle_count < 1) throw DomainError("config: the angle grid is empty");
  if (sigmas.empty()) throw DomainError("config: the sigma list is empty");
  for (double s : sigmas) {
    if (!(s >= 0)) throw DomainError("config: sigmas must be >= 0");
  }
  if (samples < 1) throw DomainError("config: samples must be >= 1");
  if (!(dt_fraction > 0) || dt_fraction > 1) throw DomainError("config: dt_fraction must be in (0, 1]");
  if (snapshot_every < 0) throw DomainError("config: snapshot_every must be >= 0");
}

std::vector<double> RunConfig::tau_values() const {
  std::vector<double> out;
  if (taus.empty()) {
    const auto ref = reference_taus(qubit);
    out.assign(ref.begin(), ref.begin() + tau_ref);
  } else {
    for (double t : taus) out.push_back(t * qubit.t_x());
  }
  return out;
}

std::vector<double> RunConfig::angle_values() const {
  std::vector<double> out;
  for (int k = 1; k <= angle_count; ++k) out.push_back(kTwoPi * k / angle_count);
  return out;
}

int RunConfig::thread_count() const {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["qubit"] = {{"delta", qubit.delta}, {"lambda", qubit.lambda}, {"delta_si_ev", qubit.delta_si_ev}};
  j["grid"] = grid;
  j["potential"] = potential;
  j["taus"] = taus;
  j["tau_ref"] = tau_ref;
  j["angle_count"] = angle_count;
  j["noise"] = {{"sigmas", sigmas}, {"samples", samples}};
  j["seed"] = seed;
  j["tdse"] = {{"dt_fraction", dt_fraction}, {"snapshot_every", snapshot_every}};
  return j;
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw DomainError("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw DomainError("config: unknown key '" + k + "' in " + where);
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  check_keys(j, {"qubit", "grid", "potential", "taus", "tau_ref", "angle_count", "noise", "seed", "tdse", "out",
                 "threads"},
             "config");
  RunConfig c;
  try {
    if (j.contains("qubit")) {
      const auto& q = j["qubit"];
      check_keys(q, {"delta", "lambda", "delta_si_ev"}, "qubit");
      c.qubit.delta = q.value("delta", c.qubit.delta);
      c.qubit.lambda = q.value("lambda", c.qubit.lambda);
      c.qubit.delta_si_ev = q.value("delta_si_ev", c.qubit.delta_si_ev);
    }
    if (j.contains("grid")) {
      check_keys(j["grid"], {"x_min", "x_max", "n_points"}, "grid");
      c.grid = j["grid"].get<tdse::Grid1D>();
    }
    if (j.contains("potential")) {
      check_keys(j["potential"],
                 {"a_coef", "b_height", "sigma_width", "half_width", "v_bias", "mass_ratio", "asymmetry"},
                 "potential");
      c.potential = j["potential"].get<tdse::PotentialSpec>();
    }
    c.taus = j.value("taus", c.taus);
    c.tau_ref = j.value("tau_ref", c.tau_ref);
    c.angle_count = j.value("angle_count", c.angle_count);
    if (j.contains("noise")) {
      check_keys(j["noise"], {"sigmas", "samples"}, "noise");
      c.sigmas = j["noise"].value("sigmas", c.sigmas);
      c.samples = j["noise"].value("samples", c.samples);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("tdse")) {
      check_keys(j["tdse"], {"dt_fraction", "snapshot_every"}, "tdse");
      c.dt_fraction = j["tdse"].value("dt_fraction", c.dt_fraction);
      c.snapshot_every = j["tdse"].value("snapshot_every", c.snapshot_every);
    }
    c.out = j.value("out", c.out);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("config: " + path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

std::uint64_t run_hash(const RunConfig& cfg, const nlohmann::json& options) {
  nlohmann::json j = cfg.to_json();
  if (!options.is_null()) j["options"] = options;
  return fnv1a64(j.dump());
}

std::string metadata_line(const RunConfig& cfg, const nlohmann::json& options) {
  return "# dqdctl " + std::string(kVersion) + " config=" + hex64(run_hash(cfg, options)) +
         " seed=" + std::to_string(cfg.seed);
}

nlohmann::json metadata_json(const RunConfig& cfg, const nlohmann::json& options) {
  nlohmann::json j{{"version", std::string(kVersion)}, {"config_hash", hex64(run_hash(cfg, options))},
                   {"seed", cfg.seed}};
  if (!options.is_null()) j["options"] = options;
  return j;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

double parse_angle(std::string_view text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(c));
  }
  auto fail = [&]() -> double { throw DomainError("cannot parse angle '" + std::string(text) + "'"); };
  if (t.empty()) return fail();
  double denom = 1;
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const std::string d = t.substr(slash + 1);
    auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), denom);
    if (ec != std::errc() || p != d.data() + d.size() || denom == 0) return fail();
    t.resize(slash);
  }
  double scale = 1;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    scale = kPi;
    t.resize(t.size() - 2);
    if (!t.empty() && t.back() == '*') t.pop_back();
    if (t.empty() || t == "+") t = "1";
    if (t == "-") t = "-1";
  }
  double coef = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), coef);
  if (ec != std::errc() || p != t.data() + t.size()) return fail();
  const double a = coef * scale / denom;
  if (!std::isfinite(a)) return fail();
  return a;
}

}  // namespace dqd
