// Copyright 2026 The semigrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semigrav_cli/scenario.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "semigrav/csl.hpp"
#include "semigrav/dynamics.hpp"
#include "semigrav/errors.hpp"
#include "semigrav/io.hpp"
#include "semigrav/kernel.hpp"
#include "semigrav/pld.hpp"
#include "semigrav/rates.hpp"

#ifndef SEMIGRAV_VERSION
#define SEMIGRAV_VERSION "unknown"
#endif

namespace semigrav::cli {
namespace {

using nlohmann::json;
using Kernel = kernel::FourierKernel;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// ---------------------------------------------------------------------------
// Artifacts

struct Artifact {
  std::string file;
  std::size_t bytes;
  std::string sha1;
};

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw std::ios_base::failure("cannot write " + (dir_ / name).string());
    artifacts_.push_back({name, content.size(), git_blob_sha1(content)});
  }

  json manifest_entries() const {
    json list = json::array();
    for (const auto& a : artifacts_) {
      list.push_back({{"file", a.file}, {"bytes", a.bytes}, {"sha1", a.sha1}});
    }
    return list;
  }

 private:
  std::filesystem::path dir_;
  std::vector<Artifact> artifacts_;
};

std::string f17(double x) { return io::format_double(x); }

// ---------------------------------------------------------------------------
// Shared setup

struct Context {
  ParamReader& p;
  Outputs& out;
  json& results;
  std::uint64_t seed;
  unsigned threads;
  std::filesystem::path config_dir;
  std::ostream* log;
};

std::optional<kernel::Mollifier> read_mollifier(ParamReader& p,
                                                double default_sigma,
                                                bool allow_none) {
  const std::string name = p.text("mollifier", "gaussian");
  if (name == "none") {
    if (!allow_none) throw ConfigError("this mode needs a mollifier");
    return std::nullopt;
  }
  kernel::MollifierKind kind;
  try {
    kind = kernel::parse_mollifier_kind(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("mollifier must be gaussian, biharmonic or none");
  }
  return kernel::Mollifier(kind, p.positive_quantity("sigma_internal",
                                                     default_sigma));
}

struct KernelSetup {
  double G = 1.0;
  std::optional<kernel::Mollifier> mollifier;
  std::vector<double> grid;
  Kernel pairpot;
};

KernelSetup read_kernel(ParamReader& p, bool allow_none) {
  const double G = p.positive_quantity("G_internal", 1.0);
  auto mollifier = read_mollifier(p, 1.0, allow_none);
  const double sigma_ref = mollifier ? mollifier->sigma() : 1.0;
  const std::size_t n = p.count("grid_points", kernel::kDefaultGridPoints);
  const double k_min = p.positive_quantity("k_min_internal", 1e-3 / sigma_ref);
  const double k_max = p.positive_quantity("k_max_internal", 1e3 / sigma_ref);
  if (!(k_max > k_min)) throw ConfigError("k_max_internal must exceed k_min_internal");
  auto grid = kernel::log_grid(k_min, k_max, n);
  Kernel pairpot = mollifier
                       ? kernel::regularized_newtonian_kernel(G, *mollifier, grid)
                       : kernel::newtonian_kernel(G, grid);
  return {G, mollifier, std::move(grid), std::move(pairpot)};
}

// ---------------------------------------------------------------------------
// pld-scan

void run_pld_scan(Context& c) {
  const KernelSetup k = read_kernel(c.p, true);
  std::ostringstream csv;
  pld::write_scan_csv(csv, k.pairpot);
  c.out.write("pld_scan.csv", csv.str());

  const Kernel gamma = pld::pld_minimize(k.pairpot);
  const Kernel cov = pld::phi_noise_covariance(gamma, k.pairpot);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < cov.size(); ++i) {
    if (k.pairpot[i] == 0.0) continue;
    const double ratio = cov[i] / std::abs(k.pairpot[i]);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  c.results["phi_noise_constant_min"] = lo;
  c.results["phi_noise_constant_max"] = hi;
}

// ---------------------------------------------------------------------------
// Lattice modes

struct LatticeSetup {
  std::optional<lattice::LatticeSystem> sys;
  KernelSetup kernel;
  lattice::KernelMatrix gamma;
  std::optional<lattice::RealMatrix> pairpot;
  lattice::ComplexVector psi0;
  double dt = 0.0;
  double t_final = 0.0;
  std::size_t n_output = 0;
};

LatticeSetup read_lattice(Context& c) {
  ParamReader& p = c.p;
  std::optional<lattice::LatticeSystem> sys;
  const std::string shape = p.text("lattice", "pair");
  const double mass = p.positive_quantity("mass_internal", 1.0);
  if (shape == "pair") {
    sys = lattice::pair(p.positive_quantity("distance_internal", 1.0), mass);
  } else if (shape == "ring") {
    sys = lattice::ring(p.count("n_sites", 4),
                          p.positive_quantity("spacing_internal", 1.0), mass,
                          p.quantity("hopping_internal", 1.0));
  } else {
    throw ConfigError("lattice must be pair or ring");
  }
  LatticeSetup s{std::move(sys), read_kernel(p, false), {}, {}, {}, 0.0, 0.0, 0};
  const std::string choice = p.text("gamma", "pld");
  Kernel gamma_kernel = s.kernel.pairpot;
  if (choice == "pld") {
    gamma_kernel = pld::pld_minimize(s.kernel.pairpot);
  } else if (choice == "csl") {
    const kernel::Mollifier g = *s.kernel.mollifier;
    const double gamma_csl = p.positive_quantity(
        "gamma_csl_internal", csl::heuristic_pld(g.sigma(), mass, s.kernel.G));
    const double strength = 4.0 * gamma_csl / (mass * mass);
    gamma_kernel = kernel::conjugate(
        kernel::constant_kernel(strength, s.kernel.grid), g);
  } else if (choice == "custom-csv") {
    std::filesystem::path path = p.text("gamma_csv", "");
    if (path.empty()) throw ConfigError("gamma=custom-csv needs gamma_csv");
    if (path.is_relative()) path = c.config_dir / path;
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read " + path.string());
    gamma_kernel = kernel::read_csv(in);
  } else {
    throw ConfigError("gamma must be pld, csl or custom-csv");
  }
  s.gamma = lattice::build_kernel_matrix(gamma_kernel, *s.sys);
  c.results["gamma_psd_shift"] = s.gamma.psd_shift;
  if (p.flag("gravity", true)) {
    s.pairpot = lattice::build_kernel_matrix(s.kernel.pairpot, *s.sys).entries;
  }
  const auto sites = p.counts("initial_sites", {0, 1});
  if (sites.empty()) throw ConfigError("initial_sites must not be empty");
  s.psi0 = lattice::ComplexVector::Zero(static_cast<Eigen::Index>(s.sys->size()));
  for (std::size_t i : sites) {
    if (i >= s.sys->size()) throw ConfigError("initial site index out of range");
    s.psi0[static_cast<Eigen::Index>(i)] = 1.0;
  }
  s.psi0.normalize();
  s.dt = p.positive_quantity("dt_internal", 1e-3);
  s.t_final = p.positive_quantity("t_final_internal", 1.0);
  s.n_output = p.count("n_output", 50);
  if (s.n_output == 0) throw ConfigError("n_output must be positive");
  return s;
}

std::vector<std::string> state_header(std::size_t n, const std::string& tag) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < n; ++i) {
    h.push_back("population_" + std::to_string(i) + tag);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      h.push_back("coherence_" + std::to_string(i) + "_" + std::to_string(j) +
                  tag);
    }
  }
  h.push_back("purity" + tag);
  return h;
}

void append_state(std::vector<std::string>& row,
                  const lattice::ComplexMatrix& rho) {
  const auto n = rho.rows();
  for (Eigen::Index i = 0; i < n; ++i) row.push_back(f17(rho(i, i).real()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      row.push_back(f17(std::abs(rho(i, j))));
    }
  }
  row.push_back(f17(lattice::purity(rho)));
}

void run_simulate(Context& c) {
  LatticeSetup s = read_lattice(c);
  const lattice::LatticeSystem& sys = *s.sys;
  const std::size_t n = sys.size();
  const auto n_steps = static_cast<std::size_t>(
      std::max(1.0, std::round(s.t_final / s.dt)));
  const double dt = s.t_final / static_cast<double>(n_steps);
  auto is_output = [&](std::size_t step) {
    return step % std::max<std::size_t>(1, n_steps / s.n_output) == 0 ||
           step == n_steps;
  };

  const lattice::MasterEquation me(
      sys, lattice::decoherence_matrix(s.gamma.entries, s.pairpot), s.pairpot);
  lattice::DensityMatrix rho = lattice::pure_state(s.psi0);
  std::ostringstream me_csv;
  {
    std::vector<std::string> header{"t"};
    for (auto& h : state_header(n, "")) header.push_back(h);
    io::write_csv_row(me_csv, header);
  }
  for (std::size_t step = 0; step <= n_steps; ++step) {
    if (is_output(step)) {
      std::vector<std::string> row{f17(rho.t)};
      append_state(row, rho.rho);
      io::write_csv_row(me_csv, row);
    }
    if (step < n_steps) lattice::me_step(rho, me, dt);
  }
  c.out.write("me_timeseries.csv", me_csv.str());

  const lattice::SseModel model(sys, s.gamma.entries, s.pairpot);
  lattice::TrajectoryState traj =
      lattice::make_trajectory(s.psi0, c.seed, 0, true);
  std::ostringstream traj_csv;
  {
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < n; ++i) {
      header.push_back("population_" + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
      header.push_back("signal_" + std::to_string(i));
    }
    io::write_csv_row(traj_csv, header);
  }
  double max_defect = 0.0;
  for (std::size_t step = 1; step <= n_steps; ++step) {
    lattice::sse_step(traj, model, dt);
    max_defect = std::max(max_defect, traj.last_norm_defect);
    if (is_output(step)) {
      std::vector<std::string> row{f17(traj.t)};
      for (Eigen::Index i = 0; i < traj.psi.size(); ++i) {
        row.push_back(f17(std::norm(traj.psi[i])));
      }
      for (double v : traj.record->back()) row.push_back(f17(v));
      io::write_csv_row(traj_csv, row);
    }
  }
  c.out.write("trajectory.csv", traj_csv.str());
  c.results["final_purity_master"] = lattice::purity(rho.rho);
  c.results["max_norm_defect"] = max_defect;
}

bool run_ensemble_check(Context& c) {
  LatticeSetup s = read_lattice(c);
  lattice::EnsembleConfig cfg;
  cfg.t_final = s.t_final;
  cfg.dt = s.dt;
  cfg.n_output = s.n_output;
  cfg.n_traj = c.p.count("n_traj", 1000);
  cfg.block_size = c.p.count("block_size", 64);
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  const auto report = lattice::ensemble_compare(*s.sys, s.gamma.entries,
                                                s.pairpot, s.psi0, cfg);
  const std::size_t n = s.sys->size();
  std::ostringstream csv;
  std::vector<std::string> header{"t", "trace_distance"};
  for (auto& h : state_header(n, "_ensemble")) header.push_back(h);
  for (auto& h : state_header(n, "_master")) header.push_back(h);
  io::write_csv_row(csv, header);
  for (std::size_t j = 0; j < report.times.size(); ++j) {
    std::vector<std::string> row{f17(report.times[j]),
                                 f17(report.trace_distance[j])};
    append_state(row, report.ensemble[j]);
    append_state(row, report.master[j]);
    io::write_csv_row(csv, row);
  }
  c.out.write("comparison.csv", csv.str());
  const double threshold = 5.0 / std::sqrt(static_cast<double>(cfg.n_traj));
  c.results["max_trace_distance"] = report.max_trace_distance;
  c.results["mc_error"] = report.mc_error;
  c.results["failure_threshold"] = threshold;
  c.results["equivalence_failure"] = report.equivalence_failure;
  c.results["max_norm_defect"] = report.max_norm_defect;
  return !report.equivalence_failure;
}

// ---------------------------------------------------------------------------
// rates

void run_rates(Context& c) {
  ParamReader& p = c.p;
  const double G = p.positive_quantity("G_internal", 1.0);
  const std::string name = p.text("mollifier", "gaussian");
  kernel::MollifierKind kind;
  try {
    kind = kernel::parse_mollifier_kind(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("rates needs mollifier gaussian or biharmonic");
  }
  const std::size_t n_grid = p.count("grid_points", kernel::kDefaultGridPoints);
  const std::string configuration = p.text("configuration", "point_pair");
  const double mass = p.positive_quantity("mass_internal", 1.0);
  double radius = 0.0;
  if (configuration == "sphere_pair") {
    radius = p.positive_quantity("radius_internal", 0.25);
  } else if (configuration != "point_pair") {
    throw ConfigError("configuration must be point_pair or sphere_pair");
  }
  const auto distances =
      p.quantities("distances_internal", {0.5, 1.0, 2.0, 4.0, 8.0});
  const auto sigmas = p.quantities("sigmas_internal", {0.5, 1.0, 2.0});
  const auto status_sigmas =
      p.quantities("falsification_sigmas_si", {1e-16, 1e-7, 1e-3});

  std::ostringstream csv;
  io::write_csv_row(csv, {"sigma", "d", "gamma"});
  for (double sigma : sigmas) {
    const kernel::Mollifier g(kind, sigma);
    const auto grid = kernel::default_grid(sigma, n_grid);
    const Kernel D = kernel::conjugate(
        kernel::magnitude(kernel::newtonian_kernel(G, grid)), g);
    for (double d : distances) {
      if (!(d > 0.0)) throw ConfigError("distances must be positive");
      const rates::Vec3 a = rates::Vec3::Zero();
      const rates::Vec3 b(d, 0.0, 0.0);
      const auto mu1 = radius > 0.0
                           ? rates::MassDistribution::uniform_sphere(a, radius, mass)
                           : rates::MassDistribution::point_set({a}, {mass});
      const auto mu2 = radius > 0.0
                           ? rates::MassDistribution::uniform_sphere(b, radius, mass)
                           : rates::MassDistribution::point_set({b}, {mass});
      io::write_csv_row(csv, {f17(sigma), f17(d),
                              f17(rates::superposition_decay_rate(mu1, mu2, D))});
    }
  }
  c.out.write("rates.csv", csv.str());

  json status = json::array();
  for (double sigma_m : status_sigmas) {
    const auto r = rates::falsification_report(sigma_m);
    status.push_back({{"sigma_m", r.sigma_m},
                      {"status", rates::to_string(r.status)},
                      {"reference_rate_hz", r.reference_rate_hz}});
  }
  c.out.write("status.json", status.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// csl-curve

void run_csl_curve(Context& c) {
  const double r_min = c.p.positive_quantity("r_min_si", 1e-8);
  const double r_max = c.p.positive_quantity("r_max_si", 1e-4);
  const std::size_t n = c.p.count("n_points", 61);
  const auto rows = csl::hyperbola(r_min, r_max, n);
  std::ostringstream csv;
  csl::write_hyperbola_csv(csv, rows);
  c.out.write("csl_curve.csv", csv.str());
  const double at_standard = csl::lambda_csl(csl::si::standard_r_c);
  c.results["lambda_csl_at_standard_r_c_hz"] = at_standard;
  c.results["ratio_to_grw"] = at_standard / csl::si::grw_collapse_rate;
  c.results["loglog_slope"] =
      std::log(rows.back().lambda_hz / rows.front().lambda_hz) /
      std::log(rows.back().r_c_m / rows.front().r_c_m);
}

// ---------------------------------------------------------------------------
// noise-scaling

void run_noise_scaling(Context& c) {
  ParamReader& p = c.p;
  pld::NoiseScalingConfig cfg;
  cfg.G = p.positive_quantity("G_internal", cfg.G);
  cfg.mollifier = *read_mollifier(p, 0.5, false);
  cfg.lattice_points = p.count("lattice_points", cfg.lattice_points);
  cfg.spacing = p.positive_quantity("spacing_internal", cfg.spacing);
  cfg.dt = p.positive_quantity("dt_internal", cfg.dt);
  cfg.box_sides = p.counts("box_sides", cfg.box_sides);
  cfg.window_steps = p.counts("window_steps", cfg.window_steps);
  cfg.n_blocks = p.count("n_blocks", cfg.n_blocks);
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  const auto result = pld::gradient_variance_scaling(cfg);
  json records = json::array();
  for (const auto& r : result.records) {
    records.push_back({{"sigma", r.sigma},
                       {"V", r.V},
                       {"T", r.T},
                       {"variance", r.variance},
                       {"stderr", r.stderr_}});
  }
  json doc{{"records", records},
           {"exponent", result.exponent},
           {"exponent_stderr", result.exponent_stderr},
           {"prefactor", result.prefactor}};
  c.out.write("noise_scaling.json", doc.dump(2) + "\n");
  c.results["exponent"] = result.exponent;
  c.results["exponent_stderr"] = result.exponent_stderr;
  c.results["prefactor"] = result.prefactor;
}

// ---------------------------------------------------------------------------

json load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "mode" && key != "seed" &&
        key != "parameters") {
      throw ConfigError("unknown top-level key '" + key + "'");
    }
  }
  if (!doc.contains("mode") || !doc["mode"].is_string()) {
    throw ConfigError("config needs a string 'mode'");
  }
  const std::string mode = doc["mode"];
  if (std::find(modes().begin(), modes().end(), mode) == modes().end()) {
    throw ConfigError("unknown mode '" + mode + "'");
  }
  if (doc.contains("seed") && !doc["seed"].is_number_unsigned()) {
    throw ConfigError("seed must be a non-negative integer");
  }
  if (doc.contains("parameters") && !doc["parameters"].is_object()) {
    throw ConfigError("parameters must be an object");
  }
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamReader

ParamReader::ParamReader(json params) : params_(std::move(params)) {
  if (params_.is_null()) params_ = json::object();
}

const json* ParamReader::find(const std::string& key) {
  const auto it = params_.find(key);
  return it == params_.end() ? nullptr : &*it;
}

void ParamReader::require_unit_suffix(const std::string& key) const {
  if (!ends_with(key, "_si") && !ends_with(key, "_internal")) {
    throw std::logic_error("quantity key without unit suffix: " + key);
  }
}

template <class T>
T ParamReader::record(const std::string& key, T value) {
  resolved_[key] = value;
  return value;
}

double ParamReader::quantity(const std::string& key, double fallback) {
  require_unit_suffix(key);
  const json* v = find(key);
  if (!v) return record(key, fallback);
  if (!v->is_number()) throw ConfigError(key + " must be a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(key + " must be finite");
  return record(key, x);
}

double ParamReader::positive_quantity(const std::string& key,
                                      double fallback) {
  const double x = quantity(key, fallback);
  if (!(x > 0.0)) throw ConfigError(key + " must be positive");
  return x;
}

std::vector<double> ParamReader::quantities(const std::string& key,
                                            std::vector<double> fallback) {
  require_unit_suffix(key);
  const json* v = find(key);
  if (!v) return record(key, std::move(fallback));
  if (!v->is_array() || v->empty()) {
    throw ConfigError(key + " must be a non-empty array of numbers");
  }
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) throw ConfigError(key + " must contain numbers");
    out.push_back(e.get<double>());
  }
  return record(key, std::move(out));
}

std::size_t ParamReader::count(const std::string& key, std::size_t fallback) {
  const json* v = find(key);
  if (!v) return record(key, fallback);
  if (!v->is_number_unsigned()) {
    throw ConfigError(key + " must be a non-negative integer");
  }
  return record(key, v->get<std::size_t>());
}

std::vector<std::size_t> ParamReader::counts(
    const std::string& key, std::vector<std::size_t> fallback) {
  const json* v = find(key);
  if (!v) return record(key, std::move(fallback));
  if (!v->is_array()) throw ConfigError(key + " must be an array of integers");
  std::vector<std::size_t> out;
  for (const auto& e : *v) {
    if (!e.is_number_unsigned()) {
      throw ConfigError(key + " must contain non-negative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return record(key, std::move(out));
}

std::string ParamReader::text(const std::string& key,
                              const std::string& fallback) {
  const json* v = find(key);
  if (!v) return record(key, fallback);
  if (!v->is_string()) throw ConfigError(key + " must be a string");
  return record(key, v->get<std::string>());
}

bool ParamReader::flag(const std::string& key, bool fallback) {
  const json* v = find(key);
  if (!v) return record(key, fallback);
  if (!v->is_boolean()) throw ConfigError(key + " must be true or false");
  return record(key, v->get<bool>());
}

void ParamReader::finish() const {
  std::string unused;
  for (const auto& [key, value] : params_.items()) {
    if (!resolved_.contains(key)) unused += (unused.empty() ? "" : ", ") + key;
  }
  if (!unused.empty()) {
    throw ConfigError("parameters not used by this mode: " + unused);
  }
}

std::vector<std::string> ParamReader::consumed() const {
  std::vector<std::string> keys;
  for (const auto& [key, value] : resolved_.items()) keys.push_back(key);
  return keys;
}

// ---------------------------------------------------------------------------

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

void print_constants(std::ostream& out) {
  io::write_csv_row(out, {"name", "symbol", "value", "unit", "source"});
  for (const auto& c : csl::constants_table()) {
    io::write_csv_row(out, {std::string(c.name), std::string(c.symbol),
                            io::format_double(c.value), std::string(c.unit),
                            std::string(c.source)});
  }
}

RunResult run(const RunOptions& options, std::ostream& log) {
  RunResult result;
  try {
    const json doc = load_scenario(options.config);
    const std::string mode = doc["mode"];
    const std::uint64_t seed =
        options.seed.value_or(doc.value("seed", std::uint64_t{0}));
    if (options.threads == 0) throw ConfigError("--threads must be >= 1");
    std::filesystem::create_directories(options.out_dir);

    ParamReader params(doc.value("parameters", json::object()));
    Outputs outputs(options.out_dir);
    json results = json::object();
    Context ctx{params,
                outputs,
                results,
                seed,
                options.threads,
                options.config.parent_path(),
                options.quiet ? nullptr : &log};
    if (!options.quiet) log << "semigrav " << mode << " (seed " << seed << ")\n";

    bool passed = true;
    if (mode == "pld-scan") run_pld_scan(ctx);
    else if (mode == "simulate") run_simulate(ctx);
    else if (mode == "ensemble-check") passed = run_ensemble_check(ctx);
    else if (mode == "rates") run_rates(ctx);
    else if (mode == "csl-curve") run_csl_curve(ctx);
    else if (mode == "noise-scaling") run_noise_scaling(ctx);
    params.finish();

    result.consumed_keys = params.consumed();
    if (!options.quiet) {
      for (const auto& [key, value] : params.resolved().items()) {
        log << "  " << key << " = " << value.dump()
            << (doc.value("parameters", json::object()).contains(key)
                    ? ""
                    : "  (default)")
            << "\n";
      }
    }
    json manifest{{"tool", "semigrav"},
                  {"version", SEMIGRAV_VERSION},
                  {"name", doc.value("name", std::string())},
                  {"mode", mode},
                  {"seed", seed},
                  {"threads", options.threads},
                  {"parameters", params.resolved()},
                  {"outputs", outputs.manifest_entries()},
                  {"results", results}};
    result.manifest = options.out_dir / "manifest.json";
    std::ofstream out(result.manifest, std::ios::binary);
    out << manifest.dump(2) << "\n";
    out.close();
    if (!out) throw std::ios_base::failure("cannot write manifest.json");
    if (!passed) {
      result.exit_code = kInvariantViolation;
      result.message = "ensemble and master equation disagree beyond 5/sqrt(n_traj)";
    }
  } catch (const ConfigError& e) {
    result = {kConfigError, std::string("config error: ") + e.what(), {}, {}};
  } catch (const nlohmann::json::exception& e) {
    result = {kConfigError, std::string("config error: ") + e.what(), {}, {}};
  } catch (const DomainError& e) {
    result = {kDomainError, std::string("domain error: ") + e.what(), {}, {}};
  } catch (const InvariantViolation& e) {
    result = {kInvariantViolation,
              std::string("invariant violation: ") + e.what(), {}, {}};
  } catch (const std::invalid_argument& e) {
    result = {kConfigError, std::string("invalid parameter: ") + e.what(), {},
              {}};
  } catch (const std::exception& e) {
    result = {kIoError, std::string("error: ") + e.what(), {}, {}};
  }
  return result;
}

}  // namespace semigrav::cli
