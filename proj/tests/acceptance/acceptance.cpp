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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and never adjusted to results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semigrav/csl.hpp"
#include "semigrav/dynamics.hpp"
#include "semigrav/kernel.hpp"
#include "semigrav/pld.hpp"
#include "semigrav/rates.hpp"

namespace {

using namespace semigrav;
using kernel::MollifierKind;
using lattice::ComplexVector;
using lattice::RealMatrix;
using testing::kPi;
using testing::rel_err;

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail,
            std::chrono::steady_clock::time_point start) {
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  std::printf("[%s] %d %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const MollifierKind kKinds[] = {MollifierKind::gaussian,
                                MollifierKind::biharmonic};

void pld_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t minimized = 0, vanishing = 0;
  bool zeros_exact = true, grids_ok = true;
  for (auto kind : kKinds) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const auto grid = kernel::default_grid(sigma, 512);
      grids_ok = grids_ok && grid.size() >= 512;
      const auto v = kernel::regularized_newtonian_kernel(
          1.0, kernel::Mollifier(kind, sigma), grid);
      const auto gamma = pld::pld_minimize(v);
      const auto d = pld::decoherence_kernel(gamma, v);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (v[i] == 0.0) {
          // The gaussian factor underflows at large k; both sides are 0.
          zeros_exact = zeros_exact && gamma[i] == 0.0 && d[i] == 0.0;
          ++vanishing;
          continue;
        }
        const auto [g, dmin] = testing::brent_decoherence_minimum(v[i]);
        worst = std::max({worst, rel_err(gamma[i], g),
                          rel_err(gamma[i], 2.0 * std::abs(v[i])),
                          rel_err(d[i], dmin), rel_err(d[i], std::abs(v[i]))});
        ++minimized;
      }
    }
  }
  report(1, "least-decoherence closed form vs Brent minimization",
         worst <= 1e-6 && zeros_exact && grids_ok,
         fmt("max rel err %.2e over %.0f minimized points (tol 1e-6); %.0f "
             "underflowed points exactly zero",
             worst, static_cast<double>(minimized),
             static_cast<double>(vanishing)) +
             (zeros_exact ? "" : " [nonzero output at underflow]"),
         start);
}

void csl_numeric_quote() {
  const auto start = std::chrono::steady_clock::now();
  const double lambda = csl::lambda_csl(1e-7);
  // Constants typed in independently of the library table.
  const double oracle = 6.6743e-11 * 1.66054e-27 * 1.66054e-27 /
                        (std::sqrt(kPi) * 1.05457e-34 * 1e-7);
  const bool ok = lambda >= 5e-24 && lambda <= 2e-23 &&
                  rel_err(lambda, oracle) <= 0.01;
  report(2, "CSL rate at r_C = 1e-7 m", ok,
         fmt("lambda = %.4e Hz, oracle %.4e Hz, rel diff %.1e", lambda, oracle,
             rel_err(lambda, oracle)),
         start);
}

struct LatticeCase {
  lattice::LatticeSystem sys;
  RealMatrix gamma;
  RealMatrix pairpot;
};

LatticeCase lattice_case(lattice::LatticeSystem sys) {
  const auto grid = kernel::default_grid(0.5);
  const auto v = kernel::regularized_newtonian_kernel(
      1.0, kernel::Mollifier(MollifierKind::gaussian, 0.5), grid);
  RealMatrix g = lattice::build_kernel_matrix(pld::pld_minimize(v), sys).entries;
  RealMatrix p = lattice::build_kernel_matrix(v, sys).entries;
  return {std::move(sys), std::move(g), std::move(p)};
}

ComplexVector cat_state(std::size_t n) {
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  psi[0] = 1.0;
  psi[1] = std::complex<double>(0.0, 1.0);
  return psi.normalized();
}

void ensemble_equivalence() {
  struct Target {
    const char* name;
    lattice::LatticeSystem sys;
    double bound;
  };
  const Target targets[] = {{"2-site", lattice::pair(1.0, 1.0), 0.02},
                            {"4-site ring", lattice::ring(4, 1.0, 1.0, 1.0), 0.05}};
  for (const auto& t : targets) {
    const auto start = std::chrono::steady_clock::now();
    const auto c = lattice_case(t.sys);
    const ComplexVector psi = cat_state(t.sys.size());
    lattice::EnsembleConfig cfg;
    cfg.t_final = 3.5;
    cfg.dt = 2e-3;
    cfg.seed = 2026;

    // Independent replicas at each ensemble size; streams never overlap.
    const std::size_t sizes[] = {100, 1000, 10000};
    const std::size_t replicas[] = {128, 32, 8};
    std::vector<double> n_values, mean_td;
    double headline = 0.0;
    for (int level = 0; level < 3; ++level) {
      cfg.n_traj = sizes[level];
      double sum = 0.0;
      for (std::size_t r = 0; r < replicas[level]; ++r) {
        cfg.stream_offset = (static_cast<std::uint64_t>(level) << 32) +
                            r * sizes[level];
        const auto rep =
            lattice::ensemble_compare(c.sys, c.gamma, c.pairpot, psi, cfg);
        sum += rep.max_trace_distance;
        if (level == 2 && r == 0) headline = rep.max_trace_distance;
      }
      n_values.push_back(static_cast<double>(sizes[level]));
      mean_td.push_back(sum / static_cast<double>(replicas[level]));
    }
    const double exponent = testing::loglog_slope(n_values, mean_td);
    const bool ok = headline <= t.bound && std::abs(exponent + 0.5) <= 0.1;
    report(3, std::string("ensemble vs master equation, ") + t.name, ok,
           fmt("max trace distance %.4f at 1e4 (tol %.2f); error exponent "
               "%.3f (want -0.5 +- 0.1)",
               headline, t.bound, exponent),
           start);
  }
}

// log |rho_01(t)| against t, least squares.
double fitted_decay(const std::vector<double>& t,
                    const std::vector<double>& coherence) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double y = std::log(coherence[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  return -(n * sty - st * sy) / (n * stt - st * st);
}

void decay_law() {
  const double sigma = 0.5, d = 1.0, m = 1.0, G = 1.0;
  // D* = |V_sigma| in real space: G erf(r / 2 sigma) / r.
  const double gamma_rate =
      m * m *
      (-testing::gaussian_potential(G, sigma, 0.0) +
       testing::gaussian_potential(G, sigma, d));
  {
    const auto start = std::chrono::steady_clock::now();
    const auto sys = lattice::pair(d, m);
    const auto grid = kernel::default_grid(sigma);
    const auto v = kernel::regularized_newtonian_kernel(
        G, kernel::Mollifier(MollifierKind::gaussian, sigma), grid);
    const auto D = lattice::build_kernel_matrix(
        pld::decoherence_kernel(pld::pld_minimize(v), v), sys);
    const auto pairpot = lattice::build_kernel_matrix(v, sys).entries;
    const lattice::MasterEquation me(sys, D.entries, pairpot);
    auto rho = lattice::pure_state(cat_state(2));
    std::vector<double> t, c;
    for (int i = 0; i <= 4000; ++i) {
      if (i % 100 == 0) {
        t.push_back(rho.t);
        c.push_back(std::abs(rho.rho(0, 1)));
      }
      if (i < 4000) lattice::me_step(rho, me, 1e-3);
    }
    const double fit = fitted_decay(t, c);
    report(4, "coherence decay law, master equation",
           rel_err(fit, gamma_rate) <= 1e-3,
           fmt("fitted %.6f vs m^2 (D(0) - D(d)) = %.6f, rel err %.1e (tol "
               "1e-3)",
               fit, gamma_rate, rel_err(fit, gamma_rate)),
           start);
  }
  {
    // Pure monitoring (no feedback): D = gamma* / 4 = |V_sigma| / 2.
    const auto start = std::chrono::steady_clock::now();
    const double expected = 0.5 * gamma_rate;
    const auto c = lattice_case(lattice::pair(d, m));
    lattice::EnsembleConfig cfg;
    cfg.t_final = 7.0;
    cfg.dt = 5e-3;
    cfg.n_traj = 2000;
    cfg.n_output = 35;
    cfg.seed = 404;
    std::vector<double> rates;
    for (std::uint64_t r = 0; r < 8; ++r) {
      cfg.stream_offset = r * cfg.n_traj;
      const auto rep = lattice::ensemble_compare(
          c.sys, c.gamma, std::nullopt, cat_state(2), cfg);
      std::vector<double> coherence;
      for (const auto& rho : rep.ensemble) coherence.push_back(std::abs(rho(0, 1)));
      rates.push_back(fitted_decay(rep.times, coherence));
    }
    double mean = 0.0, var = 0.0;
    for (double x : rates) mean += x / rates.size();
    for (double x : rates) var += (x - mean) * (x - mean) / (rates.size() - 1);
    const double se = std::sqrt(var / rates.size());
    report(4, "coherence decay law, SSE ensemble",
           std::abs(mean - expected) <= 3.0 * se,
           fmt("fitted %.5f +- %.5f vs %.5f (tol 3 standard errors)", mean, se,
               expected),
           start);
  }
}

void regularization_tradeoff() {
  const auto start = std::chrono::steady_clock::now();
  bool decreasing = true;
  double worst_tail = 0.0;
  for (auto kind : kKinds) {
    double last = INFINITY;
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto grid = kernel::default_grid(sigma);
      const auto reg = pld::regularized_pld(kernel::newtonian_kernel(1.0, grid),
                                            kernel::Mollifier(kind, sigma));
      const double origin = kernel::to_real_space(reg.D_sigma, 0.0);
      decreasing = decreasing && origin < last;
      last = origin;
      const auto v = kernel::regularized_newtonian_kernel(
          1.0, kernel::Mollifier(kind, sigma), grid);
      for (double x : {10.0, 12.0, 20.0, 50.0, 100.0}) {
        const double r = x * sigma;
        worst_tail = std::max(worst_tail,
                              rel_err(kernel::to_real_space(v, r), -1.0 / r));
      }
    }
  }
  report(5, "regularization trade-off", decreasing && worst_tail < 1e-3,
         std::string("D_sigma(0) strictly decreasing: ") +
             (decreasing ? "yes" : "no") +
             fmt("; max deviation from -G/r for r >= 10 sigma %.2e (tol 1e-3)",
                 worst_tail),
         start);
}

void potential_noise_constant() {
  const auto start = std::chrono::steady_clock::now();
  double fourier = 0.0, real = 0.0;
  const auto grid = kernel::default_grid(0.5);
  const auto newton = kernel::newtonian_kernel(1.0, grid);
  {
    const auto cov = pld::phi_noise_covariance(pld::pld_minimize(newton), newton);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fourier = std::max(fourier, rel_err(cov[i], 0.5 * std::abs(newton[i])));
    }
    for (double r : {0.1, 0.5, 1.0, 3.0, 10.0, 100.0}) {
      real = std::max(real, rel_err(kernel::to_real_space(cov, r), 0.5 / r));
    }
  }
  for (auto kind : kKinds) {
    const kernel::Mollifier g(kind, 0.5);
    const auto v = kernel::conjugate(newton, g);
    const auto cov = pld::phi_noise_covariance(pld::pld_minimize(v), v);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (v[i] == 0.0) continue;
      fourier = std::max(fourier, rel_err(cov[i], 0.5 * std::abs(v[i])));
    }
    for (double r : {0.0, 0.2, 1.0, 5.0, 40.0}) {
      const double closed = kind == MollifierKind::gaussian
                                ? testing::gaussian_potential(1.0, 0.5, r)
                                : testing::biharmonic_potential(1.0, 0.5, r);
      real = std::max(real, rel_err(kernel::to_real_space(cov, r), -0.5 * closed));
    }
  }
  report(6, "potential-noise covariance equals G / (2 r)",
         fourier <= 1e-14 && real <= 1e-6,
         fmt("Fourier max rel err %.1e (tol 1e-14), real space %.1e (tol 1e-6)",
             fourier, real),
         start);
}

void noise_scaling() {
  const auto start = std::chrono::steady_clock::now();
  pld::NoiseScalingConfig c;
  c.seed = 19;
  const auto r = pld::gradient_variance_scaling(c);
  double lo = INFINITY, hi = 0.0;
  for (const auto& rec : r.records) {
    lo = std::min(lo, rec.V * rec.T);
    hi = std::max(hi, rec.V * rec.T);
  }
  const double decades = std::log10(hi / lo);
  report(7, "gradient-noise variance against 1/(V T)",
         std::abs(r.exponent - 1.0) <= 0.05 && decades >= 3.0,
         fmt("exponent %.4f +- %.4f over %.2f decades (want 1.00 +- 0.05)",
             r.exponent, r.exponent_stderr, decades),
         start);
}

void conservation() {
  const auto start = std::chrono::steady_clock::now();
  const auto c = lattice_case(lattice::ring(4, 1.0, 1.0, 1.0));
  const lattice::MasterEquation me(
      c.sys, lattice::decoherence_matrix(c.gamma, c.pairpot), c.pairpot);
  auto rho = lattice::pure_state(cat_state(4));
  for (int i = 0; i < 10000; ++i) lattice::me_step(rho, me, 1e-3);
  const double trace_drift = std::abs(rho.rho.trace() - 1.0);

  const lattice::SseModel model(c.sys, c.gamma, c.pairpot);
  std::vector<double> dts{1e-3, 1e-4, 1e-5}, drift;
  for (double dt : dts) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint64_t traj = 0; traj < 8; ++traj) {
      auto state = lattice::make_trajectory(cat_state(4), 77, traj);
      for (int i = 0; i < 1000; ++i) {
        lattice::sse_step(state, model, dt);
        sum += state.last_norm_defect;
        ++n;
      }
    }
    drift.push_back(sum / static_cast<double>(n));
  }
  const double exponent = testing::loglog_slope(dts, drift);

  double worst_shift = 0.0;
  for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
    const auto grid = kernel::default_grid(sigma);
    for (auto kind : kKinds) {
      const auto v = kernel::regularized_newtonian_kernel(
          1.0, kernel::Mollifier(kind, sigma), grid);
      const auto reg = pld::regularized_pld(kernel::newtonian_kernel(1.0, grid),
                                            kernel::Mollifier(kind, sigma));
      for (const auto& sys : {lattice::pair(1.0, 1.0),
                              lattice::ring(4, 1.0, 1.0, 1.0),
                              lattice::ring(8, 0.5, 1.0, 1.0)}) {
        const auto g = lattice::build_kernel_matrix(reg.gamma_sigma, sys);
        const auto d = lattice::build_kernel_matrix(reg.D_sigma, sys);
        const auto p = lattice::build_kernel_matrix(v, sys).entries;
        const auto dm = lattice::repair_psd(
            lattice::decoherence_matrix(g.entries, p));
        worst_shift = std::max({worst_shift, g.psd_shift / g.max_eigenvalue,
                                d.psd_shift / d.max_eigenvalue,
                                dm.psd_shift / dm.max_eigenvalue});
      }
    }
  }
  report(8, "master-equation trace drift over 1e4 steps", trace_drift < 1e-10,
         fmt("|Tr rho - 1| = %.1e (tol 1e-10)", trace_drift), start);
  report(8, "SSE norm-drift exponent in dt", std::abs(exponent - 1.5) <= 0.2,
         fmt("exponent %.3f (want 1.5 +- 0.2); mean drift %.2e at dt=1e-3, "
             "%.2e at dt=1e-5",
             exponent, drift.front(), drift.back()),
         start);
  report(8, "lattice gamma and D matrices PSD after repair",
         worst_shift < 1e-6,
         fmt("max shift / max eigenvalue %.1e (tol 1e-6)", worst_shift), start);
}

void falsification() {
  const auto start = std::chrono::steady_clock::now();
  const bool ok =
      rates::falsification_report(1e-16).status ==
          rates::SigmaStatus::excluded_by_decoherence_tests &&
      rates::falsification_report(1e-7).status ==
          rates::SigmaStatus::open_window &&
      rates::falsification_report(1e-3).status ==
          rates::SigmaStatus::constrained_by_gravity_tests;
  report(9, "quoted smearing-length regimes", ok,
         "1e-16 m excluded, 1e-7 m open, 1e-3 m constrained", start);
}

}  // namespace

int main() {
  pld_closed_form();
  csl_numeric_quote();
  ensemble_equivalence();
  decay_law();
  regularization_tradeoff();
  potential_noise_constant();
  noise_scaling();
  conservation();
  falsification();
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
