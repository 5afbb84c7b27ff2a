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

#include "semigrav/csl.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "semigrav/errors.hpp"
#include "semigrav/io.hpp"

namespace semigrav::csl {
namespace {

constexpr std::array<Constant, 5> kConstants{{
    {"gravitational constant", "G", si::G, "m^3 kg^-1 s^-2", "CODATA 2018"},
    {"reduced Planck constant", "hbar", si::hbar, "J s",
     "exact, SI 2019 (CODATA 2018)"},
    {"atomic mass unit", "m0", si::atomic_mass_unit, "kg", "CODATA 2018"},
    {"GRW collapse rate", "lambda_GRW", si::grw_collapse_rate, "s^-1",
     "Ghirardi, Rimini, Weber, Phys. Rev. D 34, 470 (1986)"},
    {"standard CSL localization length", "r_C", si::standard_r_c, "m",
     "Ghirardi, Pearle, Rimini, Phys. Rev. A 42, 78 (1990)"},
}};

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

}  // namespace

std::span<const Constant> constants_table() { return kConstants; }

CslParameters make_parameters(double gamma_csl, double sigma, double m0,
                              double hbar) {
  require_positive(gamma_csl, "gamma_csl");
  require_positive(sigma, "sigma");
  require_positive(m0, "m0");
  require_positive(hbar, "hbar");
  const double volume = std::pow(4.0 * std::numbers::pi * sigma * sigma, 1.5);
  return {gamma_csl, sigma, m0, gamma_csl / (hbar * volume)};
}

CslTerms csl_terms(const CslParameters& p, double G, double k) {
  require_positive(G, "G");
  if (!(k > 0.0)) throw DomainError("CSL decoherence kernel needs k > 0");
  const double four_pi_g = 4.0 * std::numbers::pi * G;
  const double k2 = k * k;
  return {p.gamma_csl / (p.m0 * p.m0),
          (4.0 * p.m0 * p.m0 / p.gamma_csl) * four_pi_g * four_pi_g /
              (k2 * k2)};
}

double csl_decoherence_fourier(const CslParameters& p, double G, double k) {
  const CslTerms t = csl_terms(p, G, k);
  const double g = std::exp(-0.5 * p.sigma * p.sigma * k * k);
  return (t.monitoring + t.feedback) * g * g;
}

double heuristic_pld(double sigma, double m0, double G) {
  require_positive(sigma, "sigma");
  require_positive(m0, "m0");
  require_positive(G, "G");
  return 8.0 * std::numbers::pi * G * m0 * m0 * sigma * sigma;
}

double crossing_wavenumber(const CslParameters& p, double G) {
  // log(feedback / monitoring) falls as -4 log k: one sign change.
  auto f = [&](double log_k) {
    const CslTerms t = csl_terms(p, G, std::exp(log_k));
    return std::log(t.feedback) - std::log(t.monitoring);
  };
  double lo = -std::log(p.sigma) - 1.0;
  double hi = -std::log(p.sigma) + 1.0;
  for (int i = 0; i < 200 && f(lo) < 0.0; ++i) lo -= 2.0;
  for (int i = 0; i < 200 && f(hi) > 0.0; ++i) hi += 2.0;
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  return std::exp(0.5 * (bracket.first + bracket.second));
}

double lambda_csl(double r_c_m) {
  require_positive(r_c_m, "r_C");
  return si::G * si::atomic_mass_unit * si::atomic_mass_unit /
         (std::sqrt(std::numbers::pi) * si::hbar * r_c_m);
}

std::vector<HyperbolaRow> hyperbola(double r_min_m, double r_max_m,
                                    std::size_t n) {
  require_positive(r_min_m, "r_min");
  require_positive(r_max_m, "r_max");
  if (!(r_max_m > r_min_m)) throw std::invalid_argument("r_max must exceed r_min");
  if (n < 2) throw std::invalid_argument("need at least two points");
  const double a = std::log(r_min_m);
  const double b = std::log(r_max_m);
  std::vector<HyperbolaRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r;
    if (i == 0) {
      r = r_min_m;
    } else if (i + 1 == n) {
      r = r_max_m;
    } else {
      r = std::exp(a + (b - a) * static_cast<double>(i) /
                           static_cast<double>(n - 1));
    }
    const double lambda = lambda_csl(r);
    rows[i] = {r, lambda, lambda / si::grw_collapse_rate};
  }
  return rows;
}

void write_hyperbola_csv(std::ostream& out,
                         const std::vector<HyperbolaRow>& rows) {
  const double at_standard = lambda_csl(si::standard_r_c);
  const double ratio = at_standard / si::grw_collapse_rate;
  out << "# grw_collapse_rate_hz=" << io::format_double(si::grw_collapse_rate)
      << "\r\n";
  out << "# at r_c_m=" << io::format_double(si::standard_r_c)
      << ": lambda_csl_hz=" << io::format_double(at_standard)
      << " ratio_to_grw=" << io::format_double(ratio) << " ("
      << io::format_double(std::round(-std::log10(ratio)))
      << " orders of magnitude below GRW)\r\n";
  io::write_csv_row(out, {"r_c_m", "lambda_csl_hz", "ratio_to_grw"});
  for (const HyperbolaRow& r : rows) {
    io::write_csv_row(out, {io::format_double(r.r_c_m),
                            io::format_double(r.lambda_hz),
                            io::format_double(r.ratio_to_grw)});
  }
}

}  // namespace semigrav::csl
