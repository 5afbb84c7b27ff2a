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

#pragma once

// Local (diagonal) monitoring branch: gamma(x, y) = 4 (gamma_CSL / m0^2)
// delta(x - y) smeared by a gaussian of width sigma. Fixing gamma_CSL by
// least decoherence at k = 1/sigma relates the CSL collapse rate to the
// localization length,
//   lambda_CSL = G m0^2 / (sqrt(pi) hbar r_C).

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace semigrav::csl {

/// SI values. G and the atomic mass unit are CODATA 2018 recommended values;
/// hbar is exact since the 2019 SI redefinition.
namespace si {
inline constexpr double G = 6.67430e-11;                     // m^3 kg^-1 s^-2
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
/// GRW collapse rate per nucleon (Ghirardi, Rimini, Weber 1986).
inline constexpr double grw_collapse_rate = 1e-16;  // 1/s
/// Conventional CSL localization length, 1e-5 cm.
inline constexpr double standard_r_c = 1e-7;  // m
}  // namespace si

struct Constant {
  std::string_view name;
  std::string_view symbol;
  double value;
  std::string_view unit;
  std::string_view source;
};

std::span<const Constant> constants_table();

/// lambda_csl = gamma_csl / (hbar (4 pi sigma^2)^{3/2}). In SI gamma_csl is
/// in kg m^5 s^-2; with hbar = 1 the relation is the bare ratio.
struct CslParameters {
  double gamma_csl = 0.0;
  double sigma = 0.0;
  double m0 = 0.0;
  double lambda_csl = 0.0;
};

/// Fills lambda_csl from the other fields; throws std::invalid_argument for
/// non-positive input.
CslParameters make_parameters(double gamma_csl, double sigma, double m0,
                              double hbar = 1.0);

/// D~(k) = [gamma/m0^2 + (4 m0^2 / gamma) (4 pi G)^2 / k^4] g~(k)^2 with the
/// gaussian g~(k) = exp(-sigma^2 k^2 / 2).
double csl_decoherence_fourier(const CslParameters& p, double G, double k);

/// The two terms of csl_decoherence_fourier without the mollifier.
struct CslTerms {
  double monitoring = 0.0;
  double feedback = 0.0;
};
CslTerms csl_terms(const CslParameters& p, double G, double k);

/// 8 pi G m0^2 sigma^2: the minimizer of csl_decoherence_fourier over
/// gamma_csl at k = 1/sigma.
double heuristic_pld(double sigma, double m0, double G);

/// Wave number at which the two terms are equal, found by bracketing.
double crossing_wavenumber(const CslParameters& p, double G);

/// G m0^2 / (sqrt(pi) hbar r_C) in 1/s, r_C in metres.
double lambda_csl(double r_c_m);

struct HyperbolaRow {
  double r_c_m = 0.0;
  double lambda_hz = 0.0;
  double ratio_to_grw = 0.0;
};

/// n >= 2 log-spaced points with exact endpoints.
std::vector<HyperbolaRow> hyperbola(double r_min_m, double r_max_m,
                                    std::size_t n);

/// CSV with '#' metadata lines (GRW rate and the value at the standard
/// localization length) and columns r_c_m, lambda_csl_hz, ratio_to_grw.
void write_hyperbola_csv(std::ostream& out,
                         const std::vector<HyperbolaRow>& rows);

}  // namespace semigrav::csl
