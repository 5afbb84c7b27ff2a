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

// Isotropic, translation-invariant kernels in three dimensions, stored as
// samples of their radial Fourier transform. Convolution products, inverses
// and mollifier conjugation act pointwise on these samples.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semigrav::kernel {

inline constexpr std::size_t kMinGridPoints = 64;
inline constexpr std::size_t kDefaultGridPoints = 512;
inline constexpr double kDefaultInversionFloor = 1e-12;

/// Logarithmically spaced wave numbers with exact endpoints.
std::vector<double> log_grid(double k_min, double k_max,
                             std::size_t n = kDefaultGridPoints);

/// The default grid spans [1e-3 / sigma_ref, 1e3 / sigma_ref].
std::vector<double> default_grid(double sigma_ref = 1.0,
                                 std::size_t n = kDefaultGridPoints);

enum class Definiteness { positive, negative, mixed };

std::string to_string(Definiteness d);

/// Provenance carried into the CSV header. Purely descriptive.
struct KernelInfo {
  std::string kind = "custom";
  double G = 0.0;
  std::string mollifier = "none";
  double sigma = 0.0;

  friend bool operator==(const KernelInfo&, const KernelInfo&) = default;
};

/// Power-law continuation f(k) = amplitude * (k / k_ref)^exponent used
/// outside the sampled range. `vanishes` marks an identically zero tail.
struct PowerTail {
  bool vanishes = true;
  double amplitude = 0.0;
  double k_ref = 1.0;
  double exponent = 0.0;

  double operator()(double k) const;
};

class FourierKernel {
 public:
  /// Values whose magnitude is below the smallest normal double are stored
  /// as exact zeros so that reciprocals of stored entries stay finite.
  FourierKernel(std::vector<double> k_grid, std::vector<double> values,
                KernelInfo info = {});

  std::span<const double> k_grid() const { return k_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  Definiteness definiteness() const { return definiteness_; }
  const KernelInfo& info() const { return info_; }
  FourierKernel with_info(KernelInfo info) const;

  bool same_grid(const FourierKernel& other) const { return k_ == other.k_; }

  /// Off-grid evaluation: natural cubic spline in (log k, log|f|) for
  /// sign-definite kernels without interior zeros, in (log k, f) otherwise;
  /// power-law continuation beyond the grid ends.
  double operator()(double k) const;

  /// Spline value on grid interval [k_i, k_{i+1}]; `k` must lie inside it.
  double segment_value(std::size_t i, double k) const;

  /// True when the interpolant vanishes identically on [k_i, k_{i+1}].
  bool segment_vanishes(std::size_t i) const;

  const PowerTail& infrared_tail() const { return ir_tail_; }
  const PowerTail& ultraviolet_tail() const { return uv_tail_; }

  friend bool operator==(const FourierKernel& a, const FourierKernel& b) {
    return a.k_ == b.k_ && a.values_ == b.values_ && a.info_ == b.info_;
  }

 private:
  enum class Interp { zero, log_log, linear };

  void build_interpolant();

  std::vector<double> k_;
  std::vector<double> values_;
  KernelInfo info_;
  Definiteness definiteness_ = Definiteness::positive;

  Interp interp_ = Interp::zero;
  std::size_t lo_ = 0;  // first index covered by the spline
  std::size_t hi_ = 0;  // last index covered by the spline
  double sign_ = 1.0;
  std::vector<double> u_;   // log k
  std::vector<double> y_;   // spline ordinates
  std::vector<double> m2_;  // second derivatives
  PowerTail ir_tail_;
  PowerTail uv_tail_;
};

/// Samples `f` on the grid.
FourierKernel sample_kernel(std::span<const double> k_grid,
                            const std::function<double(double)>& f,
                            KernelInfo info = {});

FourierKernel constant_kernel(double value, std::span<const double> k_grid);

/// Fourier transform of the Newtonian Green function -G/|x - y|:
/// -4 pi G / k^2.
FourierKernel newtonian_kernel(double G, std::span<const double> k_grid);

enum class GridPolicy { require_identical, resample };

/// (h1 . h2)(x, y) = \int dr h1(x, r) h2(r, y), i.e. the pointwise product of
/// the Fourier diagonals. With GridPolicy::resample, h2 is interpolated onto
/// the grid of h1.
FourierKernel kernel_product(const FourierKernel& h1, const FourierKernel& h2,
                             GridPolicy policy = GridPolicy::require_identical);

FourierKernel kernel_sum(const FourierKernel& h1, const FourierKernel& h2,
                         GridPolicy policy = GridPolicy::require_identical);

FourierKernel scaled(const FourierKernel& h, double factor);

FourierKernel magnitude(const FourierKernel& h);

struct InvertedKernel {
  FourierKernel kernel;
  /// Grid indices whose magnitude fell below floor * max|h| (or were zero);
  /// the inverse is set to zero there (pseudo-inverse convention).
  std::vector<std::size_t> excluded;
};

/// Pointwise reciprocal of a sign-definite kernel. Throws DomainError for
/// mixed-sign kernels or a non-finite reciprocal.
InvertedKernel kernel_inverse(const FourierKernel& h,
                              double floor = kDefaultInversionFloor);

enum class MollifierKind { gaussian, biharmonic };

std::string to_string(MollifierKind kind);
MollifierKind parse_mollifier_kind(std::string_view name);

class Mollifier {
 public:
  Mollifier(MollifierKind kind, double sigma);

  MollifierKind kind() const { return kind_; }
  double sigma() const { return sigma_; }

  /// gaussian: exp(-sigma^2 k^2 / 2); biharmonic: (1 + sigma^2 k^2)^(-1/2).
  double operator()(double k) const;

 private:
  MollifierKind kind_;
  double sigma_;
};

double mollify(const Mollifier& m, double k);

FourierKernel as_kernel(const Mollifier& m, std::span<const double> k_grid);

/// g . h . g, evaluated as kernel_product(kernel_product(g, h), g).
FourierKernel conjugate(const FourierKernel& h, const Mollifier& m);

/// conjugate(newtonian_kernel(G, grid), m).
FourierKernel regularized_newtonian_kernel(double G, const Mollifier& m,
                                           std::span<const double> k_grid);

/// Inverse three-dimensional radial Fourier transform
///   f(r) = 1 / (2 pi^2 r) \int_0^\infty k f~(k) sin(k r) dk,
///   f(0) = 1 / (2 pi^2) \int_0^\infty k^2 f~(k) dk.
/// Throws DomainError when the integral diverges.
double to_real_space(const FourierKernel& h, double r);

/// Two-column CSV. The first line is a '#' comment carrying kind, G,
/// mollifier and sigma; the second is the column header "k,value".
void write_csv(std::ostream& out, const FourierKernel& h);
FourierKernel read_csv(std::istream& in);

}  // namespace semigrav::kernel
