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

#include "semigrav/kernel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "semigrav/errors.hpp"
#include "semigrav/io.hpp"

namespace semigrav::kernel {
namespace {

void validate_grid(std::span<const double> k) {
  if (k.size() < kMinGridPoints) {
    throw std::invalid_argument("k grid needs at least " +
                                std::to_string(kMinGridPoints) + " points");
  }
  if (!(k.front() > 0.0) || !std::isfinite(k.back())) {
    throw std::invalid_argument("k grid must be strictly positive and finite");
  }
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (!(k[i] > k[i - 1])) {
      throw std::invalid_argument("k grid must be strictly increasing");
    }
  }
}

// Second derivatives of the natural cubic spline through (x, y).
std::vector<double> natural_spline(std::span<const double> x,
                                   std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> m2(n, 0.0);
  if (n < 3) return m2;
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
  }
  // Thomas algorithm on rows 1..n-2; sub-diagonal of row i is h_{i-1}/6.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = (x[i] - x[i - 1]) / 6.0;
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m2[i] = (rhs[i] - upper[i] * m2[i + 1]) / diag[i];
  }
  return m2;
}

PowerTail power_tail(double k0, double f0, double k1, double f1) {
  PowerTail tail;
  if (f0 == 0.0) return tail;
  tail.vanishes = false;
  tail.amplitude = f0;
  tail.k_ref = k0;
  if (f1 != 0.0 && (f0 > 0.0) == (f1 > 0.0)) {
    tail.exponent = std::log(f1 / f0) / std::log(k1 / k0);
  }
  return tail;
}

FourierKernel resample_onto(const FourierKernel& target,
                            const FourierKernel& source) {
  std::vector<double> values;
  values.reserve(target.size());
  for (double k : target.k_grid()) values.push_back(source(k));
  return FourierKernel({target.k_grid().begin(), target.k_grid().end()},
                       std::move(values), source.info());
}

template <class Op>
FourierKernel pointwise(const FourierKernel& h1, const FourierKernel& h2,
                        GridPolicy policy, Op op) {
  if (!h1.same_grid(h2)) {
    if (policy == GridPolicy::require_identical) {
      throw std::invalid_argument("kernels live on different k grids");
    }
    return pointwise(h1, resample_onto(h1, h2),
                     GridPolicy::require_identical, op);
  }
  std::vector<double> values(h1.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = op(h1[i], h2[i]);
  }
  return FourierKernel({h1.k_grid().begin(), h1.k_grid().end()},
                       std::move(values), h1.info());
}

}  // namespace

std::vector<double> log_grid(double k_min, double k_max, std::size_t n) {
  if (!(k_min > 0.0) || !(k_max > k_min) || !std::isfinite(k_max)) {
    throw std::invalid_argument("log_grid needs 0 < k_min < k_max");
  }
  if (n < 2) throw std::invalid_argument("log_grid needs n >= 2");
  std::vector<double> k(n);
  const double a = std::log(k_min);
  const double step = (std::log(k_max) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = std::exp(a + step * static_cast<double>(i));
  }
  k.front() = k_min;
  k.back() = k_max;
  return k;
}

std::vector<double> default_grid(double sigma_ref, std::size_t n) {
  if (!(sigma_ref > 0.0)) {
    throw std::invalid_argument("reference smearing length must be positive");
  }
  return log_grid(1e-3 / sigma_ref, 1e3 / sigma_ref, n);
}

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive: return "positive";
    case Definiteness::negative: return "negative";
    case Definiteness::mixed: return "mixed";
  }
  return "mixed";
}

double PowerTail::operator()(double k) const {
  if (vanishes) return 0.0;
  if (exponent == 0.0) return amplitude;
  return amplitude * std::pow(k / k_ref, exponent);
}

FourierKernel::FourierKernel(std::vector<double> k_grid,
                             std::vector<double> values, KernelInfo info)
    : k_(std::move(k_grid)), values_(std::move(values)), info_(std::move(info)) {
  validate_grid(k_);
  if (values_.size() != k_.size()) {
    throw std::invalid_argument("kernel values and k grid differ in length");
  }
  bool any_pos = false, any_neg = false;
  for (double& v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("kernel values must be finite");
    }
    if (std::abs(v) < DBL_MIN) v = 0.0;
    any_pos |= v > 0.0;
    any_neg |= v < 0.0;
  }
  definiteness_ = any_pos && any_neg ? Definiteness::mixed
                  : any_neg          ? Definiteness::negative
                                     : Definiteness::positive;
  build_interpolant();
}

FourierKernel FourierKernel::with_info(KernelInfo info) const {
  FourierKernel copy = *this;
  copy.info_ = std::move(info);
  return copy;
}

void FourierKernel::build_interpolant() {
  const std::size_t n = values_.size();
  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (values_[i] != 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  u_.resize(n);
  for (std::size_t i = 0; i < n; ++i) u_[i] = std::log(k_[i]);
  if (first == n) {
    interp_ = Interp::zero;
    return;
  }

  bool log_eligible = definiteness_ != Definiteness::mixed && last > first;
  for (std::size_t i = first; log_eligible && i <= last; ++i) {
    log_eligible = values_[i] != 0.0;
  }

  if (log_eligible) {
    interp_ = Interp::log_log;
    lo_ = first;
    hi_ = last;
    sign_ = values_[first] > 0.0 ? 1.0 : -1.0;
    y_.assign(n, 0.0);
    for (std::size_t i = lo_; i <= hi_; ++i) y_[i] = std::log(std::abs(values_[i]));
  } else {
    interp_ = Interp::linear;
    lo_ = 0;
    hi_ = n - 1;
    y_ = values_;
  }
  m2_.assign(n, 0.0);
  const auto m2 = natural_spline(
      std::span<const double>(u_).subspan(lo_, hi_ - lo_ + 1),
      std::span<const double>(y_).subspan(lo_, hi_ - lo_ + 1));
  std::copy(m2.begin(), m2.end(), m2_.begin() + static_cast<std::ptrdiff_t>(lo_));

  if (lo_ == 0) {
    ir_tail_ = power_tail(k_[0], values_[0], k_[1], values_[1]);
  }
  if (hi_ == n - 1) {
    uv_tail_ = power_tail(k_[n - 1], values_[n - 1], k_[n - 2], values_[n - 2]);
  }
}

bool FourierKernel::segment_vanishes(std::size_t i) const {
  return interp_ == Interp::zero || i < lo_ || i >= hi_;
}

double FourierKernel::segment_value(std::size_t i, double k) const {
  if (segment_vanishes(i)) return 0.0;
  const double u = std::log(k);
  const double h = u_[i + 1] - u_[i];
  const double a = (u_[i + 1] - u) / h;
  const double b = 1.0 - a;
  const double y = a * y_[i] + b * y_[i + 1] +
                   ((a * a * a - a) * m2_[i] + (b * b * b - b) * m2_[i + 1]) *
                       (h * h) / 6.0;
  return interp_ == Interp::log_log ? sign_ * std::exp(y) : y;
}

double FourierKernel::operator()(double k) const {
  if (!(k >= 0.0)) throw std::invalid_argument("wave number must be >= 0");
  if (k < k_.front()) {
    if (k == 0.0 && !ir_tail_.vanishes && ir_tail_.exponent < 0.0) {
      throw DomainError("kernel is singular at k = 0");
    }
    if (k == 0.0 && ir_tail_.exponent > 0.0) return 0.0;
    return ir_tail_(k);
  }
  if (k > k_.back()) return uv_tail_(k);
  auto it = std::upper_bound(k_.begin(), k_.end(), k);
  std::size_t i = static_cast<std::size_t>(it - k_.begin());
  if (i == k_.size()) return values_.back();
  if (i > 0) --i;
  if (k == k_[i]) return values_[i];
  return segment_value(i, k);
}

FourierKernel sample_kernel(std::span<const double> k_grid,
                            const std::function<double(double)>& f,
                            KernelInfo info) {
  std::vector<double> values;
  values.reserve(k_grid.size());
  for (double k : k_grid) values.push_back(f(k));
  return FourierKernel({k_grid.begin(), k_grid.end()}, std::move(values),
                       std::move(info));
}

FourierKernel constant_kernel(double value, std::span<const double> k_grid) {
  return sample_kernel(k_grid, [value](double) { return value; },
                       {.kind = "constant"});
}

FourierKernel newtonian_kernel(double G, std::span<const double> k_grid) {
  if (!(G > 0.0) || !std::isfinite(G)) {
    throw std::invalid_argument("gravitational constant must be positive");
  }
  if (!k_grid.empty() && !(k_grid.front() > 0.0)) {
    throw std::invalid_argument("Newtonian kernel is singular at k = 0");
  }
  const double c = -4.0 * std::numbers::pi * G;
  return sample_kernel(k_grid, [c](double k) { return c / (k * k); },
                       {.kind = "newtonian", .G = G});
}

FourierKernel kernel_product(const FourierKernel& h1, const FourierKernel& h2,
                             GridPolicy policy) {
  return pointwise(h1, h2, policy, [](double a, double b) { return a * b; });
}

FourierKernel kernel_sum(const FourierKernel& h1, const FourierKernel& h2,
                         GridPolicy policy) {
  return pointwise(h1, h2, policy, [](double a, double b) { return a + b; });
}

FourierKernel scaled(const FourierKernel& h, double factor) {
  std::vector<double> values(h.values().begin(), h.values().end());
  for (double& v : values) v *= factor;
  return FourierKernel({h.k_grid().begin(), h.k_grid().end()},
                       std::move(values), h.info());
}

FourierKernel magnitude(const FourierKernel& h) {
  std::vector<double> values(h.values().begin(), h.values().end());
  for (double& v : values) v = std::abs(v);
  return FourierKernel({h.k_grid().begin(), h.k_grid().end()},
                       std::move(values), h.info());
}

InvertedKernel kernel_inverse(const FourierKernel& h, double floor) {
  if (h.definiteness() == Definiteness::mixed) {
    throw DomainError("cannot invert a mixed-sign kernel");
  }
  if (!(floor >= 0.0)) throw std::invalid_argument("floor must be >= 0");
  double max_abs = 0.0;
  for (double v : h.values()) max_abs = std::max(max_abs, std::abs(v));
  const double threshold = floor * max_abs;

  InvertedKernel out{h, {}};
  std::vector<double> values(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double v = h[i];
    if (v == 0.0 || std::abs(v) < threshold) {
      out.excluded.push_back(i);
      values[i] = 0.0;
      continue;
    }
    values[i] = 1.0 / v;
    if (!std::isfinite(values[i])) {
      throw DomainError("kernel reciprocal overflows at k = " +
                        io::format_double(h.k_grid()[i]));
    }
  }
  KernelInfo info = h.info();
  info.kind = "inverse(" + info.kind + ")";
  out.kernel = FourierKernel({h.k_grid().begin(), h.k_grid().end()},
                             std::move(values), std::move(info));
  return out;
}

std::string to_string(MollifierKind kind) {
  return kind == MollifierKind::gaussian ? "gaussian" : "biharmonic";
}

MollifierKind parse_mollifier_kind(std::string_view name) {
  if (name == "gaussian") return MollifierKind::gaussian;
  if (name == "biharmonic") return MollifierKind::biharmonic;
  throw std::invalid_argument("unknown mollifier '" + std::string(name) + "'");
}

Mollifier::Mollifier(MollifierKind kind, double sigma)
    : kind_(kind), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("mollifier width must be positive");
  }
}

double Mollifier::operator()(double k) const {
  if (!(k >= 0.0)) throw std::invalid_argument("wave number must be >= 0");
  const double s2k2 = sigma_ * sigma_ * k * k;
  if (kind_ == MollifierKind::gaussian) return std::exp(-0.5 * s2k2);
  return 1.0 / std::sqrt(1.0 + s2k2);
}

double mollify(const Mollifier& m, double k) { return m(k); }

FourierKernel as_kernel(const Mollifier& m, std::span<const double> k_grid) {
  return sample_kernel(k_grid, [&m](double k) { return m(k); },
                       {.kind = "mollifier",
                        .mollifier = to_string(m.kind()),
                        .sigma = m.sigma()});
}

FourierKernel conjugate(const FourierKernel& h, const Mollifier& m) {
  const FourierKernel g = as_kernel(m, h.k_grid());
  KernelInfo info = h.info();
  info.mollifier = to_string(m.kind());
  info.sigma = m.sigma();
  return kernel_product(kernel_product(g, h), g).with_info(std::move(info));
}

FourierKernel regularized_newtonian_kernel(double G, const Mollifier& m,
                                           std::span<const double> k_grid) {
  return conjugate(newtonian_kernel(G, k_grid), m);
}

void write_csv(std::ostream& out, const FourierKernel& h) {
  const KernelInfo& info = h.info();
  out << "# kind=" << info.kind << " G=" << io::format_double(info.G)
      << " mollifier=" << info.mollifier
      << " sigma=" << io::format_double(info.sigma)
      << " sign=" << to_string(h.definiteness()) << "\r\n";
  io::write_csv_row(out, {"k", "value"});
  for (std::size_t i = 0; i < h.size(); ++i) {
    io::write_csv_row(out, {io::format_double(h.k_grid()[i]),
                            io::format_double(h[i])});
  }
}

FourierKernel read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw std::invalid_argument("kernel CSV must start with a '#' header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  KernelInfo info;
  std::string expected_sign;
  {
    std::istringstream fields(line.substr(1));
    std::string token;
    while (fields >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "kind") info.kind = value;
      else if (key == "G") info.G = io::parse_double(value);
      else if (key == "mollifier") info.mollifier = value;
      else if (key == "sigma") info.sigma = io::parse_double(value);
      else if (key == "sign") expected_sign = value;
    }
  }
  if (!std::getline(in, line)) {
    throw std::invalid_argument("kernel CSV lacks a column header");
  }
  const auto header = io::split_csv_row(line);
  if (header.size() != 2 || header[0] != "k" || header[1] != "value") {
    throw std::invalid_argument("kernel CSV header must be 'k,value'");
  }
  std::vector<double> k, values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto row = io::split_csv_row(line);
    if (row.size() != 2) {
      throw std::invalid_argument("kernel CSV rows need exactly two fields");
    }
    k.push_back(io::parse_double(row[0]));
    values.push_back(io::parse_double(row[1]));
  }
  FourierKernel h(std::move(k), std::move(values), std::move(info));
  if (!expected_sign.empty() && expected_sign != to_string(h.definiteness())) {
    throw std::invalid_argument("kernel CSV sign flag '" + expected_sign +
                                "' contradicts its values");
  }
  return h;
}

}  // namespace semigrav::kernel
