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

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "semigrav/errors.hpp"
#include "semigrav/pld.hpp"
#include "semigrav/rng.hpp"

namespace semigrav::pld {
namespace {

constexpr std::uint64_t kNoisePurpose = 0x6e6f697365ull;
constexpr double kMaxRelativeStderr = 0.10;

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using RealBuffer = std::unique_ptr<double, FftwRealDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwComplexDeleter>;
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

void validate(const NoiseScalingConfig& c) {
  const std::size_t n = c.lattice_points;
  if (n < 8) throw std::invalid_argument("lattice_points must be >= 8");
  if (!(c.spacing > 0.0) || !(c.dt > 0.0) || !(c.G > 0.0)) {
    throw std::invalid_argument("G, spacing and dt must be positive");
  }
  if (c.box_sides.empty() || c.window_steps.empty()) {
    throw std::invalid_argument("box_sides and window_steps must be non-empty");
  }
  for (std::size_t L : c.box_sides) {
    if (L == 0 || n % L != 0 || 2 * L > n) {
      throw std::invalid_argument("box side " + std::to_string(L) +
                                  " must divide lattice_points and be at "
                                  "most half of it");
    }
  }
  const std::size_t m_max =
      *std::max_element(c.window_steps.begin(), c.window_steps.end());
  for (std::size_t M : c.window_steps) {
    if (M == 0 || m_max % M != 0) {
      throw std::invalid_argument("every window must divide the longest one");
    }
  }
  if (c.n_blocks < 2) throw std::invalid_argument("n_blocks must be >= 2");
  if (c.box_sides.size() * c.window_steps.size() < 3) {
    throw std::invalid_argument("need at least three (V, T) points to fit");
  }
}

// Window estimates of E|grad Phi|^2, indexed [box][window][sample].
using WindowValues = std::vector<std::vector<std::vector<double>>>;

class Sampler {
 public:
  Sampler(const NoiseScalingConfig& c, const std::vector<double>& amplitude)
      : c_(c),
        n_(static_cast<int>(c.lattice_points)),
        n_real_(c.lattice_points * c.lattice_points * c.lattice_points),
        n_complex_(c.lattice_points * c.lattice_points *
                   (c.lattice_points / 2 + 1)),
        amplitude_(amplitude),
        noise_(static_cast<double*>(fftw_malloc(sizeof(double) * n_real_))),
        field_(static_cast<double*>(fftw_malloc(sizeof(double) * n_real_))),
        spectrum_(static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * n_complex_))),
        work_(static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * n_complex_))) {
    forward_.reset(fftw_plan_dft_r2c_3d(n_, n_, n_, noise_.get(),
                                        spectrum_.get(), FFTW_ESTIMATE));
    backward_.reset(fftw_plan_dft_c2r_3d(n_, n_, n_, work_.get(),
                                         field_.get(), FFTW_ESTIMATE));
    const std::size_t half = c.lattice_points / 2 + 1;
    wave_.resize(3 * n_complex_);
    const double dk = 2.0 * std::numbers::pi /
                      (static_cast<double>(n_) * c.spacing);
    auto freq = [&](std::size_t i, bool& nyquist) {
      const long m = static_cast<long>(i) <= n_ / 2
                         ? static_cast<long>(i)
                         : static_cast<long>(i) - n_;
      nyquist = 2 * static_cast<long>(i) == n_;
      return dk * static_cast<double>(m);
    };
    std::size_t idx = 0;
    for (std::size_t x = 0; x < c.lattice_points; ++x) {
      for (std::size_t y = 0; y < c.lattice_points; ++y) {
        for (std::size_t z = 0; z < half; ++z, ++idx) {
          bool nx, ny, nz;
          const double kx = freq(x, nx), ky = freq(y, ny), kz = freq(z, nz);
          wave_[3 * idx + 0] = nx ? 0.0 : kx;
          wave_[3 * idx + 1] = ny ? 0.0 : ky;
          wave_[3 * idx + 2] = nz ? 0.0 : kz;
        }
      }
    }
  }

  /// Box means of the three gradient components for one time step, appended
  /// to `out[box]` as consecutive triples.
  void step(std::uint64_t step_index, std::vector<std::vector<double>>& out) {
    rng::Stream stream(rng::derive_seed(c_.seed, kNoisePurpose), step_index);
    stream.fill_normal({noise_.get(), n_real_});
    fftw_execute(forward_.get());
    const double inv_n = 1.0 / static_cast<double>(n_real_);
    for (int comp = 0; comp < 3; ++comp) {
      for (std::size_t i = 0; i < n_complex_; ++i) {
        // i k a(k) w(k), normalized for the unscaled inverse transform.
        const double f = wave_[3 * i + comp] * amplitude_[i] * inv_n;
        work_.get()[i][0] = -f * spectrum_.get()[i][1];
        work_.get()[i][1] = f * spectrum_.get()[i][0];
      }
      fftw_execute(backward_.get());
      for (std::size_t b = 0; b < c_.box_sides.size(); ++b) {
        box_means(c_.box_sides[b], comp, out[b]);
      }
    }
  }

 private:
  void box_means(std::size_t L, int comp, std::vector<double>& out) {
    const std::size_t n = c_.lattice_points;
    const std::size_t per_side = n / L;
    const std::size_t n_boxes = per_side * per_side * per_side;
    sums_.assign(n_boxes, 0.0);
    const double* f = field_.get();
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t row = ((x / L) * per_side + y / L) * per_side;
        const double* line = f + (x * n + y) * n;
        for (std::size_t z = 0; z < n; ++z) sums_[row + z / L] += line[z];
      }
    }
    const std::size_t base = out.size() - (comp == 0 ? 0 : 3 * n_boxes);
    if (comp == 0) out.resize(out.size() + 3 * n_boxes);
    const double inv_volume = 1.0 / static_cast<double>(L * L * L);
    for (std::size_t i = 0; i < n_boxes; ++i) {
      out[base + 3 * i + static_cast<std::size_t>(comp)] =
          sums_[i] * inv_volume;
    }
  }

  const NoiseScalingConfig& c_;
  int n_;
  std::size_t n_real_;
  std::size_t n_complex_;
  const std::vector<double>& amplitude_;
  RealBuffer noise_;
  RealBuffer field_;
  ComplexBuffer spectrum_;
  ComplexBuffer work_;
  Plan forward_;
  Plan backward_;
  std::vector<double> wave_;
  std::vector<double> sums_;
};

// Per-mode standard deviation sqrt(C~(|k|) / (h^3 dt)) on the r2c layout.
std::vector<double> mode_amplitudes(const NoiseScalingConfig& c) {
  const auto grid = kernel::default_grid(c.mollifier.sigma());
  const auto newton = kernel::newtonian_kernel(c.G, grid);
  const auto pair = kernel::conjugate(newton, c.mollifier);
  const auto reg = regularized_pld(newton, c.mollifier);
  const auto covariance = phi_noise_covariance(reg.gamma_sigma, pair);

  const std::size_t n = c.lattice_points;
  const std::size_t half = n / 2 + 1;
  const double dk =
      2.0 * std::numbers::pi / (static_cast<double>(n) * c.spacing);
  const double scale = 1.0 / (c.spacing * c.spacing * c.spacing * c.dt);
  auto wavenumber = [&](std::size_t i) {
    const double m = 2 * i <= n ? static_cast<double>(i)
                                : static_cast<double>(i) - static_cast<double>(n);
    return dk * m;
  };
  std::vector<double> amplitude(n * n * half);
  std::size_t idx = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < half; ++z, ++idx) {
        const double kx = wavenumber(x), ky = wavenumber(y), kz = wavenumber(z);
        const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
        amplitude[idx] =
            k == 0.0 ? 0.0 : std::sqrt(std::max(0.0, covariance(k)) * scale);
      }
    }
  }
  return amplitude;
}

// Window values for one block of m_max steps.
void process_block(const NoiseScalingConfig& c, Sampler& sampler,
                   std::size_t block, std::size_t m_max,
                   std::vector<std::vector<std::vector<double>>>& steps,
                   WindowValues& out) {
  const std::size_t n_box = c.box_sides.size();
  for (std::size_t b = 0; b < n_box; ++b) {
    for (auto& s : steps[b]) s.clear();
  }
  std::vector<std::vector<double>> scratch(n_box);
  for (std::size_t s = 0; s < m_max; ++s) {
    for (auto& v : scratch) v.clear();
    sampler.step(block * m_max + s, scratch);
    for (std::size_t b = 0; b < n_box; ++b) steps[b][s].swap(scratch[b]);
  }
  out.assign(n_box, std::vector<std::vector<double>>(c.window_steps.size()));
  for (std::size_t b = 0; b < n_box; ++b) {
    const std::size_t len = steps[b][0].size();
    std::vector<double> mean(len);
    for (std::size_t w = 0; w < c.window_steps.size(); ++w) {
      const std::size_t M = c.window_steps[w];
      for (std::size_t start = 0; start < m_max; start += M) {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t s = start; s < start + M; ++s) {
          for (std::size_t i = 0; i < len; ++i) mean[i] += steps[b][s][i];
        }
        double sq = 0.0;
        const double inv_m = 1.0 / static_cast<double>(M);
        for (double v : mean) sq += (v * inv_m) * (v * inv_m);
        out[b][w].push_back(sq / static_cast<double>(len / 3));
      }
    }
  }
}

}  // namespace

NoiseScalingResult gradient_variance_scaling(const NoiseScalingConfig& c) {
  validate(c);
  const std::vector<double> amplitude = mode_amplitudes(c);
  const std::size_t m_max =
      *std::max_element(c.window_steps.begin(), c.window_steps.end());
  const std::size_t n_box = c.box_sides.size();
  const unsigned n_threads = std::max(
      1u, std::min<unsigned>(c.threads, static_cast<unsigned>(c.n_blocks)));

  // FFTW planning is not thread-safe; all plans are made here.
  std::vector<std::unique_ptr<Sampler>> samplers;
  for (unsigned t = 0; t < n_threads; ++t) {
    samplers.push_back(std::make_unique<Sampler>(c, amplitude));
  }

  std::vector<WindowValues> per_block(c.n_blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&](unsigned t) {
    std::vector<std::vector<std::vector<double>>> steps(
        n_box, std::vector<std::vector<double>>(m_max));
    for (std::size_t block = next++; block < c.n_blocks; block = next++) {
      process_block(c, *samplers[t], block, m_max, steps, per_block[block]);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  NoiseScalingResult result;
  std::vector<double> xs, ys;
  for (std::size_t b = 0; b < n_box; ++b) {
    const double side = static_cast<double>(c.box_sides[b]) * c.spacing;
    for (std::size_t w = 0; w < c.window_steps.size(); ++w) {
      double sum = 0.0, sum_sq = 0.0;
      std::size_t count = 0;
      for (const auto& block : per_block) {
        for (double v : block[b][w]) {
          sum += v;
          sum_sq += v * v;
          ++count;
        }
      }
      const double mean = sum / static_cast<double>(count);
      const double var = std::max(
          0.0, (sum_sq - sum * mean) / static_cast<double>(count - 1));
      NoiseScalingRecord rec;
      rec.sigma = c.mollifier.sigma();
      rec.V = side * side * side;
      rec.T = static_cast<double>(c.window_steps[w]) * c.dt;
      rec.variance = mean;
      rec.stderr_ = std::sqrt(var / static_cast<double>(count));
      if (!(rec.stderr_ <= kMaxRelativeStderr * rec.variance)) {
        throw DomainError("relative standard error above 10% at V = " +
                          std::to_string(rec.V) + ", T = " +
                          std::to_string(rec.T) + "; increase n_blocks");
      }
      xs.push_back(-std::log(rec.V * rec.T));
      ys.push_back(std::log(rec.variance));
      result.records.push_back(rec);
    }
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("all (V, T) points coincide");
  result.exponent = sxy / sxx;
  const double intercept = my - result.exponent * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - intercept - result.exponent * xs[i];
    rss += r * r;
  }
  result.exponent_stderr =
      xs.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  result.prefactor = std::exp(intercept);
  return result;
}

}  // namespace semigrav::pld
