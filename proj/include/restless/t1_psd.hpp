#pragma once

// Synthetic T1 time series with a power-law spectrum, the segment-averaged
// single-sided PSD estimator, log-log power-law fitting, and band-limited
// integration of a power law to a standard deviation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <stdexcept>
#include <vector>

#include "restless/rng.hpp"

namespace restless {

namespace detail {

/// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_inplace(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

struct T1Series {
  double dt = 2.0;
  std::size_t segment_length = 0;  // M
  std::vector<double> values;      // L * M samples, segment-major

  std::size_t n_segments() const { return segment_length ? values.size() / segment_length : 0; }
};

/// Power-law spectrum alpha * (f / 1 Hz)^beta, alpha in s^2/Hz.
struct PowerLaw {
  double alpha = 8.4e-13;
  double beta = -0.81;

  double operator()(double f_hz) const { return alpha * std::pow(f_hz, beta); }
};

/// Spectral synthesis: complex Gaussian Fourier coefficients (Rayleigh
/// amplitude, uniform phase) scaled to the single-sided target PSD, inverse
/// transform, shift to t1_mean, floor at t1_mean / 10.
inline std::vector<double> synthesize(const PowerLaw& law, double dt, std::size_t n_samples, double t1_mean,
                                      std::uint64_t seed) {
  if (!(law.beta > -2.0 && law.beta <= 0.0)) throw std::domain_error("synthesize: beta must lie in (-2, 0]");
  if (!(law.alpha >= 0.0)) throw std::domain_error("synthesize: alpha must be >= 0");
  if (!(t1_mean > 0.0)) throw std::domain_error("synthesize: t1_mean must be > 0");
  if (!(dt > 0.0)) throw std::domain_error("synthesize: dt must be > 0");
  if (n_samples == 0) return {};
  if (law.alpha == 0.0) return std::vector<double>(n_samples, t1_mean);

  const std::size_t n = detail::next_pow2(std::max<std::size_t>(n_samples, 2));
  Rng rng(seed);
  std::vector<std::complex<double>> spectrum(n);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) / (nd * dt);
    // E|X_k|^2 = n S(f) / (2 dt) for a single-sided PSD S.
    const double power = nd * law(f) / (2.0 * dt);
    if (k == n / 2) {
      spectrum[k] = std::sqrt(power) * rng.normal();
    } else {
      const double s = std::sqrt(power / 2.0);
      const double re = s * rng.normal();
      const double im = s * rng.normal();
      spectrum[k] = {re, im};
      spectrum[n - k] = {re, -im};
    }
  }
  detail::fft_inplace(spectrum, +1);
  std::vector<double> out(n_samples);
  const double floor = t1_mean / 10.0;
  for (std::size_t i = 0; i < n_samples; ++i) out[i] = std::max(floor, t1_mean + spectrum[i].real() / nd);
  return out;
}

inline T1Series synthesize_series(const PowerLaw& law, double dt, std::size_t n_segments, std::size_t segment_length,
                                  double t1_mean, std::uint64_t seed) {
  return {dt, segment_length, synthesize(law, dt, n_segments * segment_length, t1_mean, seed)};
}

struct PsdEstimate {
  std::vector<double> frequencies;  // k / (M dt), k = 1 .. floor(M/2)
  std::vector<double> s_t1;         // s^2 / Hz
};

/// Segment-averaged periodogram with per-segment mean removal and the
/// 2 dt / (L M) single-sided normalization. Rectangular window.
inline PsdEstimate estimate_psd(const T1Series& series) {
  const std::size_t m = series.segment_length;
  const std::size_t l = series.n_segments();
  if (m < 2) throw std::invalid_argument("estimate_psd: segment length must be >= 2");
  if (l < 1 || l * m != series.values.size())
    throw std::invalid_argument("estimate_psd: series must hold a whole number (>= 1) of segments");

  const std::size_t n_bins = m / 2;
  PsdEstimate out;
  out.frequencies.resize(n_bins);
  out.s_t1.assign(n_bins, 0.0);
  const double md = static_cast<double>(m);
  for (std::size_t k = 1; k <= n_bins; ++k) out.frequencies[k - 1] = static_cast<double>(k) / (md * series.dt);

  std::vector<double> delta(m);
  for (std::size_t seg = 0; seg < l; ++seg) {
    const auto begin = series.values.begin() + static_cast<std::ptrdiff_t>(seg * m);
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += begin[static_cast<std::ptrdiff_t>(i)];
    mean /= md;
    for (std::size_t i = 0; i < m; ++i) delta[i] = begin[static_cast<std::ptrdiff_t>(i)] - mean;
    for (std::size_t k = 1; k <= n_bins; ++k) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t i = 0; i < m; ++i) {
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k * (i + 1)) / md;
        acc += delta[i] * std::polar(1.0, phase);
      }
      out.s_t1[k - 1] += std::norm(acc);
    }
  }
  const double scale = 2.0 * series.dt / (static_cast<double>(l) * md);
  for (double& v : out.s_t1) v *= scale;
  return out;
}

struct PowerLawFit {
  PowerLaw law;
  std::size_t n_bins_used = 0;
  double residual_rms = 0.0;  // in log10 units
};

/// Ordinary least squares of log10 S against log10 f over positive bins.
inline PowerLawFit fit_powerlaw(const PsdEstimate& psd) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < psd.frequencies.size(); ++i) {
    if (psd.frequencies[i] > 0.0 && psd.s_t1[i] > 0.0 && std::isfinite(psd.s_t1[i])) {
      x.push_back(std::log10(psd.frequencies[i]));
      y.push_back(std::log10(psd.s_t1[i]));
    }
  }
  if (x.size() < 4) throw std::runtime_error("fit_powerlaw: fewer than 4 usable positive-frequency bins");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::runtime_error("fit_powerlaw: degenerate frequency support");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  PowerLawFit fit;
  fit.law = {std::pow(10.0, intercept), slope};
  fit.n_bins_used = x.size();
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

/// sqrt of the integral of alpha f^beta over [f_l, f_u] (Hz).
inline double sigma_from_psd(const PowerLaw& law, double f_l, double f_u) {
  if (!(f_l > 0.0 && f_u > f_l)) throw std::domain_error("sigma_from_psd: need 0 < f_l < f_u");
  if (!(law.alpha >= 0.0)) throw std::domain_error("sigma_from_psd: alpha must be >= 0");
  const double e = law.beta + 1.0;
  double integral;
  if (std::abs(e) < 1e-12) {
    integral = law.alpha * std::log(f_u / f_l);
  } else {
    // alpha/e * (f_u^e - f_l^e), written to stay accurate when e is small.
    integral = law.alpha * std::pow(f_l, e) * std::expm1(e * std::log(f_u / f_l)) / e;
  }
  return std::sqrt(integral);
}

/// T1 as a function of simulated time: sample-and-hold over a sampled
/// series, wrapping at the end (spectral synthesis is periodic).
class T1Trace {
 public:
  static T1Trace constant(double t1) { return T1Trace(1.0, {t1}); }

  T1Trace(double dt, std::vector<double> samples) : dt_(dt), samples_(std::move(samples)) {
    if (!(dt_ > 0.0) || samples_.empty()) throw std::invalid_argument("T1Trace: need dt > 0 and samples");
    for (double v : samples_)
      if (!(v > 0.0)) throw std::invalid_argument("T1Trace: samples must be > 0");
  }

  static T1Trace synthesized(const PowerLaw& law, double dt, double duration, double t1_mean, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(std::ceil(duration / dt)) + 1;
    return T1Trace(dt, synthesize(law, dt, detail::next_pow2(n), t1_mean, seed));
  }

  double at(double t) const {
    if (samples_.size() == 1) return samples_.front();
    const double idx = std::floor(std::max(0.0, t) / dt_);
    const auto i = static_cast<std::size_t>(std::fmod(idx, static_cast<double>(samples_.size())));
    return samples_[i];
  }

  double dt() const { return dt_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  double dt_;
  std::vector<double> samples_;
};

}  // namespace restless
