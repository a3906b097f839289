#pragma once

// Analytic error-fraction models for restless and conventional RB:
// probabilistic error addition, the T1 fidelity limit, SPAM asymmetry between
// |0> and |1>, the variance model with quasi-static T1 fluctuations, and SNR.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace restless {

namespace detail {

inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

}  // namespace detail

/// a +_p b: probability that exactly one of two independent flips occurs.
inline double prob_add(double a, double b) {
  detail::require_probability(a, "prob_add: a");
  detail::require_probability(b, "prob_add: b");
  return a + b - 2.0 * a * b;
}

/// k x_p p: k-fold probabilistic sum, closed form 1/2 [1 - (1-2p)^k].
inline double prob_mult(int k, double p) {
  if (k < 0) throw std::domain_error("prob_mult: k must be >= 0");
  detail::require_probability(p, "prob_mult: p");
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p, k));
}

/// Error rate of one single-shot experiment with SPAM p_s and per-Clifford
/// error p_c over n_cl Cliffords.
inline double error_rate(double p_s, double p_c, int n_cl) {
  return p_s + prob_mult(n_cl, p_c) * (1.0 - 2.0 * p_s);
}

/// Average Clifford fidelity limited by T1 during a Clifford of length tau_c.
inline double t1_limit_fidelity(double t1, double tau_c) {
  if (!(t1 > 0.0)) throw std::domain_error("t1_limit_fidelity: t1 must be > 0");
  if (!(tau_c >= 0.0)) throw std::domain_error("t1_limit_fidelity: tau_c must be >= 0");
  return (3.0 + 2.0 * std::exp(-tau_c / (2.0 * t1)) + std::exp(-tau_c / t1)) / 6.0;
}

/// T1-induced per-Clifford error, 1 - F_Cl^(T1).
inline double t1_clifford_error(double t1, double tau_c) { return 1.0 - t1_limit_fidelity(t1, tau_c); }

inline double t1_clifford_error_derivative(double t1, double tau_c) {
  // d/dT1 of -(F^(T1))
  return -(tau_c / (6.0 * t1 * t1)) * (std::exp(-tau_c / (2.0 * t1)) + std::exp(-tau_c / t1));
}

struct ReadoutTiming {
  double tau_b = 4.0e-6 / 7.0;          // effective measurement point into the readout
  double tau_a = 4.25e-6 - 4.0e-6 / 7.0;  // rest of readout and depletion
};

struct SpamProbs {
  double p_s_0 = 0.0;
  double p_s_1 = 0.0;
};

/// SPAM error when the qubit sits in |0> or |1> at the measurement point.
inline SpamProbs spam_probs(double t1, double p_s_c, const ReadoutTiming& timing) {
  if (!(t1 > 0.0)) throw std::domain_error("spam_probs: t1 must be > 0");
  const double survive_b = std::exp(-timing.tau_b / t1);
  const double survive_a = std::exp(-timing.tau_a / t1);
  return {p_s_c + (1.0 - survive_b), p_s_c + (1.0 - survive_a) * survive_b};
}

inline SpamProbs spam_probs_derivative(double t1, const ReadoutTiming& timing) {
  const double tb = timing.tau_b, ta = timing.tau_a;
  const double eb = std::exp(-tb / t1);
  const double eab = std::exp(-(ta + tb) / t1);
  const double t2 = t1 * t1;
  return {-eb * tb / t2, eb * tb / t2 - eab * (ta + tb) / t2};
}

/// Steady-state error rate when the error probability depends on whether the
/// qubit sits in |0> (p_e_0) or |1> (p_e_1) at measurement.
inline double asymmetric_error_rate(double p_e_0, double p_e_1) {
  detail::require_probability(p_e_0, "asymmetric_error_rate: p_e_0");
  detail::require_probability(p_e_1, "asymmetric_error_rate: p_e_1");
  const double denom = (1.0 - p_e_0) + (1.0 - p_e_1);
  if (denom <= 0.0) throw std::domain_error("asymmetric_error_rate: both inputs are 1");
  return (p_e_0 * (1.0 - p_e_1) + p_e_1 * (1.0 - p_e_0)) / denom;
}

/// Partial derivatives of asymmetric_error_rate w.r.t. (p_e_0, p_e_1).
inline std::pair<double, double> asymmetric_error_rate_gradient(double p_e_0, double p_e_1) {
  const double denom = 2.0 - p_e_0 - p_e_1;
  const double d2 = denom * denom;
  return {2.0 * (1.0 - p_e_1) * (1.0 - p_e_1) / d2, 2.0 * (1.0 - p_e_0) * (1.0 - p_e_0) / d2};
}

/// Restless error rate: per-state error rates fed through the steady state.
inline double restless_error_rate(double p_c, int n_cl, double t1, double p_s_c, const ReadoutTiming& timing) {
  const SpamProbs ps = spam_probs(t1, p_s_c, timing);
  return asymmetric_error_rate(error_rate(ps.p_s_0, p_c, n_cl), error_rate(ps.p_s_1, p_c, n_cl));
}

struct NoiseModelParams {
  double p_pulse = 0.0;   // T1-independent per-Clifford error
  double p_s_c = 0.006;   // non-T1 SPAM
  double t1_mean = 21.6e-6;
  double t1_sigma = 2.44e-6;
  double tau_cl = 37.5e-9;
  ReadoutTiming timing{};
  int n_shots = 8000;
};

/// Per-Clifford error at a given T1: pulse error plus the T1 contribution.
inline double clifford_error(const NoiseModelParams& params, double t1) {
  return params.p_pulse + t1_clifford_error(t1, params.tau_cl);
}

/// Pulse error that yields total per-Clifford error p_c at the mean T1.
inline double pulse_error_for(double p_c, double t1, double tau_cl) { return p_c - t1_clifford_error(t1, tau_cl); }

inline double restless_error_rate(const NoiseModelParams& params, int n_cl, double t1) {
  return restless_error_rate(clifford_error(params, t1), n_cl, t1, params.p_s_c, params.timing);
}

/// dp_e/dT1 by the chain rule through p_e^(j), p_s^(j) and p_c.
inline double restless_error_rate_derivative(const NoiseModelParams& params, int n_cl, double t1) {
  const double p_c = clifford_error(params, t1);
  const SpamProbs ps = spam_probs(t1, params.p_s_c, params.timing);
  const SpamProbs dps = spam_probs_derivative(t1, params.timing);
  const double dpc = t1_clifford_error_derivative(t1, params.tau_cl);
  const double decay = std::pow(1.0 - 2.0 * p_c, n_cl);
  const double decay_m1 = n_cl > 0 ? std::pow(1.0 - 2.0 * p_c, n_cl - 1) : 0.0;

  const double pe0 = error_rate(ps.p_s_0, p_c, n_cl);
  const double pe1 = error_rate(ps.p_s_1, p_c, n_cl);
  const auto [dpe_dpe0, dpe_dpe1] = asymmetric_error_rate_gradient(pe0, pe1);

  auto branch = [&](double p_s, double dp_s) {
    const double dpej_dps = decay;
    const double dpej_dpc = n_cl * decay_m1 * (1.0 - 2.0 * p_s);
    return dpej_dps * dp_s + dpej_dpc * dpc;
  };
  return dpe_dpe0 * branch(ps.p_s_0, dps.p_s_0) + dpe_dpe1 * branch(ps.p_s_1, dps.p_s_1);
}

struct EpsilonMoments {
  double mean = 0.0;
  double variance = 0.0;
  double binomial_variance = 0.0;  // variance with var(p_e) = 0
  double var_p_e = 0.0;
};

/// Mean and variance of the restless error fraction over N shots, with T1
/// quasi-static within an acquisition and Gaussian across acquisitions.
inline EpsilonMoments epsilon_mean_and_var(const NoiseModelParams& params, int n_cl) {
  if (params.n_shots < 1) throw std::domain_error("epsilon_mean_and_var: n_shots must be >= 1");
  if (params.t1_sigma < 0.0) throw std::domain_error("epsilon_mean_and_var: t1_sigma must be >= 0");
  EpsilonMoments m;
  const double n = params.n_shots;
  m.mean = restless_error_rate(params, n_cl, params.t1_mean);
  m.binomial_variance = m.mean * (1.0 - m.mean) / n;
  if (params.t1_sigma > 0.0) {
    const double d = restless_error_rate_derivative(params, n_cl, params.t1_mean);
    m.var_p_e = d * d * params.t1_sigma * params.t1_sigma;
  }
  m.variance = m.binomial_variance + (n - 1.0) / n * m.var_p_e;
  return m;
}

/// Same, with the total per-Clifford error p_c given at the mean T1.
inline EpsilonMoments epsilon_mean_and_var(NoiseModelParams params, double p_c, int n_cl) {
  params.p_pulse = pulse_error_for(p_c, params.t1_mean, params.tau_cl);
  return epsilon_mean_and_var(params, n_cl);
}

struct SNRPoint {
  int n_cl = 0;
  double eps_a = 0.0;
  double eps_b = 0.0;
  double signal = 0.0;  // eps_a - eps_b, the drop in error fraction
  double noise = 0.0;   // mean of sigma at f_a and f_b
  double snr = 0.0;
};

struct SNRScan {
  double f_a = 0.0;
  double f_b = 0.0;
  std::vector<SNRPoint> points;
  int argmax_n_cl = 0;
  double max_snr = 0.0;
};

/// Signal-to-noise for halving the infidelity from f_a, across n_cl.
inline SNRScan snr_scan(double f_a, const std::vector<int>& n_cl_grid, const NoiseModelParams& params) {
  if (!(f_a > 0.5 && f_a <= 1.0)) throw std::domain_error("snr_scan: f_a must lie in (0.5, 1]");
  SNRScan scan;
  scan.f_a = f_a;
  scan.f_b = 0.5 + 0.5 * f_a;
  for (int n_cl : n_cl_grid) {
    const auto a = epsilon_mean_and_var(params, 1.0 - scan.f_a, n_cl);
    const auto b = epsilon_mean_and_var(params, 1.0 - scan.f_b, n_cl);
    SNRPoint pt;
    pt.n_cl = n_cl;
    pt.eps_a = a.mean;
    pt.eps_b = b.mean;
    pt.signal = a.mean - b.mean;
    pt.noise = 0.5 * (std::sqrt(a.variance) + std::sqrt(b.variance));
    pt.snr = pt.noise > 0.0 ? pt.signal / pt.noise : 0.0;
    if (scan.points.empty() || pt.snr > scan.max_snr) {
      scan.max_snr = pt.snr;
      scan.argmax_n_cl = n_cl;
    }
    scan.points.push_back(pt);
  }
  return scan;
}

/// Up to `count` distinct integers spread logarithmically over [lo, hi].
inline std::vector<int> log_spaced_grid(int lo, int hi, int count) {
  std::vector<int> grid;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const int v = static_cast<int>(std::lround(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

}  // namespace restless
