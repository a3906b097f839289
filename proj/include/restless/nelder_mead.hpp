#pragma once

// Nelder-Mead downhill simplex minimization.
//
// Moves follow Lagarias, Reeds, Wright & Wright (1998): reflection,
// expansion, outside/inside contraction and shrink toward the best vertex,
// with vertices kept in stable cost order.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace restless {

struct NelderMeadCoefficients {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct OptimizerConfig {
  std::vector<double> initial_point;
  std::vector<double> initial_steps;
  int max_evaluations = 500;
  /// Converged when (worst - best) < cost_spread_rel * |mean cost| ...
  double cost_spread_rel = 1e-2;
  /// ... or below noise_spread_z * noise_sigma(mean cost), when a noise
  /// model is given. A spread below the cost's own noise is unreachable once
  /// the best vertex holds a lucky low draw.
  std::function<double(double)> noise_sigma;
  double noise_spread_z = 0.0;
  /// ... and every coordinate's extent over the simplex is below this.
  /// Empty disables the extent test.
  std::vector<double> extent_tolerance;
  NelderMeadCoefficients coefficients{};

  void validate() const {
    const auto n = initial_point.size();
    if (n == 0) throw std::invalid_argument("OptimizerConfig: empty initial point");
    if (initial_steps.size() != n) throw std::invalid_argument("OptimizerConfig: steps and point differ in size");
    for (double s : initial_steps)
      if (!(s != 0.0) || !std::isfinite(s)) throw std::invalid_argument("OptimizerConfig: steps must be nonzero");
    if (!extent_tolerance.empty() && extent_tolerance.size() != n)
      throw std::invalid_argument("OptimizerConfig: extent tolerance size mismatch");
    for (double t : extent_tolerance)
      if (!(t > 0.0)) throw std::invalid_argument("OptimizerConfig: tolerances must be > 0");
    if (!(cost_spread_rel > 0.0)) throw std::invalid_argument("OptimizerConfig: cost_spread_rel must be > 0");
    if (!(noise_spread_z >= 0.0)) throw std::invalid_argument("OptimizerConfig: noise_spread_z must be >= 0");
    if (max_evaluations < 1) throw std::invalid_argument("OptimizerConfig: max_evaluations must be >= 1");
  }
};

struct Evaluation {
  int index = 0;
  std::vector<double> params;
  double cost = 0.0;
};

struct MinimizeResult {
  std::vector<Evaluation> trajectory;            // every cost evaluation in order
  std::vector<std::vector<double>> best_vertex;  // best vertex after each iteration
  std::vector<double> best_cost;                 // its cost after each iteration
  std::vector<double> final_params;
  double final_cost = 0.0;
  int n_evaluations = 0;
  int n_iterations = 0;
  bool converged = false;
  bool budget_exhausted = false;
  double final_spread = 0.0;            // worst - best cost of the last simplex
  std::vector<double> final_extent;     // per-coordinate extent of the last simplex
};

using CostFunction = std::function<double(const std::vector<double>&)>;

inline MinimizeResult minimize(const CostFunction& cost, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.initial_point.size();
  const auto& co = cfg.coefficients;
  MinimizeResult res;

  auto evaluate = [&](const std::vector<double>& x) {
    const double f = cost(x);
    res.trajectory.push_back({res.n_evaluations, x, f});
    ++res.n_evaluations;
    return f;
  };

  std::vector<std::vector<double>> x(n + 1, cfg.initial_point);
  for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += cfg.initial_steps[i];
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    fx[i] = evaluate(x[i]);
    if (!std::isfinite(fx[i])) throw std::runtime_error("minimize: non-finite cost on the initial simplex");
  }

  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> x2;
    std::vector<double> f2;
    for (auto i : idx) {
      x2.push_back(x[i]);
      f2.push_back(fx[i]);
    }
    x.swap(x2);
    fx.swap(f2);
  };

  // Replace the worst vertex and move it to its sorted position, after any
  // existing vertices with equal cost.
  auto insert = [&](std::vector<double> xn, double fn) {
    x.pop_back();
    fx.pop_back();
    const auto pos = static_cast<std::size_t>(std::upper_bound(fx.begin(), fx.end(), fn) - fx.begin());
    x.insert(x.begin() + static_cast<std::ptrdiff_t>(pos), std::move(xn));
    fx.insert(fx.begin() + static_cast<std::ptrdiff_t>(pos), fn);
  };

  auto converged = [&] {
    double mean = 0.0;
    for (double f : fx) mean += f;
    mean /= static_cast<double>(n + 1);
    const double spread = fx.back() - fx.front();
    double limit = cfg.cost_spread_rel * std::abs(mean);
    if (cfg.noise_sigma && cfg.noise_spread_z > 0.0) limit = std::max(limit, cfg.noise_spread_z * cfg.noise_sigma(mean));
    if (!(spread < limit) && spread != 0.0) return false;
    for (std::size_t d = 0; d < cfg.extent_tolerance.size(); ++d) {
      double lo = x[0][d], hi = x[0][d];
      for (const auto& v : x) {
        lo = std::min(lo, v[d]);
        hi = std::max(hi, v[d]);
      }
      if (!(hi - lo < cfg.extent_tolerance[d])) return false;
    }
    return true;
  };

  auto affine = [&](const std::vector<double>& base, const std::vector<double>& toward, double t) {
    std::vector<double> out(n);
    for (std::size_t d = 0; d < n; ++d) out[d] = base[d] + t * (toward[d] - base[d]);
    return out;
  };

  order();
  while (true) {
    if (converged()) {
      res.converged = true;
      break;
    }
    if (res.n_evaluations >= cfg.max_evaluations) {
      res.budget_exhausted = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += x[i][d] / static_cast<double>(n);

    const auto xr = affine(centroid, x[n], -co.reflection);
    const double fr = evaluate(xr);
    bool do_shrink = false;
    if (fr < fx[0]) {
      const auto xe = affine(centroid, xr, co.expansion);
      const double fe = evaluate(xe);
      if (fe < fr)
        insert(xe, fe);
      else
        insert(xr, fr);
    } else if (fr < fx[n - 1]) {
      insert(xr, fr);
    } else if (fr < fx[n]) {
      const auto xc = affine(centroid, xr, co.contraction);
      const double fc = evaluate(xc);
      if (fc <= fr)
        insert(xc, fc);
      else
        do_shrink = true;
    } else {
      const auto xcc = affine(centroid, x[n], co.contraction);
      const double fcc = evaluate(xcc);
      if (fcc < fx[n])
        insert(xcc, fcc);
      else
        do_shrink = true;
    }
    if (do_shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        x[i] = affine(x[0], x[i], co.shrink);
        fx[i] = evaluate(x[i]);
      }
      order();
    }
    ++res.n_iterations;
    res.best_vertex.push_back(x[0]);
    res.best_cost.push_back(fx[0]);
  }

  res.final_params = x[0];
  res.final_cost = fx[0];
  res.final_spread = fx.back() - fx.front();
  for (std::size_t d = 0; d < n; ++d) {
    double lo = x[0][d], hi = x[0][d];
    for (const auto& v : x) {
      lo = std::min(lo, v[d]);
      hi = std::max(hi, v[d]);
    }
    res.final_extent.push_back(hi - lo);
  }
  return res;
}

}  // namespace restless
