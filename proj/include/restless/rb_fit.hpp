#pragma once

// Weighted least-squares fit of 1 - eps = A p^N + B.
//
// A and B enter linearly, so the fit profiles them out and searches p on
// [0, 1] (log-spaced grid in 1 - p, then golden-section refinement), then
// polishes all three parameters with damped Gauss-Newton.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace restless {

struct RBPoint {
  int n_cl = 0;
  double epsilon = 0.0;
  double weight = 1.0;  // 1 / sigma^2, or 1 for unweighted
};

struct RBFit {
  double amp = 0.0;     // A
  double offset = 0.0;  // B
  double p_cl = 1.0;
  double f_cl = 1.0;
  std::array<std::array<double, 3>, 3> covariance{};  // (A, B, p)
  double f_cl_stderr = 0.0;
  double chi2 = 0.0;
  bool p_at_boundary = false;
};

namespace detail {

struct LinearPart {
  double amp = 0.0;
  double offset = 0.0;
  double ssr = 0.0;
};

inline LinearPart solve_linear(const std::vector<RBPoint>& pts, double p) {
  double sw = 0, su = 0, suu = 0, sy = 0, suy = 0;
  for (const auto& pt : pts) {
    const double u = std::pow(p, pt.n_cl);
    const double y = 1.0 - pt.epsilon;
    sw += pt.weight;
    su += pt.weight * u;
    suu += pt.weight * u * u;
    sy += pt.weight * y;
    suy += pt.weight * u * y;
  }
  LinearPart lp;
  const double det = sw * suu - su * su;
  if (std::abs(det) <= 1e-14 * sw * suu) {
    lp.amp = 0.0;
    lp.offset = sy / sw;
  } else {
    lp.amp = (sw * suy - su * sy) / det;
    lp.offset = (suu * sy - su * suy) / det;
  }
  for (const auto& pt : pts) {
    const double r = (1.0 - pt.epsilon) - (lp.amp * std::pow(p, pt.n_cl) + lp.offset);
    lp.ssr += pt.weight * r * r;
  }
  return lp;
}

inline bool invert3(const std::array<std::array<double, 3>, 3>& m, std::array<std::array<double, 3>, 3>& out) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
  out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return true;
}

}  // namespace detail

inline RBFit rb_fit(const std::vector<RBPoint>& points) {
  std::set<int> distinct;
  for (const auto& pt : points) {
    if (pt.n_cl < 0 || !(pt.weight > 0.0) || !std::isfinite(pt.epsilon))
      throw std::invalid_argument("rb_fit: invalid data point");
    distinct.insert(pt.n_cl);
  }
  if (distinct.size() < 3) throw std::invalid_argument("rb_fit: need at least 3 distinct N_Cl values");

  // Profile over q = 1 - p. Ties resolve toward p = 1 (flat data).
  auto profile = [&](double q) { return detail::solve_linear(points, 1.0 - q).ssr; };
  double total = 0;
  for (const auto& pt : points) total += pt.weight * (1.0 - pt.epsilon) * (1.0 - pt.epsilon);
  const double tie = 1e-13 * total + 1e-300;

  std::vector<double> qs{0.0};
  constexpr int kGrid = 480;
  for (int i = 0; i <= kGrid; ++i) qs.push_back(std::pow(10.0, -12.0 + 12.0 * i / kGrid));
  std::size_t best = 0;
  double best_ssr = profile(qs[0]);
  for (std::size_t i = 1; i < qs.size(); ++i) {
    const double s = profile(qs[i]);
    if (s < best_ssr - tie) {
      best_ssr = s;
      best = i;
    }
  }

  double q = qs[best];
  if (best > 0) {
    double lo = qs[best - 1], hi = best + 1 < qs.size() ? qs[best + 1] : qs[best];
    constexpr double g = 0.6180339887498949;
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = profile(a), fb = profile(b);
    for (int it = 0; it < 200 && (hi - lo) > 1e-16; ++it) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - g * (hi - lo);
        fa = profile(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + g * (hi - lo);
        fb = profile(b);
      }
    }
    q = 0.5 * (lo + hi);
    if (profile(q) > best_ssr) q = qs[best];
  }

  auto lin = detail::solve_linear(points, 1.0 - q);
  RBFit fit;
  fit.amp = lin.amp;
  fit.offset = lin.offset;
  fit.p_cl = 1.0 - q;

  // Gauss-Newton polish on (A, B, p) with step halving.
  auto ssr_at = [&](double amp, double off, double p) {
    double s = 0;
    for (const auto& pt : points) {
      const double r = (1.0 - pt.epsilon) - (amp * std::pow(p, pt.n_cl) + off);
      s += pt.weight * r * r;
    }
    return s;
  };
  auto normal_matrix = [&](double amp, double p, std::array<double, 3>* grad) {
    std::array<std::array<double, 3>, 3> jtj{};
    if (grad) *grad = {0, 0, 0};
    for (const auto& pt : points) {
      const double u = std::pow(p, pt.n_cl);
      const double du = pt.n_cl == 0 ? 0.0 : pt.n_cl * std::pow(p, pt.n_cl - 1);
      const std::array<double, 3> j{u, 1.0, amp * du};
      const double r = (1.0 - pt.epsilon) - (amp * u + fit.offset);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) jtj[a][b] += pt.weight * j[a] * j[b];
        if (grad) (*grad)[a] += pt.weight * j[a] * r;
      }
    }
    return jtj;
  };

  if (fit.p_cl > 0.0 && fit.p_cl < 1.0) {
    double current = ssr_at(fit.amp, fit.offset, fit.p_cl);
    for (int it = 0; it < 50; ++it) {
      std::array<double, 3> grad;
      auto jtj = normal_matrix(fit.amp, fit.p_cl, &grad);
      std::array<std::array<double, 3>, 3> inv;
      if (!detail::invert3(jtj, inv)) break;
      std::array<double, 3> step{};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) step[a] += inv[a][b] * grad[b];
      double t = 1.0;
      bool improved = false;
      for (int h = 0; h < 30; ++h, t *= 0.5) {
        const double na = fit.amp + t * step[0], nb = fit.offset + t * step[1], np = fit.p_cl + t * step[2];
        if (!(np > 0.0 && np <= 1.0)) continue;
        const double s = ssr_at(na, nb, np);
        if (s <= current) {
          improved = s < current;
          fit.amp = na;
          fit.offset = nb;
          fit.p_cl = np;
          current = s;
          break;
        }
      }
      if (!improved) break;
    }
  }

  fit.f_cl = 0.5 + 0.5 * fit.p_cl;
  fit.chi2 = ssr_at(fit.amp, fit.offset, fit.p_cl);
  fit.p_at_boundary = fit.p_cl <= 0.0 || fit.p_cl >= 1.0;

  // Covariance scaled by the reduced chi-square.
  const auto dof = static_cast<double>(points.size()) - 3.0;
  std::array<std::array<double, 3>, 3> inv{};
  if (!fit.p_at_boundary && detail::invert3(normal_matrix(fit.amp, fit.p_cl, nullptr), inv)) {
    const double scale = dof > 0 ? fit.chi2 / dof : 1.0;
    for (auto& row : inv)
      for (double& v : row) v *= scale;
    fit.covariance = inv;
    fit.f_cl_stderr = 0.5 * std::sqrt(std::max(0.0, inv[2][2]));
  }
  return fit;
}

}  // namespace restless
