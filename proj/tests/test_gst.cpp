#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "restless/gst.hpp"

using namespace restless;

namespace {

constexpr double kPi = std::numbers::pi;
using M4 = std::array<std::array<double, 4>, 4>;

M4 mul(const M4& a, const M4& b) {
  M4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// PTM of a rotation by angle theta about a unit axis, from Rodrigues' formula.
M4 rotation_ptm(std::array<double, 3> n, double theta) {
  M4 m{};
  m[0][0] = 1;
  const double c = std::cos(theta), s = std::sin(theta);
  const double K[3][3] = {{0, -n[2], n[1]}, {n[2], 0, -n[0]}, {-n[1], n[0], 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double kk = 0;
      for (int l = 0; l < 3; ++l) kk += K[i][l] * K[l][j];
      m[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + s * K[i][j] + (1 - c) * kk;
    }
  return m;
}

// Brute force: the defining product over the six pole states, given the
// matrix each gate label contributes.
template <class GateMatrix>
double brute_force_fcl(GateMatrix gate_matrix, const std::array<int, 6>& order = {0, 1, 2, 3, 4, 5}) {
  const auto& grp = CliffordGroup::instance();
  std::vector<std::array<double, 4>> poles;
  for (int axis = 0; axis < 3; ++axis)
    for (double sign : {1.0, -1.0}) {
      std::array<double, 4> v{};
      v[axis + 1] = sign;
      poles.push_back(v);
    }
  double log_sum = 0;
  for (int n = 0; n < 24; ++n) {
    M4 measured{};
    for (int i = 0; i < 4; ++i) measured[i][i] = 1;
    for (Gate g : grp.decomposition(n)) measured = mul(gate_matrix(g), measured);
    M4 ideal{};
    ideal[0][0] = 1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ideal[i + 1][j + 1] = grp[n].rotation[i][j];
    double prod = 1;
    for (int idx : order) {
      const auto& rho = poles[static_cast<std::size_t>(idx)];
      double overlap = 0;
      for (int i = 0; i < 4; ++i) {
        double t = 0, a = 0;
        for (int j = 0; j < 4; ++j) {
          t += ideal[i][j] * rho[j];
          a += measured[i][j] * rho[j];
        }
        overlap += t * a;
      }
      prod *= overlap;
    }
    log_sum += std::log(std::pow(prod, 1.0 / 6.0));
  }
  return 0.5 + 0.5 * std::exp(log_sum / 24.0);
}

M4 axis_rotation(Gate g) {
  switch (g) {
    case Gate::X90: return rotation_ptm({1, 0, 0}, kPi / 2);
    case Gate::mX90: return rotation_ptm({1, 0, 0}, -kPi / 2);
    case Gate::Y90: return rotation_ptm({0, 1, 0}, kPi / 2);
    case Gate::mY90: return rotation_ptm({0, 1, 0}, -kPi / 2);
    case Gate::X180: return rotation_ptm({1, 0, 0}, kPi);
    case Gate::Y180: return rotation_ptm({0, 1, 0}, kPi);
    default: return rotation_ptm({0, 0, 1}, 0.0);
  }
}

M4 depolarize(M4 m, double q) {
  for (int i = 1; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] *= 1 - q;
  return m;
}

}  // namespace

TEST(Gst, IdealPtms) {
  const Ptm id = ideal_ptm(Gate::I);
  EXPECT_EQ(id, ptm_identity());
  Ptm x180{};
  x180[0][0] = 1;
  x180[1][1] = 1;
  x180[2][2] = -1;
  x180[3][3] = -1;
  EXPECT_EQ(ideal_ptm(Gate::X180), x180);
  for (Gate g : kAllGates) {
    const auto ref = axis_rotation(g);
    const auto lib = ideal_ptm(g);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(lib[i][j], ref[i][j], 1e-15) << gate_name(g);
  }
}

TEST(Gst, CliffordPtmsAreDecompositionProducts) {
  const auto& grp = CliffordGroup::instance();
  const auto ptms = clifford_ptms(GateSet::ideal());
  for (int n = 0; n < 24; ++n) {
    EXPECT_EQ(ptms[n], ideal_ptm(grp[n])) << n;
    for (int i = 0; i < 4; ++i) EXPECT_EQ(ptms[n][0][i], i == 0 ? 1.0 : 0.0);
  }
}

TEST(Gst, IdealSetGivesExactlyOne) {
  const auto f = clifford_fidelity(GateSet::ideal());
  EXPECT_EQ(f.f_cl, 1.0);
  EXPECT_EQ(f.p_cl, 1.0);
  EXPECT_TRUE(f.warnings.empty());
  for (const auto& p : f.p_n) EXPECT_EQ(p.value(), 1.0);
}

TEST(Gst, UniformDepolarizationScalesByWordLength) {
  const double q = 0.002;
  const auto& grp = CliffordGroup::instance();
  const auto ptms = clifford_ptms(GateSet::uniformly_depolarized(q));
  for (int n = 0; n < 24; ++n) {
    const double scale = std::pow(1 - q, grp.decomposition(n).size());
    const auto ideal = ideal_ptm(grp[n]);
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(ptms[n][i][j], scale * ideal[i][j], 1e-15);
  }
  const auto f = clifford_fidelity(GateSet::uniformly_depolarized(q));
  EXPECT_NEAR(f.f_cl, 0.5 + 0.5 * std::pow(1 - q, 45.0 / 24.0), 1e-15);
}

TEST(Gst, UniformDepolarizationMatchesBruteForce) {
  for (double q : {0.0005, 0.002, 0.01, 0.05}) {
    const double lib = clifford_fidelity(GateSet::uniformly_depolarized(q)).f_cl;
    const double ref = brute_force_fcl([&](Gate g) { return depolarize(axis_rotation(g), q); });
    EXPECT_NEAR(lib, ref, 1e-12) << q;
  }
}

TEST(Gst, NonUniformNoiseMatchesBruteForceWithErrorTransfer) {
  // Each positive gate over-rotates by its own small angle and depolarizes;
  // negative gates inherit the positive gate's error.
  const std::map<Gate, std::pair<double, double>> err{{Gate::I, {0.0, 0.001}},
                                                      {Gate::X90, {0.01, 0.002}},
                                                      {Gate::Y90, {-0.02, 0.0015}},
                                                      {Gate::X180, {0.015, 0.003}},
                                                      {Gate::Y180, {0.005, 0.0025}}};
  auto noisy = [&](Gate g) {
    const auto [dtheta, q] = err.at(g);
    const std::array<double, 3> axis = (g == Gate::Y90 || g == Gate::Y180) ? std::array<double, 3>{0, 1, 0}
                                                                            : std::array<double, 3>{1, 0, 0};
    const double angle = g == Gate::I ? 0.0 : (g == Gate::X180 || g == Gate::Y180 ? kPi : kPi / 2);
    return depolarize(rotation_ptm(axis, angle + dtheta), q);
  };
  GateSet gs;
  for (std::size_t i = 0; i < kGateSetLabels.size(); ++i) gs.ptms[i] = noisy(kGateSetLabels[i]);
  auto transferred = [&](Gate g) {
    if (g == Gate::mX90 || g == Gate::mY90) {
      const Gate pos = g == Gate::mX90 ? Gate::X90 : Gate::Y90;
      // error channel E = G(pos) U(pos)^-1, then E U(neg)
      M4 inv = axis_rotation(pos);
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) std::swap(inv[i][j], inv[j][i]);
      return mul(mul(noisy(pos), inv), axis_rotation(g));
    }
    return noisy(g);
  };
  const auto f = clifford_fidelity(gs);
  EXPECT_NEAR(f.f_cl, brute_force_fcl(transferred), 1e-12);
  EXPECT_LT(f.f_cl, 1.0);
  EXPECT_GT(f.f_cl, 0.99);

  // Relabeling the poles leaves the result unchanged.
  std::array<int, 6> order{0, 1, 2, 3, 4, 5};
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    for (std::size_t i = 5; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    EXPECT_NEAR(brute_force_fcl(transferred, order), f.f_cl, 1e-14);
  }
}

TEST(Gst, LiteralRuleSubstitutesPositiveMatrix) {
  GateSet gs = GateSet::uniformly_depolarized(0.001);
  EXPECT_EQ(gs.effective(Gate::mX90, NegativeRotation::Literal), gs[Gate::X90]);
  EXPECT_EQ(gs.effective(Gate::mY90, NegativeRotation::Literal), gs[Gate::Y90]);
  EXPECT_EQ(gs.effective(Gate::X180, NegativeRotation::Literal), gs[Gate::X180]);

  const auto& grp = CliffordGroup::instance();
  const auto literal = clifford_ptms(gs, NegativeRotation::Literal);
  for (int n = 0; n < 24; ++n) {
    Ptm m = ptm_identity();
    for (Gate g : grp.decomposition(n)) {
      const Gate sub = g == Gate::mX90 ? Gate::X90 : (g == Gate::mY90 ? Gate::Y90 : g);
      m = ptm_multiply(gs[sub], m);
    }
    EXPECT_EQ(literal[n], m);
  }
  // Literal substitution breaks ideal Cliffords; affected elements are
  // excluded with warnings and the rest still contribute.
  const auto f = clifford_fidelity(GateSet::ideal(), NegativeRotation::Literal);
  EXPECT_FALSE(f.warnings.empty());
  EXPECT_EQ(f.p_n.size(), 24u);
}

TEST(Gst, NegativeRotationsErrorTransferIsExactForIdeal) {
  const auto gs = GateSet::ideal();
  EXPECT_EQ(gs.effective(Gate::mX90), ideal_ptm(Gate::mX90));
  EXPECT_EQ(gs.effective(Gate::mY90), ideal_ptm(Gate::mY90));
  EXPECT_THROW(GateSet::slot(Gate::mX90), std::invalid_argument);
}

TEST(Gst, NonPositiveOverlapIsExcluded) {
  GateSet gs = GateSet::ideal();
  gs[Gate::X180] = ideal_ptm(Gate::I);  // X180 replaced by identity
  const auto f = clifford_fidelity(gs);
  const auto& grp = CliffordGroup::instance();
  int excluded = 0;
  for (int n = 0; n < 24; ++n) {
    if (!f.p_n[n]) ++excluded;
    const auto& w = grp.decomposition(n);
    if (std::find(w.begin(), w.end(), Gate::X180) == w.end()) EXPECT_TRUE(f.p_n[n].has_value());
  }
  EXPECT_GT(excluded, 0);
  EXPECT_EQ(static_cast<int>(f.warnings.size()), excluded);
  EXPECT_EQ(f.p_cl, 1.0);
}
