#pragma once

// Average Clifford fidelity from a five-gate set of Pauli transfer matrices.
//
// Cliffords are built from the measured gates along their decompositions.
// The gate set has no negative rotations. By default mX90 / mY90 reuse the
// error of the measured X90 / Y90: G(mX90) = [G(X90) U(X90)^T] U(mX90), which
// keeps an ideal gate set exact. NegativeRotation::Literal plugs in the
// X90 / Y90 matrix itself.
//
// Overlaps use the six Bloch-pole states as unit traceless Pauli vectors
// (0, n), so <<rho|rho>> = 1 and an ideal gate gives overlap exactly 1.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "restless/clifford.hpp"

namespace restless {

using Ptm = std::array<std::array<double, 4>, 4>;

inline Ptm ptm_identity() {
  Ptm m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Ptm ptm_multiply(const Ptm& a, const Ptm& b) {
  Ptm out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

inline Ptm ptm_transpose(const Ptm& a) {
  Ptm out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = a[j][i];
  return out;
}

inline Ptm ideal_ptm(const Rotation& r) {
  Ptm m{};
  m[0][0] = 1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i + 1][j + 1] = r[i][j];
  return m;
}

inline Ptm ideal_ptm(Gate g) { return ideal_ptm(gate_rotation(g)); }
inline Ptm ideal_ptm(const CliffordElement& c) { return ideal_ptm(c.rotation); }

/// Bloch part scaled by (1 - q): uniform depolarization after the gate.
inline Ptm depolarized(const Ptm& ideal, double q) {
  Ptm m = ideal;
  for (int i = 1; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] *= (1.0 - q);
  return m;
}

enum class NegativeRotation : std::uint8_t { ErrorTransfer, Literal };

inline constexpr std::array<Gate, 5> kGateSetLabels{Gate::I, Gate::X90, Gate::Y90, Gate::X180, Gate::Y180};

struct GateSet {
  std::array<Ptm, 5> ptms{};  // ordered as kGateSetLabels

  static GateSet ideal() {
    GateSet gs;
    for (std::size_t i = 0; i < kGateSetLabels.size(); ++i) gs.ptms[i] = ideal_ptm(kGateSetLabels[i]);
    return gs;
  }

  static GateSet uniformly_depolarized(double q) {
    GateSet gs = ideal();
    for (auto& m : gs.ptms) m = depolarized(m, q);
    return gs;
  }

  Ptm& operator[](Gate g) { return ptms[slot(g)]; }
  const Ptm& operator[](Gate g) const { return ptms[slot(g)]; }

  /// Matrix used for any gate in a decomposition, including mX90 / mY90.
  Ptm effective(Gate g, NegativeRotation rule = NegativeRotation::ErrorTransfer) const {
    if (g == Gate::mX90 || g == Gate::mY90) {
      const Gate pos = g == Gate::mX90 ? Gate::X90 : Gate::Y90;
      if (rule == NegativeRotation::Literal) return (*this)[pos];
      const Ptm error = ptm_multiply((*this)[pos], ptm_transpose(ideal_ptm(pos)));
      return ptm_multiply(error, ideal_ptm(g));
    }
    return (*this)[g];
  }

  static std::size_t slot(Gate g) {
    for (std::size_t i = 0; i < kGateSetLabels.size(); ++i)
      if (kGateSetLabels[i] == g) return i;
    throw std::invalid_argument("GateSet: no slot for gate " + std::string(gate_name(g)));
  }
};

inline std::vector<Ptm> clifford_ptms(const GateSet& gs, NegativeRotation rule = NegativeRotation::ErrorTransfer) {
  const auto& group = CliffordGroup::instance();
  std::vector<Ptm> out;
  out.reserve(CliffordGroup::kOrder);
  for (int n = 0; n < CliffordGroup::kOrder; ++n) {
    Ptm m = ptm_identity();
    for (Gate g : group.decomposition(n)) m = ptm_multiply(gs.effective(g, rule), m);
    out.push_back(m);
  }
  return out;
}

/// The six Bloch poles +x, -x, +y, -y, +z, -z as traceless Pauli vectors.
inline std::array<std::array<double, 4>, 6> bloch_poles() {
  return {{{0, 1, 0, 0}, {0, -1, 0, 0}, {0, 0, 1, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}, {0, 0, 0, -1}}};
}

struct CliffordFidelity {
  std::vector<std::optional<double>> p_n;  // empty where an overlap was not positive
  std::vector<std::string> warnings;
  double p_cl = 0.0;
  double f_cl = 0.0;
};

inline CliffordFidelity clifford_fidelity(const GateSet& gs, NegativeRotation rule = NegativeRotation::ErrorTransfer) {
  const auto& group = CliffordGroup::instance();
  const auto measured = clifford_ptms(gs, rule);
  const auto poles = bloch_poles();
  CliffordFidelity out;
  double log_sum = 0.0;
  int used = 0;
  for (int n = 0; n < CliffordGroup::kOrder; ++n) {
    const Ptm ideal = ideal_ptm(group[n]);
    double log_prod = 0.0;
    bool ok = true;
    for (const auto& rho : poles) {
      std::array<double, 4> target{}, actual{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          target[i] += ideal[i][j] * rho[j];
          actual[i] += measured[n][i][j] * rho[j];
        }
      double overlap = 0.0;
      for (int i = 0; i < 4; ++i) overlap += target[i] * actual[i];
      if (!(overlap > 0.0)) {
        ok = false;
        break;
      }
      log_prod += std::log(overlap);
    }
    if (!ok) {
      out.p_n.emplace_back(std::nullopt);
      out.warnings.push_back("Clifford " + std::to_string(n) + ": nonpositive pole overlap, excluded");
      continue;
    }
    const double p = std::exp(log_prod / 6.0);
    out.p_n.emplace_back(p);
    log_sum += std::log(p);
    ++used;
  }
  if (used == 0) throw std::runtime_error("clifford_fidelity: no Clifford had positive overlaps");
  out.p_cl = std::exp(log_sum / used);
  out.f_cl = 0.5 + 0.5 * out.p_cl;
  return out;
}

}  // namespace restless
