#pragma once

// Single-qubit Clifford group as exact signed permutation matrices (the SO(3)
// image), its decomposition into x/y rotations, and RB sequence generation.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "restless/rng.hpp"

namespace restless {

using Rotation = std::array<std::array<int, 3>, 3>;

constexpr Rotation kIdentityRotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

/// Product a*b: apply b first, then a.
constexpr Rotation compose(const Rotation& a, const Rotation& b) {
  Rotation out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

constexpr Rotation transpose(const Rotation& r) {
  Rotation out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = r[j][i];
  return out;
}

constexpr int determinant(const Rotation& r) {
  return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
         r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
         r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

enum class Gate : std::uint8_t { I, X90, mX90, Y90, mY90, X180, Y180 };

inline constexpr std::array<Gate, 7> kAllGates{Gate::I,    Gate::X90,  Gate::mX90, Gate::Y90,
                                               Gate::mY90, Gate::X180, Gate::Y180};

constexpr std::string_view gate_name(Gate g) {
  switch (g) {
    case Gate::I: return "I";
    case Gate::X90: return "X90";
    case Gate::mX90: return "mX90";
    case Gate::Y90: return "Y90";
    case Gate::mY90: return "mY90";
    case Gate::X180: return "X180";
    case Gate::Y180: return "Y180";
  }
  return "?";
}

inline Gate gate_from_name(std::string_view name) {
  for (Gate g : kAllGates)
    if (gate_name(g) == name) return g;
  throw std::invalid_argument("unknown gate label: " + std::string(name));
}

/// Bloch-sphere rotation of each gate (right-handed, positive angle).
constexpr Rotation gate_rotation(Gate g) {
  switch (g) {
    case Gate::I: return kIdentityRotation;
    case Gate::X90: return {{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};
    case Gate::mX90: return {{{1, 0, 0}, {0, 0, 1}, {0, -1, 0}}};
    case Gate::Y90: return {{{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}}};
    case Gate::mY90: return {{{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
    case Gate::X180: return {{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
    case Gate::Y180: return {{{-1, 0, 0}, {0, 1, 0}, {0, 0, -1}}};
  }
  return kIdentityRotation;
}

/// Rotation of a gate word executed left to right in time.
inline Rotation word_rotation(const std::vector<Gate>& word) {
  Rotation r = kIdentityRotation;
  for (Gate g : word) r = compose(gate_rotation(g), r);
  return r;
}

struct CliffordElement {
  int index = 0;
  Rotation rotation = kIdentityRotation;
  friend bool operator==(const CliffordElement&, const CliffordElement&) = default;
};

enum class NetOp : std::uint8_t { Identity, BitFlip };

constexpr std::string_view net_op_name(NetOp op) {
  return op == NetOp::Identity ? "identity" : "bitflip";
}

constexpr Rotation net_op_rotation(NetOp op) {
  return op == NetOp::Identity ? kIdentityRotation : gate_rotation(Gate::X180);
}

/// The 24-element group with multiplication table and decompositions.
///
/// Elements are enumerated by breadth-first search from the identity over
/// the generators {X90, mX90, Y90, mY90, X180, Y180} in that order, so each
/// element's decomposition is the lexicographically first shortest word.
/// The identity is the only element decomposed as [I].
class CliffordGroup {
 public:
  static constexpr int kOrder = 24;

  static const CliffordGroup& instance() {
    static const CliffordGroup group;
    return group;
  }

  const std::vector<CliffordElement>& elements() const { return elements_; }
  const CliffordElement& operator[](int i) const { return elements_.at(static_cast<std::size_t>(i)); }
  const std::vector<Gate>& decomposition(int i) const { return words_.at(static_cast<std::size_t>(i)); }

  int multiply(int a, int b) const { return table_[a][b]; }
  int inverse(int a) const { return inverse_[a]; }

  std::optional<int> find(const Rotation& r) const {
    for (const auto& e : elements_)
      if (e.rotation == r) return e.index;
    return std::nullopt;
  }

  int find_or_throw(const Rotation& r) const {
    if (auto i = find(r)) return *i;
    throw std::invalid_argument("rotation is not a Clifford");
  }

  std::size_t total_gate_count() const {
    std::size_t n = 0;
    for (const auto& w : words_) n += w.size();
    return n;
  }

 private:
  CliffordGroup() {
    constexpr std::array<Gate, 6> generators{Gate::X90,  Gate::mX90, Gate::Y90,
                                             Gate::mY90, Gate::X180, Gate::Y180};
    elements_.push_back({0, kIdentityRotation});
    words_.push_back({Gate::I});
    std::vector<std::vector<Gate>> bfs_words{{}};
    std::deque<int> queue{0};
    while (!queue.empty()) {
      const int current = queue.front();
      queue.pop_front();
      for (Gate g : generators) {
        const Rotation r = compose(gate_rotation(g), elements_[static_cast<std::size_t>(current)].rotation);
        if (find(r)) continue;
        auto word = bfs_words[static_cast<std::size_t>(current)];
        word.push_back(g);
        const int idx = static_cast<int>(elements_.size());
        elements_.push_back({idx, r});
        words_.push_back(word);
        bfs_words.push_back(std::move(word));
        queue.push_back(idx);
      }
    }
    if (elements_.size() != kOrder) throw std::logic_error("Clifford enumeration did not close at 24");
    for (int a = 0; a < kOrder; ++a)
      for (int b = 0; b < kOrder; ++b) {
        table_[a][b] = find_or_throw(compose(elements_[static_cast<std::size_t>(a)].rotation,
                                             elements_[static_cast<std::size_t>(b)].rotation));
        if (table_[a][b] == 0) inverse_[a] = b;
      }
  }

  std::vector<CliffordElement> elements_;
  std::vector<std::vector<Gate>> words_;
  std::array<std::array<int, kOrder>, kOrder> table_{};
  std::array<int, kOrder> inverse_{};
};

inline const std::vector<CliffordElement>& build_group() { return CliffordGroup::instance().elements(); }

inline const std::vector<Gate>& decompose(const CliffordElement& c) {
  return CliffordGroup::instance().decomposition(c.index);
}

/// Element r such that r * net_so_far equals the requested net operation.
inline CliffordElement recovery(const CliffordElement& net_so_far, NetOp net_op) {
  const auto& group = CliffordGroup::instance();
  const int target = group.find_or_throw(net_op_rotation(net_op));
  return group[group.multiply(target, group.inverse(net_so_far.index))];
}

struct CliffordSequence {
  std::uint64_t seed = 0;
  int n_cliffords = 0;
  NetOp net_op = NetOp::Identity;
  std::vector<CliffordElement> elements;  // n_cliffords random + recovery
  std::vector<Gate> gate_program;
};

/// N_Cl i.i.d. uniform Cliffords followed by the recovery element.
inline CliffordSequence generate_sequence(std::uint64_t seed, int n_cliffords, NetOp net_op) {
  if (n_cliffords < 1) throw std::invalid_argument("generate_sequence: n_cliffords must be >= 1");
  const auto& group = CliffordGroup::instance();
  Rng rng(seed);
  CliffordSequence seq{seed, n_cliffords, net_op, {}, {}};
  seq.elements.reserve(static_cast<std::size_t>(n_cliffords) + 1);
  int net = 0;
  for (int i = 0; i < n_cliffords; ++i) {
    const int c = static_cast<int>(rng.below(CliffordGroup::kOrder));
    seq.elements.push_back(group[c]);
    net = group.multiply(c, net);
  }
  seq.elements.push_back(recovery(group[net], net_op));
  for (const auto& e : seq.elements) {
    const auto& w = group.decomposition(e.index);
    seq.gate_program.insert(seq.gate_program.end(), w.begin(), w.end());
  }
  return seq;
}

/// Net rotation of a sequence's elements, applied in order.
inline Rotation sequence_rotation(const CliffordSequence& seq) {
  Rotation r = kIdentityRotation;
  for (const auto& e : seq.elements) r = compose(e.rotation, r);
  return r;
}

}  // namespace restless
