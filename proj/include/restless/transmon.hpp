#pragma once

// Stochastic three-level transmon running RB sequences with QND readout.
//
// The qubit is a classical Markov chain over {0, 1, 2}. Each Clifford either
// depolarizes the computational state (probability 2 p_flip) or leaks it to
// |2> (probability p_leak); T1 decay acts during the readout window, split at
// the effective measurement point tau_b. Restless streams carry the level
// from shot to shot; conventional streams reset to |0> before every shot.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "restless/analysis.hpp"
#include "restless/clifford.hpp"
#include "restless/rng.hpp"
#include "restless/t1_psd.hpp"

namespace restless {

enum class Mode : std::uint8_t { Conventional, Restless };

constexpr std::string_view mode_name(Mode m) { return m == Mode::Restless ? "restless" : "conventional"; }

constexpr NetOp net_op_for(Mode m) { return m == Mode::Restless ? NetOp::BitFlip : NetOp::Identity; }

struct PulseParams {
  double a_g = 1.0;          // Gaussian amplitude
  double a_d = 0.25;         // derivative amplitude
  double f_detuning = 0.0;   // Hz, drive offset from the qubit transition

  friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

struct PulseCurvatures {
  double c_g = 1.5;        // per unit A_G^2
  double c_d = 0.12;       // per unit A_D^2
  double c_f = 4.0e-14;    // per Hz^2
};

struct PhysicsConfig {
  double t1_mean = 21.4e-6;
  PowerLaw t1_psd{8.4e-13, -0.81};
  double tau_p = 20e-9;
  double tau_cl = 37.5e-9;
  double tau_m = 1e-6;
  double tau_ro = 4.25e-6;
  double p_s_c = 0.003;  // per-readout discrimination error
  PulseParams opt{};
  PulseCurvatures curvatures{};
  double leak_curvature = 8e-3;
  double p_pulse_floor = 2.5e-4;
  double p_leak_floor = 1e-6;

  double tau_b() const { return 4.0 * tau_m / 7.0; }
  double tau_a() const { return tau_ro - tau_b(); }
  ReadoutTiming timing() const { return {tau_b(), tau_a()}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("physics.") + name + " must be > 0");
    };
    positive(t1_mean, "t1_mean");
    positive(tau_p, "tau_p");
    positive(tau_cl, "tau_cl");
    positive(tau_m, "tau_m");
    positive(tau_ro, "tau_ro");
    if (!(tau_a() > 0.0)) throw std::invalid_argument("physics: tau_ro must exceed 4 tau_m / 7");
    for (auto [v, name] : {std::pair{p_s_c, "p_s_c"}, std::pair{p_pulse_floor, "p_pulse_floor"},
                           std::pair{p_leak_floor, "p_leak_floor"}})
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string("physics.") + name + " must lie in [0, 1]");
    if (!(opt.a_g > 0.0)) throw std::invalid_argument("physics.opt.a_g must be > 0");
    if (!(t1_psd.alpha >= 0.0)) throw std::invalid_argument("physics.t1_psd.alpha must be >= 0");
  }
};

struct ErrorRates {
  double p_flip = 0.0;
  double p_leak = 0.0;
};

/// Per-Clifford error and leakage for pulse parameters p at the current T1.
/// Quadratic in the offsets from the optimum plus the T1-limited error.
inline ErrorRates error_map(const PulseParams& p, const PhysicsConfig& cfg, double t1_now) {
  if (!std::isfinite(p.a_g) || !std::isfinite(p.a_d) || !std::isfinite(p.f_detuning))
    throw std::invalid_argument("error_map: non-finite pulse parameters");
  if (!(t1_now > 0.0)) throw std::invalid_argument("error_map: t1 must be > 0");
  const double dg = p.a_g - cfg.opt.a_g;
  const double dd = p.a_d - cfg.opt.a_d;
  const double df = p.f_detuning - cfg.opt.f_detuning;
  const auto& c = cfg.curvatures;
  const double flip = cfg.p_pulse_floor + c.c_g * dg * dg + c.c_d * dd * dd + c.c_f * df * df +
                      t1_clifford_error(t1_now, cfg.tau_cl);
  const double leak = cfg.p_leak_floor + cfg.leak_curvature * dd * dd;
  return {std::clamp(flip, 0.0, 0.5), std::clamp(leak, 0.0, 1.0)};
}

struct ShotStream {
  std::vector<std::uint8_t> bits;
  Mode mode = Mode::Restless;
  int n_cliffords = 0;
  std::uint64_t seed = 0;

  std::size_t n_shots() const { return bits.size(); }
};

/// Wall-clock acquisition time of a stream in the simulated experiment.
inline double simulated_wallclock(std::int64_t n_shots, int n_cliffords, Mode mode, const PhysicsConfig& cfg,
                                  double init_wait) {
  if (init_wait < 0.0) throw std::invalid_argument("simulated_wallclock: init_wait must be >= 0");
  const double per_shot = cfg.tau_ro + cfg.tau_cl * n_cliffords + (mode == Mode::Conventional ? init_wait : 0.0);
  return static_cast<double>(n_shots) * per_shot;
}

/// Default passive-initialization wait for conventional shots.
inline constexpr double kDefaultInitWait = 184.5e-6;

/// A qubit with its own random stream, simulated clock and T1 trace.
class Transmon {
 public:
  Transmon(const PhysicsConfig& cfg, T1Trace t1, std::uint64_t seed, double init_wait = kDefaultInitWait)
      : cfg_(cfg), t1_(std::move(t1)), rng_(seed), init_wait_(init_wait) {
    cfg_.validate();
  }

  int level() const { return level_; }
  void set_level(int level) {
    if (level < 0 || level > 2) throw std::invalid_argument("Transmon: level must be 0, 1 or 2");
    level_ = level;
  }
  double clock() const { return clock_; }
  void advance(double seconds) { clock_ += seconds; }
  const PhysicsConfig& config() const { return cfg_; }
  double t1_now() const { return t1_.at(clock_); }

  /// n_shots measurement outcomes cycling through seq_set round-robin.
  ShotStream run(std::span<const CliffordSequence> seq_set, const PulseParams& p, std::int64_t n_shots, Mode mode) {
    if (seq_set.empty()) throw std::invalid_argument("run_stream: empty sequence set");
    if (n_shots < 1) throw std::invalid_argument("run_stream: n_shots must be >= 1");
    const NetOp expected = net_op_for(mode);
    for (const auto& s : seq_set)
      if (s.net_op != expected)
        throw std::invalid_argument("run_stream: sequence net operation does not match mode");

    ShotStream out;
    out.mode = mode;
    out.n_cliffords = seq_set.front().n_cliffords;
    out.bits.reserve(static_cast<std::size_t>(n_shots));
    double cached_t1 = -1.0;
    ErrorRates rates{};
    for (std::int64_t shot = 0; shot < n_shots; ++shot) {
      const auto& seq = seq_set[static_cast<std::size_t>(shot) % seq_set.size()];
      const double t1 = t1_.at(clock_);
      if (t1 != cached_t1) {
        rates = error_map(p, cfg_, t1);
        cached_t1 = t1;
      }
      out.bits.push_back(shot_once(seq, rates, t1, mode));
      clock_ += cfg_.tau_ro + cfg_.tau_cl * seq.n_cliffords + (mode == Mode::Conventional ? init_wait_ : 0.0);
    }
    return out;
  }

 private:
  std::uint8_t shot_once(const CliffordSequence& seq, const ErrorRates& rates, double t1, Mode mode) {
    if (mode == Mode::Conventional) level_ = 0;
    apply_sequence(seq, rates);
    decay(cfg_.tau_b(), t1);
    std::uint8_t outcome = level_ >= 1 ? 1 : 0;
    if (rng_.bernoulli(cfg_.p_s_c)) outcome ^= 1;
    decay(cfg_.tau_a(), t1);
    return outcome;
  }

  // Leakage and depolarization are independent per-Clifford events. Leakage
  // to |2> is absorbing within a sequence and depolarization leaves |2>
  // untouched, so the end state depends only on whether any leak and whether
  // any depolarization occurred; both are drawn once per shot.
  void apply_sequence(const CliffordSequence& seq, const ErrorRates& rates) {
    const int n = seq.n_cliffords;
    if (level_ == 2) return;
    const int ideal_end = seq.net_op == NetOp::BitFlip ? 1 - level_ : level_;
    const double p_any_leak = -std::expm1(n * std::log1p(-rates.p_leak));
    if (rates.p_leak > 0.0 && rng_.bernoulli(p_any_leak)) {
      level_ = 2;
      return;
    }
    const double p_any_depol = 1.0 - std::pow(1.0 - 2.0 * rates.p_flip, n);
    if (rates.p_flip > 0.0 && rng_.bernoulli(p_any_depol)) {
      level_ = static_cast<int>(rng_.below(2));
      return;
    }
    level_ = ideal_end;
  }

  // Relaxation over duration t with a shared rate for 2->1 and 1->0.
  void decay(double t, double t1) {
    if (level_ == 0) return;
    double remaining = t;
    while (level_ > 0) {
      const double wait = rng_.exponential(t1);
      if (wait >= remaining) return;
      remaining -= wait;
      --level_;
    }
  }

  PhysicsConfig cfg_;
  T1Trace t1_;
  Rng rng_;
  double init_wait_;
  int level_ = 0;
  double clock_ = 0.0;
};

/// One stream from a fresh qubit in |0> with the given T1 trace.
inline ShotStream run_stream(std::span<const CliffordSequence> seq_set, const PulseParams& p, const PhysicsConfig& cfg,
                             std::int64_t n_shots, Mode mode, std::uint64_t seed, const T1Trace& t1) {
  Transmon q(cfg, t1, seed);
  auto stream = q.run(seq_set, p, n_shots, mode);
  stream.seed = seed;
  return stream;
}

/// Same, with T1 held at cfg.t1_mean.
inline ShotStream run_stream(std::span<const CliffordSequence> seq_set, const PulseParams& p, const PhysicsConfig& cfg,
                             std::int64_t n_shots, Mode mode, std::uint64_t seed) {
  return run_stream(seq_set, p, cfg, n_shots, mode, seed, T1Trace::constant(cfg.t1_mean));
}

/// Sequence set of n_seeds seeded sequences at one length.
inline std::vector<CliffordSequence> make_sequence_set(std::uint64_t master_seed, int n_seeds, int n_cliffords,
                                                       NetOp net_op) {
  std::vector<CliffordSequence> set;
  set.reserve(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i)
    set.push_back(generate_sequence(derive_seed(master_seed, static_cast<std::uint64_t>(i)), n_cliffords, net_op));
  return set;
}

}  // namespace restless
