#pragma once

// Simulated experiments built on the qubit model: the two-step tuneup,
// conventional RB with a closing fit, cost landscapes, Monte Carlo SNR and
// the per-iteration timing breakdown.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "restless/analysis.hpp"
#include "restless/cost.hpp"
#include "restless/nelder_mead.hpp"
#include "restless/rb_fit.hpp"
#include "restless/transmon.hpp"

namespace restless {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be
/// written by index; the first exception is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Timing

struct OverheadModel {
  double set_params = 0.001;
  double process = 0.001;
  double misc = 0.040;

  double per_iteration() const { return set_params + process + misc; }

  /// AWG amplitude upload, host-side processing; misc is what remains of
  /// the 0.38 s baseline overhead.
  static OverheadModel baseline() { return {0.09, 0.23, 0.38 - 0.09 - 0.23}; }
  static OverheadModel improved() { return {0.001, 0.001, 0.040}; }
};

struct TimingBar {
  Mode mode = Mode::Restless;
  std::string pipeline;
  double set_params = 0.0;
  double acquire = 0.0;
  double process = 0.0;
  double misc = 0.0;
  double total() const { return set_params + acquire + process + misc; }
};

inline std::vector<TimingBar> timing_breakdown(const PhysicsConfig& cfg, std::int64_t n_shots, int n_cl,
                                               double init_wait) {
  std::vector<TimingBar> bars;
  for (const auto& [name, oh] : {std::pair{"baseline", OverheadModel::baseline()},
                                 std::pair{"improved", OverheadModel::improved()}})
    for (Mode m : {Mode::Conventional, Mode::Restless})
      bars.push_back({m, name, oh.set_params, simulated_wallclock(n_shots, n_cl, m, cfg, init_wait), oh.process,
                      oh.misc});
  return bars;
}

// ---------------------------------------------------------------------------
// Simulation context

struct AcquisitionSettings {
  std::int64_t n_shots = 8000;
  int n_seeds = 200;
  double init_wait = kDefaultInitWait;
  OverheadModel overhead = OverheadModel::improved();
  bool fluctuating_t1 = false;
  double t1_trace_dt = 2.0;
  double t1_trace_duration = 4096.0;
};

/// One simulated device session: a persistent qubit whose clock advances
/// with every acquisition plus the per-iteration overhead, and a fixed set
/// of 200 sequences per (N_Cl, mode).
class SimContext {
 public:
  SimContext(const PhysicsConfig& physics, const AcquisitionSettings& acq, std::uint64_t master_seed)
      : physics_(physics),
        acq_(acq),
        master_seed_(master_seed),
        qubit_(physics, make_trace(physics, acq, master_seed), derive_seed(master_seed, 0x71u), acq.init_wait) {
    if (acq_.n_shots < 2) throw std::invalid_argument("acquisition.n_shots must be >= 2");
    if (acq_.n_seeds < 1) throw std::invalid_argument("acquisition.n_seeds must be >= 1");
  }

  const PhysicsConfig& physics() const { return physics_; }
  const AcquisitionSettings& acquisition() const { return acq_; }
  std::uint64_t master_seed() const { return master_seed_; }

  const std::vector<CliffordSequence>& sequences(int n_cl, Mode mode) {
    const auto key = std::pair{n_cl, mode};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const std::uint64_t sub = derive_seed(master_seed_, 0x5e9u + 2u * static_cast<std::uint64_t>(n_cl) +
                                                              (mode == Mode::Restless ? 1u : 0u));
      it = cache_.emplace(key, make_sequence_set(sub, acq_.n_seeds, n_cl, net_op_for(mode))).first;
    }
    return it->second;
  }

  /// One cost evaluation: a fresh N-shot stream plus per-iteration overhead.
  CostSample measure(const PulseParams& p, int n_cl, Mode mode) {
    const auto& set = sequences(n_cl, mode);
    const auto stream = qubit_.run(set, p, acq_.n_shots, mode);
    qubit_.advance(acq_.overhead.per_iteration());
    elapsed_ += simulated_wallclock(acq_.n_shots, n_cl, mode, physics_, acq_.init_wait) +
                acq_.overhead.per_iteration();
    return epsilon(stream);
  }

  double elapsed() const { return elapsed_; }

 private:
  static T1Trace make_trace(const PhysicsConfig& physics, const AcquisitionSettings& acq, std::uint64_t seed) {
    if (!acq.fluctuating_t1 || physics.t1_psd.alpha == 0.0) return T1Trace::constant(physics.t1_mean);
    return T1Trace::synthesized(physics.t1_psd, acq.t1_trace_dt, acq.t1_trace_duration, physics.t1_mean,
                                derive_seed(seed, 0x7171u));
  }

  PhysicsConfig physics_;
  AcquisitionSettings acq_;
  std::uint64_t master_seed_;
  Transmon qubit_;
  std::map<std::pair<int, Mode>, std::vector<CliffordSequence>> cache_;
  double elapsed_ = 0.0;
};

// ---------------------------------------------------------------------------
// Two-step tuneup

struct TuneupStep {
  int n_cl = 80;
  double rel_a_g = -0.03;  // initial step as a fraction of the optimal A_G
  double rel_a_d = -0.25;
  double f_hz = 100e3;
};

struct TuneupSettings {
  TuneupStep step1{80, -0.03, -0.25, 100e3};
  TuneupStep step2{300, -0.01, -0.08, 50e3};
  int max_evaluations_per_step = 500;
  double cost_spread_rel = 1e-2;
  /// Spread may also fall below this many binomial standard errors of the
  /// mean cost; 0 keeps the purely relative test.
  double noise_spread_z = 3.0;
  NelderMeadCoefficients coefficients{};
};

struct TrajectoryRow {
  int iteration = 0;  // global cost-evaluation index
  int step = 1;
  PulseParams params;
  double epsilon = 0.0;
};

struct TuneupReport {
  Mode mode = Mode::Restless;
  int n_params = 2;
  PulseParams start;
  std::vector<TrajectoryRow> trajectory;
  PulseParams final_params;
  double final_cost = 0.0;
  int n_iterations = 0;  // N_it: cost evaluations over both steps
  double simulated_time = 0.0;
  int step_boundary = 0;  // first trajectory index of step 2
  bool converged[2] = {false, false};
  bool budget_exhausted[2] = {false, false};
  double final_spread[2] = {0.0, 0.0};
  std::vector<double> final_extent[2];
};

inline std::vector<double> to_vector(const PulseParams& p, int n_params) {
  if (n_params == 2) return {p.a_g, p.a_d};
  return {p.a_g, p.a_d, p.f_detuning};
}

inline PulseParams from_vector(const std::vector<double>& x, const PulseParams& base) {
  PulseParams p = base;
  p.a_g = x.at(0);
  p.a_d = x.at(1);
  if (x.size() > 2) p.f_detuning = x[2];
  return p;
}

inline TuneupReport two_step_tuneup(SimContext& ctx, const PulseParams& start, Mode mode, int n_params,
                                    const TuneupSettings& settings = {}) {
  if (n_params != 2 && n_params != 3) throw std::invalid_argument("two_step_tuneup: n_params must be 2 or 3");
  const PulseParams& opt = ctx.physics().opt;
  TuneupReport rep;
  rep.mode = mode;
  rep.n_params = n_params;
  rep.start = start;
  const double t0 = ctx.elapsed();

  auto steps_for = [&](const TuneupStep& s) {
    std::vector<double> v{s.rel_a_g * opt.a_g, s.rel_a_d * opt.a_d};
    if (n_params == 3) v.push_back(s.f_hz);
    return v;
  };
  std::vector<double> tolerance = steps_for(settings.step2);
  for (double& t : tolerance) t = 0.5 * std::abs(t);

  PulseParams current = start;
  int step_index = 0;
  for (const TuneupStep* s : {&settings.step1, &settings.step2}) {
    OptimizerConfig oc;
    oc.initial_point = to_vector(current, n_params);
    oc.initial_steps = steps_for(*s);
    oc.max_evaluations = settings.max_evaluations_per_step;
    oc.cost_spread_rel = settings.cost_spread_rel;
    oc.extent_tolerance = tolerance;
    oc.coefficients = settings.coefficients;
    oc.noise_spread_z = settings.noise_spread_z;
    const double n_shots = static_cast<double>(ctx.acquisition().n_shots);
    oc.noise_sigma = [n_shots](double m) {
      const double c = std::clamp(m, 0.0, 1.0);
      return std::sqrt(c * (1.0 - c) / n_shots);
    };
    if (step_index == 1) rep.step_boundary = static_cast<int>(rep.trajectory.size());
    const int n_cl = s->n_cl;
    auto cost = [&](const std::vector<double>& x) {
      const PulseParams p = from_vector(x, start);
      const double eps = ctx.measure(p, n_cl, mode).epsilon;
      rep.trajectory.push_back({static_cast<int>(rep.trajectory.size()), step_index + 1, p, eps});
      return eps;
    };
    const auto res = minimize(cost, oc);
    rep.converged[step_index] = res.converged;
    rep.budget_exhausted[step_index] = res.budget_exhausted;
    current = from_vector(res.final_params, start);
    rep.final_cost = res.final_cost;
    rep.final_spread[step_index] = res.final_spread;
    rep.final_extent[step_index] = res.final_extent;
    ++step_index;
  }
  rep.final_params = current;
  rep.n_iterations = static_cast<int>(rep.trajectory.size());
  rep.simulated_time = ctx.elapsed() - t0;
  return rep;
}

/// The four standard starting points: A_G about 6 % above / below the optimum
/// with A_D halved / doubled. 3-parameter runs also start detuned.
inline std::vector<PulseParams> standard_start_conditions(const PulseParams& opt, int n_params = 2,
                                                       double detuning_hz = 250e3) {
  if (n_params == 2) detuning_hz = 0.0;
  return {
      {opt.a_g * 1.06, opt.a_d * 2.0, opt.f_detuning + detuning_hz},
      {opt.a_g * 0.94, opt.a_d * 0.5, opt.f_detuning - detuning_hz},
      {opt.a_g * 1.06, opt.a_d * 0.5, opt.f_detuning - detuning_hz},
      {opt.a_g * 0.94, opt.a_d * 2.0, opt.f_detuning + detuning_hz},
  };
}

// ---------------------------------------------------------------------------
// Conventional / restless RB with repetition error bars

struct RBDataPoint {
  int n_cl = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> repetitions;
};

struct RBRun {
  Mode mode = Mode::Conventional;
  std::vector<RBDataPoint> data;
  RBFit fit;
  bool fit_ok = false;
  std::string fit_error;
  double simulated_time = 0.0;
};

/// Each (N_Cl, repetition) is an independent stream from its own qubit and
/// sequence set, so results do not depend on `jobs`.
inline RBRun run_rb(const PhysicsConfig& physics, const AcquisitionSettings& acq, std::uint64_t master_seed,
                    const PulseParams& p, Mode mode, const std::vector<int>& n_cl_list, int repetitions,
                    int jobs = 1) {
  if (repetitions < 1) throw std::invalid_argument("run_rb: repetitions must be >= 1");
  RBRun run;
  run.mode = mode;
  const std::size_t n_points = n_cl_list.size();
  std::vector<double> values(n_points * static_cast<std::size_t>(repetitions));
  const T1Trace trace = T1Trace::constant(physics.t1_mean);
  parallel_for(values.size(), jobs, [&](std::size_t k) {
    const std::size_t i = k / static_cast<std::size_t>(repetitions);
    const int n_cl = n_cl_list[i];
    const std::uint64_t sub = derive_seed(master_seed, 0xb000u + k);
    const auto set = make_sequence_set(derive_seed(sub, 1), acq.n_seeds, n_cl, net_op_for(mode));
    Transmon q(physics, trace, derive_seed(sub, 2), acq.init_wait);
    values[k] = epsilon(q.run(set, p, acq.n_shots, mode)).epsilon;
  });
  std::vector<RBPoint> pts;
  for (std::size_t i = 0; i < n_points; ++i) {
    RBDataPoint d;
    d.n_cl = n_cl_list[i];
    d.repetitions.assign(values.begin() + static_cast<std::ptrdiff_t>(i * repetitions),
                         values.begin() + static_cast<std::ptrdiff_t>((i + 1) * repetitions));
    double s = 0, s2 = 0;
    for (double v : d.repetitions) s += v;
    d.mean = s / repetitions;
    for (double v : d.repetitions) s2 += (v - d.mean) * (v - d.mean);
    d.stderr_ = repetitions > 1 ? std::sqrt(s2 / (repetitions - 1) / repetitions) : 0.0;
    run.data.push_back(d);
    run.simulated_time +=
        repetitions * simulated_wallclock(acq.n_shots, d.n_cl, mode, physics, acq.init_wait);
  }
  const bool weighted = std::all_of(run.data.begin(), run.data.end(), [](const auto& d) { return d.stderr_ > 0; });
  for (const auto& d : run.data) pts.push_back({d.n_cl, d.mean, weighted ? 1.0 / (d.stderr_ * d.stderr_) : 1.0});
  try {
    run.fit = rb_fit(pts);
    run.fit_ok = true;
  } catch (const std::exception& e) {
    run.fit_error = e.what();
  }
  return run;
}

inline std::vector<int> default_crb_lengths() { return {2, 25, 50, 100, 200, 400, 800, 1200, 1600}; }

// ---------------------------------------------------------------------------
// Landscape

struct LandscapePoint {
  double a_g = 0.0;
  double a_d = 0.0;
  double epsilon = 0.0;
};

struct Landscape {
  Mode mode = Mode::Restless;
  int n_cl = 300;
  std::vector<double> a_g_grid;
  std::vector<double> a_d_grid;
  std::vector<LandscapePoint> points;  // row-major, A_D varies fastest
  std::size_t argmin = 0;
  double simulated_time = 0.0;
};

inline Landscape run_landscape(const PhysicsConfig& physics, const AcquisitionSettings& acq,
                               std::uint64_t master_seed, const std::vector<double>& a_g_grid,
                               const std::vector<double>& a_d_grid, int n_cl, Mode mode, int jobs = 1) {
  if (a_g_grid.empty() || a_d_grid.empty()) throw std::invalid_argument("landscape: empty grid");
  Landscape ls;
  ls.mode = mode;
  ls.n_cl = n_cl;
  ls.a_g_grid = a_g_grid;
  ls.a_d_grid = a_d_grid;
  ls.points.resize(a_g_grid.size() * a_d_grid.size());
  const auto set = make_sequence_set(derive_seed(master_seed, 0x1a5du), acq.n_seeds, n_cl, net_op_for(mode));
  const T1Trace trace = T1Trace::constant(physics.t1_mean);
  parallel_for(ls.points.size(), jobs, [&](std::size_t k) {
    const double ag = a_g_grid[k / a_d_grid.size()];
    const double ad = a_d_grid[k % a_d_grid.size()];
    PulseParams p = physics.opt;
    p.a_g = ag;
    p.a_d = ad;
    Transmon q(physics, trace, derive_seed(master_seed, 0x1a00000u + k), acq.init_wait);
    ls.points[k] = {ag, ad, epsilon(q.run(set, p, acq.n_shots, mode)).epsilon};
  });
  for (std::size_t k = 1; k < ls.points.size(); ++k)
    if (ls.points[k].epsilon < ls.points[ls.argmin].epsilon) ls.argmin = k;
  ls.simulated_time = static_cast<double>(ls.points.size()) *
                      simulated_wallclock(acq.n_shots, n_cl, mode, physics, acq.init_wait);
  return ls;
}

// ---------------------------------------------------------------------------
// Monte Carlo restless statistics with quasi-static T1

struct RestlessStats {
  int n_cl = 0;
  double mean = 0.0;
  double sigma = 0.0;      // mean over blocks of the within-block standard deviation
  double mean_stderr = 0.0;
};

/// Physics with T1 pinned and the pulse floor set so the total per-Clifford
/// error at that T1 equals p_c; no leakage.
inline PhysicsConfig physics_for_error(PhysicsConfig base, double p_c, double t1) {
  base.t1_mean = t1;
  base.p_pulse_floor = pulse_error_for(p_c, t1, base.tau_cl);
  if (base.p_pulse_floor < 0.0) throw std::domain_error("physics_for_error: p_c is below the T1 limit");
  base.p_leak_floor = 0.0;
  return base;
}

/// blocks x reps_per_block restless streams at pulse error p_pulse. Each
/// repetition draws its own T1 from a normal(t1_mean, t1_sigma) truncated
/// to [t1_mean / 10, inf), held fixed during the stream.
inline RestlessStats restless_monte_carlo(const PhysicsConfig& base, double p_pulse, double t1_mean,
                                          double t1_sigma, int n_cl, std::int64_t n_shots, int n_seeds, int blocks,
                                          int reps_per_block, std::uint64_t seed, int jobs = 1) {
  if (blocks < 1 || reps_per_block < 2) throw std::invalid_argument("restless_monte_carlo: need blocks >= 1, reps >= 2");
  const std::size_t total = static_cast<std::size_t>(blocks) * static_cast<std::size_t>(reps_per_block);
  std::vector<double> eps(total);
  const auto set = make_sequence_set(derive_seed(seed, 0x5eedu + static_cast<std::uint64_t>(n_cl)), n_seeds, n_cl,
                                     NetOp::BitFlip);
  parallel_for(total, jobs, [&](std::size_t k) {
    Rng draw(derive_seed(seed, 0xd000000u + k));
    double t1 = t1_mean;
    if (t1_sigma > 0.0)
      do t1 = t1_mean + t1_sigma * draw.normal();
      while (t1 < t1_mean / 10.0);
    PhysicsConfig cfg = base;
    cfg.t1_mean = t1;
    cfg.p_pulse_floor = p_pulse;
    cfg.p_leak_floor = 0.0;
    Transmon q(cfg, T1Trace::constant(t1), derive_seed(seed, 0xe000000u + k));
    // Restless data start from whatever state the previous acquisition left.
    q.set_level(static_cast<int>(draw.below(2)));
    eps[k] = epsilon(q.run(set, cfg.opt, n_shots, Mode::Restless)).epsilon;
  });
  RestlessStats st;
  st.n_cl = n_cl;
  double sum = 0, sum2 = 0;
  for (double v : eps) sum += v;
  st.mean = sum / static_cast<double>(total);
  for (double v : eps) sum2 += (v - st.mean) * (v - st.mean);
  st.mean_stderr = std::sqrt(sum2 / static_cast<double>(total - 1) / static_cast<double>(total));
  double sig = 0;
  for (int b = 0; b < blocks; ++b) {
    double m = 0, s = 0;
    for (int r = 0; r < reps_per_block; ++r) m += eps[static_cast<std::size_t>(b * reps_per_block + r)];
    m /= reps_per_block;
    for (int r = 0; r < reps_per_block; ++r) {
      const double d = eps[static_cast<std::size_t>(b * reps_per_block + r)] - m;
      s += d * d;
    }
    sig += std::sqrt(s / (reps_per_block - 1));
  }
  st.sigma = sig / blocks;
  return st;
}

struct MonteCarloSNRPoint {
  int n_cl = 0;
  double signal = 0.0;
  double signal_stderr = 0.0;
  double noise = 0.0;
  double snr = 0.0;
};

/// Monte Carlo counterpart of snr_scan: pulse errors chosen so the total
/// per-Clifford error at the mean T1 is 1 - f_a and 1 - f_b.
inline std::vector<MonteCarloSNRPoint> monte_carlo_snr(const PhysicsConfig& base, const NoiseModelParams& model,
                                                       double f_a, const std::vector<int>& n_cl_grid,
                                                       std::int64_t n_shots, int n_seeds, int blocks,
                                                       int reps_per_block, std::uint64_t seed, int jobs = 1) {
  const double f_b = 0.5 + 0.5 * f_a;
  const double pp_a = pulse_error_for(1.0 - f_a, model.t1_mean, base.tau_cl);
  const double pp_b = pulse_error_for(1.0 - f_b, model.t1_mean, base.tau_cl);
  if (pp_a < 0.0 || pp_b < 0.0) throw std::domain_error("monte_carlo_snr: fidelity above the T1 limit");
  std::vector<MonteCarloSNRPoint> out;
  for (int n_cl : n_cl_grid) {
    const auto a = restless_monte_carlo(base, pp_a, model.t1_mean, model.t1_sigma, n_cl, n_shots, n_seeds, blocks,
                                        reps_per_block, derive_seed(seed, 2u * static_cast<std::uint64_t>(n_cl)), jobs);
    const auto b = restless_monte_carlo(base, pp_b, model.t1_mean, model.t1_sigma, n_cl, n_shots, n_seeds, blocks,
                                        reps_per_block, derive_seed(seed, 2u * static_cast<std::uint64_t>(n_cl) + 1),
                                        jobs);
    MonteCarloSNRPoint pt;
    pt.n_cl = n_cl;
    pt.signal = a.mean - b.mean;
    pt.signal_stderr = std::hypot(a.mean_stderr, b.mean_stderr);
    pt.noise = 0.5 * (a.sigma + b.sigma);
    pt.snr = pt.noise > 0.0 ? pt.signal / pt.noise : 0.0;
    out.push_back(pt);
  }
  return out;
}

}  // namespace restless
