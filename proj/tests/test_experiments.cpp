#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "restless/experiments.hpp"

using namespace restless;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

}  // namespace

TEST(ParallelFor, CoversEveryIndexOnceAndPropagatesErrors) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Timing, BreakdownTotals) {
  PhysicsConfig cfg;
  const auto bars = timing_breakdown(cfg, 8000, 300, kDefaultInitWait);
  ASSERT_EQ(bars.size(), 4u);
  auto find = [&](const std::string& pipe, Mode m) {
    for (const auto& b : bars)
      if (b.pipeline == pipe && b.mode == m) return b;
    throw std::logic_error("missing bar");
  };
  EXPECT_NEAR(find("baseline", Mode::Conventional).total(), 1.98, 0.005);
  EXPECT_NEAR(find("baseline", Mode::Restless).total(), 0.50, 0.005);
  EXPECT_NEAR(find("improved", Mode::Conventional).total(), 1.64, 0.005);
  EXPECT_NEAR(find("improved", Mode::Restless).total(), 0.16, 0.01);
  EXPECT_NEAR(find("improved", Mode::Restless).acquire, 0.124, 1e-12);
  EXPECT_NEAR(find("baseline", Mode::Conventional).process, 0.23, 1e-12);
  EXPECT_NEAR(find("baseline", Mode::Conventional).set_params, 0.09, 1e-12);
  EXPECT_NEAR(find("improved", Mode::Conventional).misc, 0.040, 1e-12);
}

TEST(SimContext, ClockAndDeterminism) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  SimContext a(cfg, acq, 9), b(cfg, acq, 9);
  const double ea = a.measure(cfg.opt, 300, Mode::Restless).epsilon;
  EXPECT_EQ(ea, b.measure(cfg.opt, 300, Mode::Restless).epsilon);
  EXPECT_NEAR(a.elapsed(), 0.124 + acq.overhead.per_iteration(), 1e-12);
  EXPECT_EQ(&a.sequences(300, Mode::Restless), &a.sequences(300, Mode::Restless));
  EXPECT_EQ(a.sequences(80, Mode::Conventional).size(), 200u);
  EXPECT_EQ(a.sequences(80, Mode::Conventional).front().net_op, NetOp::Identity);
}

TEST(SimContext, FluctuatingT1Changes) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  acq.fluctuating_t1 = true;
  SimContext ctx(cfg, acq, 2);
  ctx.measure(cfg.opt, 80, Mode::Restless);
  EXPECT_GT(ctx.elapsed(), 0.0);
}

TEST(Tuneup, StartAtOptimumStaysNearOptimum) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  SimContext ctx(cfg, acq, 31);
  const auto rep = two_step_tuneup(ctx, cfg.opt, Mode::Restless, 2);
  ASSERT_FALSE(rep.trajectory.empty());
  const auto crb = run_rb(cfg, acq, 32, rep.final_params, Mode::Conventional, default_crb_lengths(), 5);
  const auto ref = run_rb(cfg, acq, 33, cfg.opt, Mode::Conventional, default_crb_lengths(), 5);
  ASSERT_TRUE(crb.fit_ok && ref.fit_ok);
  EXPECT_GT(crb.fit.f_cl, ref.fit.f_cl - 2 * std::hypot(crb.fit.f_cl_stderr, ref.fit.f_cl_stderr) - 1e-4);
}

TEST(Tuneup, ReportStructure) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  SimContext ctx(cfg, acq, 7);
  const auto starts = standard_start_conditions(cfg.opt, 2);
  ASSERT_EQ(starts.size(), 4u);
  EXPECT_DOUBLE_EQ(starts[0].a_g, 1.06 * cfg.opt.a_g);
  EXPECT_DOUBLE_EQ(starts[1].a_d, 0.5 * cfg.opt.a_d);
  EXPECT_EQ(starts[0].f_detuning, cfg.opt.f_detuning);
  EXPECT_DOUBLE_EQ(standard_start_conditions(cfg.opt, 3)[0].f_detuning, cfg.opt.f_detuning + 250e3);

  const auto rep = two_step_tuneup(ctx, starts[1], Mode::Restless, 2);
  EXPECT_EQ(rep.n_iterations, static_cast<int>(rep.trajectory.size()));
  EXPECT_GT(rep.step_boundary, 0);
  EXPECT_LT(rep.step_boundary, rep.n_iterations);
  for (int i = 0; i < rep.n_iterations; ++i) {
    EXPECT_EQ(rep.trajectory[i].iteration, i);
    EXPECT_EQ(rep.trajectory[i].step, i < rep.step_boundary ? 1 : 2);
  }
  EXPECT_EQ(rep.trajectory.front().params, starts[1]);
  double expect = 0;
  for (const auto& row : rep.trajectory)
    expect += simulated_wallclock(acq.n_shots, row.step == 1 ? 80 : 300, Mode::Restless, cfg, acq.init_wait) +
              acq.overhead.per_iteration();
  EXPECT_NEAR(rep.simulated_time, expect, 1e-9);
  EXPECT_THROW(two_step_tuneup(ctx, starts[0], Mode::Restless, 4), std::invalid_argument);
}

TEST(Tuneup, RestlessAndConventionalReachComparableFidelity) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  const auto start = standard_start_conditions(cfg.opt, 2)[0];
  SimContext cr(cfg, acq, 41), cc(cfg, acq, 42);
  const auto r = two_step_tuneup(cr, start, Mode::Restless, 2);
  const auto c = two_step_tuneup(cc, start, Mode::Conventional, 2);
  const auto fr = run_rb(cfg, acq, 43, r.final_params, Mode::Conventional, default_crb_lengths(), 5);
  const auto fc = run_rb(cfg, acq, 44, c.final_params, Mode::Conventional, default_crb_lengths(), 5);
  EXPECT_GE(fr.fit.f_cl, 0.999);
  EXPECT_GE(fc.fit.f_cl, 0.999);
  EXPECT_LT(std::abs(fr.fit.f_cl - fc.fit.f_cl), 3e-4);
  EXPECT_GT(c.simulated_time / c.n_iterations, 8.0 * r.simulated_time / r.n_iterations);
}

TEST(Landscape, ZeroErrorPhysicsIsFlat) {
  PhysicsConfig cfg;
  cfg.t1_mean = 1e30;
  cfg.p_pulse_floor = 0;
  cfg.p_leak_floor = 0;
  cfg.curvatures = {0, 0, 0};
  cfg.leak_curvature = 0;
  cfg.p_s_c = 0;
  AcquisitionSettings acq;
  acq.n_shots = 1000;
  const auto ls = run_landscape(cfg, acq, 1, linspace(0.94, 1.06, 3), logspace(0.125, 0.5, 3), 300, Mode::Restless);
  for (const auto& p : ls.points) EXPECT_EQ(p.epsilon, 0.0);
}

TEST(Landscape, ModesShareArgminAndTimeRatio) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  const auto ag = linspace(0.94, 1.06, 13);
  const auto ad = logspace(0.125, 0.5, 9);
  const auto r = run_landscape(cfg, acq, 5, ag, ad, 300, Mode::Restless, 1);
  const auto c = run_landscape(cfg, acq, 5, ag, ad, 300, Mode::Conventional, 1);
  const auto ri = r.argmin, ci = c.argmin;
  EXPECT_LE(std::abs(static_cast<int>(ri / ad.size()) - static_cast<int>(ci / ad.size())), 1);
  EXPECT_LE(std::abs(static_cast<int>(ri % ad.size()) - static_cast<int>(ci % ad.size())), 1);
  // Interior minimum near the optimum.
  EXPECT_NEAR(r.points[ri].a_g, cfg.opt.a_g, 0.011);
  EXPECT_NEAR(c.simulated_time / r.simulated_time, 1.60 / 0.124, 1e-9);
  const auto r2 = run_landscape(cfg, acq, 5, ag, ad, 300, Mode::Restless, 3);
  for (std::size_t k = 0; k < r.points.size(); ++k) EXPECT_EQ(r.points[k].epsilon, r2.points[k].epsilon);
}

TEST(MonteCarlo, PhysicsForError) {
  PhysicsConfig base;
  const auto p = physics_for_error(base, 3e-3, 15e-6);
  EXPECT_NEAR(error_map(p.opt, p, 15e-6).p_flip, 3e-3, 1e-15);
  EXPECT_EQ(p.p_leak_floor, 0.0);
  EXPECT_THROW(physics_for_error(base, 1e-5, 15e-6), std::domain_error);
}

TEST(MonteCarlo, RestlessMeanMatchesModelWithoutSpam) {
  PhysicsConfig base;
  base.p_s_c = 0.0;
  for (int n : {20, 300}) {
    const double pc = 3e-3, t1 = 21.6e-6;
    const auto st = restless_monte_carlo(base, pulse_error_for(pc, t1, base.tau_cl), t1, 0.0, n, 8000, 200, 1, 50, 77 + n);
    const double model = restless_error_rate(pc, n, t1, 0.0, base.timing());
    EXPECT_LT(std::abs(st.mean - model), 3.0 * st.mean_stderr) << n;
  }
}
