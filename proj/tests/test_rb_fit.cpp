#include <gtest/gtest.h>

#include <cmath>

#include "restless/experiments.hpp"
#include "restless/rb_fit.hpp"

using namespace restless;

namespace {

std::vector<RBPoint> synthetic(double a, double b, double p, const std::vector<int>& ns) {
  std::vector<RBPoint> pts;
  for (int n : ns) pts.push_back({n, 1.0 - (a * std::pow(p, n) + b), 1.0});
  return pts;
}

}  // namespace

TEST(RBFit, ExactRecovery) {
  const auto fit = rb_fit(synthetic(0.5, 0.5, 0.998, {1, 10, 50, 100, 200, 400, 800, 1600}));
  EXPECT_NEAR(fit.p_cl, 0.998, 1e-6);
  EXPECT_NEAR(fit.amp, 0.5, 1e-6);
  EXPECT_NEAR(fit.offset, 0.5, 1e-6);
  EXPECT_NEAR(fit.f_cl, 0.999, 1e-6);
  EXPECT_FALSE(fit.p_at_boundary);
}

TEST(RBFit, ExactRecoveryOtherShapes) {
  for (double p : {0.9, 0.99, 0.9995})
    for (double a : {0.3, 0.45}) {
      const auto fit = rb_fit(synthetic(a, 0.5, p, {2, 25, 50, 100, 200, 400, 800, 1200, 1600}));
      EXPECT_NEAR(fit.p_cl, p, 1e-6);
      EXPECT_NEAR(fit.amp, a, 1e-5);
    }
}

TEST(RBFit, FlatDataGivesUnitFidelity) {
  std::vector<RBPoint> pts;
  for (int n : {2, 50, 200, 800}) pts.push_back({n, 0.02, 1.0});
  const auto fit = rb_fit(pts);
  EXPECT_EQ(fit.p_cl, 1.0);
  EXPECT_EQ(fit.f_cl, 1.0);
  EXPECT_TRUE(fit.p_at_boundary);
  EXPECT_NEAR(fit.amp + fit.offset, 0.98, 1e-12);
}

TEST(RBFit, BoundsOnOutputs) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<RBPoint> pts;
    for (int n : {2, 25, 100, 400, 1600}) pts.push_back({n, 0.5 * rng.uniform(), 1.0});
    const auto fit = rb_fit(pts);
    EXPECT_GE(fit.p_cl, 0.0);
    EXPECT_LE(fit.p_cl, 1.0);
    EXPECT_GE(fit.f_cl, 0.5);
    EXPECT_LE(fit.f_cl, 1.0);
  }
}

TEST(RBFit, Rejects) {
  EXPECT_THROW(rb_fit(synthetic(0.5, 0.5, 0.99, {1, 1, 2})), std::invalid_argument);
  auto pts = synthetic(0.5, 0.5, 0.99, {1, 2, 3});
  pts[0].weight = 0.0;
  EXPECT_THROW(rb_fit(pts), std::invalid_argument);
}

TEST(RBFit, SimulatedConventionalRbRecoversInjectedFidelity) {
  // No decay around readout, no SPAM, no leakage: conventional eps follows
  // the decay exactly, with p_cl = 1 - 2 p_flip.
  PhysicsConfig cfg;
  cfg.t1_mean = 1e30;
  cfg.p_s_c = 0.0;
  cfg.p_leak_floor = 0.0;
  cfg.p_pulse_floor = 0.001;  // F_Cl = 0.999
  AcquisitionSettings acq;
  const auto run = run_rb(cfg, acq, 17, cfg.opt, Mode::Conventional, default_crb_lengths(), 10);
  ASSERT_TRUE(run.fit_ok) << run.fit_error;
  EXPECT_NEAR(run.fit.f_cl, 0.999, 1e-4);
}

TEST(RBFit, SimulatedRbAtPhysicalDefaults) {
  PhysicsConfig cfg;
  cfg.p_leak_floor = 0.0;
  AcquisitionSettings acq;
  const double injected = 1.0 - error_map(cfg.opt, cfg, cfg.t1_mean).p_flip;
  const auto run = run_rb(cfg, acq, 18, cfg.opt, Mode::Conventional, default_crb_lengths(), 10);
  ASSERT_TRUE(run.fit_ok);
  EXPECT_NEAR(run.fit.f_cl, injected, 2e-4);
}

TEST(RBFit, ZeroPulseErrorIsFlatAtSpam) {
  PhysicsConfig cfg;
  cfg.t1_mean = 1e30;
  cfg.p_pulse_floor = 0.0;
  cfg.p_leak_floor = 0.0;
  cfg.p_s_c = 0.03;
  AcquisitionSettings acq;
  const auto run = run_rb(cfg, acq, 19, cfg.opt, Mode::Conventional, {2, 50, 200, 800}, 10);
  ASSERT_TRUE(run.fit_ok);
  for (const auto& d : run.data) EXPECT_NEAR(d.mean, 0.03, 0.005);
  EXPECT_NEAR(run.fit.f_cl, 1.0, 1e-4);
}

TEST(RBFit, RestlessDipShallowerThanConventional) {
  PhysicsConfig cfg;
  cfg.p_leak_floor = 0.0;
  AcquisitionSettings acq;
  const std::vector<int> ns{2, 100, 400, 1600};
  const auto conv = run_rb(cfg, acq, 20, cfg.opt, Mode::Conventional, ns, 5);
  const auto rest = run_rb(cfg, acq, 21, cfg.opt, Mode::Restless, ns, 5);
  // 1 - eps at short sequences sits lower for restless because of SPAM.
  EXPECT_LT(1.0 - rest.data.front().mean, 1.0 - conv.data.front().mean);
  EXPECT_GT(rest.data.front().mean, conv.data.front().mean);
}

TEST(RBFit, JobsDoNotChangeResults) {
  PhysicsConfig cfg;
  AcquisitionSettings acq;
  acq.n_shots = 2000;
  const auto a = run_rb(cfg, acq, 5, cfg.opt, Mode::Restless, {2, 50, 200}, 3, 1);
  const auto b = run_rb(cfg, acq, 5, cfg.opt, Mode::Restless, {2, 50, 200}, 3, 3);
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_EQ(a.data[i].repetitions, b.data[i].repetitions);
}
