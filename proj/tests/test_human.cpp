#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "exosim/closedloop.hpp"
#include "exosim/human.hpp"
#include "exosim/metrics.hpp"
#include "exosim/walker.hpp"

using namespace exosim;

namespace {

HybridTrajectory run_flat(const HumanModel& hm, double beta, double duration) {
  WalkerParams wp;
  SimOptions so;
  so.duration = duration;
  if (beta > 0.0) {
    ExoConfig ec;
    ec.beta = beta;
    ClosedLoop loop(wp, hm, ec);
    return simulate(surrogate_gait_seed(), wp, loop.controllers(),
                    slope_terrain(0.0), so);
  }
  ClosedLoop loop(wp, hm);
  return simulate(surrogate_gait_seed(), wp, loop.controllers(),
                  slope_terrain(0.0), so);
}

HybridTrajectory tail_of(const HybridTrajectory& traj, double t0) {
  HybridTrajectory t;
  for (const auto& s : traj.samples)
    if (s.state.time >= t0) t.samples.push_back(s);
  for (double e : traj.heel_strike_times)
    if (e >= t0) t.heel_strike_times.push_back(e);
  t.energy = traj.energy;
  return t;
}

}  // namespace

TEST_CASE("PD torque law") {
  HumanModel hm;
  WalkerState s;

  SUBCASE("on-reference state produces zero torque") {
    const auto ref = hip_reference(hm, 1.234, 0.0);
    s.q1 = ref.angle(0);
    s.q2 = ref.angle(1);
    s.dq1 = ref.velocity(0);
    s.dq2 = ref.velocity(1);
    const Vec2 tau = human_torque(s, hm, 1.234);
    CHECK(std::abs(tau(0)) < 1e-12);
    CHECK(std::abs(tau(1)) < 1e-12);
  }

  SUBCASE("zero gains recover the passive walker") {
    HumanModel zero = hm;
    zero.kp = zero.kd = 0.0;
    s.q1 = 0.4;
    s.dq1 = -2.0;
    const Vec2 tau = human_torque(s, zero, 0.77);
    CHECK(tau(0) == 0.0);
    CHECK(tau(1) == 0.0);
  }

  SUBCASE("proportional gain acts on the angle error") {
    HumanModel kp_only = hm;
    kp_only.kp = 20.0;
    kp_only.kd = 0.0;
    const auto ref = hip_reference(kp_only, 0.5, 0.0);
    s.q1 = ref.angle(0) - 1.0;  // one radian of error
    s.q2 = ref.angle(1);
    s.dq1 = ref.velocity(0);
    s.dq2 = ref.velocity(1);
    const Vec2 tau = human_torque(s, kp_only, 0.5);
    CHECK(tau(0) == doctest::Approx(20.0));
    CHECK(std::abs(tau(1)) < 1e-12);
  }
}

TEST_CASE("default surrogate walks a period-1 gait on level ground") {
  WalkerParams wp;
  HumanModel hm;
  ClosedLoop loop(wp, hm);
  LimitCycleOptions opts;
  opts.tolerance = 1e-5;
  const auto res = find_limit_cycle(surrogate_gait_seed(), wp,
                                    loop.controllers(), slope_terrain(0.0),
                                    opts);
  REQUIRE(res.converged);
  CHECK(res.step_period == doctest::Approx(0.6165).epsilon(0.01));
  // cadence target: roughly 100 steps per minute
  CHECK(60.0 / res.step_period > 85.0);
  CHECK(60.0 / res.step_period < 115.0);
}

TEST_CASE("effort proxy") {
  HumanModel hm;

  SUBCASE("passive trajectory has zero effort") {
    WalkerParams wp;
    wp.ground_slope = 3.0 * M_PI / 180.0;
    SimOptions so;
    so.duration = 8.0;
    const auto traj = simulate(passive_gait_seed(), wp, SimControllers{},
                               slope_terrain(wp.ground_slope), so);
    const auto e = effort_proxy(traj);
    CHECK(e.positive_work_per_cycle == 0.0);
    CHECK(e.sq_torque_per_cycle == 0.0);
    CHECK(e.cycles >= 3);
  }

  SUBCASE("proxies are pure functions of the trajectory") {
    const auto traj = run_flat(hm, 0.0, 10.0);
    const auto a = effort_proxy(traj);
    const auto b = effort_proxy(traj);
    CHECK(a.positive_work_per_cycle == b.positive_work_per_cycle);
    CHECK(a.sq_torque_per_cycle == b.sq_torque_per_cycle);
    CHECK(a.positive_work_per_cycle >= 0.0);
    CHECK(a.sq_torque_per_cycle >= 0.0);
  }

  SUBCASE("too few cycles is an error") {
    const auto traj = run_flat(hm, 0.0, 2.0);
    CHECK_THROWS_AS(effort_proxy(traj), AnalysisError);
  }
}

TEST_CASE("assistance reduces surrogate effort across the beta range") {
  HumanModel hm;
  const double dur = 30.0, t0 = 10.0;
  const auto unassisted = tail_of(run_flat(hm, 0.0, dur), t0);
  const double base = effort_proxy(unassisted).sq_torque_per_cycle;
  REQUIRE(base > 0.0);

  for (double beta : {1.0, 1.75, 2.3, 2.5}) {
    const auto assisted = tail_of(run_flat(hm, beta, dur), t0);
    const double e = effort_proxy(assisted).sq_torque_per_cycle;
    INFO("beta = ", beta, " effort ", e, " vs ", base);
    CHECK(e <= base);
  }
}

TEST_CASE("assisted gait injects exoskeleton energy") {
  HumanModel hm;
  const auto traj = run_flat(hm, 2.3, 20.0);
  CHECK(traj.energy.e_exo > 0.0);
  // ledger bookkeeping identity
  const EnergyLedger& L = traj.energy;
  CHECK(L.e_total() == doctest::Approx(L.e_exo + L.e_human).epsilon(1e-12));
}

TEST_CASE("pushoff impulse adds forward momentum") {
  WalkerParams wp;
  WalkerState s = surrogate_gait_seed();
  const auto kicked = apply_generalized_impulse(s, wp, Vec2(-5.0, 0.0));
  CHECK(kicked.dq1 < s.dq1);  // more negative = faster forward roll
  CHECK(kicked.q1 == s.q1);
}

TEST_CASE("model validation") {
  HumanModel hm;
  hm.kp = -1.0;
  CHECK_THROWS_AS(hm.validate(), ConfigError);
  hm = HumanModel{};
  hm.ref_amplitude = 1.5;
  CHECK_THROWS_AS(hm.validate(), ConfigError);
  hm = HumanModel{};
  hm.ref_frequency_hz = 0.0;
  CHECK_THROWS_AS(hm.validate(), ConfigError);
}
