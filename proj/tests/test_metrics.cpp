#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "exosim/closedloop.hpp"
#include "exosim/metrics.hpp"
#include "exosim/walker.hpp"

using namespace exosim;

namespace {

// Brute-force quadrature for the frozen analytic area values.
double quad(double (*f)(double), double a, double b, int n = 200000) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = a + (b - a) * i / n;
    const double x1 = a + (b - a) * (i + 1) / n;
    s += 0.5 * (x1 - x0) * (f(x0) + f(x1));
  }
  return s;
}

HybridTrajectory passive_walk(double duration) {
  WalkerParams p;
  p.ground_slope = 3.0 * M_PI / 180.0;
  SimOptions opts;
  opts.duration = duration;
  return simulate(passive_gait_seed(), p, SimControllers{},
                  slope_terrain(p.ground_slope), opts);
}

}  // namespace

TEST_CASE("signed area splitting") {
  SUBCASE("sine over a full period splits into equal lobes") {
    std::vector<double> t, v;
    for (int i = 0; i <= 20000; ++i) {
      t.push_back(2.0 * M_PI * i / 20000);
      v.push_back(std::sin(t.back()));
    }
    double pos = 0.0, neg = 0.0;
    split_signed_area(t, v, pos, neg);
    const double ref = quad([](double x) { return std::max(std::sin(x), 0.0); },
                            0.0, 2.0 * M_PI);
    CHECK(pos == doctest::Approx(ref).epsilon(1e-6));
    CHECK(pos == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(neg == doctest::Approx(2.0).epsilon(1e-6));

    // area identity against the plain signed trapezoid
    double signed_sum = 0.0;
    for (size_t i = 1; i < t.size(); ++i)
      signed_sum += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
    CHECK(pos - neg == doctest::Approx(signed_sum).epsilon(1e-9));
  }

  SUBCASE("velocity-proportional torque has no negative lobe") {
    std::vector<double> t, v;
    for (int i = 0; i <= 5000; ++i) {
      const double x = 3.0 * i / 5000;
      t.push_back(x);
      const double w = std::cos(2.0 * x);
      v.push_back(w * w);  // P = qd * qd with tau = qd
    }
    double pos = 0.0, neg = 0.0;
    split_signed_area(t, v, pos, neg);
    CHECK(neg == 0.0);
    CHECK(pos > 0.0);
  }
}

TEST_CASE("segmentation of simulated gait") {
  const auto traj = passive_walk(12.0);
  REQUIRE(traj.heel_strike_times.size() >= 5);
  const auto cycles = segment_cycles(traj);

  SUBCASE("fencepost: events minus two cycles") {
    CHECK(cycles.size() == traj.heel_strike_times.size() - 2);
  }

  SUBCASE("per-leg cycles partition the covered span") {
    for (int parity = 0; parity < 2; ++parity) {
      double prev_end = -1.0;
      for (const auto& c : cycles) {
        if (c.leg_parity != parity) continue;
        if (prev_end > 0.0) CHECK(c.t_start == doctest::Approx(prev_end));
        prev_end = c.t_end;
      }
    }
  }

  SUBCASE("converged cycles share their duration") {
    // skip the first few transient cycles
    for (size_t i = cycles.size() > 4 ? 4 : 0; i + 1 < cycles.size(); ++i)
      CHECK(cycles[i].duration() ==
            doctest::Approx(cycles[i + 1].duration()).epsilon(2e-4));
  }

  SUBCASE("durations are consistent") {
    for (const auto& c : cycles) {
      CHECK(c.stance_duration > 0.0);
      CHECK(c.swing_duration > 0.0);
      CHECK(c.stance_duration + c.swing_duration ==
            doctest::Approx(c.duration()).epsilon(1e-12));
      // instantaneous double support makes stance ~ swing in this model
      CHECK(stance_swing_ratio(c) == doctest::Approx(1.0).epsilon(0.05));
    }
  }

  SUBCASE("angle profiles are continuous across the role swap") {
    for (const auto& c : cycles) {
      double max_jump = 0.0;
      for (int i = 1; i < kCycleGridPoints; ++i)
        max_jump = std::max(max_jump,
                            std::abs(c.angle[size_t(i)] - c.angle[size_t(i - 1)]));
      CHECK(max_jump < 0.05);  // ~ one grid cell of smooth motion
    }
  }

  SUBCASE("too few events is an error") {
    const auto small = passive_walk(0.5);
    CHECK_THROWS_AS(segment_cycles(small), AnalysisError);
  }
}

TEST_CASE("power profiles on simulated gait") {
  const auto traj = passive_walk(10.0);
  const auto cycles = segment_cycles(traj);

  SUBCASE("zero torque means identically zero power") {
    for (const auto& c : cycles) {
      const auto p = power_profile(c);
      CHECK(p.positive_area == 0.0);
      CHECK(p.negative_area == 0.0);
    }
    std::vector<PowerProfile> profiles;
    for (const auto& c : cycles) profiles.push_back(power_profile(c));
    CHECK_THROWS_AS(negative_power_fraction(profiles), AnalysisError);
  }
}

TEST_CASE("negative power fraction arithmetic") {
  PowerProfile a;
  a.positive_area = 3.0;
  a.negative_area = 1.0;
  PowerProfile b;
  b.positive_area = 1.0;
  b.negative_area = 0.0;
  CHECK(negative_power_fraction({a, b}) == doctest::Approx(20.0));
  CHECK(negative_power_fraction({b}) == doctest::Approx(0.0));

  // sine over a full period: equal lobes, 50%
  PowerProfile s;
  for (int i = 0; i <= 10000; ++i) {
    s.time.push_back(2.0 * M_PI * i / 10000);
    s.power.push_back(std::sin(s.time.back()));
  }
  split_signed_area(s.time, s.power, s.positive_area, s.negative_area);
  CHECK(negative_power_fraction({s}) == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("cadence") {
  const auto traj = passive_walk(12.0);
  const double spm = cadence(traj);
  // 0.7343 s step period
  CHECK(spm == doctest::Approx(60.0 / 0.7343).epsilon(0.01));
  CHECK(cadence_ratio(spm, spm) == doctest::Approx(1.0));

  const auto tiny = passive_walk(1.0);
  CHECK_THROWS_AS(cadence(tiny), AnalysisError);
}

TEST_CASE("weir energy and the metabolic report") {
  SUBCASE("zero gas exchange burns nothing") {
    CHECK(weir_energy(0.0, 0.0) == 0.0);
  }
  SUBCASE("frozen evaluation") {
    CHECK(weir_energy(0.3, 0.25) == doctest::Approx(1.4588).epsilon(1e-6));
  }
  SUBCASE("negative volumes rejected") {
    CHECK_THROWS_AS(weir_energy(-0.1, 0.2), AnalysisError);
  }

  SUBCASE("report reproduces the reduction formula") {
    auto series = [](double vo2, double vco2, double minutes) {
      std::vector<GasSample> s;
      for (int i = 0; i <= 60; ++i)
        s.push_back({minutes * i / 60.0, vo2, vco2});
      return s;
    };
    // resting 0, mc ratio 0.944 -> -5.6%
    const double e_no = 1.0;  // kcal/min via vo2 solved below
    (void)e_no;
    const auto rest = series(0.0, 0.0, 3.0);
    const auto noexo = series(0.3, 0.25, 5.0);  // 1.4588 kcal/min
    // choose exo gas so that mc_exo = 0.944 * mc_noexo
    const double target = 0.944 * 1.4588;
    const auto exo = series(target / 3.941, 0.0, 5.0);
    const auto r = metabolic_report(exo, noexo, rest);
    CHECK(r.reduction_pct == doctest::Approx(-5.6).epsilon(1e-9));
    CHECK(r.reduction_pct < 0.0);
  }

  SUBCASE("short series rejected") {
    std::vector<GasSample> s{{0.0, 0.3, 0.2}, {1.0, 0.3, 0.2}};
    CHECK_THROWS_AS(metabolic_report(s, s, s), AnalysisError);
  }
}

TEST_CASE("kinematic summary on passive gait") {
  WalkerParams p;
  p.ground_slope = 3.0 * M_PI / 180.0;
  const auto traj = passive_walk(15.0);
  const auto ks = kinematic_summary(traj, p);

  CHECK(ks.hip_rom > 0.3);
  CHECK(ks.hip_rom < 1.2);
  CHECK(ks.normalized_max_torque == 0.0);  // passive walker
  CHECK(ks.com_displacement > 0.0);
  CHECK(ks.com_displacement < 0.1);  // compass COM bobs a few centimetres

  // profile is mean-centred
  double mean = 0.0;
  for (double v : ks.com_profile) mean += v;
  CHECK(std::abs(mean / kCycleGridPoints) < 1e-6);
}

TEST_CASE("resampling") {
  SUBCASE("exact for linear signals and endpoint-preserving") {
    std::vector<double> t{0.0, 0.4, 1.0, 1.7, 2.0};
    std::vector<double> v;
    for (double x : t) v.push_back(3.0 * x - 1.0);
    const auto r = resample_linear(t, v, 0.0, 2.0, 101);
    CHECK(r.front() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(r.back() == doctest::Approx(5.0).epsilon(1e-15));
    for (int i = 0; i < 101; ++i) {
      const double x = 2.0 * i / 100.0;
      CHECK(r[size_t(i)] == doctest::Approx(3.0 * x - 1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("report values roundtrip through profile averaging") {
  // paper-style per-subject scalars survive storage in cycle containers
  const std::vector<double> cadence_ratios{1.00, 1.04, 1.01, 1.02, 0.97};
  for (double r : cadence_ratios) {
    const double spm_no = 100.0;
    CHECK(cadence_ratio(r * spm_no, spm_no) == doctest::Approx(r).epsilon(1e-12));
  }
}
