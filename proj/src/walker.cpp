#include "exosim/walker.hpp"

#include <cmath>
#include <limits>

namespace exosim {

TerrainFn slope_terrain(double slope_rad) {
  const double t = std::tan(slope_rad);
  return [t](double x) { return -t * x; };
}

TerrainFn no_contact_terrain() {
  return [](double) { return -1e30; };
}

void WalkerParams::validate() const {
  if (!(leg_mass > 0.0) || !(hip_mass > 0.0))
    throw ConfigError("walker masses must be strictly positive");
  if (!(leg_length > 0.0) || !(com_offset_a > 0.0) || !(com_offset_b > 0.0))
    throw ConfigError("walker lengths must be strictly positive");
  if (std::abs(com_offset_a + com_offset_b - leg_length) > 1e-9)
    throw ConfigError("com_offset_a + com_offset_b must equal leg_length");
  if (!(gravity > 0.0)) throw ConfigError("gravity must be positive");
  if (!(std::abs(ground_slope) < M_PI / 4.0))
    throw ConfigError("|ground_slope| must be below pi/4");
}

bool WalkerState::finite() const {
  return std::isfinite(q1) && std::isfinite(q2) && std::isfinite(dq1) &&
         std::isfinite(dq2) && std::isfinite(stance_foot_x) &&
         std::isfinite(time);
}

// ---------------------------------------------------------------------------
// Continuous dynamics
//
// Stance foot pinned at the origin of its local frame, x forward, y up:
//   hip = l * (-sin q1,  cos q1)
//   c1  = a * (-sin q1,  cos q1)            stance leg CoM
//   c2  = hip + b * (sin q2, -cos q2)       swing leg CoM
// Lagrangian derivation gives, with alpha = q1 - q2:
//   M = [ m a^2 + (m + mH) l^2      -m b l cos(alpha) ]
//       [ -m b l cos(alpha)          m b^2            ]
//   h = [ -m b l sin(alpha) q2d^2,  m b l sin(alpha) q1d^2 ]
//   g = [ -g (m a + (m + mH) l) sin q1,  g m b sin q2 ]
// ---------------------------------------------------------------------------

void dynamics_terms(const WalkerState& s, const WalkerParams& p, Mat2& M,
                    Vec2& h, Vec2& g) {
  const double m = p.leg_mass, mH = p.hip_mass;
  const double a = p.com_offset_a, b = p.com_offset_b, l = p.leg_length;
  const double ca = std::cos(s.q1 - s.q2);
  const double sa = std::sin(s.q1 - s.q2);

  M << m * a * a + (m + mH) * l * l, -m * b * l * ca,
       -m * b * l * ca, m * b * b;
  h << -m * b * l * sa * s.dq2 * s.dq2,
        m * b * l * sa * s.dq1 * s.dq1;
  g << -p.gravity * (m * a + (m + mH) * l) * std::sin(s.q1),
        p.gravity * m * b * std::sin(s.q2);
}

Vec2 continuous_dynamics(const WalkerState& s, const WalkerParams& p,
                         const Vec2& tau) {
  if (!s.finite()) throw SimulationError(SimulationError::Kind::Diverged,
                                         "non-finite state in dynamics");
  Mat2 M;
  Vec2 h, g;
  dynamics_terms(s, p, M, h, g);
  // det(M) = m b^2 (m a^2 + (m+mH) l^2) - (m b l cos)^2
  //        >= m b^2 (m a^2 + mH l^2) > 0 for valid params.
  const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (!(std::abs(det) > 1e-12))
    throw SimulationError(SimulationError::Kind::Degenerate,
                          "singular mass matrix");
  return M.inverse() * (tau - h - g);
}

double kinetic_energy(const WalkerState& s, const WalkerParams& p) {
  Mat2 M;
  Vec2 h, g;
  dynamics_terms(s, p, M, h, g);
  const Vec2 qd(s.dq1, s.dq2);
  return 0.5 * qd.dot(M * qd);
}

double potential_energy(const WalkerState& s, const WalkerParams& p) {
  const double m = p.leg_mass, mH = p.hip_mass;
  const double a = p.com_offset_a, b = p.com_offset_b, l = p.leg_length;
  const double hip_y = l * std::cos(s.q1);
  const double c1_y = a * std::cos(s.q1);
  const double c2_y = hip_y - b * std::cos(s.q2);
  return p.gravity * (m * c1_y + mH * hip_y + m * c2_y);
}

double total_energy(const WalkerState& s, const WalkerParams& p) {
  return kinetic_energy(s, p) + potential_energy(s, p);
}

double hip_height(const WalkerState& s, const WalkerParams& p) {
  return p.leg_length * std::cos(s.q1);
}

Vec2 com_position(const WalkerState& s, const WalkerParams& p) {
  const double m = p.leg_mass, mH = p.hip_mass;
  const double a = p.com_offset_a, b = p.com_offset_b, l = p.leg_length;
  const Vec2 hip(-l * std::sin(s.q1), l * std::cos(s.q1));
  const Vec2 c1(-a * std::sin(s.q1), a * std::cos(s.q1));
  const Vec2 c2 = hip + Vec2(b * std::sin(s.q2), -b * std::cos(s.q2));
  return (m * c1 + mH * hip + m * c2) / (2.0 * m + mH);
}

// ---------------------------------------------------------------------------
// Hybrid events
// ---------------------------------------------------------------------------

static Vec2 swing_foot_position(const WalkerState& s, const WalkerParams& p,
                                const TerrainFn& terrain) {
  const double l = p.leg_length;
  const double foot_y = terrain(s.stance_foot_x);
  const Vec2 hip(s.stance_foot_x - l * std::sin(s.q1),
                 foot_y + l * std::cos(s.q1));
  return hip + Vec2(l * std::sin(s.q2), -l * std::cos(s.q2));
}

double heel_strike_guard(const WalkerState& s, const WalkerParams& p,
                         const TerrainFn& terrain) {
  const Vec2 foot = swing_foot_position(s, p, terrain);
  return foot.y() - terrain(foot.x());
}

bool heel_strike_admissible(const WalkerState& s, const WalkerParams& p) {
  (void)p;
  const bool forward = std::sin(s.q2) > std::sin(s.q1);  // swing foot ahead
  const bool spread = std::abs(s.q1 - s.q2) >= kScuffAngleThreshold;
  return forward && spread;
}

Mat2 impact_velocity_map(const WalkerState& s, const WalkerParams& p) {
  const double m = p.leg_mass, mH = p.hip_mass;
  const double a = p.com_offset_a, b = p.com_offset_b, l = p.leg_length;
  const double c = std::cos(s.q1 - s.q2);

  // Qm u = Qp w: row 1 is the system's angular momentum about the new
  // contact, row 2 the trailing leg's about the hip (absolute velocities).
  Mat2 Qm, Qp;
  Qm << -a * b * m + (mH * l * l + 2.0 * m * a * l) * c, -a * b * m,
        -a * b * m, 0.0;
  Qp << m * a * a + (m + mH) * l * l - m * b * l * c, m * b * (b - l * c),
        -m * b * l * c, m * b * b;

  const double det = Qp(0, 0) * Qp(1, 1) - Qp(0, 1) * Qp(1, 0);
  const double scale = m * m * l * l * b * b;
  if (!(std::abs(det) > 1e-9 * scale))
    throw SimulationError(SimulationError::Kind::Degenerate,
                          "impact map singular (legs near collinear)");
  return Qp.inverse() * Qm;
}

WalkerState apply_generalized_impulse(const WalkerState& s,
                                      const WalkerParams& p,
                                      const Vec2& impulse) {
  Mat2 M;
  Vec2 h, g;
  dynamics_terms(s, p, M, h, g);
  const Vec2 dqd = M.ldlt().solve(impulse);
  WalkerState out = s;
  out.dq1 += dqd(0);
  out.dq2 += dqd(1);
  return out;
}

WalkerState impact_map(const WalkerState& s, const WalkerParams& p) {
  const Mat2 W = impact_velocity_map(s, p);
  const Vec2 w = W * Vec2(s.dq1, s.dq2);
  WalkerState out = s;
  out.q1 = s.q2;  // q+ = [0 1; 1 0] q-
  out.q2 = s.q1;
  out.dq1 = w(0);
  out.dq2 = w(1);
  out.stance_foot_x =
      s.stance_foot_x + p.leg_length * (std::sin(s.q2) - std::sin(s.q1));
  return out;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

namespace {

WalkerState rk4_advance(const WalkerState& s, const WalkerParams& p,
                        const TorqueFn& torque, double h) {
  auto deriv = [&](const WalkerState& x) -> Eigen::Vector4d {
    const Vec2 tau = torque ? torque(x.time, x) : Vec2::Zero();
    const Vec2 dd = continuous_dynamics(x, p, tau);
    return {x.dq1, x.dq2, dd(0), dd(1)};
  };
  auto shifted = [&](const Eigen::Vector4d& d, double dt) {
    WalkerState x = s;
    x.q1 += dt * d(0);
    x.q2 += dt * d(1);
    x.dq1 += dt * d(2);
    x.dq2 += dt * d(3);
    x.time = s.time + dt;
    return x;
  };
  const Eigen::Vector4d k1 = deriv(s);
  const Eigen::Vector4d k2 = deriv(shifted(k1, 0.5 * h));
  const Eigen::Vector4d k3 = deriv(shifted(k2, 0.5 * h));
  const Eigen::Vector4d k4 = deriv(shifted(k3, h));
  return shifted((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
}

void check_sane(const WalkerState& s) {
  if (!s.finite() || std::abs(s.dq1) > kVelocitySanityBound ||
      std::abs(s.dq2) > kVelocitySanityBound)
    throw SimulationError(SimulationError::Kind::Diverged,
                          "simulation diverged (state out of sanity bounds)");
}

}  // namespace

using EventCallback =
    std::function<void(WalkerState& post, const WalkerState& pre)>;

static StepResult step_impl(const WalkerState& s, const WalkerParams& p,
                            const TorqueFn& torque, const TerrainFn& terrain,
                            double dt, const EventCallback& on_event,
                            int depth) {
  if (!(dt > 0.0) || dt > 0.01)
    throw ConfigError("integrator step must lie in (0, 0.01] s");
  if (depth > 2)
    throw SimulationError(SimulationError::Kind::Degenerate,
                          "more than two heel strikes inside one step");

  const double c0 = heel_strike_guard(s, p, terrain);
  WalkerState end = rk4_advance(s, p, torque, dt);
  check_sane(end);
  const double c1 = heel_strike_guard(end, p, terrain);

  StepResult r;
  if (c0 > 0.0 && c1 <= 0.0 && heel_strike_admissible(end, p)) {
    // Bisect the crossing time within [0, dt].
    double lo = 0.0, hi = dt;
    while (hi - lo > kEventTimeTolerance) {
      const double mid = 0.5 * (lo + hi);
      const WalkerState xm = rk4_advance(s, p, torque, mid);
      (heel_strike_guard(xm, p, terrain) > 0.0 ? lo : hi) = mid;
    }
    const double t_event = 0.5 * (lo + hi);
    WalkerState pre = rk4_advance(s, p, torque, t_event);
    if (heel_strike_admissible(pre, p)) {
      WalkerState post = impact_map(pre, p);
      if (on_event) on_event(post, pre);
      // Finish the remainder of the step on the fixed grid.
      const double rest = dt - t_event;
      StepResult tail;
      if (rest > kEventTimeTolerance) {
        tail = step_impl(post, p, torque, terrain, rest, on_event, depth + 1);
      } else {
        tail.state = post;
      }
      r.state = tail.state;
      r.event = true;
      r.event_time = s.time + t_event;
      r.pre_impact = pre;
      r.post_impact = post;
      return r;
    }
  }
  r.state = end;
  return r;
}

StepResult step(const WalkerState& s, const WalkerParams& p,
                const TorqueFn& torque, const TerrainFn& terrain, double dt) {
  return step_impl(s, p, torque, terrain, dt, nullptr, 0);
}

// ---------------------------------------------------------------------------
// Closed-loop simulation
// ---------------------------------------------------------------------------

HybridTrajectory simulate(const WalkerState& initial, const WalkerParams& p,
                          const SimControllers& controllers,
                          const TerrainFn& terrain, const SimOptions& opts) {
  p.validate();
  if (!(opts.duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(opts.dt > 0.0) || opts.dt > 0.01)
    throw ConfigError("integrator step must lie in (0, 0.01] s");

  const int n_steps = static_cast<int>(std::llround(opts.duration / opts.dt));
  const double tick_period =
      controllers.exo_tick ? 1.0 / controllers.exo_rate_hz : 0.0;

  HybridTrajectory traj;
  if (opts.record) traj.samples.reserve(static_cast<size_t>(n_steps) + 64);

  WalkerState x = initial;
  bool stance_is_leg_a = true;
  Vec2 tau_exo_physical = Vec2::Zero();  // held between controller ticks
  double next_tick = 0.0;

  auto role_to_physical = [&](const Vec2& role) {
    return stance_is_leg_a ? role : Vec2(role(1), role(0));
  };
  auto physical_to_role = [&](const Vec2& phys) {
    return stance_is_leg_a ? phys : Vec2(phys(1), phys(0));
  };

  // Combined hip torque in role order; exo part is zero-order-held.
  TorqueFn torque = [&](double t, const WalkerState& xs) {
    Vec2 tau = physical_to_role(tau_exo_physical);
    if (controllers.human) tau += controllers.human(t, xs);
    return tau;
  };

  auto log_sample = [&](const WalkerState& xs, bool event) {
    if (!opts.record) return;
    if (!event && !traj.samples.empty() &&
        xs.time - traj.samples.back().state.time < 1e-12)
      return;  // event landed on the grid point; keep the flagged sample
    TrajectorySample smp;
    smp.state = xs;
    const Vec2 te = physical_to_role(tau_exo_physical);
    const Vec2 th =
        controllers.human ? controllers.human(xs.time, xs) : Vec2::Zero();
    smp.tau_exo = {te(0), te(1)};
    smp.tau_human = {th(0), th(1)};
    smp.event = event;
    traj.samples.push_back(smp);
  };

  auto tick_exo = [&](const WalkerState& xs) {
    const Vec2 role_vel(xs.dq1, xs.dq2);
    const Vec2 leg_vel = role_to_physical(role_vel);
    tau_exo_physical = controllers.exo_tick(xs.time, leg_vel);
  };

  // Instantaneous powers under the current role flag and held torque; the
  // summed role product equals the physical product as long as the flag is
  // consistent with the state, so these are recomputed at flag/torque changes.
  auto exo_power = [&](const WalkerState& xs) {
    const Vec2 te = physical_to_role(tau_exo_physical);
    return te(0) * xs.dq1 + te(1) * xs.dq2;
  };
  auto human_power = [&](const WalkerState& xs) {
    if (!controllers.human) return 0.0;
    const Vec2 th = controllers.human(xs.time, xs);
    return th(0) * xs.dq1 + th(1) * xs.dq2;
  };

  double prev_time = x.time;
  double prev_exo_power = 0.0;
  double prev_human_power = 0.0;

  EventCallback on_event = [&](WalkerState& post, const WalkerState& pre) {
    // Close the energy trapezoid at the pre-impact state, then swap roles.
    traj.energy.e_exo += 0.5 * (pre.time - prev_time) *
                         (prev_exo_power + exo_power(pre));
    traj.energy.e_human += 0.5 * (pre.time - prev_time) *
                           (prev_human_power + human_power(pre));
    stance_is_leg_a = !stance_is_leg_a;
    if (controllers.on_heel_strike) controllers.on_heel_strike(post, pre);
    prev_time = post.time;
    prev_exo_power = exo_power(post);
    prev_human_power = human_power(post);
    traj.heel_strike_times.push_back(post.time);
    log_sample(post, true);
  };

  if (controllers.exo_tick && x.time + 1e-12 >= next_tick) {
    tick_exo(x);
    next_tick = x.time + tick_period;
  }
  log_sample(x, false);
  if (controllers.on_sample) controllers.on_sample(x, stance_is_leg_a);
  prev_exo_power = exo_power(x);
  prev_human_power = human_power(x);

  for (int k = 0; k < n_steps; ++k) {
    StepResult r = step_impl(x, p, torque, terrain, opts.dt, on_event, 0);
    x = r.state;

    if (hip_height(x, p) < opts.fall_hip_height_fraction * p.leg_length)
      throw SimulationError(SimulationError::Kind::Fell,
                            "walker fell at t = " + std::to_string(x.time));

    traj.energy.e_exo +=
        0.5 * (x.time - prev_time) * (prev_exo_power + exo_power(x));
    traj.energy.e_human +=
        0.5 * (x.time - prev_time) * (prev_human_power + human_power(x));
    prev_time = x.time;
    prev_exo_power = exo_power(x);
    prev_human_power = human_power(x);

    if (controllers.exo_tick && x.time + 1e-12 >= next_tick) {
      tick_exo(x);
      next_tick += tick_period;
      prev_exo_power = exo_power(x);  // held torque changed at this sample
    }
    log_sample(x, false);
    if (controllers.on_sample) controllers.on_sample(x, stance_is_leg_a);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Limit cycle search
// ---------------------------------------------------------------------------

LimitCycleResult find_limit_cycle(const WalkerState& guess,
                                  const WalkerParams& p,
                                  const SimControllers& controllers,
                                  const TerrainFn& terrain,
                                  const LimitCycleOptions& opts) {
  p.validate();
  LimitCycleResult res;

  WalkerState x = guess;
  bool stance_is_leg_a = true;
  Vec2 tau_exo_physical = Vec2::Zero();
  double next_tick = x.time;
  const double tick_period =
      controllers.exo_tick ? 1.0 / controllers.exo_rate_hz : 0.0;

  auto physical_to_role = [&](const Vec2& v) {
    return stance_is_leg_a ? v : Vec2(v(1), v(0));
  };

  TorqueFn torque = [&](double t, const WalkerState& xs) {
    Vec2 tau = physical_to_role(tau_exo_physical);
    if (controllers.human) tau += controllers.human(t, xs);
    return tau;
  };

  double last_event_time = x.time;
  double prev_event_time = x.time;

  try {
    for (int stride = 0; stride < opts.max_strides; ++stride) {
      // Integrate until the next heel strike.
      bool hit = false;
      WalkerState section;
      EventCallback on_event = [&](WalkerState& post, const WalkerState& pre) {
        stance_is_leg_a = !stance_is_leg_a;
        if (controllers.on_heel_strike) controllers.on_heel_strike(post, pre);
        section = post;
        hit = true;
        prev_event_time = last_event_time;
        last_event_time = post.time;
      };
      const double t_limit = x.time + opts.max_step_duration;
      while (!hit) {
        if (x.time > t_limit) {
          res.message = "no heel strike within max_step_duration";
          res.fixed_point = x;
          return res;
        }
        if (controllers.exo_tick && x.time + 1e-12 >= next_tick) {
          const Vec2 role_vel(x.dq1, x.dq2);
          const Vec2 leg_vel =
              stance_is_leg_a ? role_vel : Vec2(role_vel(1), role_vel(0));
          tau_exo_physical = controllers.exo_tick(x.time, leg_vel);
          next_tick += tick_period;
        }
        StepResult r = step_impl(x, p, torque, terrain, opts.dt, on_event, 0);
        x = r.state;
        if (hip_height(x, p) < 0.5 * p.leg_length)
          throw SimulationError(SimulationError::Kind::Fell, "walker fell");
      }

      const Eigen::Vector4d delta(section.q1 - res.fixed_point.q1,
                                  section.q2 - res.fixed_point.q2,
                                  section.dq1 - res.fixed_point.dq1,
                                  section.dq2 - res.fixed_point.dq2);
      res.final_delta = stride == 0 ? std::numeric_limits<double>::infinity()
                                    : delta.norm();
      res.fixed_point = section;
      res.step_period = last_event_time - prev_event_time;
      res.strides = stride + 1;
      if (res.final_delta < opts.tolerance) {
        res.converged = true;
        return res;
      }
    }
  } catch (const SimulationError& e) {
    res.message = e.what();
    return res;
  }
  res.message = "did not converge within max_strides";
  return res;
}

WalkerState passive_gait_seed() {
  WalkerState s;
  s.q1 = 0.218669;
  s.q2 = -0.323389;
  s.dq1 = -1.092384;
  s.dq2 = -0.377374;
  return s;
}

}  // namespace exosim
