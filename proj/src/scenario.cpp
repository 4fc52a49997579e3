#include "exosim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "exosim/closedloop.hpp"
#include "exosim/metrics.hpp"

namespace exosim {

using nlohmann::json;

std::string terrain_name(Terrain t) {
  switch (t) {
    case Terrain::FlatWalk: return "flat_walk";
    case Terrain::StairsAscend: return "stairs_ascend";
    case Terrain::StairsDescend: return "stairs_descend";
  }
  return "flat_walk";
}

Terrain terrain_from_name(const std::string& name) {
  if (name == "flat_walk" || name == "flat") return Terrain::FlatWalk;
  if (name == "stairs_ascend" || name == "stairs_up")
    return Terrain::StairsAscend;
  if (name == "stairs_descend" || name == "stairs_down")
    return Terrain::StairsDescend;
  throw SchemaError("unknown terrain tag '" + name + "'");
}

void ScenarioSegment::validate() const {
  if (!(duration_s > 0.0))
    throw SchemaError("segment duration must be positive");
  if (std::abs(slope_rad) > kMaxEffectiveSlope + 1e-12)
    throw SchemaError("|effective slope| exceeds the model limit");
  if (terrain == Terrain::FlatWalk && slope_rad != 0.0)
    throw SchemaError("flat segments must have zero slope");
  if (terrain == Terrain::StairsAscend && !(slope_rad > 0.0))
    throw SchemaError("ascending segments need a positive slope");
  if (terrain == Terrain::StairsDescend && !(slope_rad < 0.0))
    throw SchemaError("descending segments need a negative slope");
  if (!(speed_scale > 0.0)) throw SchemaError("speed scale must be positive");
}

void Scenario::validate() const {
  if (segments.empty()) throw SchemaError("scenario has no segments");
  for (size_t i = 0; i < segments.size(); ++i) {
    try {
      segments[i].validate();
    } catch (const SchemaError& e) {
      throw SchemaError("segment " + std::to_string(i) + ": " + e.what());
    }
  }
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scenario parse error: ") + e.what());
  }
  const json* arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("segments"))
      throw SchemaError("scenario object lacks a 'segments' array");
    arr = &doc["segments"];
  }
  if (!arr->is_array()) throw SchemaError("scenario segments must be an array");

  Scenario sc;
  for (size_t i = 0; i < arr->size(); ++i) {
    const json& e = (*arr)[i];
    auto fail = [&](const std::string& msg) {
      throw SchemaError("segment " + std::to_string(i) + ": " + msg);
    };
    if (!e.is_object()) fail("not an object");
    if (!e.contains("terrain") || !e["terrain"].is_string())
      fail("missing terrain tag");
    if (!e.contains("duration_s") || !e["duration_s"].is_number())
      fail("missing duration_s");

    ScenarioSegment seg;
    try {
      seg.terrain = terrain_from_name(e["terrain"].get<std::string>());
    } catch (const SchemaError& ex) {
      fail(ex.what());
    }
    seg.duration_s = e["duration_s"].get<double>();
    if (e.contains("speed_scale")) seg.speed_scale = e["speed_scale"].get<double>();

    const bool has_slope = e.contains("slope_rad");
    const bool has_rise = e.contains("rise_m");
    if (has_slope && has_rise) fail("give slope_rad or rise_m, not both");
    if (has_slope) {
      seg.slope_rad = e["slope_rad"].get<double>();
    } else if (has_rise) {
      if (seg.terrain == Terrain::FlatWalk) fail("flat segments take no rise_m");
      const double rise = e["rise_m"].get<double>();
      if (!(rise > 0.0)) fail("rise_m must be positive");
      const double mag =
          std::min(std::atan2(rise, kDefaultStairRun), kMaxEffectiveSlope);
      seg.slope_rad = seg.terrain == Terrain::StairsDescend ? -mag : mag;
    } else if (seg.terrain != Terrain::FlatWalk) {
      fail("stair segments need slope_rad or rise_m");
    }
    try {
      seg.validate();
    } catch (const SchemaError& ex) {
      fail(ex.what());
    }
    sc.segments.push_back(seg);
  }
  sc.validate();
  return sc;
}

std::string serialize_scenario(const Scenario& scenario) {
  json arr = json::array();
  for (const auto& s : scenario.segments) {
    arr.push_back({{"terrain", terrain_name(s.terrain)},
                   {"duration_s", s.duration_s},
                   {"slope_rad", s.slope_rad},
                   {"speed_scale", s.speed_scale}});
  }
  return json{{"segments", arr}}.dump(2) + "\n";
}

size_t segment_index_at(const Scenario& scenario, double t) {
  const double total = scenario.total_duration();
  if (t < 0.0 || t > total + 1e-12)
    throw ConfigError("time outside the scenario");
  double acc = 0.0;
  for (size_t i = 0; i < scenario.segments.size(); ++i) {
    acc += scenario.segments[i].duration_s;
    if (t < acc) return i;
  }
  return scenario.segments.size() - 1;  // t == total_duration
}

const ScenarioSegment& terrain_at(const Scenario& scenario, double t) {
  return scenario.segments[segment_index_at(scenario, t)];
}

ScenarioTerrain::ScenarioTerrain(double initial_slope) {
  pieces_.push_back({0.0, 0.0, initial_slope});
}

void ScenarioTerrain::begin_segment(double slope_rad, double anchor_x) {
  pieces_.push_back({anchor_x, height(anchor_x), slope_rad});
}

double ScenarioTerrain::height(double x) const {
  const Piece* active = &pieces_.front();
  for (const auto& p : pieces_)
    if (p.x0 <= x) active = &p;
  return active->h0 + std::tan(active->slope) * (x - active->x0);
}

TerrainFn ScenarioTerrain::fn() const {
  return [this](double x) { return height(x); };
}

namespace {

double slope_amplitude_scale(const HumanModel& human, double slope) {
  return std::clamp(1.0 + human.slope_rom_gain * slope, 0.6, 1.5);
}

}  // namespace

ScenarioRun run_scenario(const Scenario& scenario,
                         const ScenarioRunConfig& config) {
  scenario.validate();
  config.walker.validate();
  config.exo.validate();

  ClosedLoop loop(config.walker, config.human, config.exo);
  loop.exo()->set_beta(config.initial_beta);

  AdaptiveLoop::Config acfg;
  acfg.window_span_s = config.window_span_s;
  acfg.sample_rate_hz = 1.0 / config.dt;
  acfg.slew_per_window = config.slew_per_window;
  acfg.filter_cutoff_hz = config.exo.filter_cutoff_hz;
  OptimizerParams opt = config.optimizer;
  opt.beta_min = config.exo.beta_min;
  opt.beta_max = config.exo.beta_max;
  AdaptiveLoop adaptive(acfg, opt, config.seed, config.initial_beta);
  adaptive.on_window = [&](const TrialRecord&, double next_beta) {
    loop.exo()->set_beta(next_beta);
  };

  // Segment boundaries in time.
  std::vector<double> ends;
  double acc = 0.0;
  for (const auto& s : scenario.segments) ends.push_back(acc += s.duration_s);

  ScenarioTerrain terrain(scenario.segments.front().slope_rad);
  size_t active = 0;
  auto apply_segment = [&](size_t i, double now) {
    const auto& seg = scenario.segments[i];
    loop.human().set_terrain_scaling(
        slope_amplitude_scale(config.human, seg.slope_rad), seg.speed_scale,
        seg.slope_rad, now);
  };
  // The first segment's scaling is in force from the start (no ramp).
  loop.human().set_terrain_scaling(
      slope_amplitude_scale(config.human, scenario.segments[0].slope_rad),
      scenario.segments[0].speed_scale, scenario.segments[0].slope_rad,
      -10.0 * HumanSurrogate::kScalingRampSeconds);

  SimControllers controllers = loop.controllers();
  controllers.on_sample = [&](const WalkerState& s, bool stance_is_leg_a) {
    while (active + 1 < scenario.segments.size() &&
           s.time >= ends[active] - 1e-12) {
      ++active;
      // Anchor the new grade beyond both feet so the ground never moves
      // under the stance foot or teleports around the airborne swing foot;
      // the new slope starts where the next step can land on it.
      const double swing_x =
          s.stance_foot_x +
          config.walker.leg_length * (std::sin(s.q2) - std::sin(s.q1));
      const double anchor =
          std::max(s.stance_foot_x, swing_x + 0.02 * config.walker.leg_length);
      terrain.begin_segment(scenario.segments[active].slope_rad, anchor);
      apply_segment(active, s.time);
    }
    const double leg_a = stance_is_leg_a ? s.q1 : s.q2;
    const double leg_b = stance_is_leg_a ? s.q2 : s.q1;
    adaptive.push(s.time, leg_a, leg_b);
  };

  SimOptions opts;
  opts.dt = config.dt;
  opts.duration = scenario.total_duration();

  ScenarioRun run;
  try {
    run.trajectory = simulate(surrogate_gait_seed(), config.walker,
                              controllers, terrain.fn(), opts);
  } catch (const SimulationError& e) {
    const auto& seg = scenario.segments[active];
    throw SimulationError(
        e.kind, std::string(e.what()) + " (segment " + std::to_string(active) +
                    ", " + terrain_name(seg.terrain) + ")");
  }
  run.trials = adaptive.trials();

  // Per-segment summaries.
  std::vector<GaitCycle> cycles;
  try {
    cycles = segment_cycles(run.trajectory);
  } catch (const AnalysisError&) {
  }
  double begin = 0.0;
  for (size_t i = 0; i < scenario.segments.size(); ++i) {
    SegmentSummary sum;
    sum.index = i;
    sum.terrain = scenario.segments[i].terrain;
    sum.t_begin = begin;
    sum.t_end = ends[i];

    for (const auto& t : run.trials) {
      const double mid = t.t_start + 0.5 * config.window_span_s;
      if (mid >= sum.t_begin && mid < sum.t_end) {
        sum.mean_beta += t.beta;
        sum.mean_rom += t.features.q_rom;
        ++sum.windows;
      }
    }
    if (sum.windows > 0) {
      sum.mean_beta /= sum.windows;
      sum.mean_rom /= sum.windows;
    }

    std::vector<PowerProfile> profiles;
    for (const auto& c : cycles)
      if (c.t_start >= sum.t_begin && c.t_end <= sum.t_end)
        profiles.push_back(power_profile(c));
    if (!profiles.empty()) {
      try {
        sum.neg_power_pct = negative_power_fraction(profiles);
      } catch (const AnalysisError&) {
      }
    }
    for (double e : run.trajectory.heel_strike_times)
      if (e >= sum.t_begin && e < sum.t_end) ++sum.heel_strikes;

    run.segments.push_back(sum);
    begin = ends[i];
  }
  return run;
}

Scenario paper_path_scenario() {
  // Equal total time per terrain class over the 90 s path; the per-segment
  // split approximates a building walk of flat bouts linking stair flights.
  Scenario sc;
  auto seg = [](Terrain t, double dur, double slope, double speed) {
    ScenarioSegment s;
    s.terrain = t;
    s.duration_s = dur;
    s.slope_rad = slope;
    s.speed_scale = speed;
    return s;
  };
  sc.segments = {
      seg(Terrain::FlatWalk, 10.0, 0.0, 1.0),
      seg(Terrain::StairsAscend, 15.0, 0.12, 0.80),
      seg(Terrain::FlatWalk, 10.0, 0.0, 1.0),
      seg(Terrain::StairsDescend, 15.0, -0.12, 0.80),
      seg(Terrain::FlatWalk, 10.0, 0.0, 1.0),
      seg(Terrain::StairsAscend, 15.0, 0.12, 0.80),
      seg(Terrain::StairsDescend, 15.0, -0.12, 0.80),
  };
  return sc;
}

}  // namespace exosim
