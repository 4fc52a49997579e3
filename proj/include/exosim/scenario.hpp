#pragma once

#include <string>
#include <vector>

#include "exosim/adaptive.hpp"
#include "exosim/controller.hpp"
#include "exosim/errors.hpp"
#include "exosim/human.hpp"
#include "exosim/walker.hpp"

namespace exosim {

enum class Terrain { FlatWalk, StairsAscend, StairsDescend };

std::string terrain_name(Terrain t);
Terrain terrain_from_name(const std::string& name);

constexpr double kMaxEffectiveSlope = 0.35;  // rad
constexpr double kDefaultStairRun = 0.29;    // m, tread depth for rise->slope

// One terrain bout. Slopes follow the scenario convention: positive climbs
// in the walking direction (ascend), negative descends. Flat bouts are zero.
struct ScenarioSegment {
  Terrain terrain = Terrain::FlatWalk;
  double duration_s = 0.0;
  double slope_rad = 0.0;
  double speed_scale = 1.0;

  void validate() const;
};

struct Scenario {
  std::vector<ScenarioSegment> segments;

  double total_duration() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration_s;
    return d;
  }
  void validate() const;
};

/// Parses the scenario config (JSON; either a segment array or an object
/// with a "segments" key). Throws SchemaError with the offending index.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

/// Active segment at time t (half-open intervals; an internal boundary
/// belongs to the later segment, t == total_duration to the last).
/// Throws ConfigError for t outside [0, total_duration].
const ScenarioSegment& terrain_at(const Scenario& scenario, double t);
size_t segment_index_at(const Scenario& scenario, double t);

/// Piecewise-linear ground built progressively as segments begin, anchored
/// at the stance foot so the height under the support never jumps.
class ScenarioTerrain {
 public:
  explicit ScenarioTerrain(double initial_slope = 0.0);

  /// Starts a new piece of ground with the given slope from anchor_x on.
  void begin_segment(double slope_rad, double anchor_x);

  double height(double x) const;
  TerrainFn fn() const;  // snapshot-free view bound to this object

 private:
  struct Piece {
    double x0;
    double h0;
    double slope;
  };
  std::vector<Piece> pieces_;
};

struct SegmentSummary {
  size_t index = 0;
  Terrain terrain = Terrain::FlatWalk;
  double t_begin = 0.0;
  double t_end = 0.0;
  double mean_beta = 0.0;
  double mean_rom = 0.0;          // rad, from the optimizer windows
  double neg_power_pct = -1.0;    // negative when no cycles completed inside
  int windows = 0;
  int heel_strikes = 0;
};

struct ScenarioRunConfig {
  WalkerParams walker;
  HumanModel human;
  ExoConfig exo;
  OptimizerParams optimizer;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  double initial_beta = 1.75;
  double slew_per_window = 0.5;
  double window_span_s = 2.0;
};

struct ScenarioRun {
  HybridTrajectory trajectory;
  std::vector<TrialRecord> trials;
  std::vector<SegmentSummary> segments;
};

/// Simulates the scenario with the windowed gain adaptation active.
/// Simulation failures carry the segment context. Deterministic under a
/// fixed seed.
ScenarioRun run_scenario(const Scenario& scenario,
                         const ScenarioRunConfig& config);

/// The bundled multi-terrain path: equal time precision per terrain class,
/// 90 s total.
Scenario paper_path_scenario();

}  // namespace exosim
