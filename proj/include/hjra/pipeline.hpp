#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjra/analysis.hpp"
#include "hjra/geometry.hpp"
#include "hjra/hji.hpp"
#include "hjra/sim.hpp"

namespace hjra {

struct PipelineManifest {
  std::string scenario_path;
  std::string out_dir;
  std::map<std::string, std::vector<int>> grid_counts;  // per-solve overrides
  double horizon = 0.0;  // 0 = per-solve default
  double cfl = 0.8;
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
  bool paper_scale = false;
  bool strict = false;
  bool verbose = false;
};

enum class SolveKind {
  VerticalTracking,
  HorizontalTracking,
  VerticalGame,
  HorizontalGame,
  AttackerReach
};

SolveKind parse_solve_kind(const std::string& name);
const char* solve_kind_name(SolveKind kind);

// Grid for a solve: scenario "domains" entry when present, otherwise the
// built-in desk-scale default for the paper geometry; counts may be replaced
// by --paper-scale or explicit overrides.
GridSpec resolve_grid(const Scenario& scenario, SolveKind kind,
                      const PipelineManifest& manifest);

double default_horizon(SolveKind kind);

// Runs one solve (loading dependency artifacts from out_dir for the game
// solves), writes the HJVF field, metadata sidecar and any crossing-time
// field into out_dir, and prints a convergence summary.
int cmd_solve(SolveKind kind, const PipelineManifest& manifest);

// Loads the full artifact set from out_dir, verifying every file's scenario
// hash; throws on a stale or missing artifact.
GameArtifacts load_artifacts(const Scenario& scenario,
                             const std::string& out_dir);

// In-memory pipeline: per solve, reuse a fresh cached artifact from out_dir
// when its hash matches, otherwise solve and (if out_dir non-empty) persist.
GameArtifacts solve_all(const Scenario& scenario,
                        const PipelineManifest& manifest);

int cmd_classify(const PipelineManifest& manifest,
                 const std::string& states_path, const std::string& out_path);

int cmd_simulate(const PipelineManifest& manifest,
                 const std::string& states_path,
                 const std::string& defender_sel,
                 const std::string& attacker_sel, double max_duration);

int cmd_export_slice(const std::string& field_path,
                     const std::vector<std::pair<int, double>>& fixed,
                     const std::string& out_csv);

int cmd_oracle_diff(const std::string& path_a, const std::string& path_b);

std::vector<JointState9> read_states_json(const std::string& path);

}  // namespace hjra
