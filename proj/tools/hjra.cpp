// Command-line front end: solve pipelines, outcome classification, batch
// simulation, slice export and oracle diffing.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hjra/parallel.hpp"
#include "hjra/pipeline.hpp"

namespace {

std::vector<int> parse_counts(const std::string& text) {
  std::vector<int> counts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find('x', pos);
    if (next == std::string::npos) next = text.size();
    counts.push_back(std::stoi(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return counts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-based reach-avoid game engine"};
  app.require_subcommand(1);

  hjra::PipelineManifest manifest;
  std::vector<std::string> grid_args;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--scenario", manifest.scenario_path, "scenario JSON path")
        ->required();
    auto* out = cmd->add_option("--out", manifest.out_dir, "artifact directory");
    if (needs_out) out->required();
    cmd->add_option("--grid", grid_args,
                    "per-solve grid counts, e.g. horizontal_game=45x25x7x7x45x25");
    cmd->add_option("--horizon", manifest.horizon, "solve horizon override (s)");
    cmd->add_option("--cfl", manifest.cfl, "CFL factor in (0,1]");
    cmd->add_option("--tol", manifest.tolerance,
                    "convergence tolerance (sup-change per second)");
    cmd->add_option("--seed", manifest.seed, "seed recorded in outputs");
    cmd->add_flag("--paper-scale", manifest.paper_scale,
                  "use the full-scale grids for the horizontal solves");
    cmd->add_flag("--verbose", manifest.verbose, "structured solver progress");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  auto* solve = app.add_subcommand("solve", "run one value-function solve");
  std::string kind_name;
  solve->add_option("kind", kind_name,
                    "vertical-tracking | horizontal-tracking | vertical-game | "
                    "horizontal-game | attacker-reach")
      ->required();
  add_common(solve, true);

  auto* classify = app.add_subcommand("classify", "batch outcome classification");
  std::string states_path, results_path = "classify_results.json";
  classify->add_option("--states", states_path, "JSON array of 9D states")
      ->required();
  classify->add_option("--results", results_path, "output JSON path");
  classify->add_flag("--strict", manifest.strict,
                     "exit nonzero when any verdict is Indeterminate");
  add_common(classify, true);

  auto* simulate = app.add_subcommand("simulate", "closed-loop batch simulation");
  std::string defender_sel = "reach-track", attacker_sel = "adversarial";
  double duration = 40.0;
  simulate->add_option("--states", states_path, "JSON array of 9D states")
      ->required();
  simulate->add_option("--defender", defender_sel, "reach-track | zero");
  simulate->add_option("--attacker", attacker_sel, "adversarial | goal | zero");
  simulate->add_option("--duration", duration, "max simulated seconds");
  add_common(simulate, true);

  auto* slice = app.add_subcommand("export-slice", "dump a 2D slice as CSV");
  std::string field_path, csv_path;
  std::vector<std::string> fix_args;
  slice->add_option("--field", field_path, "HJVF field path")->required();
  slice->add_option("--fix", fix_args, "axis=value assignments (snapped)");
  slice->add_option("--csv", csv_path, "output CSV path")->required();

  auto* diff = app.add_subcommand("oracle-diff", "compare two HJVF fields");
  std::string path_a, path_b;
  diff->add_option("a", path_a, "first field")->required();
  diff->add_option("b", path_b, "second field")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) hjra::set_num_threads(threads);
    for (const auto& g : grid_args) {
      const auto eq = g.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--grid needs name=AxBx...");
      manifest.grid_counts[g.substr(0, eq)] = parse_counts(g.substr(eq + 1));
    }

    if (solve->parsed())
      return hjra::cmd_solve(hjra::parse_solve_kind(kind_name), manifest);
    if (classify->parsed())
      return hjra::cmd_classify(manifest, states_path, results_path);
    if (simulate->parsed())
      return hjra::cmd_simulate(manifest, states_path, defender_sel,
                                attacker_sel, duration);
    if (slice->parsed()) {
      std::vector<std::pair<int, double>> fixed;
      for (const auto& f : fix_args) {
        const auto eq = f.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--fix needs axis=value");
        fixed.emplace_back(std::stoi(f.substr(0, eq)),
                           std::stod(f.substr(eq + 1)));
      }
      return hjra::cmd_export_slice(field_path, fixed, csv_path);
    }
    if (diff->parsed()) return hjra::cmd_oracle_diff(path_a, path_b);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
