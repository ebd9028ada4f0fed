// Command-line front end for the ctables library.
//
// Exit codes: 0 success, 2 invalid input, 3 not converged, 4 budget exceeded.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctables/error.hpp"
#include "ctables/fiber.hpp"
#include "ctables/io.hpp"
#include "ctables/moves.hpp"
#include "ctables/phase.hpp"
#include "ctables/sampler.hpp"
#include "ctables/tilt.hpp"

using namespace ctables;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string format = "csv";
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidInput, "cannot write " + g.out);
  file << text;
}

void emit_manifest(const GlobalOptions& g, const std::string& command, const json& config,
                   std::vector<std::uint64_t> seeds = {}) {
  if (g.out.empty()) return;
  RunManifest m{command, config, std::move(seeds), kToolVersion, utc_timestamp()};
  std::ofstream file(g.out + ".manifest.json");
  file << to_json(m).dump(2) << '\n';
}

FiberLaw parse_law(const std::string& s) {
  if (s == "uniform") return FiberLaw::Uniform;
  if (s == "hypergeom" || s == "hypergeometric") return FiberLaw::Hypergeometric;
  throw Error(ErrorKind::InvalidInput, "unknown target '" + s + "'");
}

const char* law_name(FiberLaw law) {
  return law == FiberLaw::Uniform ? "uniform" : "hypergeometric";
}

json tilting_json(const Tilting& t) {
  json j = json::array();
  for (const auto& axis : t.axes) j.push_back(axis);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contingency-table fibers, fiber samplers and geometric-tilting MLE"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads for grid scans")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Scan output format")->check(CLI::IsMember({"csv", "json"}));

  // moves
  auto* moves_cmd = app.add_subcommand("moves", "Count (and list) Markov basis moves");
  std::vector<std::size_t> move_dims;
  bool list_moves = false;
  moves_cmd->add_option("--dims", move_dims, "n1,n2[,n3]")->required()->delimiter(',');
  moves_cmd->add_flag("--list", list_moves, "Print one move per line");

  // enumerate
  auto* enum_cmd = app.add_subcommand("enumerate", "Enumerate a fiber exactly");
  std::string spec_path = "-";
  std::string weights_kind;
  std::size_t limit = SIZE_MAX;
  std::size_t budget = kDefaultFiberBudget;
  enum_cmd->add_option("--spec,--input", spec_path, "Margin spec JSON (default stdin)");
  enum_cmd->add_option("--weights", weights_kind)->check(CLI::IsMember({"uniform", "hypergeometric"}));
  enum_cmd->add_option("--limit", limit, "Emit at most K tables");
  enum_cmd->add_option("--budget", budget, "Abort when the fiber exceeds this many tables");

  // sample / tv-check
  std::string start = "auto";
  std::string target = "uniform";
  std::uint64_t steps = 10000, burn_in = 0, thin = 1;
  bool keep_samples = false;
  auto add_chain_options = [&](CLI::App* cmd) {
    cmd->add_option("--spec,--input", spec_path, "Margin spec JSON (default stdin)");
    cmd->add_option("--target", target)->check(CLI::IsMember({"uniform", "hypergeom", "hypergeometric"}));
    cmd->add_option("--steps", steps);
    cmd->add_option("--burnin", burn_in);
    cmd->add_option("--thin", thin);
  };
  auto* sample_cmd = app.add_subcommand("sample", "Run a Metropolis-Hastings fiber walk");
  add_chain_options(sample_cmd);
  sample_cmd->add_option("--start", start, "auto (north-west corner) or a table JSON file");
  sample_cmd->add_flag("--keep-samples", keep_samples, "Include every retained table");
  auto* tv_cmd = app.add_subcommand("tv-check", "Sample, enumerate, and print the TV distance");
  add_chain_options(tv_cmd);
  tv_cmd->add_option("--budget", budget);

  // solve-mle
  auto* solve_cmd = app.add_subcommand("solve-mle", "Geometric-tilting MLE for plane-sum margins");
  SolveOptions solve_opts;
  solve_cmd->add_option("--spec,--input", spec_path, "Margin spec JSON (default stdin)");
  solve_cmd->add_option("--tol", solve_opts.tol);
  solve_cmd->add_option("--max-iter", solve_opts.max_iter);

  // barvinok-scan
  auto* scan3_cmd = app.add_subcommand("barvinok-scan", "Scan the 3-way Barvinok system over (n, B)");
  Scan3wayConfig scan3;
  scan3_cmd->add_option("--B", scan3.B)->required()->delimiter(',');
  scan3_cmd->add_option("--n", scan3.n)->required()->delimiter(',');
  scan3_cmd->add_option("--tol", scan3.tol);

  // scan-2way
  auto* scan2_cmd = app.add_subcommand("scan-2way", "Scan the 2-way typical table across B");
  Scan2wayConfig scan2;
  bool bezel_light = false;
  scan2_cmd->add_option("--C", scan2.C)->required();
  scan2_cmd->add_option("--B", scan2.B)->required()->delimiter(',');
  scan2_cmd->add_option("--n", scan2.n)->required()->delimiter(',');
  scan2_cmd->add_option("--delta", scan2.delta);
  scan2_cmd->add_flag("--bezel-heavy", scan2.bezel_heavy, "Heavy margins on the bezel (default)");
  scan2_cmd->add_flag("--bezel-light", bezel_light, "Heavy margins on the bulk instead");
  scan2_cmd->add_option("--tol", scan2.tol);

  // fiber-experiment
  auto* exp_cmd = app.add_subcommand("fiber-experiment", "Both samplers against the exact fiber laws");
  FiberExperimentConfig experiment;
  exp_cmd->add_option("--spec,--input", spec_path, "Margin spec JSON (default stdin)");
  exp_cmd->add_option("--steps", experiment.steps);
  exp_cmd->add_option("--burnin", experiment.burn_in);
  exp_cmd->add_option("--thin", experiment.thin);
  exp_cmd->add_option("--budget", experiment.budget);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Regenerate a scan from its manifest");
  std::string manifest_path;
  replay_cmd->add_option("--manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*moves_cmd) {
      check_dims(move_dims);
      const auto set = MoveSet::for_dims(move_dims);
      std::ostringstream out;
      out << set.count() << '\n';
      if (list_moves)
        for (const auto& m : set.moves()) out << format_move(move_dims, m) << '\n';
      emit(g, out.str());
    } else if (*enum_cmd) {
      const auto spec = margin_spec_from_json(read_json(spec_path));
      const auto fiber = enumerate_fiber(spec, budget);
      json j{{"count", fiber.size()}};
      json tables = json::array();
      for (std::size_t i = 0; i < fiber.size() && i < limit; ++i) tables.push_back(to_json(fiber.tables[i]));
      j["tables"] = tables;
      if (!weights_kind.empty())
        j["weights"] = fiber_weights(fiber, parse_law(weights_kind)).weights;
      emit(g, j.dump(2) + "\n");
    } else if (*sample_cmd) {
      const auto spec = margin_spec_from_json(read_json(spec_path));
      const Table start_table =
          start == "auto" ? northwest_corner_table(spec) : table_from_json(read_json(start));
      if (!has_margins(start_table, spec))
        throw Error(ErrorKind::InvalidInput, "start table does not have the spec's margins");
      ChainConfig cc{start_table, parse_law(target), steps, burn_in, thin, g.seed, keep_samples};
      const auto stats = run_chain(cc, MoveSet::for_dims(spec.dims()));
      json j{{"target", law_name(cc.target)},
             {"steps", steps},
             {"burn_in", burn_in},
             {"thin", thin},
             {"seed", g.seed},
             {"acceptance_rate", stats.acceptance_rate},
             {"kept", stats.kept},
             {"corner_trace", stats.corner_trace}};
      if (keep_samples) {
        json samples = json::array();
        for (const auto& t : stats.samples) samples.push_back(to_json(t));
        j["samples"] = samples;
      }
      emit(g, j.dump(2) + "\n");
      emit_manifest(g, "sample",
                    {{"spec", to_json(spec)}, {"start", to_json(start_table)}, {"target", law_name(cc.target)},
                     {"steps", steps}, {"burn_in", burn_in}, {"thin", thin}},
                    {g.seed});
    } else if (*tv_cmd) {
      const auto spec = margin_spec_from_json(read_json(spec_path));
      const auto fiber = enumerate_fiber(spec, budget);
      ChainConfig cc{northwest_corner_table(spec), parse_law(target), steps, burn_in, thin, g.seed, true};
      const auto stats = run_chain(cc, MoveSet::for_dims(spec.dims()));
      const double tv = tv_distance(empirical_frequencies(fiber, stats.samples), fiber_weights(fiber, cc.target));
      emit(g, format_real(tv) + "\n");
    } else if (*solve_cmd) {
      const auto spec = margin_spec_from_json(read_json(spec_path));
      const auto report = solve_mle(spec, solve_opts);
      json j{{"tilting", tilting_json(report.tilting)},
             {"expected", to_json(report.expected)},
             {"residual", report.residual_inf},
             {"log_likelihood", report.log_likelihood},
             {"iterations", report.iterations},
             {"converged", report.converged}};
      emit(g, j.dump(2) + "\n");
      if (!report.converged) {
        std::cerr << "NotConverged: residual " << report.residual_inf << '\n';
        return exit_code(ErrorKind::NotConverged);
      }
    } else if (*scan3_cmd) {
      scan3.threads = g.threads;
      const auto rows = scan_3way(scan3);
      if (g.format == "json") {
        json j = json::array();
        for (const auto& r : rows) j.push_back(to_json(r));
        emit(g, j.dump(2) + "\n");
      } else {
        emit(g, scan_3way_csv(rows));
      }
      emit_manifest(g, "barvinok-scan", to_json(scan3));
      for (const auto& r : rows)
        if (!r.converged) return exit_code(ErrorKind::NotConverged);
    } else if (*scan2_cmd) {
      scan2.threads = g.threads;
      if (bezel_light) scan2.bezel_heavy = false;
      const auto rows = scan_2way(scan2);
      emit(g, scan_2way_csv(rows));
      emit_manifest(g, "scan-2way", to_json(scan2));
      for (const auto& r : rows)
        if (!r.converged) return exit_code(ErrorKind::NotConverged);
    } else if (*exp_cmd) {
      experiment.spec = margin_spec_from_json(read_json(spec_path));
      experiment.seed = g.seed;
      emit(g, fiber_experiment(experiment).dump(2) + "\n");
    } else if (*replay_cmd) {
      emit(g, replay_manifest(manifest_from_json(read_json(manifest_path))));
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
