// gip: command-line front end (solve, check, oracle, export).
//
// Exit codes: 0 success / relation holds, 1 invalid input, 2 solver did not
// converge, 3 relation fails, 4 indeterminate at grid resolution.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "gip/gip.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNotConverged = 2;
constexpr int kFails = 3;
constexpr int kIndeterminate = 4;

json report_to_json(const gip::WeakAleksandrovReport& r) {
  json subsets = json::array();
  for (const auto& s : r.per_subset) subsets.push_back({{"subset", s.subset.members()}, {"slack", s.slack}});
  return json{{"holds", r.holds},
              {"verdict", gip::to_string(r.verdict)},
              {"alpha", r.alpha},
              {"uniform_alpha", r.uniform_alpha ? json(*r.uniform_alpha) : json(nullptr)},
              {"masses_balanced", r.masses_balanced},
              {"mass_gap", r.mass_gap},
              {"min_slack", r.subsets_checked ? json(r.min_slack) : json(nullptr)},
              {"epsilon", r.epsilon},
              {"heuristic", r.heuristic},
              {"subsets_checked", r.subsets_checked},
              {"per_subset_truncated", r.per_subset_truncated},
              {"per_subset", subsets}};
}

int verdict_code(gip::Verdict v) {
  switch (v) {
    case gip::Verdict::holds: return kOk;
    case gip::Verdict::fails: return kFails;
    case gip::Verdict::indeterminate: return kIndeterminate;
  }
  return kInvalid;
}

struct SolveArgs {
  std::string instance, out, trace_csv, step_rule = "polyak";
  double tol = 1e-3;
  std::size_t max_iters = 10000;
  std::uint64_t seed = 0;
  bool no_recovery = false;
  bool improve_ratio = false;
};

int cmd_solve(const SolveArgs& a) {
  const auto inst = gip::io::load_instance(a.instance);
  gip::SolverConfig cfg;
  cfg.tol = a.tol;
  cfg.max_iters = a.max_iters;
  cfg.seed = a.seed;
  cfg.step_rule = gip::step_rule_from_string(a.step_rule);
  cfg.rescale_recovery = !a.no_recovery;
  auto rep = gip::solve(inst.mu, inst.lambda, cfg);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  if (a.improve_ratio && rep.converged) {
    gip::SolverConfig loop_cfg = cfg;
    loop_cfg.uniform_alpha = rep.uniform_alpha_used;
    const auto loop = gip::ratio_improvement_loop(rep.final_P, inst.mu, inst.lambda, loop_cfg);
    for (const auto& w : loop.warnings) std::cerr << "warning: " << w << '\n';
    rep.final_P = loop.polytope;
    rep.residual_inf = loop.residual_inf;
    rep.cell_masses = gip::compute_partition(rep.final_P, inst.lambda).cell_masses;
    rep.phi = gip::phi(rep.final_P, inst.mu, inst.lambda).phi;
    rep.radii_ratio = loop.radii_ratio;
  }
  auto doc = gip::io::solution_to_json(rep, cfg, inst);
  if (!a.out.empty()) gip::io::write_json_file(a.out, doc);
  if (!a.trace_csv.empty()) {
    std::ofstream csv(a.trace_csv);
    if (!csv) throw gip::Error(a.trace_csv + ": cannot open file for writing");
    csv << gip::io::trace_csv(rep);
  }
  json summary{{"converged", rep.converged},
               {"iterations", rep.iterations},
               {"residual", rep.residual_inf},
               {"tolerance", cfg.tol * gip::total_mass(inst.mu)},
               {"phi", rep.phi},
               {"alphas", rep.final_P.alphas()},
               {"radii_ratio", rep.radii_ratio},
               {"uniform_alpha", doc["uniform_alpha"]},
               {"rescale_events", doc["rescale_events"].size()}};
  std::cout << summary.dump(2) << '\n';
  return rep.converged ? kOk : kNotConverged;
}

struct CheckArgs {
  std::string instance;
  std::optional<double> alpha;
  bool find_alpha = false;
  bool heuristic = false;
  std::uint64_t seed = 0;
};

int cmd_check(const CheckArgs& a) {
  const auto inst = gip::io::load_instance(a.instance);
  gip::WeakCheckOptions opts;
  opts.heuristic = a.heuristic;
  opts.seed = a.seed;
  const gip::WeakChecker checker(inst.mu.atoms(), inst.mu.weights(), inst.lambda, opts);
  gip::WeakAleksandrovReport rep;
  if (a.find_alpha) {
    rep = gip::find_uniform_alpha_report(checker);
  } else {
    rep = checker.report(*a.alpha);
  }
  std::cout << report_to_json(rep).dump(2) << '\n';
  if (a.find_alpha) return rep.uniform_alpha ? kOk : (rep.verdict == gip::Verdict::indeterminate ? kIndeterminate : kFails);
  return verdict_code(rep.verdict);
}

int cmd_oracle(const std::string& path, double halfwidth, std::size_t points) {
  const auto inst = gip::io::load_instance(path);
  if (inst.dimension != 2) throw gip::Error(path + ": the oracle command supports dimension 2 only");
  const auto rep = gip::solve(inst.mu, inst.lambda);
  const auto& p = rep.final_P;
  const auto arcs = gip::arc_cells(p);
  const auto masses = gip::arc_cell_masses(p, inst.lambda);
  json cells = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    json ivs = json::array();
    for (const auto& iv : arcs.cells[i]) ivs.push_back({iv.begin, iv.end});
    cells.push_back({{"atom", i}, {"arc_mass", masses[i]}, {"grid_mass", rep.cell_masses[i]}, {"intervals", ivs}});
  }
  json out{{"alphas", p.alphas()},
           {"cells", cells},
           {"phi_grid", rep.phi},
           {"phi_arc", gip::arc_phi(p, inst.mu, inst.lambda).phi},
           {"epsilon", rep.epsilon}};
  if (inst.mu.size() <= 6) {
    const auto bf = gip::brute_force_maximize(inst.mu, inst.lambda, halfwidth, points);
    out["brute_force"] = {{"t", bf.t}, {"F", bf.F}, {"resolution_bound", bf.resolution_bound},
                          {"evaluations", bf.evaluations}};
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_export(const std::string& path, const std::string& obj_path, const std::string& svg_path) {
  const auto sol = gip::io::load_solution(path, false);
  const auto& p = sol.polytope;
  if (!svg_path.empty()) {
    std::ofstream out(svg_path);
    if (!out) throw gip::Error(svg_path + ": cannot open file for writing");
    out << gip::exporter::svg(p);
  }
  if (!obj_path.empty()) {
    std::ofstream out(obj_path);
    if (!out) throw gip::Error(obj_path + ": cannot open file for writing");
    out << gip::exporter::obj(p);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss Image Problem solver for discrete mu and absolutely continuous lambda"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve an instance and write a solution file");
  solve->add_option("instance", solve_args.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--tol", solve_args.tol, "Residual tolerance as a fraction of total mass")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_args.seed, "Initialization seed (0: all alphas equal)");
  solve->add_option("--step-rule", solve_args.step_rule, "polyak, diminishing or fixed")
      ->check(CLI::IsMember({"polyak", "diminishing", "fixed"}));
  solve->add_option("--out", solve_args.out, "Solution JSON path");
  solve->add_option("--trace-csv", solve_args.trace_csv, "Per-iteration CSV path");
  solve->add_flag("--no-recovery", solve_args.no_recovery, "Disable partial-rescaling recovery");
  solve->add_flag("--improve-ratio", solve_args.improve_ratio, "Run the radius-ratio improvement loop");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Weak Aleksandrov check; prints a JSON report");
  check->add_option("instance", check_args.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  auto* alpha_opt = check->add_option("--alpha", check_args.alpha, "Angle to test, in radians");
  auto* find_opt = check->add_flag("--find-alpha", check_args.find_alpha, "Search the largest passing angle");
  alpha_opt->excludes(find_opt);
  check->add_flag("--heuristic", check_args.heuristic, "Sampled subsets instead of exhaustive enumeration");
  check->add_option("--seed", check_args.seed, "Seed for heuristic sampling");

  std::string oracle_path;
  double halfwidth = 1.0;
  std::size_t points = 9;
  auto* oracle = app.add_subcommand("oracle", "Arc-exact cells and a brute-force maximizer (dimension 2)");
  oracle->add_option("instance", oracle_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--halfwidth", halfwidth, "Lattice half-width in log alpha");
  oracle->add_option("--points", points, "Lattice points per dimension");

  std::string export_path, obj_path, svg_path;
  auto* exp = app.add_subcommand("export", "Write static SVG (2D) or OBJ (3D) artifacts of a solution");
  exp->add_option("solution", export_path, "Solution JSON")->required()->check(CLI::ExistingFile);
  auto* obj_opt = exp->add_option("--obj", obj_path, "OBJ output path");
  auto* svg_opt = exp->add_option("--svg", svg_path, "SVG output path");
  obj_opt->excludes(svg_opt);
  exp->callback([&] {
    if (obj_path.empty() && svg_path.empty()) throw CLI::RequiredError("one of --obj or --svg");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (check->parsed() && !check_args.find_alpha && !check_args.alpha) {
    std::cerr << "error: check needs --alpha or --find-alpha\n";
    return kInvalid;
  }
  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (check->parsed()) return cmd_check(check_args);
    if (oracle->parsed()) return cmd_oracle(oracle_path, halfwidth, points);
    if (exp->parsed()) return cmd_export(export_path, obj_path, svg_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
