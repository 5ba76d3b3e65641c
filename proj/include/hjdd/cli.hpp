#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hjdd/analysis.hpp"
#include "hjdd/decomposition.hpp"
#include "hjdd/error.hpp"
#include "hjdd/io.hpp"
#include "hjdd/isa.hpp"
#include "hjdd/parallel.hpp"
#include "hjdd/problems.hpp"
#include "hjdd/solver.hpp"
#include "hjdd/tables.hpp"

namespace hjdd {

/// Everything a subcommand needs, filled by the parser.
struct RunConfig {
  std::string command;
  std::string problem = "eikonal_kruzkov";
  BuiltinParams params{};
  int nx = 0;
  int coarse = 20;
  int fine = 100;
  int parts = 4;
  std::string scheme;  ///< empty: the problem's natural scheme
  std::string penalty = "constant";
  RAParams ra{};
  double tol = 1e-6;
  std::string h_mode = "dx";
  int workers = 1;
  int samples_a = 0;
  int samples_b = 0;
  int h2_combos = 16;
  std::optional<std::uint64_t> seed;
  std::string out_field;
  std::string out_masks;
  std::string report;
  std::string table = "t3";
  int repetitions = 1;
  std::string reference = "van_der_pol_400.txt";
  std::string out;
};

namespace cli_detail {

/// `key=value` lines become `--key value` arguments placed ahead of the
/// command-line ones, so that flags given explicitly win.
inline std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path + ":" + std::to_string(n) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty() || key == "config")
      throw InvalidArgument(path + ":" + std::to_string(n) + ": bad key");
    out.push_back("--" + key);
    out.push_back(trim(line.substr(eq + 1)));
  }
  return out;
}

/// Splices the contents of every `--config FILE` in after the subcommand name.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> injected;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw InvalidArgument("--config needs a file name");
      auto more = config_arguments(args[++i]);
      injected.insert(injected.end(), more.begin(), more.end());
    } else if (a.rfind("--config=", 0) == 0) {
      auto more = config_arguments(a.substr(9));
      injected.insert(injected.end(), more.begin(), more.end());
    } else {
      rest.push_back(a);
    }
  }
  if (injected.empty()) return rest;
  // Subcommand first, then the config flags, then the explicit flags.
  std::vector<std::string> out;
  std::size_t i = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) out.push_back(rest[i++]);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(i), rest.end());
  return out;
}

inline StepMode parse_step_mode(const std::string& s) {
  if (s == "dx") return StepMode::Dx;
  if (s == "dx23") return StepMode::Dx23;
  throw InvalidArgument("unknown h mode '" + s + "' (dx or dx23)");
}

struct Prepared {
  BuiltinName name;
  ProblemDef problem;
  PartitionScheme scheme;
  PenaltyScheme penalty;
  StepMode step_mode;
  ControlGrid controls;
};

inline Prepared prepare(const RunConfig& c) {
  Prepared p{parse_builtin(c.problem), {}, {}, PenaltyScheme::Constant, StepMode::Dx, {}};
  if (!(c.params.delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(c.params.rho > 0.0)) throw InvalidArgument("rho must be positive");
  p.problem = make_builtin(p.name, c.params);
  p.scheme = c.scheme.empty() ? natural_scheme(p.problem.geometry) : parse_partition_scheme(c.scheme);
  p.penalty = parse_penalty_scheme(c.penalty);
  p.step_mode = parse_step_mode(c.h_mode);
  if (!(c.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (c.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (c.samples_a < 0 || c.samples_b < 0) throw InvalidArgument("sample counts must be >= 1");
  p.controls = controls_for(p.problem, c.samples_a, c.samples_b);
  return p;
}

/// Rejects partition / penalty combinations on a small lattice before any solve.
inline void check_partition(const Prepared& p, const RunConfig& c, int cells) {
  c.ra.validate();
  const Grid probe = build_grid(GridSpec::unit_square(cells), p.problem.geometry);
  const BoundaryPartition part = partition_boundary(probe, p.problem.geometry, c.parts, p.scheme);
  build_auxiliary_cost(p.problem, part, 0, c.ra.gamma, p.penalty);
}

inline void write_masks(const std::string& dir, const Grid& grid,
                        const std::vector<SubdomainMask>& masks) {
  std::filesystem::create_directories(dir);
  for (const auto& m : masks)
    export_mask_pgm(m, grid, (std::filesystem::path(dir) / ("mask_" + std::to_string(m.part) + ".pgm")).string());
  std::ofstream os(std::filesystem::path(dir) / "masks.txt");
  if (!os) throw Error("cannot write mask list in '" + dir + "'");
  write_mask_list(os, masks);
}

inline std::ofstream open_out(const std::string& path) {
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

inline void write_field_file(const std::string& path, const GridSpec& spec,
                             std::span<const double> field) {
  auto os = open_out(path);
  write_field(os, spec, field);
  if (!os) throw Error("write to '" + path + "' failed");
}

inline std::string num(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(6);
  os << v;
  return os.str();
}

inline int run_solve(const RunConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  const int cells = c.nx > 0 ? c.nx : 100;
  const Grid grid = build_grid(GridSpec::unit_square(cells), p.problem.geometry);
  SolveParams sp;
  sp.h = step_size(grid, p.step_mode);
  sp.tol = c.tol;
  sp.workers = c.workers;
  const SolveResult r = solve(p.problem, grid, p.controls, sp);
  if (!c.out_field.empty()) write_field_file(c.out_field, grid.spec(), r.field);
  const std::string row = to_csv_row(r.report, p.problem.name, cells);
  out << row << '\n';
  if (!c.report.empty()) {
    auto os = open_out(c.report);
    os << "problem,nx,iters,residual,seconds\n" << row << '\n';
  }
  if (!r.report.converged) throw NotConverged("solve did not converge");
  return 0;
}

inline int run_decompose(const RunConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  const int cells = c.nx > 0 ? c.nx : 20;
  check_partition(p, c, cells);
  const Grid grid = build_grid(GridSpec::unit_square(cells), p.problem.geometry);
  const BoundaryPartition part = partition_boundary(grid, p.problem.geometry, c.parts, p.scheme);
  SolveParams sp;
  sp.h = step_size(grid, p.step_mode);
  sp.tol = c.tol;
  const RAResult ra = run_ra(p.problem, grid, p.controls, sp, part, c.ra, p.penalty, c.workers);
  if (!c.out_masks.empty()) write_masks(c.out_masks, grid, ra.masks);
  if (!c.out_field.empty()) write_field_file(c.out_field, grid.spec(), ra.combined.field);
  std::vector<ValueField> fields;
  for (const auto& a : ra.auxiliaries) fields.push_back(a.field);
  const double sentinel = default_sentinel(p.problem, grid, p.controls, sp.h);
  const H2Report h2 = check_h2(p.problem, p.controls, fields, ra.combined.field, ra.combined.active,
                               grid, c.h2_combos, 10.0 * grid.spacing(),
                               finite_value_bound(p.problem, grid, p.controls, sp.h, sentinel));
  std::ostringstream table;
  table << "part,iters,seconds,fraction\n";
  for (std::size_t i = 0; i < ra.masks.size(); ++i)
    table << i << ',' << ra.auxiliaries[i].report.iterations << ','
          << num(ra.auxiliaries[i].report.wall_time) << ',' << num(area_fraction(ra.masks[i], grid))
          << '\n';
  out << table.str();
  out << "threshold " << num(ra.threshold) << ", overlap nodes " << ra.combined.active.overlap().size()
      << ", h2 " << (h2.passed ? "pass" : "fail") << " (" << h2.nodes_checked << " checked, "
      << h2.nodes_skipped << " skipped, max residual "
      << (h2.nodes_checked ? num(h2.max_residual) : std::string("n/a")) << ")\n";
  if (!c.report.empty()) open_out(c.report) << table.str();
  return 0;
}

inline int run_isa_command(const RunConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  IsaConfig cfg;
  cfg.coarse = GridSpec::unit_square(c.coarse);
  cfg.fine = GridSpec::unit_square(c.fine);
  cfg.scheme = p.scheme;
  cfg.parts = c.parts;
  cfg.ra = c.ra;
  cfg.penalty = p.penalty;
  cfg.step_mode = p.step_mode;
  cfg.coarse_solve.tol = c.tol;
  cfg.fine_solve.tol = c.tol;
  cfg.samples_a = c.samples_a;
  cfg.samples_b = c.samples_b;
  cfg.workers = c.workers;
  if (c.coarse < 1 || c.fine < 1) throw InvalidArgument("grid sizes must be >= 1 cell");
  cfg.validate();
  check_partition(p, c, c.coarse);
  const IsaResult r = run_isa(p.problem, cfg);
  if (!c.out_field.empty()) write_field_file(c.out_field, r.fine_grid.spec(), r.field);
  if (!c.out_masks.empty()) write_masks(c.out_masks, r.fine_grid, r.fine_masks);
  std::ostringstream rep;
  rep << "stage,part,iters,seconds\n";
  for (std::size_t i = 0; i < r.coarse_reports.size(); ++i)
    rep << "coarse," << i << ',' << r.coarse_reports[i].iterations << ','
        << num(r.coarse_reports[i].wall_time) << '\n';
  rep << "coarse-total,,," << num(r.seconds.coarse) << '\n';
  rep << "projection,,," << num(r.seconds.projection) << '\n';
  for (std::size_t i = 0; i < r.fine_reports.size(); ++i)
    rep << "fine," << i << ',' << r.fine_reports[i].iterations << ','
        << num(r.fine_reports[i].wall_time) << '\n';
  rep << "fine-total,,," << num(r.seconds.fine) << '\n';
  rep << "assembly,,," << num(r.seconds.assembly) << '\n';
  rep << "total,,," << num(r.seconds.total()) << '\n';
  if (!c.report.empty()) open_out(c.report) << rep.str();
  out << rep.str();
  out << "max fraction " << num(max_area_fraction(r.fine_masks, r.fine_grid)) << ", overlap nodes "
      << r.overlap_nodes << '\n';
  return 0;
}

inline int run_bench(const RunConfig& c, std::ostream& out) {
  if (c.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (c.repetitions < 1) throw InvalidArgument("reps must be >= 1");
  std::vector<std::string> ids;
  if (c.table == "all") {
    ids = table_ids();
  } else {
    table_scenarios(c.table, {});  // rejects unknown ids up front
    ids = {c.table};
  }
  TableOptions opt;
  opt.workers = c.workers;
  opt.repetitions = c.repetitions;
  opt.reference_path = c.reference;
  std::ofstream file;
  if (!c.out.empty()) file = open_out(c.out);
  std::ostream& sink = c.out.empty() ? out : file;
  sink << kBenchHeader << '\n';
  for (const auto& id : ids)
    run_table(id, opt, [&](const BenchRow& row) { sink << to_csv(row) << '\n' << std::flush; });
  return 0;
}

}  // namespace cli_detail

/// Parses `args` (without the program name), runs the subcommand and returns
/// the exit status. Any failure is reported as one line on `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  c.workers = default_workers();
  CLI::App app{"Semi-Lagrangian Hamilton-Jacobi solver with independent sub-domain decomposition",
               "hjdd"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_unused;

  auto common = [&](CLI::App* s) {
    s->add_option("--problem", c.problem,
                  "eikonal_square | eikonal_kruzkov | strip_flat | van_der_pol | pursuit_evasion")
        ->capture_default_str();
    s->add_option("--delta", c.params.delta, "strip_flat discount")->capture_default_str();
    s->add_option("--rho", c.params.rho, "radius of ball targets")->capture_default_str();
    s->add_option("--tol", c.tol, "fixed-point tolerance")->capture_default_str();
    s->add_option("--h-mode", c.h_mode, "time step: dx or dx23")->capture_default_str();
    s->add_option("--workers", c.workers, "threads (default HJP_WORKERS or 1)");
    s->add_option("--samples-a", c.samples_a, "control samples for the player (0 = default)");
    s->add_option("--samples-b", c.samples_b, "control samples for the opponent (0 = default)");
    s->add_option("--seed", c.seed, "reserved; every algorithm is deterministic");
    s->add_option("--config", config_unused, "key=value file, overridden by flags");
    s->add_option("--out-field", c.out_field, "write the value field here");
    s->add_option("--report", c.report, "write a CSV report here");
  };
  auto ra_flags = [&](CLI::App* s) {
    s->add_option("--parts", c.parts, "number of boundary pieces: 1, 2, 4 or 8")->capture_default_str();
    s->add_option("--scheme", c.scheme, "square-edges | ball-sectors | strip-sides");
    s->add_option("--penalty", c.penalty, "constant | ramp | shifted-box")->capture_default_str();
    s->add_option("--C", c.ra.C, "threshold constant on the dx^q term")->capture_default_str();
    s->add_option("--M", c.ra.M, "threshold constant on the dx term")->capture_default_str();
    s->add_option("--q", c.ra.q, "threshold exponent")->capture_default_str();
    s->add_option("--gamma", c.ra.gamma, "penalty added off the own boundary piece")->capture_default_str();
    s->add_option("--tie-tol", c.ra.tie_tol, "equality tolerance for active indices")->capture_default_str();
    s->add_option("--out-masks", c.out_masks, "directory for PGM masks and masks.txt");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "direct solve on one grid");
  common(solve_cmd);
  solve_cmd->add_option("--nx", c.nx, "cells per axis (default 100)");

  CLI::App* dec = app.add_subcommand("decompose", "reconstruction algorithm on one grid");
  common(dec);
  ra_flags(dec);
  dec->add_option("--nx", c.nx, "cells per axis (default 20)");
  dec->add_option("--h2-combos", c.h2_combos, "random convex weights per overlap node")
      ->capture_default_str();

  CLI::App* isa = app.add_subcommand("isa", "independent-sets algorithm");
  common(isa);
  ra_flags(isa);
  isa->add_option("--coarse", c.coarse, "coarse cells per axis")->capture_default_str();
  isa->add_option("--fine", c.fine, "fine cells per axis")->capture_default_str();

  CLI::App* bench = app.add_subcommand("bench", "benchmark tables as CSV");
  bench->add_option("--table", c.table, "t1 .. t6 or all")->capture_default_str();
  bench->add_option("--workers", c.workers, "threads (default HJP_WORKERS or 1)");
  bench->add_option("--reps", c.repetitions, "repetitions, fastest kept")->capture_default_str();
  bench->add_option("--reference", c.reference, "van_der_pol reference field (built if missing)")
      ->capture_default_str();
  bench->add_option("--out", c.out, "CSV file instead of stdout");
  bench->add_option("--seed", c.seed, "reserved; every algorithm is deterministic");
  bench->add_option("--config", config_unused, "key=value file, overridden by flags");

  try {
    std::vector<std::string> argv = cli_detail::expand_config(args);
    std::reverse(argv.begin(), argv.end());  // CLI11 consumes from the back
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "hjdd: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "hjdd: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (solve_cmd->parsed()) return cli_detail::run_solve(c, out);
    if (dec->parsed()) return cli_detail::run_decompose(c, out);
    if (isa->parsed()) return cli_detail::run_isa_command(c, out);
    if (bench->parsed()) return cli_detail::run_bench(c, out);
  } catch (const std::exception& e) {
    err << "hjdd: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace hjdd
