#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <locale>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hjdd/decomposition.hpp"
#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"
#include "hjdd/io.hpp"
#include "hjdd/isa.hpp"
#include "hjdd/mask.hpp"
#include "hjdd/problems.hpp"
#include "hjdd/solver.hpp"

namespace hjdd {

struct ErrorReport {
  double delta_inf = 0.0;  ///< max_j |X(j)|
  double delta_1 = 0.0;    ///< (1/N) sum_j |X(j)|
  std::size_t n_nodes = 0;
  std::size_t excluded = 0;
};

/// Discrete sup and mean-absolute norms of field - oracle over non-ghost
/// nodes. Nodes whose value exceeds `value_cap` (sentinel territory) are
/// excluded and counted.
inline ErrorReport error_norms(std::span<const double> field,
                               const std::function<double(const Vec2&)>& oracle, const Grid& grid,
                               double value_cap = std::numeric_limits<double>::infinity()) {
  if (field.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  ErrorReport r;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) == NodeClass::Ghost || !(field[k] <= value_cap)) {
      ++r.excluded;
      continue;
    }
    const double e = std::abs(field[k] - oracle(grid.position(k)));
    r.delta_inf = std::max(r.delta_inf, e);
    sum += e;
    ++r.n_nodes;
  }
  if (r.n_nodes == 0) throw InvalidArgument("every node was excluded from the error norm");
  r.delta_1 = sum / static_cast<double>(r.n_nodes);
  return r;
}

/// Same norms against a field stored on a finer lattice that contains every
/// node of `grid` (same box, (ref_n - 1) a multiple of (n - 1) per axis), so
/// the comparison is nodewise with no interpolation.
inline ErrorReport error_norms(std::span<const double> field, const Grid& grid,
                               std::span<const double> reference, const GridSpec& reference_spec,
                               double value_cap = std::numeric_limits<double>::infinity()) {
  const GridSpec& s = grid.spec();
  if (!(s.box() == reference_spec.box())) throw InvalidArgument("reference covers another box");
  if ((reference_spec.nx - 1) % (s.nx - 1) != 0 || (reference_spec.ny - 1) % (s.ny - 1) != 0)
    throw InvalidArgument("grid is not nested in the reference lattice");
  if (reference.size() != static_cast<std::size_t>(reference_spec.nx) * reference_spec.ny)
    throw InvalidArgument("reference size does not match its lattice");
  const int rx = (reference_spec.nx - 1) / (s.nx - 1);
  const int ry = (reference_spec.ny - 1) / (s.ny - 1);
  ErrorReport r;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::size_t rk =
        static_cast<std::size_t>(grid.j_of(k) * ry) * reference_spec.nx + grid.i_of(k) * rx;
    if (grid.node_class(k) == NodeClass::Ghost || !(field[k] <= value_cap) ||
        !(reference[rk] <= value_cap)) {
      ++r.excluded;
      continue;
    }
    const double e = std::abs(field[k] - reference[rk]);
    r.delta_inf = std::max(r.delta_inf, e);
    sum += e;
    ++r.n_nodes;
  }
  if (r.n_nodes == 0) throw InvalidArgument("every node was excluded from the error norm");
  r.delta_1 = sum / static_cast<double>(r.n_nodes);
  return r;
}

/// Closed forms on the unit square [-1,1]^2:
///   eikonal_square   1 - |x|_inf
///   eikonal_kruzkov  1 - exp(|x|_inf - 1), the Kruzkov transform of the distance
inline double exact_solution(BuiltinName name, const Vec2& x) {
  switch (name) {
    case BuiltinName::EikonalSquare: return 1.0 - norm_inf(x);
    case BuiltinName::EikonalKruzkov: return 1.0 - std::exp(norm_inf(x) - 1.0);
    default: throw InvalidArgument("no closed-form solution for " + to_string(name));
  }
}

/// Distance-type auxiliary solution for edge `part` of the 4-part square
/// partition (bottom, right, top, left): (1 + gamma) - |x + gamma n|_inf.
inline double exact_square_auxiliary(const Vec2& x, double gamma, int part) {
  const Vec2 n = detail::kEdgeNormal[static_cast<std::size_t>(part)];
  return (1.0 + gamma) - norm_inf({x[0] + gamma * n[0], x[1] + gamma * n[1]});
}

/// Exact independent sub-domain of edge `part` for the square distance
/// problems: the points whose nearest edge (ties included) is that edge.
inline bool exact_square_subdomain(const Vec2& x, int part, const Box& box = {}) {
  return detail::on_edge(box, x, part);
}

/// Share of the non-ghost nodes that belong to `mask`.
inline double area_fraction(const SubdomainMask& mask, const Grid& grid) {
  if (mask.size() != grid.size()) throw InvalidArgument("mask size does not match grid");
  std::size_t total = 0;
  std::size_t in = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) == NodeClass::Ghost) continue;
    ++total;
    if (mask.contains(k)) ++in;
  }
  return total ? static_cast<double>(in) / static_cast<double>(total) : 0.0;
}

inline double max_area_fraction(std::span<const SubdomainMask> masks, const Grid& grid) {
  double best = 0.0;
  for (const auto& m : masks) best = std::max(best, area_fraction(m, grid));
  return best;
}

/// One CSV line of a benchmark table. Grid sizes are cells per axis.
struct BenchRow {
  std::string problem;
  std::string scheme;
  int parts = 1;
  int coarse_nx = 0;
  int fine_nx = 0;
  double C = 0.0;
  double M = 0.0;
  double q = 0.0;
  double gamma = 0.0;
  std::string stage;
  double seconds = 0.0;
  std::optional<double> delta_inf;
  std::optional<double> delta_1;
  std::optional<double> max_fraction;
};

inline constexpr const char* kBenchHeader =
    "problem,scheme,parts,coarse_nx,fine_nx,C,M,q,gamma,stage,seconds,delta_inf,delta_1,"
    "max_fraction";

inline std::string to_csv(const BenchRow& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(6);
  const auto opt = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  os << r.problem << ',' << r.scheme << ',' << r.parts << ',' << r.coarse_nx << ',' << r.fine_nx
     << ',' << r.C << ',' << r.M << ',' << r.q << ',' << r.gamma << ',' << r.stage << ','
     << r.seconds << ',';
  opt(r.delta_inf);
  os << ',';
  opt(r.delta_1);
  os << ',';
  opt(r.max_fraction);
  return os.str();
}

/// A stored fine-grid solution used as the error oracle when no closed form exists.
struct ReferenceField {
  GridSpec spec;
  ValueField values;
};

/// Loads the reference for `problem` at `cells` from `path`, computing and
/// storing it first when the file is missing or describes another lattice.
inline ReferenceField load_or_build_reference(const ProblemDef& problem, int cells, double tol,
                                              const std::string& path, int workers = 1) {
  const GridSpec spec = GridSpec::unit_square(cells);
  if (std::filesystem::exists(path)) {
    LoadedField f = load_field(path);
    if (f.spec == spec) return {f.spec, std::move(f.values)};
  }
  const Grid grid = build_grid(spec, problem.geometry);
  const ControlGrid controls = sample_controls(problem);
  SolveParams p;
  p.h = step_size(grid, StepMode::Dx);
  p.tol = tol;
  p.max_iter = 1000000;
  p.workers = workers;
  SolveResult r = solve(problem, grid, controls, p);
  if (!r.report.converged) throw NotConverged("reference solve did not converge");
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  save_field(path, spec, r.field);
  return {spec, std::move(r.field)};
}

/// What to run and how to score it.
struct BenchScenario {
  enum class Mode { Direct, Isa, Reconstruction };

  BuiltinName problem = BuiltinName::EikonalKruzkov;
  Mode mode = Mode::Direct;
  int parts = 4;
  int coarse_cells = 20;
  int fine_cells = 100;
  RAParams ra{};
  PenaltyScheme penalty = PenaltyScheme::Constant;
  StepMode step_mode = StepMode::Dx;
  double tol = 1e-6;
  int samples_a = 0;
  int samples_b = 0;
  int workers = 1;
  /// Oracle for problems without a closed form.
  const ReferenceField* reference = nullptr;
};

namespace detail {

inline BenchRow row_template(const BenchScenario& s, const ProblemDef& p) {
  BenchRow r;
  r.problem = p.name;
  r.scheme = to_string(natural_scheme(p.geometry));
  r.parts = s.mode == BenchScenario::Mode::Direct ? 1 : s.parts;
  r.coarse_nx = s.mode == BenchScenario::Mode::Direct ? 0 : s.coarse_cells;
  r.fine_nx = s.mode == BenchScenario::Mode::Reconstruction ? 0 : s.fine_cells;
  r.C = s.ra.C;
  r.M = s.ra.M;
  r.q = s.ra.q;
  r.gamma = s.ra.gamma;
  return r;
}

inline bool has_closed_form(BuiltinName n) {
  return n == BuiltinName::EikonalSquare || n == BuiltinName::EikonalKruzkov;
}

inline ErrorReport score(const BenchScenario& s, const ProblemDef& problem, const Grid& grid,
                         const ControlGrid& controls, double h, std::span<const double> field) {
  const double sentinel = default_sentinel(problem, grid, controls, h);
  const double cap = finite_value_bound(problem, grid, controls, h, sentinel);
  if (has_closed_form(s.problem)) {
    return error_norms(
        field, [&](const Vec2& x) { return exact_solution(s.problem, x); }, grid, cap);
  }
  if (!s.reference) throw InvalidArgument("scenario needs a reference field for " + problem.name);
  return error_norms(field, grid, s.reference->values, s.reference->spec, cap);
}

}  // namespace detail

/// Runs a scenario `repetitions` times and reports the fastest run, one row
/// per stage. Direct: stage "nd". Isa: stages "isa-coarse", "isa-projection",
/// "isa-fine", "isa-assembly" and "isa-total" (errors and the largest fine
/// mask share on the total row). Reconstruction: stage "ra" on the coarse
/// grid with the largest mask share.
inline std::vector<BenchRow> bench_run(const BenchScenario& s, int repetitions = 1) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  const ProblemDef problem = make_builtin(s.problem);
  const ControlGrid controls = controls_for(problem, s.samples_a, s.samples_b);
  const BenchRow base = detail::row_template(s, problem);
  std::vector<BenchRow> best;
  double best_time = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < repetitions; ++rep) {
    std::vector<BenchRow> rows;
    double total = 0.0;
    switch (s.mode) {
      case BenchScenario::Mode::Direct: {
        const Grid grid = build_grid(GridSpec::unit_square(s.fine_cells), problem.geometry);
        SolveParams p;
        p.h = step_size(grid, s.step_mode);
        p.tol = s.tol;
        p.workers = s.workers;
        const SolveResult r = solve(problem, grid, controls, p);
        if (!r.report.converged) throw NotConverged("direct solve did not converge");
        BenchRow row = base;
        row.stage = "nd";
        row.seconds = total = r.report.wall_time;
        const ErrorReport e = detail::score(s, problem, grid, controls, p.h, r.field);
        row.delta_inf = e.delta_inf;
        row.delta_1 = e.delta_1;
        rows.push_back(row);
        break;
      }
      case BenchScenario::Mode::Isa: {
        IsaConfig c;
        c.coarse = GridSpec::unit_square(s.coarse_cells);
        c.fine = GridSpec::unit_square(s.fine_cells);
        c.scheme = natural_scheme(problem.geometry);
        c.parts = s.parts;
        c.ra = s.ra;
        c.penalty = s.penalty;
        c.step_mode = s.step_mode;
        c.coarse_solve.tol = s.tol;
        c.fine_solve.tol = s.tol;
        c.samples_a = s.samples_a;
        c.samples_b = s.samples_b;
        c.workers = s.workers;
        const IsaResult r = run_isa(problem, c);
        const std::pair<const char*, double> stages[] = {{"isa-coarse", r.seconds.coarse},
                                                         {"isa-projection", r.seconds.projection},
                                                         {"isa-fine", r.seconds.fine},
                                                         {"isa-assembly", r.seconds.assembly}};
        for (const auto& [name, sec] : stages) {
          BenchRow row = base;
          row.stage = name;
          row.seconds = sec;
          rows.push_back(row);
        }
        BenchRow row = base;
        row.stage = "isa-total";
        row.seconds = total = r.seconds.total();
        const ErrorReport e = detail::score(s, problem, r.fine_grid, controls,
                                            step_size(r.fine_grid, s.step_mode), r.field);
        row.delta_inf = e.delta_inf;
        row.delta_1 = e.delta_1;
        row.max_fraction = max_area_fraction(r.fine_masks, r.fine_grid);
        rows.push_back(row);
        break;
      }
      case BenchScenario::Mode::Reconstruction: {
        const Grid grid = build_grid(GridSpec::unit_square(s.coarse_cells), problem.geometry);
        const BoundaryPartition part =
            partition_boundary(grid, problem.geometry, s.parts, natural_scheme(problem.geometry));
        SolveParams p;
        p.h = step_size(grid, s.step_mode);
        p.tol = s.tol;
        const RAResult r = run_ra(problem, grid, controls, p, part, s.ra, s.penalty, s.workers);
        BenchRow row = base;
        row.stage = "ra";
        row.seconds = total = r.seconds;
        row.max_fraction = max_area_fraction(r.masks, grid);
        rows.push_back(row);
        break;
      }
    }
    if (total < best_time) {
      best_time = total;
      best = std::move(rows);
    }
  }
  return best;
}

}  // namespace hjdd
