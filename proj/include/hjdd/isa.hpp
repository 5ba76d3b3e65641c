#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hjdd/decomposition.hpp"
#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"
#include "hjdd/mask.hpp"
#include "hjdd/parallel.hpp"
#include "hjdd/problems.hpp"
#include "hjdd/solver.hpp"

namespace hjdd {

/// True when `p` lies in the closure of a lattice triangle whose three
/// vertices are all members of `mask`. Each cell is split along its
/// lower-left to upper-right diagonal. With `boundary_vertices`, Boundary
/// nodes of `grid` count as members too.
inline bool in_mask_hull(const Grid& grid, const SubdomainMask& mask, const Vec2& p,
                         bool boundary_vertices = false) {
  const GridSpec& s = grid.spec();
  constexpr double eps = 1e-9;
  const double sx = (p[0] - s.x_min) / s.dx();
  const double sy = (p[1] - s.y_min) / s.dy();
  if (sx < -eps || sy < -eps || sx > s.nx - 1 + eps || sy > s.ny - 1 + eps) return false;
  const int i_lo = std::clamp(static_cast<int>(std::floor(sx - eps)), 0, s.nx - 2);
  const int i_hi = std::clamp(static_cast<int>(std::floor(sx + eps)), 0, s.nx - 2);
  const int j_lo = std::clamp(static_cast<int>(std::floor(sy - eps)), 0, s.ny - 2);
  const int j_hi = std::clamp(static_cast<int>(std::floor(sy + eps)), 0, s.ny - 2);
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const double tx = sx - i;
      const double ty = sy - j;
      if (tx < -eps || ty < -eps || tx > 1 + eps || ty > 1 + eps) continue;
      const auto member = [&](int a, int b) {
        const std::size_t k = grid.index(a, b);
        return mask.contains(k) || (boundary_vertices && grid.node_class(k) == NodeClass::Boundary);
      };
      if (!member(i, j) || !member(i + 1, j + 1)) continue;
      if (ty <= tx + eps && member(i + 1, j)) return true;
      if (ty >= tx - eps && member(i, j + 1)) return true;
    }
  }
  return false;
}

/// Fine mask = fine nodes inside the triangulated hull of the coarse mask,
/// plus the fine boundary nodes of the mask's own boundary piece.
///
/// Coarse Boundary nodes serve as hull vertices for every mask. An auxiliary
/// value jumps by the penalty at a seam, so the RA drops the other pieces'
/// boundary nodes there, and with a fixed diagonal two of a square's corner
/// cells would otherwise lie in no hull at all. Boundary nodes hold g in every
/// masked solve, so the extra vertices add no information.
inline SubdomainMask project_mask(const Grid& coarse, const SubdomainMask& mask, const Grid& fine,
                                  const BoundaryPartition& partition,
                                  bool boundary_vertices = true) {
  if (!(coarse.box() == fine.box())) throw InvalidArgument("coarse and fine grids cover different boxes");
  if (mask.size() != coarse.size()) throw InvalidArgument("mask size does not match coarse grid");
  SubdomainMask out = partition.seeds(fine, mask.part);
  for (std::size_t k = 0; k < fine.size(); ++k)
    if (!out.contains(k) && in_mask_hull(coarse, mask, fine.position(k), boundary_vertices))
      out.insert(k);
  return out;
}

struct IsaConfig {
  GridSpec coarse = GridSpec::unit_square(20);
  GridSpec fine = GridSpec::unit_square(100);
  PartitionScheme scheme = PartitionScheme::SquareEdges;
  int parts = 4;
  RAParams ra{};
  PenaltyScheme penalty = PenaltyScheme::Constant;
  StepMode step_mode = StepMode::Dx;
  /// Solver settings; h is derived from `step_mode` on each grid when <= 0.
  SolveParams coarse_solve{};
  SolveParams fine_solve{};
  int samples_a = 0;  ///< 0 = problem default
  int samples_b = 0;
  int workers = 1;

  void validate() const {
    coarse.validate();
    fine.validate();
    if (!(coarse.box() == fine.box())) throw InvalidArgument("coarse and fine grids cover different boxes");
    if (static_cast<std::size_t>(coarse.nx) * coarse.ny >= static_cast<std::size_t>(fine.nx) * fine.ny)
      throw InvalidArgument("coarse grid must have fewer nodes than the fine grid");
    ra.validate();
  }
};

struct StageTimes {
  double coarse = 0.0;
  double projection = 0.0;
  double fine = 0.0;
  double assembly = 0.0;
  double total() const { return coarse + projection + fine + assembly; }
};

struct IsaResult {
  Grid coarse_grid;
  Grid fine_grid;
  ValueField field;
  std::vector<SubdomainMask> coarse_masks;
  std::vector<SubdomainMask> fine_masks;
  std::vector<SolveReport> coarse_reports;
  std::vector<SolveReport> fine_reports;
  StageTimes seconds;
  std::size_t overlap_nodes = 0;
};

inline ControlGrid controls_for(const ProblemDef& problem, int samples_a, int samples_b) {
  return sample_controls(problem, samples_a > 0 ? samples_a : problem.default_samples_a,
                         samples_b > 0 ? samples_b : problem.default_samples_b);
}

/// Independent-sets algorithm: RA on the coarse grid, projection of the masks
/// onto the fine grid, one masked fine solve per part with the true exit cost,
/// and a nodewise minimum over the masks containing each node.
inline IsaResult run_isa(const ProblemDef& problem, const IsaConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto since = [](clock::time_point t) {
    return std::chrono::duration<double>(clock::now() - t).count();
  };
  config.validate();
  const ControlGrid controls = controls_for(problem, config.samples_a, config.samples_b);
  IsaResult out;

  // 1) sub-domain reconstruction on the coarse grid
  auto t = clock::now();
  out.coarse_grid = build_grid(config.coarse, problem.geometry);
  const BoundaryPartition coarse_partition =
      partition_boundary(out.coarse_grid, problem.geometry, config.parts, config.scheme);
  SolveParams cp = config.coarse_solve;
  if (!(cp.h > 0.0)) cp.h = step_size(out.coarse_grid, config.step_mode);
  RAResult ra = run_ra(problem, out.coarse_grid, controls, cp, coarse_partition, config.ra,
                       config.penalty, config.workers);
  for (const auto& r : ra.auxiliaries) out.coarse_reports.push_back(r.report);
  out.coarse_masks = std::move(ra.masks);
  out.seconds.coarse = since(t);

  // 2) projection
  t = clock::now();
  out.fine_grid = build_grid(config.fine, problem.geometry);
  const Grid& fine = out.fine_grid;
  const BoundaryPartition fine_partition =
      partition_boundary(fine, problem.geometry, config.parts, config.scheme);
  for (const auto& m : out.coarse_masks)
    out.fine_masks.push_back(project_mask(out.coarse_grid, m, fine, fine_partition));
  const auto missing = coverage_check(out.fine_masks, fine);
  if (!missing.empty())
    throw CoverageError("projected masks miss " + std::to_string(missing.size()) +
                        " fine nodes:" + describe_nodes(fine, missing));
  out.seconds.projection = since(t);

  // 3) masked fine solves
  t = clock::now();
  SolveParams fp = config.fine_solve;
  if (!(fp.h > 0.0)) fp.h = step_size(fine, config.step_mode);
  if (!(fp.sentinel > 0.0)) fp.sentinel = default_sentinel(problem, fine, controls, fp.h);
  const auto [outer, inner] = split_workers(config.workers, config.parts);
  fp.workers = inner;
  auto solves = parallel_map<SolveResult>(
      out.fine_masks.size(), outer,
      [&](std::size_t i) { return solve(problem, fine, controls, fp, out.fine_masks[i].members); });
  for (std::size_t i = 0; i < solves.size(); ++i) {
    if (!solves[i].report.converged)
      throw NotConverged("fine solve of part " + std::to_string(i) + " did not converge",
                         static_cast<int>(i));
    out.fine_reports.push_back(solves[i].report);
  }
  out.seconds.fine = since(t);

  // 4) assembly
  t = clock::now();
  out.field.assign(fine.size(), fp.sentinel);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (fine.node_class(k) == NodeClass::Ghost) continue;
    double v = std::numeric_limits<double>::infinity();
    int owners = 0;
    for (std::size_t i = 0; i < solves.size(); ++i) {
      if (!out.fine_masks[i].contains(k)) continue;
      v = std::min(v, solves[i].field[k]);
      ++owners;
    }
    out.field[k] = v;
    if (owners >= 2) ++out.overlap_nodes;
  }
  out.seconds.assembly = since(t);
  return out;
}

}  // namespace hjdd
