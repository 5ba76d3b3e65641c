#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"
#include "hjdd/mask.hpp"
#include "hjdd/parallel.hpp"
#include "hjdd/problems.hpp"
#include "hjdd/solver.hpp"

namespace hjdd {

enum class PartitionScheme { SquareEdges, BallSectors, StripSides };

inline std::string to_string(PartitionScheme s) {
  switch (s) {
    case PartitionScheme::SquareEdges: return "square-edges";
    case PartitionScheme::BallSectors: return "ball-sectors";
    case PartitionScheme::StripSides: return "strip-sides";
  }
  return "unknown";
}

inline PartitionScheme parse_partition_scheme(std::string_view text) {
  for (auto s : {PartitionScheme::SquareEdges, PartitionScheme::BallSectors,
                 PartitionScheme::StripSides})
    if (to_string(s) == text) return s;
  throw InvalidArgument("unknown partition scheme '" + std::string(text) + "'");
}

/// The scheme matching a problem's target shape.
inline PartitionScheme natural_scheme(const Geometry& g) {
  switch (g.kind) {
    case Geometry::Kind::BoxEdges: return PartitionScheme::SquareEdges;
    case Geometry::Kind::BoxMinusBall: return PartitionScheme::BallSectors;
    case Geometry::Kind::StripSides: return PartitionScheme::StripSides;
  }
  return PartitionScheme::SquareEdges;
}

/// Covering of the exit set by m pieces Gamma_1..Gamma_m. Pieces are position
/// predicates, so the same partition applies to any lattice of the geometry.
/// Seams (square corners, sector rays) belong to every adjacent piece.
struct BoundaryPartition {
  PartitionScheme scheme = PartitionScheme::SquareEdges;
  Geometry geometry;
  std::vector<std::function<bool(const Vec2&)>> parts;

  int size() const { return static_cast<int>(parts.size()); }
  bool contains(int i, const Vec2& x) const { return parts[static_cast<std::size_t>(i)](x); }

  /// Boundary nodes of `grid` that belong to piece i.
  SubdomainMask seeds(const Grid& grid, int i) const {
    SubdomainMask m(i, grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (grid.node_class(k) == NodeClass::Boundary && contains(i, grid.position(k))) m.insert(k);
    return m;
  }
};

namespace detail {

// Edges in the order bottom, right, top, left.
inline std::array<double, 4> edge_distances(const Box& b, const Vec2& x) {
  return {std::abs(x[1] - b.y_min), std::abs(x[0] - b.x_max), std::abs(x[1] - b.y_max),
          std::abs(x[0] - b.x_min)};
}

inline bool on_edge(const Box& b, const Vec2& x, int edge) {
  const auto d = edge_distances(b, x);
  const double m = *std::min_element(d.begin(), d.end());
  return d[static_cast<std::size_t>(edge)] <= m + 1e-9;
}

// Half of an edge, walking counter-clockwise: half 0 is the first half.
inline bool on_half_edge(const Box& b, const Vec2& x, int edge, int half) {
  if (!on_edge(b, x, edge)) return false;
  const double cx = 0.5 * (b.x_min + b.x_max);
  const double cy = 0.5 * (b.y_min + b.y_max);
  constexpr double eps = 1e-9;
  switch (edge) {
    case 0: return half == 0 ? x[0] <= cx + eps : x[0] >= cx - eps;
    case 1: return half == 0 ? x[1] <= cy + eps : x[1] >= cy - eps;
    case 2: return half == 0 ? x[0] >= cx - eps : x[0] <= cx + eps;
    default: return half == 0 ? x[1] >= cy - eps : x[1] <= cy + eps;
  }
}

}  // namespace detail

/// Square scheme: m=1 whole boundary; m=2 {bottom,left} and {top,right};
/// m=4 bottom, right, top, left; m=8 half edges counter-clockwise from the
/// lower-left corner. Ball scheme: closed angular sectors of width 2 pi / m
/// starting at angle 0, the ball centre in every sector. Strip scheme: m=1
/// both sides, m=2 right side then left side.
inline BoundaryPartition partition_boundary(const Grid& grid, const Geometry& geometry, int m,
                                            PartitionScheme scheme) {
  if (m != 1 && m != 2 && m != 4 && m != 8)
    throw InvalidArgument("number of parts must be 1, 2, 4 or 8");
  BoundaryPartition p;
  p.scheme = scheme;
  p.geometry = geometry;
  const Box box = geometry.domain;
  switch (scheme) {
    case PartitionScheme::SquareEdges: {
      if (geometry.kind != Geometry::Kind::BoxEdges)
        throw InvalidArgument("square-edges scheme needs a box-edge target");
      if (m == 1) {
        p.parts.push_back([](const Vec2&) { return true; });
      } else if (m == 2) {
        p.parts.push_back([box](const Vec2& x) {
          return detail::on_edge(box, x, 0) || detail::on_edge(box, x, 3);
        });
        p.parts.push_back([box](const Vec2& x) {
          return detail::on_edge(box, x, 1) || detail::on_edge(box, x, 2);
        });
      } else if (m == 4) {
        for (int e = 0; e < 4; ++e)
          p.parts.push_back([box, e](const Vec2& x) { return detail::on_edge(box, x, e); });
      } else {
        for (int e = 0; e < 4; ++e)
          for (int half = 0; half < 2; ++half)
            p.parts.push_back(
                [box, e, half](const Vec2& x) { return detail::on_half_edge(box, x, e, half); });
      }
      break;
    }
    case PartitionScheme::BallSectors: {
      if (geometry.kind != Geometry::Kind::BoxMinusBall)
        throw InvalidArgument("ball-sectors scheme needs a ball target");
      const Vec2 c = geometry.center;
      const double width = 2.0 * std::numbers::pi / m;
      for (int i = 0; i < m; ++i) {
        p.parts.push_back([c, width, i, m](const Vec2& x) {
          const double dx = x[0] - c[0];
          const double dy = x[1] - c[1];
          if (m == 1 || std::hypot(dx, dy) < 1e-12) return true;
          double angle = std::atan2(dy, dx);
          if (angle < 0.0) angle += 2.0 * std::numbers::pi;
          constexpr double eps = 1e-9;
          const double lo = i * width;
          const double hi = (i + 1) * width;
          if (angle >= lo - eps && angle <= hi + eps) return true;
          // The ray at angle 0 also closes the last sector.
          return i == m - 1 && angle <= eps;
        });
      }
      break;
    }
    case PartitionScheme::StripSides: {
      if (geometry.kind != Geometry::Kind::StripSides)
        throw InvalidArgument("strip-sides scheme needs a strip target");
      if (m > 2) throw InvalidArgument("strip-sides scheme supports 1 or 2 parts");
      const double mid = 0.5 * (box.x_min + box.x_max);
      if (m == 1) {
        p.parts.push_back([](const Vec2&) { return true; });
      } else {
        p.parts.push_back([mid](const Vec2& x) { return x[0] >= mid; });
        p.parts.push_back([mid](const Vec2& x) { return x[0] <= mid; });
      }
      break;
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) != NodeClass::Boundary) continue;
    bool covered = false;
    for (int i = 0; i < m && !covered; ++i) covered = p.contains(i, grid.position(k));
    if (!covered) throw InvalidArgument("partition does not cover boundary node " + std::to_string(k));
  }
  return p;
}

/// Penalty used for g_i away from Gamma_i.
///   Constant:   g + gamma.
///   Ramp:       g + gamma (1 + t.x), with t the unit tangent of the part's
///               edge rotated from the left-edge case gamma (1 + x_2).
///               Square m=4 only. Equals g where t.x = -1, so it is only
///               weakly above g there.
///   ShiftedBox: g + (1 + gamma) - |x + gamma n|_inf, n the part's outward
///               normal: the trace of the exact auxiliary distance function
///               for the unit square. Square m=4 only.
enum class PenaltyScheme { Constant, Ramp, ShiftedBox };

inline std::string to_string(PenaltyScheme s) {
  switch (s) {
    case PenaltyScheme::Constant: return "constant";
    case PenaltyScheme::Ramp: return "ramp";
    case PenaltyScheme::ShiftedBox: return "shifted-box";
  }
  return "unknown";
}

inline PenaltyScheme parse_penalty_scheme(std::string_view text) {
  for (auto s : {PenaltyScheme::Constant, PenaltyScheme::Ramp, PenaltyScheme::ShiftedBox})
    if (to_string(s) == text) return s;
  throw InvalidArgument("unknown penalty scheme '" + std::string(text) + "'");
}

struct AuxiliaryCost {
  int part = 0;
  double gamma = 1.0;
  BoundaryCost g;

  double operator()(const Vec2& x) const { return g(x); }
};

namespace detail {

// Outward normals and counter-clockwise tangents of bottom, right, top, left.
inline constexpr std::array<Vec2, 4> kEdgeNormal{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
inline constexpr std::array<Vec2, 4> kEdgeTangent{{{-1, 0}, {0, -1}, {1, 0}, {0, 1}}};

}  // namespace detail

inline AuxiliaryCost build_auxiliary_cost(const ProblemDef& problem,
                                          const BoundaryPartition& partition, int i, double gamma,
                                          PenaltyScheme scheme = PenaltyScheme::Constant) {
  if (!(gamma > 0.0)) throw InvalidArgument("penalty gamma must be positive");
  if (i < 0 || i >= partition.size()) throw InvalidArgument("part index out of range");
  if ((scheme == PenaltyScheme::Ramp || scheme == PenaltyScheme::ShiftedBox) &&
      (partition.scheme != PartitionScheme::SquareEdges || partition.size() != 4))
    throw InvalidArgument(to_string(scheme) + " penalty needs the 4-part square partition");
  const ExitCost g = problem.exit_cost;
  const auto& piece = partition.parts[static_cast<std::size_t>(i)];
  AuxiliaryCost aux{i, gamma, {}};
  switch (scheme) {
    case PenaltyScheme::Constant:
      aux.g = [g, piece, gamma](const Vec2& x) { return piece(x) ? g(x) : g(x) + gamma; };
      break;
    case PenaltyScheme::Ramp: {
      const Vec2 t = detail::kEdgeTangent[static_cast<std::size_t>(i)];
      aux.g = [g, piece, gamma, t](const Vec2& x) {
        return piece(x) ? g(x) : g(x) + gamma * (1.0 + t[0] * x[0] + t[1] * x[1]);
      };
      break;
    }
    case PenaltyScheme::ShiftedBox: {
      const Vec2 n = detail::kEdgeNormal[static_cast<std::size_t>(i)];
      aux.g = [g, piece, gamma, n](const Vec2& x) {
        if (piece(x)) return g(x);
        return g(x) + (1.0 + gamma) - norm_inf({x[0] + gamma * n[0], x[1] + gamma * n[1]});
      };
      break;
    }
  }
  return aux;
}

/// Boundary nodes outside Gamma_i where g_i <= g (should be empty).
inline std::vector<std::size_t> gcond_violations(const ProblemDef& problem, const Grid& grid,
                                                 const BoundaryPartition& partition,
                                                 const AuxiliaryCost& aux) {
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) != NodeClass::Boundary) continue;
    const Vec2 x = grid.position(k);
    if (partition.contains(aux.part, x)) {
      if (aux(x) != problem.exit_cost(x)) bad.push_back(k);
    } else if (!(aux(x) > problem.exit_cost(x))) {
      bad.push_back(k);
    }
  }
  return bad;
}

/// Splits `workers` between `tasks` concurrent jobs and the threads inside each job.
inline std::pair<int, int> split_workers(int workers, int tasks) {
  const int outer = std::max(1, std::min(workers, tasks));
  return {outer, std::max(1, workers / outer)};
}

/// Solves V_i = T_i(V_i) for every part, T_i using g_i on the boundary.
inline std::vector<SolveResult> solve_auxiliaries(const ProblemDef& problem, const Grid& grid,
                                                  const ControlGrid& controls, SolveParams params,
                                                  const BoundaryPartition& partition, double gamma,
                                                  PenaltyScheme scheme = PenaltyScheme::Constant,
                                                  int workers = 1) {
  const int m = partition.size();
  if (m < 1) throw InvalidArgument("empty partition");
  std::vector<AuxiliaryCost> costs;
  for (int i = 0; i < m; ++i) costs.push_back(build_auxiliary_cost(problem, partition, i, gamma, scheme));
  // One sentinel for all parts so that equal values compare equal.
  if (!(params.sentinel > 0.0)) {
    for (const auto& c : costs)
      params.sentinel =
          std::max(params.sentinel, default_sentinel(problem, grid, controls, params.h, c.g));
  }
  const auto [outer, inner] = split_workers(workers, m);
  params.workers = inner;
  auto results = parallel_map<SolveResult>(static_cast<std::size_t>(m), outer, [&](std::size_t i) {
    return solve(problem, grid, controls, params, {}, costs[i].g);
  });
  for (int i = 0; i < m; ++i) {
    if (!results[static_cast<std::size_t>(i)].report.converged)
      throw NotConverged("auxiliary problem " + std::to_string(i) + " did not converge", i);
  }
  return results;
}

/// Per node, the indices j with V_j within tie_tol of the minimum (bit j set).
struct ActiveIndexField {
  std::vector<std::uint32_t> bits;

  bool active(std::size_t node, int j) const { return (bits[node] >> j) & 1u; }
  int count(std::size_t node) const { return std::popcount(bits[node]); }
  std::vector<int> indices(std::size_t node) const {
    std::vector<int> out;
    for (int j = 0; j < 32; ++j)
      if (active(node, j)) out.push_back(j);
    return out;
  }
  /// Nodes with at least two active indices.
  std::vector<std::size_t> overlap() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (count(k) >= 2) out.push_back(k);
    return out;
  }
};

struct CombinedField {
  ValueField field;
  ActiveIndexField active;
};

inline CombinedField min_combine(std::span<const ValueField> fields, double tie_tol) {
  if (fields.empty()) throw InvalidArgument("min_combine needs at least one field");
  if (fields.size() > 32) throw InvalidArgument("at most 32 fields");
  const std::size_t n = fields.front().size();
  for (const auto& f : fields)
    if (f.size() != n) throw InvalidArgument("fields live on different grids");
  CombinedField out{ValueField(n), ActiveIndexField{std::vector<std::uint32_t>(n, 0)}};
  for (std::size_t k = 0; k < n; ++k) {
    double m = fields[0][k];
    for (const auto& f : fields) m = std::min(m, f[k]);
    out.field[k] = m;
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (fields[j][k] <= m + tie_tol) out.active.bits[k] |= (1u << j);
  }
  return out;
}

inline CombinedField min_combine(std::span<const SolveResult> results, double tie_tol) {
  std::vector<ValueField> fields;
  for (const auto& r : results) fields.push_back(r.field);
  return min_combine(std::span<const ValueField>(fields), tie_tol);
}

struct RAParams {
  double C = 1.0;
  double M = 1.0;
  double q = 0.5;
  double gamma = 1.0;
  double tie_tol = 1e-5;

  void validate() const {
    if (!(C > 0.0) || !(M > 0.0) || !(gamma > 0.0) || !(tie_tol > 0.0))
      throw InvalidArgument("C, M, gamma and tie_tol must be positive");
    if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
  }
};

/// 2 (C dx^q + M dx): how far V_i may sit above V on its own sub-domain.
inline double ra_threshold(const RAParams& p, double dx) {
  if (!(dx > 0.0)) throw InvalidArgument("mesh size must be positive");
  return 2.0 * (p.C * std::pow(dx, p.q) + p.M * dx);
}

/// Non-ghost nodes of `grid` contained in no mask.
inline std::vector<std::size_t> coverage_check(std::span<const SubdomainMask> masks,
                                               const Grid& grid) {
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) == NodeClass::Ghost) continue;
    bool covered = false;
    for (const auto& m : masks) {
      if (m.size() != grid.size()) throw InvalidArgument("mask size does not match grid");
      if (m.contains(k)) {
        covered = true;
        break;
      }
    }
    if (!covered) missing.push_back(k);
  }
  return missing;
}

inline std::string describe_nodes(const Grid& grid, std::span<const std::size_t> nodes,
                                  std::size_t limit = 8) {
  std::string s;
  for (std::size_t n = 0; n < nodes.size() && n < limit; ++n) {
    s += " (" + std::to_string(grid.i_of(nodes[n])) + "," + std::to_string(grid.j_of(nodes[n])) + ")";
  }
  if (nodes.size() > limit) s += " ...";
  return s;
}

/// mask_i = (Gamma_i boundary nodes) + { j : |V_i(j) - V(j)| <= ra_threshold }.
inline std::vector<SubdomainMask> reconstruct_subdomains(std::span<const ValueField> fields,
                                                         std::span<const double> combined,
                                                         const BoundaryPartition& partition,
                                                         const RAParams& params, const Grid& grid) {
  params.validate();
  if (static_cast<int>(fields.size()) != partition.size())
    throw InvalidArgument("one field per part is required");
  const double theta = ra_threshold(params, grid.spacing());
  std::vector<SubdomainMask> masks;
  for (int i = 0; i < partition.size(); ++i) {
    const ValueField& vi = fields[static_cast<std::size_t>(i)];
    if (vi.size() != grid.size() || combined.size() != grid.size())
      throw InvalidArgument("fields live on different grids");
    SubdomainMask mask = partition.seeds(grid, i);
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (std::abs(vi[j] - combined[j]) <= theta) mask.insert(j);
    masks.push_back(std::move(mask));
  }
  const auto missing = coverage_check(masks, grid);
  if (!missing.empty())
    throw CoverageError("sub-domain masks miss " + std::to_string(missing.size()) +
                        " nodes:" + describe_nodes(grid, missing) + "; raise C or M");
  return masks;
}

/// Largest value a trajectory that reaches the target or stays in the domain
/// forever can produce in the discrete scheme. Values above it come from the
/// sentinel. Without discount there is no such bound and half the sentinel
/// is returned.
inline double finite_value_bound(const ProblemDef& problem, const Grid& grid,
                                 const ControlGrid& controls, double h, double sentinel) {
  if (!(problem.discount > 0.0)) return 0.5 * sentinel;
  double max_l = 0.0;
  double max_g = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 x = grid.position(k);
    if (grid.node_class(k) == NodeClass::Interior) {
      for (const Vec2& b : controls.b)
        for (const Vec2& a : controls.a) max_l = std::max(max_l, problem.running_cost(x, a, b));
    } else if (grid.node_class(k) == NodeClass::Boundary) {
      max_g = std::max(max_g, std::abs(problem.exit_cost(x)));
    }
  }
  return (max_l * (1.0 + problem.discount * h) / problem.discount + max_g) * (1.0 + 1e-9);
}

struct H2Report {
  std::size_t nodes_checked = 0;
  std::size_t nodes_skipped = 0;
  double max_residual = -std::numeric_limits<double>::infinity();
  bool passed = true;
};

/// Numerical check of the decomposability condition on the overlap set: for
/// every interior node with two or more active indices, with p_i the finite
/// difference gradient of V_i,
///   lambda V(x) + H(x, sum_i alpha_i p_i) <= tol
/// for the unit weights and `n_combo` random convex weights. Nodes whose
/// stencil touches a ghost node or a value above `value_cap` are skipped.
inline H2Report check_h2(const ProblemDef& problem, const ControlGrid& controls,
                         std::span<const ValueField> fields, std::span<const double> combined,
                         const ActiveIndexField& active, const Grid& grid, int n_combo, double tol,
                         double value_cap = std::numeric_limits<double>::infinity(),
                         std::uint64_t seed = 0x5eed) {
  if (n_combo < 1) throw InvalidArgument("n_combo must be >= 1");
  H2Report report;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  const int nx = grid.nx();
  const int ny = grid.ny();
  auto usable = [&](std::size_t k) {
    if (grid.node_class(k) == NodeClass::Ghost) return false;
    for (const auto& f : fields)
      if (!(f[k] <= value_cap)) return false;
    return true;
  };
  auto gradient = [&](const ValueField& v, int i, int j) {
    const auto at = [&](int ii, int jj) { return v[grid.index(ii, jj)]; };
    const int il = std::max(i - 1, 0), ir = std::min(i + 1, nx - 1);
    const int jl = std::max(j - 1, 0), jr = std::min(j + 1, ny - 1);
    return Vec2{(at(ir, j) - at(il, j)) / ((ir - il) * grid.dx()),
                (at(i, jr) - at(i, jl)) / ((jr - jl) * grid.dy())};
  };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.node_class(k) != NodeClass::Interior || active.count(k) < 2) continue;
    const int i = grid.i_of(k);
    const int j = grid.j_of(k);
    bool ok = usable(k);
    for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
      const int ii = i + di, jj = j + dj;
      if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
      // auxiliary data jump across parts, so never difference through the boundary
      const std::size_t n = grid.index(ii, jj);
      ok = ok && grid.node_class(n) == NodeClass::Interior && usable(n);
    }
    if (!ok) {
      ++report.nodes_skipped;
      continue;
    }
    const auto idx = active.indices(k);
    std::vector<Vec2> grads;
    for (int a : idx) grads.push_back(gradient(fields[static_cast<std::size_t>(a)], i, j));
    const Vec2 x = grid.position(k);
    auto residual = [&](std::span<const double> w) {
      Vec2 p{0.0, 0.0};
      for (std::size_t t = 0; t < grads.size(); ++t) {
        p[0] += w[t] * grads[t][0];
        p[1] += w[t] * grads[t][1];
      }
      return problem.discount * combined[k] + hamiltonian(problem, controls, x, p);
    };
    std::vector<double> w(grads.size());
    for (std::size_t t = 0; t < grads.size(); ++t) {
      std::fill(w.begin(), w.end(), 0.0);
      w[t] = 1.0;
      report.max_residual = std::max(report.max_residual, residual(w));
    }
    for (int c = 0; c < n_combo; ++c) {
      double sum = 0.0;
      for (double& v : w) sum += (v = expo(rng));
      for (double& v : w) v /= sum;
      report.max_residual = std::max(report.max_residual, residual(w));
    }
    ++report.nodes_checked;
  }
  report.passed = report.nodes_checked == 0 || report.max_residual <= tol;
  return report;
}

/// Everything the reconstruction algorithm produces on one grid.
struct RAResult {
  std::vector<SolveResult> auxiliaries;
  CombinedField combined;
  std::vector<SubdomainMask> masks;
  double threshold = 0.0;
  double seconds = 0.0;
};

/// Auxiliary solves, minimum reconstruction and sub-domain masks on `grid`.
inline RAResult run_ra(const ProblemDef& problem, const Grid& grid, const ControlGrid& controls,
                       const SolveParams& params, const BoundaryPartition& partition,
                       const RAParams& ra, PenaltyScheme scheme = PenaltyScheme::Constant,
                       int workers = 1) {
  ra.validate();
  const auto start = std::chrono::steady_clock::now();
  RAResult out;
  out.auxiliaries =
      solve_auxiliaries(problem, grid, controls, params, partition, ra.gamma, scheme, workers);
  out.combined = min_combine(std::span<const SolveResult>(out.auxiliaries), ra.tie_tol);
  std::vector<ValueField> fields;
  for (const auto& r : out.auxiliaries) fields.push_back(r.field);
  out.masks = reconstruct_subdomains(fields, out.combined.field, partition, ra, grid);
  out.threshold = ra_threshold(ra, grid.spacing());
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hjdd
