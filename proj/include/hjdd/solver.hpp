#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"
#include "hjdd/mask.hpp"
#include "hjdd/parallel.hpp"
#include "hjdd/problems.hpp"

namespace hjdd {

using BoundaryCost = std::function<double(const Vec2&)>;

/// How the fictitious time step h is tied to the mesh size.
enum class StepMode { Dx, Dx23 };

inline double step_size(const Grid& grid, StepMode mode) {
  const double d = grid.spacing();
  return mode == StepMode::Dx ? d : std::pow(d, 2.0 / 3.0);
}

struct SolveParams {
  double h = 0.0;
  double tol = 1e-6;
  int max_iter = 100000;
  /// Finite stand-in for +infinity. Non-positive means "derive from the problem".
  double sentinel = 0.0;
  int workers = 1;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  double wall_time = 0.0;
};

/// `problem,nx,iters,residual,seconds`
inline std::string to_csv_row(const SolveReport& r, const std::string& problem, int nx) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(6);
  os << problem << ',' << nx << ',' << r.iterations << ',' << r.final_residual << ','
     << r.wall_time;
  return os.str();
}

/// 10 * (max l * diam + max |g| + 1 / max(lambda, h)), which exceeds every
/// value the scheme can produce from admissible trajectories.
inline double default_sentinel(const ProblemDef& problem, const Grid& grid,
                               const ControlGrid& controls, double h,
                               const BoundaryCost& boundary_cost = {}) {
  double max_l = 0.0;
  double max_g = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 x = grid.position(k);
    if (grid.node_class(k) == NodeClass::Interior) {
      for (const Vec2& b : controls.b)
        for (const Vec2& a : controls.a) max_l = std::max(max_l, problem.running_cost(x, a, b));
    } else if (grid.node_class(k) == NodeClass::Boundary) {
      const double g = boundary_cost ? boundary_cost(x) : problem.exit_cost(x);
      max_g = std::max(max_g, std::abs(g));
    }
  }
  return 10.0 * (max_l * grid.box().diameter() + max_g + 1.0 / std::max(problem.discount, h));
}

/// The semi-Lagrangian fixed-point map
///
///   T(V)_i = max_b min_a { h l(x_i,a,b) + I[V](x_i + h f(x_i,a,b)) / (1 + lambda h) }
///
/// on interior nodes, g on boundary nodes and the sentinel on ghost nodes.
/// The sentinel plays the role of +infinity. A control is discarded when its
/// foot leaves the bounding box or gives positive interpolation weight to an
/// infinite node (ghost, outside the mask, or itself forced onto such nodes);
/// a node left without controls holds exactly the sentinel.
///
/// Feet, interpolation weights and running costs are tabulated once per node
/// and control pair; above `kTableBudget` bytes they are recomputed on the fly
/// with the same arithmetic.
class SemiLagrangianOperator {
 public:
  static constexpr std::size_t kTableBudget = std::size_t{768} << 20;

  SemiLagrangianOperator(const ProblemDef& problem, const Grid& grid, const ControlGrid& controls,
                         double h, std::span<const std::uint8_t> mask,
                         const BoundaryCost& boundary_cost, double sentinel)
      : problem_(problem),
        grid_(grid),
        controls_(controls),
        h_(h),
        beta_(1.0 / (1.0 + problem.discount * h)),
        sentinel_(sentinel) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("time step h must be positive");
    if (controls.a.empty() || controls.b.empty()) throw InvalidArgument("empty control grid");
    if (!mask.empty() && mask.size() != grid.size())
      throw InvalidArgument("mask size does not match grid");
    const BoundaryCost& g = boundary_cost ? boundary_cost : problem.exit_cost;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const bool in_mask = mask.empty() || mask[k] != 0;
      switch (grid.node_class(k)) {
        case NodeClass::Interior:
          if (in_mask) interior_.push_back(k);
          break;
        case NodeClass::Boundary:
          if (in_mask) boundary_.push_back({k, g(grid.position(k))});
          break;
        case NodeClass::Ghost:
          ghost_.push_back(k);
          break;
      }
    }
    per_node_ = controls.a.size() * controls.b.size();
    const std::size_t table_bytes = interior_.size() * per_node_ * sizeof(Entry);
    if (table_bytes <= kTableBudget) {
      table_.resize(interior_.size() * per_node_);
      for (std::size_t n = 0; n < interior_.size(); ++n) fill_entries(n, table_.data() + n * per_node_);
    }
    check_step_size();
    mark_infinite();
  }

  double h() const { return h_; }
  double sentinel() const { return sentinel_; }
  std::span<const std::size_t> interior_nodes() const { return interior_; }

  /// Initial iterate: boundary values on the boundary nodes, sentinel elsewhere.
  ValueField initial_field() const {
    ValueField v(grid_.size(), sentinel_);
    for (const auto& b : boundary_) v[b.node] = b.value;
    return v;
  }

  /// out = T(in). Nodes that are neither active interior, active boundary nor
  /// ghost are copied from `in`.
  void apply(std::span<const double> in, std::span<double> out, int workers = 1) const {
    if (in.size() != grid_.size() || out.size() != grid_.size())
      throw InvalidArgument("field size does not match grid");
    std::copy(in.begin(), in.end(), out.begin());
    for (const auto& b : boundary_) out[b.node] = b.value;
    for (std::size_t k : ghost_) out[k] = sentinel_;
    parallel_for(interior_.size(), workers, [&](std::size_t begin, std::size_t end) {
      std::vector<Entry> scratch(table_.empty() ? per_node_ : 0);
      for (std::size_t n = begin; n < end; ++n) {
        const Entry* e = nullptr;
        if (table_.empty()) {
          fill_entries(n, scratch.data());
          e = scratch.data();
        } else {
          e = table_.data() + n * per_node_;
        }
        out[interior_[n]] = evaluate(in, e);
      }
    });
  }

 private:
  static constexpr std::uint32_t kOutside = std::numeric_limits<std::uint32_t>::max();

  struct Entry {
    std::uint32_t base;
    double tx;
    double ty;
    double cost;
  };
  struct BoundaryNode {
    std::size_t node;
    double value;
  };

  void fill_entries(std::size_t n, Entry* out) const {
    const GridSpec& s = grid_.spec();
    const Vec2 x = grid_.position(interior_[n]);
    std::size_t e = 0;
    for (const Vec2& b : controls_.b) {
      for (const Vec2& a : controls_.a) {
        const Vec2 f = problem_.dynamics(x, a, b);
        const Vec2 foot{x[0] + h_ * f[0], x[1] + h_ * f[1]};
        Entry& entry = out[e++];
        entry.cost = h_ * problem_.running_cost(x, a, b);
        try {
          const CellLocation c = locate(s, foot);
          entry.base = static_cast<std::uint32_t>(c.base);
          entry.tx = c.tx;
          entry.ty = c.ty;
        } catch (const OutOfDomain&) {
          entry.base = kOutside;
          entry.tx = entry.ty = 0.0;
        }
      }
    }
  }

  bool touches_infinite(const Entry& e) const {
    if (e.base == kOutside) return true;
    const std::size_t k0 = e.base;
    const std::size_t k1 = k0 + static_cast<std::size_t>(grid_.nx());
    const bool x0 = e.tx < 1.0, x1 = e.tx > 0.0;
    const bool y0 = e.ty < 1.0, y1 = e.ty > 0.0;
    return (x0 && y0 && infinite_[k0]) || (x1 && y0 && infinite_[k0 + 1]) ||
           (x0 && y1 && infinite_[k1]) || (x1 && y1 && infinite_[k1 + 1]);
  }

  double evaluate(std::span<const double> v, const Entry* e) const {
    const int nx = grid_.nx();
    double outer = -std::numeric_limits<double>::infinity();
    for (std::size_t ib = 0; ib < controls_.b.size(); ++ib) {
      double inner = sentinel_;
      for (std::size_t ia = 0; ia < controls_.a.size(); ++ia, ++e) {
        if (touches_infinite(*e)) continue;
        const double foot = interpolate_at(v, nx, CellLocation{e->base, e->tx, e->ty});
        inner = std::min(inner, e->cost + beta_ * foot);
      }
      outer = std::max(outer, inner);
    }
    return outer;
  }

  // Least set of nodes whose value is +infinity: ghost nodes, nodes outside
  // the mask, and interior nodes at which some b leaves every a touching the
  // set. Found by repeated sweeps; values never enter.
  void mark_infinite() {
    infinite_.assign(grid_.size(), 1);
    for (std::size_t k : interior_) infinite_[k] = 0;
    for (const auto& b : boundary_) infinite_[b.node] = 0;
    std::vector<Entry> scratch(per_node_);
    const std::size_t n_a = controls_.a.size();
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t n = 0; n < interior_.size(); ++n) {
        if (infinite_[interior_[n]]) continue;
        const Entry* e = table_.empty() ? (fill_entries(n, scratch.data()), scratch.data())
                                        : table_.data() + n * per_node_;
        for (std::size_t ib = 0; ib < controls_.b.size(); ++ib) {
          bool all = true;
          for (std::size_t ia = 0; ia < n_a && all; ++ia) all = touches_infinite(e[ib * n_a + ia]);
          if (all) {
            infinite_[interior_[n]] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }

  void check_step_size() const {
    if (interior_.empty()) return;
    std::vector<Entry> scratch(per_node_);
    for (std::size_t n = 0; n < interior_.size(); ++n) {
      const Entry* e = table_.empty() ? (fill_entries(n, scratch.data()), scratch.data())
                                      : table_.data() + n * per_node_;
      for (std::size_t c = 0; c < per_node_; ++c)
        if (e[c].base != kOutside) return;
    }
    throw StepSizeError("time step sends every characteristic foot out of the grid");
  }

  const ProblemDef& problem_;
  const Grid& grid_;
  const ControlGrid& controls_;
  double h_;
  double beta_;
  double sentinel_;
  std::size_t per_node_ = 0;
  std::vector<std::size_t> interior_;
  std::vector<BoundaryNode> boundary_;
  std::vector<std::size_t> ghost_;
  std::vector<Entry> table_;
  std::vector<std::uint8_t> infinite_;
};

/// One application of the operator to `field`. An empty `mask` means the
/// whole grid; nodes outside a non-empty mask are copied unchanged.
inline ValueField apply_operator(const ProblemDef& problem, const Grid& grid,
                                 const ControlGrid& controls, std::span<const double> field,
                                 double h, std::span<const std::uint8_t> mask = {},
                                 const BoundaryCost& boundary_cost = {}, double sentinel = 0.0,
                                 int workers = 1) {
  if (field.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  if (!(sentinel > 0.0)) sentinel = default_sentinel(problem, grid, controls, h, boundary_cost);
  const SemiLagrangianOperator op(problem, grid, controls, h, mask, boundary_cost, sentinel);
  ValueField out(grid.size());
  op.apply(field, out, workers);
  return out;
}

struct SolveResult {
  ValueField field;
  SolveReport report;
};

/// Value iteration V^{n+1} = T(V^n) from V^0 = (g on boundary, sentinel
/// elsewhere) until max |V^{n+1} - V^n| <= tol or max_iter sweeps.
inline SolveResult solve(const ProblemDef& problem, const Grid& grid, const ControlGrid& controls,
                         SolveParams params, std::span<const std::uint8_t> mask = {},
                         const BoundaryCost& boundary_cost = {}) {
  if (!(params.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (params.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  if (!(params.sentinel > 0.0))
    params.sentinel = default_sentinel(problem, grid, controls, params.h, boundary_cost);
  const SemiLagrangianOperator op(problem, grid, controls, params.h, mask, boundary_cost,
                                  params.sentinel);
  ValueField current = op.initial_field();
  ValueField next(grid.size());
  SolveReport report;
  for (int it = 1; it <= params.max_iter; ++it) {
    op.apply(current, next, params.workers);
    double residual = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k)
      residual = std::max(residual, std::abs(next[k] - current[k]));
    current.swap(next);
    report.iterations = it;
    report.final_residual = residual;
    if (residual <= params.tol) {
      report.converged = true;
      break;
    }
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(current), report};
}

}  // namespace hjdd
