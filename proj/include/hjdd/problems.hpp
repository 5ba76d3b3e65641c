#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"

namespace hjdd {

/// Admissible control set. Scalar (interval) controls are stored in the first
/// component of a Vec2.
struct ControlSet {
  enum class Kind { Ball, Interval, Singleton };

  Kind kind = Kind::Singleton;
  double radius = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  static ControlSet ball(double r) { return {Kind::Ball, r, 0.0, 0.0}; }
  static ControlSet interval(double a, double b) { return {Kind::Interval, 0.0, a, b}; }
  static ControlSet singleton() { return {}; }

  bool contains(const Vec2& c, double slack = 1e-12) const {
    switch (kind) {
      case Kind::Ball: return norm2(c) <= radius + slack;
      case Kind::Interval: return c[0] >= lo - slack && c[0] <= hi + slack && c[1] == 0.0;
      case Kind::Singleton: return c[0] == 0.0 && c[1] == 0.0;
    }
    return false;
  }
};

/// Finite samples of the two players' control sets.
struct ControlGrid {
  std::vector<Vec2> a;
  std::vector<Vec2> b;
};

using Dynamics = std::function<Vec2(const Vec2& x, const Vec2& a, const Vec2& b)>;
using RunningCost = std::function<double(const Vec2& x, const Vec2& a, const Vec2& b)>;
using ExitCost = std::function<double(const Vec2& x)>;

/// Exit-time control problem or differential game
///   lambda v + min_b max_a { -f(x,a,b).Dv - l(x,a,b) } = 0 in the domain,
///   v = g on the target.
/// The player `a` minimizes the cost, the adversary `b` maximizes it.
struct ProblemDef {
  std::string name;
  Dynamics dynamics;
  RunningCost running_cost;
  ExitCost exit_cost;
  double discount = 0.0;
  Geometry geometry;
  ControlSet control_a;
  ControlSet control_b;
  /// Default number of samples for each control set.
  int default_samples_a = 64;
  int default_samples_b = 1;
};

enum class BuiltinName { EikonalSquare, EikonalKruzkov, StripFlat, VanDerPol, PursuitEvasion };

struct BuiltinParams {
  double delta = 1.0;  ///< discount of the strip problem
  double rho = 0.2;    ///< radius of ball targets
};

inline std::string to_string(BuiltinName name) {
  switch (name) {
    case BuiltinName::EikonalSquare: return "eikonal_square";
    case BuiltinName::EikonalKruzkov: return "eikonal_kruzkov";
    case BuiltinName::StripFlat: return "strip_flat";
    case BuiltinName::VanDerPol: return "van_der_pol";
    case BuiltinName::PursuitEvasion: return "pursuit_evasion";
  }
  return "unknown";
}

/// Accepts both `eikonal_kruzkov` and `eikonal-kruzkov`.
inline BuiltinName parse_builtin(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), '-', '_');
  for (auto n : {BuiltinName::EikonalSquare, BuiltinName::EikonalKruzkov, BuiltinName::StripFlat,
                 BuiltinName::VanDerPol, BuiltinName::PursuitEvasion}) {
    if (to_string(n) == s) return n;
  }
  throw InvalidArgument("unknown problem '" + std::string(text) + "'");
}

namespace detail {

inline ProblemDef eikonal(double discount, std::string name) {
  ProblemDef p;
  p.name = std::move(name);
  p.dynamics = [](const Vec2&, const Vec2& a, const Vec2&) { return a; };
  p.running_cost = [](const Vec2&, const Vec2&, const Vec2&) { return 1.0; };
  p.exit_cost = [](const Vec2&) { return 0.0; };
  p.discount = discount;
  p.geometry = Geometry::box_edges();
  p.control_a = ControlSet::ball(1.0);
  p.control_b = ControlSet::singleton();
  p.default_samples_a = 64;
  return p;
}

}  // namespace detail

inline ProblemDef make_builtin(BuiltinName name, const BuiltinParams& params = {}) {
  switch (name) {
    case BuiltinName::EikonalSquare: return detail::eikonal(0.0, "eikonal_square");
    case BuiltinName::EikonalKruzkov: return detail::eikonal(1.0, "eikonal_kruzkov");
    case BuiltinName::StripFlat: {
      if (!(params.delta > 0.0)) throw InvalidArgument("strip_flat needs delta > 0");
      ProblemDef p = detail::eikonal(params.delta, "strip_flat");
      p.dynamics = [](const Vec2&, const Vec2& a, const Vec2&) { return Vec2{a[0], 0.0}; };
      p.geometry = Geometry::strip_sides();
      return p;
    }
    case BuiltinName::VanDerPol: {
      if (!(params.rho > 0.0)) throw InvalidArgument("van_der_pol needs rho > 0");
      ProblemDef p;
      p.name = "van_der_pol";
      p.dynamics = [](const Vec2& x, const Vec2& a, const Vec2&) {
        return Vec2{x[1], (1.0 - x[0] * x[0]) * x[1] - x[0] + a[0]};
      };
      p.running_cost = [](const Vec2& x, const Vec2&, const Vec2&) { return norm2(x); };
      p.exit_cost = [](const Vec2&) { return 0.0; };
      p.discount = 1.0;
      p.geometry = Geometry::box_minus_ball(params.rho);
      p.control_a = ControlSet::interval(-1.0, 1.0);
      p.control_b = ControlSet::singleton();
      p.default_samples_a = 21;
      return p;
    }
    case BuiltinName::PursuitEvasion: {
      if (!(params.rho > 0.0)) throw InvalidArgument("pursuit_evasion needs rho > 0");
      ProblemDef p;
      p.name = "pursuit_evasion";
      p.dynamics = [](const Vec2& x, const Vec2& a, const Vec2& b) {
        return Vec2{(x[1] + 1.0) * (a[0] - b[0]), a[1] - b[1]};
      };
      p.running_cost = [](const Vec2& x, const Vec2&, const Vec2&) { return x[0] * x[0] + 0.1; };
      p.exit_cost = [](const Vec2&) { return 0.0; };
      p.discount = 1.0;
      p.geometry = Geometry::box_minus_ball(params.rho);
      p.control_a = ControlSet::ball(1.0);
      p.control_b = ControlSet::ball(0.5);
      p.default_samples_a = 32;
      p.default_samples_b = 16;
      return p;
    }
  }
  throw InvalidArgument("unknown problem");
}

namespace detail {

inline std::vector<Vec2> sample_set(const ControlSet& set, int n) {
  std::vector<Vec2> out;
  switch (set.kind) {
    case ControlSet::Kind::Singleton:
      out.push_back({0.0, 0.0});
      break;
    case ControlSet::Kind::Interval:
      if (n == 1) {
        out.push_back({0.5 * (set.lo + set.hi), 0.0});
        break;
      }
      for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        out.push_back({k == n - 1 ? set.hi : set.lo + t * (set.hi - set.lo), 0.0});
      }
      break;
    case ControlSet::Kind::Ball:
      for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n;
        out.push_back({set.radius * std::cos(angle), set.radius * std::sin(angle)});
      }
      out.push_back({0.0, 0.0});
      break;
  }
  return out;
}

}  // namespace detail

/// Ball sets: `n` points on the boundary circle plus the zero control.
/// Intervals: `n` equispaced points including both endpoints.
/// Singletons: the zero control only.
inline ControlGrid sample_controls(const ProblemDef& problem, int n_a, int n_b) {
  if (n_a < 1 || n_b < 1) throw InvalidArgument("control sample counts must be >= 1");
  return {detail::sample_set(problem.control_a, n_a), detail::sample_set(problem.control_b, n_b)};
}

inline ControlGrid sample_controls(const ProblemDef& problem) {
  return sample_controls(problem, problem.default_samples_a, problem.default_samples_b);
}

/// H(x,p) = min_b max_a { -f(x,a,b).p - l(x,a,b) } over the sampled controls.
inline double hamiltonian(const ProblemDef& problem, const ControlGrid& controls, const Vec2& x,
                          const Vec2& p) {
  double outer = std::numeric_limits<double>::infinity();
  for (const Vec2& b : controls.b) {
    double inner = -std::numeric_limits<double>::infinity();
    for (const Vec2& a : controls.a) {
      const Vec2 f = problem.dynamics(x, a, b);
      inner = std::max(inner, -(f[0] * p[0] + f[1] * p[1]) - problem.running_cost(x, a, b));
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

}  // namespace hjdd
