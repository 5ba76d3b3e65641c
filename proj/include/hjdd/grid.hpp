#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hjdd/error.hpp"

namespace hjdd {

using Vec2 = std::array<double, 2>;

inline double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

/// Axis-aligned rectangle [x_min,x_max] x [y_min,y_max].
struct Box {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  bool contains(const Vec2& p, double slack = 0.0) const {
    return p[0] >= x_min - slack && p[0] <= x_max + slack && p[1] >= y_min - slack &&
           p[1] <= y_max + slack;
  }
  double diameter() const { return std::hypot(x_max - x_min, y_max - y_min); }
  bool operator==(const Box&) const = default;
};

/// Lattice description: bounding box plus node counts per axis.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  int nx = 2;
  int ny = 2;

  /// Square lattice on [-1,1]^2 with `cells` cells per axis (`cells + 1` nodes).
  static GridSpec unit_square(int cells) { return {-1.0, 1.0, -1.0, 1.0, cells + 1, cells + 1}; }

  Box box() const { return {x_min, x_max, y_min, y_max}; }
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dy() const { return (y_max - y_min) / (ny - 1); }

  void validate() const {
    if (nx < 2 || ny < 2) throw InvalidArgument("grid needs at least 2 nodes per axis");
    if (!(x_min < x_max) || !(y_min < y_max)) throw InvalidArgument("grid bounding box is empty");
    if (!std::isfinite(dx()) || !std::isfinite(dy()) || dx() <= 0.0 || dy() <= 0.0)
      throw InvalidArgument("grid spacing is not finite and positive");
  }
  bool operator==(const GridSpec&) const = default;
};

enum class NodeClass : std::uint8_t { Interior, Boundary, Ghost };

/// Shape of the state domain and of the exit set.
///
/// BoxEdges:     domain = box, target = the four edges of the box.
/// BoxMinusBall: domain = box minus the closed ball B(center, radius), target = that ball.
/// StripSides:   domain = box, target = the two vertical edges x = x_min and x = x_max.
struct Geometry {
  enum class Kind { BoxEdges, BoxMinusBall, StripSides };

  Kind kind = Kind::BoxEdges;
  Box domain{};
  Vec2 center{0.0, 0.0};
  double radius = 0.2;

  static Geometry box_edges(Box b = {}) { return {Kind::BoxEdges, b, {0.0, 0.0}, 0.0}; }
  static Geometry box_minus_ball(double r, Box b = {}, Vec2 c = {0.0, 0.0}) {
    return {Kind::BoxMinusBall, b, c, r};
  }
  static Geometry strip_sides(Box b = {}) { return {Kind::StripSides, b, {0.0, 0.0}, 0.0}; }

  /// Class of the point `p` on a lattice of resolution `spacing`.
  NodeClass classify(const Vec2& p, double spacing) const {
    const double eps = 1e-12 * std::max(1.0, domain.diameter());
    if (!domain.contains(p, eps)) return NodeClass::Ghost;
    const double snap = 0.5 * spacing + eps;
    switch (kind) {
      case Kind::BoxEdges: {
        const double d = std::min({p[0] - domain.x_min, domain.x_max - p[0], p[1] - domain.y_min,
                                   domain.y_max - p[1]});
        return d <= snap ? NodeClass::Boundary : NodeClass::Interior;
      }
      case Kind::StripSides: {
        const double d = std::min(p[0] - domain.x_min, domain.x_max - p[0]);
        return d <= snap ? NodeClass::Boundary : NodeClass::Interior;
      }
      case Kind::BoxMinusBall: {
        const double dx = p[0] - center[0];
        const double dy = p[1] - center[1];
        return dx * dx + dy * dy <= radius * radius + eps ? NodeClass::Boundary
                                                          : NodeClass::Interior;
      }
    }
    return NodeClass::Interior;
  }
};

/// Structured node lattice with per-node classification.
///
/// Nodes are stored row-major with j (the y index) outer and i inner, so
/// `index(i, j) = j * nx + i`.
class Grid {
 public:
  Grid() = default;
  Grid(GridSpec spec, std::vector<NodeClass> classes) : spec_(spec), classes_(std::move(classes)) {
    spec_.validate();
    if (classes_.size() != size()) throw InvalidArgument("class array does not match grid size");
  }

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.nx) * spec_.ny; }
  double dx() const { return spec_.dx(); }
  double dy() const { return spec_.dy(); }
  /// Scalar mesh size used in thresholds: the larger of the two spacings.
  double spacing() const { return std::max(dx(), dy()); }
  Box box() const { return spec_.box(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * spec_.nx + i; }
  int i_of(std::size_t k) const { return static_cast<int>(k % spec_.nx); }
  int j_of(std::size_t k) const { return static_cast<int>(k / spec_.nx); }

  Vec2 position(int i, int j) const { return {spec_.x_min + i * dx(), spec_.y_min + j * dy()}; }
  Vec2 position(std::size_t k) const { return position(i_of(k), j_of(k)); }

  NodeClass node_class(std::size_t k) const { return classes_[k]; }
  std::span<const NodeClass> classes() const { return classes_; }

  std::size_t count(NodeClass c) const {
    return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), c));
  }

 private:
  GridSpec spec_{};
  std::vector<NodeClass> classes_;
};

inline Grid build_grid(const GridSpec& spec, const Geometry& geometry) {
  spec.validate();
  if (geometry.kind == Geometry::Kind::BoxMinusBall && !(geometry.radius > 0.0))
    throw InvalidArgument("ball target needs a positive radius");
  const double spacing = std::max(spec.dx(), spec.dy());
  std::vector<NodeClass> classes(static_cast<std::size_t>(spec.nx) * spec.ny);
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const Vec2 p{spec.x_min + i * spec.dx(), spec.y_min + j * spec.dy()};
      classes[static_cast<std::size_t>(j) * spec.nx + i] = geometry.classify(p, spacing);
    }
  }
  Grid grid(spec, std::move(classes));
  if (grid.count(NodeClass::Boundary) == 0)
    throw InvalidArgument("geometry has no exit-set node on this lattice");
  return grid;
}

/// One scalar per grid node.
using ValueField = std::vector<double>;

/// Bilinear interpolation weights of a point inside the bounding box: the
/// lower-left node of the enclosing cell and the local coordinates in [0,1].
struct CellLocation {
  std::size_t base = 0;
  double tx = 0.0;
  double ty = 0.0;
};

/// Locates `p` in the lattice. Points within a relative 1e-9 of the box are
/// snapped onto it; anything further out is an error.
inline CellLocation locate(const GridSpec& spec, const Vec2& p) {
  const double sx = (p[0] - spec.x_min) / spec.dx();
  const double sy = (p[1] - spec.y_min) / spec.dy();
  constexpr double kSnap = 1e-9;
  if (!(sx >= -kSnap && sx <= spec.nx - 1 + kSnap && sy >= -kSnap && sy <= spec.ny - 1 + kSnap))
    throw OutOfDomain("interpolation point outside the grid bounding box");
  const double cx = std::clamp(sx, 0.0, static_cast<double>(spec.nx - 1));
  const double cy = std::clamp(sy, 0.0, static_cast<double>(spec.ny - 1));
  const int i = std::min(static_cast<int>(cx), spec.nx - 2);
  const int j = std::min(static_cast<int>(cy), spec.ny - 2);
  return {static_cast<std::size_t>(j) * spec.nx + i, cx - i, cy - j};
}

inline double interpolate_at(std::span<const double> field, int nx, const CellLocation& c) {
  const double* v0 = field.data() + c.base;
  const double* v1 = v0 + nx;
  const double lower = v0[0] + c.tx * (v0[1] - v0[0]);
  const double upper = v1[0] + c.tx * (v1[1] - v1[0]);
  return lower + c.ty * (upper - lower);
}

inline double interpolate(const Grid& grid, std::span<const double> field, const Vec2& p) {
  if (field.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  return interpolate_at(field, grid.nx(), locate(grid.spec(), p));
}

}  // namespace hjdd
