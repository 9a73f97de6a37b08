#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geqhom/fields.hpp"
#include "geqhom/geometry.hpp"

namespace geqhom {

/// Uniform square lattice centred at `center` with nodes at
/// center + (i - m, j - m) * h, i, j in [0, 2m], m = half_width / h.
/// Edges join each node to the offsets of `stencil_offsets(stencil)`.
struct Grid2 {
  Vec2 center{};
  double half_width = 1.0;
  double h = 0.1;
  int stencil = 3;

  /// Rounds half_width up to a whole number of cells.
  static Grid2 covering(Vec2 center, double half_width, double h, int stencil = 3);

  void validate() const;  // throws InvalidArgument
  int cells() const { return static_cast<int>(half_width / h + 0.5); }  // m
  int side() const { return 2 * cells() + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(side()) + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const {
    const int m = cells();
    return {center.x + (i - m) * h, center.y + (j - m) * h};
  }
  Vec2 node(std::size_t idx) const {
    return node(static_cast<int>(idx % side()), static_cast<int>(idx / side()));
  }
  /// Point on the doubled lattice, used for edge midpoints so both
  /// orientations of an edge evaluate at bit-identical coordinates.
  Vec2 half_node(int qi, int qj) const {
    const int m2 = 2 * cells();
    return {center.x + (qi - m2) * (0.5 * h), center.y + (qj - m2) * (0.5 * h)};
  }
  bool contains(Vec2 p) const;
  /// Nearest node; nullopt outside the box.
  std::optional<std::array<int, 2>> nearest(Vec2 p) const;
};

/// Lattice offsets (dx, dy) with max(|dx|,|dy|) <= k and gcd(|dx|,|dy|) = 1:
/// 8, 16 and 32 directions for k = 1, 2, 3.
std::vector<std::array<int, 2>> stencil_offsets(int k);

/// Velocity on the doubled lattice (every node and every stencil edge
/// midpoint). Read-only after construction, so one table can serve many
/// concurrent solves on the same field and grid.
class MidpointTable {
 public:
  MidpointTable(const FieldRealization& field, const Grid2& grid, unsigned jobs = 0);

  const Grid2& grid() const { return grid_; }
  Vec2 at(int qi, int qj) const {
    return values_[static_cast<std::size_t>(qj) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(qi)];
  }

 private:
  Grid2 grid_;
  int side_;
  std::vector<Vec2> values_;
};

struct SolveOptions {
  /// Stop once the smallest open label exceeds this; unsettled nodes
  /// report +inf and `horizon()` tells the caller values beyond it are unknown.
  double horizon = kInf;
  /// Optional precomputed velocities; must be built on the same grid.
  const MidpointTable* table = nullptr;
};

/// First-arrival values on a Grid2: +inf marks unreachable (or beyond the
/// horizon). Holds the field it was computed on for path replay.
class TravelTimeField {
 public:
  TravelTimeField(std::shared_ptr<const FieldRealization> field, Grid2 grid, int drift_sign,
                  double bound, double horizon);

  const Grid2& grid() const { return grid_; }
  const FieldRealization& field() const { return *field_; }
  int drift_sign() const { return drift_sign_; }
  double control_bound() const { return bound_; }
  double horizon() const { return horizon_; }
  /// Maximum attainable speed, V_inf + b. Every edge cost is at least
  /// length / speed_bound().
  double speed_bound() const { return field_->v_inf() + bound_; }

  std::span<const double> values() const { return values_; }
  std::span<const std::int32_t> parents() const { return parents_; }
  std::span<const std::int32_t> settle_order() const { return order_; }
  const std::vector<std::size_t>& source_nodes() const { return sources_; }

  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  /// Value at the node nearest to p. Throws InvalidArgument outside the grid.
  double nearest_value(Vec2 p) const;
  /// Bilinear interpolation of the four surrounding nodes (falls back to the
  /// nearest node when a corner is +inf). Interpolation of a convex minorant
  /// stays above it, so the exact lower bound dist/(V_inf+b) is preserved.
  double sample(Vec2 p) const;

  /// A value v at any node of the disk B(c, r) with v <= certified_bound(c, r)
  /// equals the value on the unbounded lattice: any path leaving the box
  /// must cross the outer band of stencil width and then come back.
  double certified_bound(Vec2 c, double r = 0.0) const;
  bool certified(Vec2 y) const;

  // Solver access.
  std::vector<double>& mutable_values() { return values_; }
  std::vector<std::int32_t>& mutable_parents() { return parents_; }
  std::vector<std::int32_t>& mutable_order() { return order_; }
  std::vector<std::size_t>& mutable_sources() { return sources_; }

 private:
  std::shared_ptr<const FieldRealization> field_;
  Grid2 grid_;
  int drift_sign_;
  double bound_;
  double horizon_;
  std::vector<double> values_;
  std::vector<std::int32_t> parents_;
  std::vector<std::int32_t> order_;
  std::vector<std::size_t> sources_;
};

/// Label-setting shortest paths over the stencil graph. The edge n -> n+d
/// costs |d| h / s with s = max_speed(V(midpoint), d/|d|, drift_sign, b);
/// infeasible edges are absent. Sources snap to their nearest nodes.
TravelTimeField solve_travel_time(const FieldRealization& field, std::span<const Vec2> sources,
                                  const Grid2& grid, int drift_sign = -1, double b = 1.0,
                                  SolveOptions options = {});

/// tau(x, y) read at the node nearest to y. Throws GridTooSmall when the
/// box cannot certify the value.
double tau(const FieldRealization& field, Vec2 x, Vec2 y, const Grid2& grid,
           int drift_sign = -1, double b = 1.0);

/// Deterministic source sample of the disk B(center, R): ceil(n/2) points
/// equally spaced on the circle (starting at angle 0), the rest on a
/// golden-angle sunflower inside, starting at the centre.
std::vector<Vec2> disk_sources(Vec2 center, double R, int n);

struct GammaEstimate {
  double value = 0.0;  ///< lower bound on sup of tau over pairs in B_R; +inf if a pair is unreachable
  Vec2 witness_source;
  Vec2 witness_target;
  int sources = 0;
  std::string sampling;
};

/// gamma(R) over the ball B_R centred at grid.center: max over `n` sampled
/// sources of the max over all nodes of B_R.
GammaEstimate gamma_hat(const FieldRealization& field, double R, int n, const Grid2& grid,
                        int drift_sign = -1, double b = 1.0);

struct Triple {
  Vec2 x, y, z;
};

struct TriangleReport {
  int checked = 0;
  int violations = 0;
  double slack = 0.0;
  double worst_excess = -kInf;  ///< max of tau(x,z) - tau(x,y) - tau(y,z)
  std::vector<Triple> failures;
};

/// Checks tau(x,z) <= tau(x,y) + tau(y,z) + 4 h (V_inf + 1) on each triple.
TriangleReport verify_triangle(const FieldRealization& field, std::span<const Triple> triples,
                               const Grid2& grid, int drift_sign = -1, double b = 1.0);

}  // namespace geqhom
