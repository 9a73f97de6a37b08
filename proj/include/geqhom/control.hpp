#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "geqhom/fields.hpp"
#include "geqhom/geometry.hpp"

namespace geqhom {

class TravelTimeField;

/// Largest s >= 0 such that s*e is an admissible velocity of
/// dX/dt = drift_sign*V + alpha with |alpha| <= b, i.e. |s e - drift_sign v| <= b.
/// Returns nullopt when no positive speed along e is admissible.
/// drift_sign = -1 is the travel-time dynamics; +1 the burned-region growth.
std::optional<double> max_speed(Vec2 v, Vec2 e, int drift_sign, double b);

/// Unchecked kernel of max_speed for w = drift_sign * v; returns 0 when
/// infeasible. Inner loops call this directly.
inline double speed_along(Vec2 w, Vec2 e, double b) {
  // |s e - w| <= b  <=>  s^2 - 2 s (w.e) + |w|^2 - b^2 <= 0
  const double we = dot(w, e);
  const double radicand = we * we + b * b - norm2(w);
  if (radicand < 0.0) return 0.0;
  const double s = we + std::sqrt(radicand);
  return s > 0.0 ? s : 0.0;
}

/// Piecewise-constant control alpha(t) with |alpha| <= bound. Segment i is
/// active on [starts[i], starts[i+1]); the last segment extends forever.
class ControlSignal {
 public:
  ControlSignal(std::vector<double> starts, std::vector<Vec2> values, double bound);
  /// Uniform segments of length `step` starting at t = 0.
  static ControlSignal uniform(std::vector<Vec2> values, double step, double bound);
  static ControlSignal constant(Vec2 value, double bound);

  Vec2 at(double t) const;
  double bound() const { return bound_; }
  const std::vector<double>& starts() const { return starts_; }
  const std::vector<Vec2>& values() const { return values_; }

 private:
  std::vector<double> starts_;
  std::vector<Vec2> values_;
  double bound_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> positions;
  ControlSignal control = ControlSignal::constant({}, 1.0);
};

/// Classical RK4 for dX/dt = drift_sign*V(X) + alpha(t) on [0, T]. Control
/// switch times are honoured exactly: each control segment is integrated
/// with its own uniform substeps of length <= dt.
Trajectory integrate(const FieldRealization& field, Vec2 x0, const ControlSignal& control,
                     double T, double dt, int drift_sign);

struct DescentPath {
  Trajectory path;          ///< node sequence from the source to the target
  double path_time = 0.0;   ///< sum of edge traversal times
  double tau_value = 0.0;   ///< arrival value read at the target node
  double slack = 0.0;       ///< path_time / tau_value - 1
  double replay_error = 0;  ///< |RK4 replay endpoint - target node|
};

/// Reconstructs a near-optimal path by following stencil predecessors back
/// from y, then replays its edge controls through the true dynamics.
/// Throws NumericalFailure when y is unreachable.
DescentPath descend_path(const TravelTimeField& tau, Vec2 y);

}  // namespace geqhom
