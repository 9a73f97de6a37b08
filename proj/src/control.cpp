#include "geqhom/control.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "geqhom/errors.hpp"
#include "geqhom/traveltime.hpp"

namespace geqhom {

std::optional<double> max_speed(Vec2 v, Vec2 e, int drift_sign, double b) {
  if (std::abs(norm2(e) - 1.0) > 1e-9) throw InvalidArgument("max_speed: direction must be a unit vector");
  if (drift_sign != 1 && drift_sign != -1) throw InvalidArgument("max_speed: drift_sign must be +1 or -1");
  if (!(b > 0.0)) throw InvalidArgument("max_speed: control bound must be positive");
  const double s = speed_along(v * static_cast<double>(drift_sign), e, b);
  if (s == 0.0) return std::nullopt;
  return s;
}

ControlSignal::ControlSignal(std::vector<double> starts, std::vector<Vec2> values, double bound)
    : starts_(std::move(starts)), values_(std::move(values)), bound_(bound) {
  if (starts_.size() != values_.size() || values_.empty())
    throw InvalidArgument("control signal needs one start time per value");
  if (!(bound_ > 0.0)) throw InvalidArgument("control bound must be positive");
  for (std::size_t i = 1; i < starts_.size(); ++i) {
    if (!(starts_[i] >= starts_[i - 1])) throw InvalidArgument("control start times must be sorted");
  }
  for (const Vec2& a : values_) {
    if (norm(a) > bound_ * (1.0 + 1e-12)) throw InvalidArgument("control value exceeds its bound");
  }
}

ControlSignal ControlSignal::uniform(std::vector<Vec2> values, double step, double bound) {
  if (!(step > 0.0)) throw InvalidArgument("control step must be positive");
  std::vector<double> starts(values.size());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = static_cast<double>(i) * step;
  return ControlSignal(std::move(starts), std::move(values), bound);
}

ControlSignal ControlSignal::constant(Vec2 value, double bound) {
  return ControlSignal({0.0}, {value}, bound);
}

Vec2 ControlSignal::at(double t) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - starts_.begin()) - 1];
}

Trajectory integrate(const FieldRealization& field, Vec2 x0, const ControlSignal& control,
                     double T, double dt, int drift_sign) {
  if (!(dt > 0.0)) throw InvalidArgument("integrate: dt must be positive");
  if (!(T >= 0.0)) throw InvalidArgument("integrate: T must be >= 0");
  const double sign = static_cast<double>(drift_sign);

  // Segment boundaries inside (0, T).
  std::vector<double> cuts{0.0};
  for (double s : control.starts()) {
    if (s > 0.0 && s < T) cuts.push_back(s);
  }
  cuts.push_back(T);

  Trajectory out;
  out.control = control;
  out.times.push_back(0.0);
  out.positions.push_back(x0);
  Vec2 x = x0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double t0 = cuts[seg], t1 = cuts[seg + 1];
    if (!(t1 > t0)) continue;
    const Vec2 alpha = control.at(t0);
    auto rhs = [&](Vec2 p) { return field.velocity(p) * sign + alpha; };
    const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-12));
    const double step = (t1 - t0) / static_cast<double>(steps);
    for (long n = 0; n < steps; ++n) {
      const Vec2 k1 = rhs(x);
      const Vec2 k2 = rhs(x + k1 * (0.5 * step));
      const Vec2 k3 = rhs(x + k2 * (0.5 * step));
      const Vec2 k4 = rhs(x + k3 * step);
      x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
      out.times.push_back(n + 1 == steps ? t1 : t0 + static_cast<double>(n + 1) * step);
      out.positions.push_back(x);
    }
  }
  return out;
}

DescentPath descend_path(const TravelTimeField& tau, Vec2 y) {
  const Grid2& grid = tau.grid();
  const auto target = grid.nearest(y);
  if (!target) throw InvalidArgument("descend_path: target outside grid");
  std::size_t node = grid.index((*target)[0], (*target)[1]);
  const double value = tau.values()[node];
  if (!std::isfinite(value)) throw NumericalFailure("descend_path: target is unreachable");

  std::vector<std::size_t> chain{node};
  while (tau.parents()[node] >= 0) {
    node = static_cast<std::size_t>(tau.parents()[node]);
    chain.push_back(node);
  }
  std::reverse(chain.begin(), chain.end());

  DescentPath out;
  out.tau_value = value;
  std::vector<double> starts;
  std::vector<Vec2> controls;
  std::vector<double> times{0.0};
  std::vector<Vec2> positions{grid.node(chain.front())};
  const double sign = static_cast<double>(tau.drift_sign());
  const int side = grid.side();
  double t = 0.0;
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const std::size_t a = chain[k - 1], b = chain[k];
    const int ai = static_cast<int>(a % side), aj = static_cast<int>(a / side);
    const int bi = static_cast<int>(b % side), bj = static_cast<int>(b / side);
    const Vec2 delta = grid.node(b) - grid.node(a);
    const double len = norm(delta);
    const Vec2 e = delta / len;
    const Vec2 v = tau.field().velocity(grid.half_node(ai + bi, aj + bj));
    const auto s = max_speed(v, e, tau.drift_sign(), tau.control_bound());
    if (!s) throw NumericalFailure("descend_path: predecessor edge is infeasible");
    starts.push_back(t);
    // alpha = s e - sign v, clipped onto the admissible ball against rounding.
    Vec2 alpha = e * *s - v * sign;
    const double an = norm(alpha);
    if (an > tau.control_bound()) alpha = alpha * (tau.control_bound() / an);
    controls.push_back(alpha);
    t += len / *s;
    times.push_back(t);
    positions.push_back(grid.node(b));
  }
  out.path_time = t;
  out.slack = value > 0.0 ? t / value - 1.0 : 0.0;
  if (controls.empty()) {
    out.path.control = ControlSignal::constant({}, tau.control_bound());
  } else {
    out.path.control = ControlSignal(starts, controls, tau.control_bound());
    const Trajectory replay = integrate(tau.field(), positions.front(), out.path.control, t,
                                        grid.h / 8.0, tau.drift_sign());
    out.replay_error = norm(replay.positions.back() - positions.back());
  }
  out.path.times = std::move(times);
  out.path.positions = std::move(positions);
  return out;
}

}  // namespace geqhom
