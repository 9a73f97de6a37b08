#include "geqhom/gequation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "geqhom/errors.hpp"
#include "geqhom/parallel.hpp"

namespace geqhom {

double ScalarField2::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::string_view to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::cosine: return "cosine";
    case InitialKind::bump: return "bump";
    case InitialKind::disk: return "disk";
    case InitialKind::constant: return "constant";
  }
  return "cosine";
}

InitialKind initial_kind_from_string(std::string_view name) {
  for (InitialKind k : {InitialKind::cosine, InitialKind::bump, InitialKind::disk, InitialKind::constant})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown initial data kind '" + std::string(name) + "'");
}

InitialData InitialData::cosine(Vec2 wavevector, double amplitude) {
  InitialData u;
  u.kind = InitialKind::cosine;
  u.wavevector = wavevector;
  u.amplitude = amplitude;
  return u;
}

InitialData InitialData::bump(Vec2 center, double radius, double amplitude) {
  InitialData u;
  u.kind = InitialKind::bump;
  u.center = center;
  u.radius = radius;
  u.amplitude = amplitude;
  return u;
}

InitialData InitialData::disk(Vec2 center, double radius, double width, double amplitude) {
  InitialData u;
  u.kind = InitialKind::disk;
  u.center = center;
  u.radius = radius;
  u.width = width;
  u.amplitude = amplitude;
  return u;
}

InitialData InitialData::constant(double value) {
  InitialData u;
  u.kind = InitialKind::constant;
  u.amplitude = value;
  return u;
}

void InitialData::validate() const {
  if (!std::isfinite(amplitude)) throw InvalidArgument("initial data amplitude must be finite");
  if (kind == InitialKind::cosine && !(std::isfinite(wavevector.x) && std::isfinite(wavevector.y)))
    throw InvalidArgument("cosine wavevector must be finite");
  if ((kind == InitialKind::bump || kind == InitialKind::disk) && !(radius > 0.0 && std::isfinite(radius)))
    throw InvalidArgument("initial data radius must be positive");
  if (kind == InitialKind::disk && !(width > 0.0 && std::isfinite(width)))
    throw InvalidArgument("disk width must be positive");
}

double InitialData::operator()(Vec2 x) const {
  switch (kind) {
    case InitialKind::cosine:
      return amplitude * std::cos(dot(wavevector, x));
    case InitialKind::bump: {
      const double s2 = norm2(x - center) / (radius * radius);
      return s2 >= 1.0 ? 0.0 : amplitude * (1.0 - s2) * (1.0 - s2);
    }
    case InitialKind::disk:
      return amplitude * std::tanh((radius - norm(x - center)) / width);
    case InitialKind::constant:
      return amplitude;
  }
  return 0.0;
}

double InitialData::lipschitz() const {
  switch (kind) {
    case InitialKind::cosine:
      return std::abs(amplitude) * norm(wavevector);
    case InitialKind::bump:
      // max of |d/ds (1 - s^2)^2| = 8 / (3 sqrt 3) at s = 1/sqrt 3
      return std::abs(amplitude) * 8.0 / (3.0 * std::sqrt(3.0)) / radius;
    case InitialKind::disk:
      return std::abs(amplitude) / width;
    case InitialKind::constant:
      return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Lax-Friedrichs

std::vector<ScalarField2> solve_geq(const FieldRealization& field, double eps, const InitialData& u0,
                                    std::span<const double> times, const Grid2& grid, double cfl,
                                    SchemeReport* report) {
  grid.validate();
  u0.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidArgument("solve_geq: CFL number must lie in (0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("solve_geq: eps must lie in (0, 1]");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k]) || (k > 0 && times[k] < times[k - 1]))
      throw InvalidArgument("solve_geq: snapshot times must be finite, >= 0 and sorted");
  }

  const int n = grid.side();
  const auto N = grid.node_count();
  const double h = grid.h;
  const double sigma = 1.0 + field.v_inf();
  const double dt_max = cfl * h / (2.0 * sigma);

  std::vector<double> u(N), next(N);
  std::vector<Vec2> vel(N);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = j * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      const Vec2 x = grid.node(i, static_cast<int>(j));
      u[k] = u0(x);
      vel[k] = field.velocity(x / eps);
    }
  });

  auto step = [&](double dt) {
    const double half_sigma = 0.5 * sigma;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t jr) {
      const int j = static_cast<int>(jr);
      const std::size_t row = jr * static_cast<std::size_t>(n);
      const std::size_t down = (j > 0 ? jr - 1 : jr) * static_cast<std::size_t>(n);
      const std::size_t up = (j + 1 < n ? jr + 1 : jr) * static_cast<std::size_t>(n);
      for (int i = 0; i < n; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const std::size_t il = i > 0 ? ii - 1 : ii, ir = i + 1 < n ? ii + 1 : ii;
        const double c = u[row + ii];
        const double p1m = (c - u[row + il]) / h, p1p = (u[row + ir] - c) / h;
        const double p2m = (c - u[down + ii]) / h, p2p = (u[up + ii] - c) / h;
        const double a1 = 0.5 * (p1m + p1p), a2 = 0.5 * (p2m + p2p);
        const Vec2 v = vel[row + ii];
        const double H = std::sqrt(a1 * a1 + a2 * a2) - (v.x * a1 + v.y * a2);
        next[row + ii] = c + dt * (H + half_sigma * ((p1p - p1m) + (p2p - p2m)));
      }
    });
    u.swap(next);
  };

  std::vector<ScalarField2> out;
  double now = 0.0;
  long total = 0;
  for (double t : times) {
    if (t > now) {
      const auto steps = static_cast<long>(std::ceil((t - now) / dt_max - 1e-9));
      const double dt = (t - now) / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) step(dt);
      total += steps;
      now = t;
    }
    for (double v : u) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "solve_geq: non-finite value at t = " << t;
        throw NumericalFailure(msg.str());
      }
    }
    out.push_back({grid, t, u});
  }
  if (report) {
    report->dt = dt_max;
    report->sigma = sigma;
    report->steps = total;
    report->cone_radius = static_cast<double>(total) * h;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reachable-set representation

std::vector<ScalarField2> ueps_rep(const FieldRealization& field, double eps, const InitialData& u0,
                                   std::span<const double> times, const Grid2& eval,
                                   const RepresentationOptions& options) {
  eval.validate();
  u0.validate();
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("ueps_rep: eps must lie in (0, 1]");
  if (!(options.h > 0.0)) throw InvalidArgument("ueps_rep: h must be positive");
  if (times.empty()) throw InvalidArgument("ueps_rep: need at least one time");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || !std::isfinite(times[k]) || (k > 0 && times[k] < times[k - 1]))
      throw InvalidArgument("ueps_rep: times must be positive, finite and sorted");
  }
  const double horizon = times.back() / eps;
  // Every path of duration <= horizon stays within this distance of its start.
  const double reach = (field.v_inf() + 1.0) * horizon + (options.stencil + 1) * options.h;

  std::vector<ScalarField2> out;
  for (double t : times) out.push_back({eval, t, std::vector<double>(eval.node_count())});

  parallel_for(eval.node_count(), [&](std::size_t node) {
    const Vec2 x = eval.node(node);
    const Vec2 fast = x / eps;
    const Grid2 grid = Grid2::covering(fast, reach, options.h, options.stencil);
    const Vec2 src[] = {fast};
    const TravelTimeField tt = solve_travel_time(field, src, grid, -1, 1.0, SolveOptions{horizon, nullptr});
    const auto order = tt.settle_order();
    const auto values = tt.values();
    const int m = grid.cells(), side = grid.side();
    double best = -kInf;
    std::size_t next = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double limit = times[k] / eps;
      while (next < order.size() && values[static_cast<std::size_t>(order[next])] <= limit) {
        const int id = order[next];
        const Vec2 offset{(id % side - m) * options.h, (id / side - m) * options.h};
        best = std::max(best, u0(x + offset * eps));
        ++next;
      }
      out[k].values[node] = best;
    }
  }, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Hopf-Lax over the Wulff set

namespace {

bool inside_convex(std::span<const Vec2> poly, Vec2 p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

Vec2 project_convex(std::span<const Vec2> poly, Vec2 p) {
  if (poly.size() == 1 || inside_convex(poly, p)) return poly.size() == 1 ? poly[0] : p;
  Vec2 best = poly[0];
  double best_d = kInf;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const Vec2 d = b - a;
    const double s = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
    const Vec2 q = a + d * s;
    const double dist = norm2(p - q);
    if (dist < best_d) {
      best_d = dist;
      best = q;
    }
  }
  return best;
}

}  // namespace

double sup_on_polygon(const InitialData& u0, std::span<const Vec2> polygon) {
  if (polygon.empty()) throw InvalidArgument("sup_on_polygon: empty polygon");
  const double a = u0.amplitude;
  switch (u0.kind) {
    case InitialKind::constant:
      return a;
    case InitialKind::cosine: {
      double lo = kInf, hi = -kInf;
      for (const Vec2& v : polygon) {
        const double s = dot(u0.wavevector, v);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      // peak phase 0 for a >= 0, pi otherwise
      const double peak = a >= 0.0 ? 0.0 : kPi;
      if (std::floor((hi - peak) / (2 * kPi)) * 2 * kPi + peak >= lo) return std::abs(a);
      return std::max(a * std::cos(lo), a * std::cos(hi));
    }
    case InitialKind::bump:
    case InitialKind::disk: {
      // Radial profiles: decreasing in |x - c| when a >= 0, increasing otherwise.
      if (a >= 0.0) return u0(project_convex(polygon, u0.center));
      Vec2 far = polygon[0];
      for (const Vec2& v : polygon)
        if (norm2(v - u0.center) > norm2(far - u0.center)) far = v;
      return u0(far);
    }
  }
  return a;
}

ScalarField2 solve_effective(const WulffSet& w, const InitialData& u0, double t, const Grid2& eval) {
  eval.validate();
  u0.validate();
  if (!(t >= 0.0)) throw InvalidArgument("solve_effective: t must be >= 0");
  if (w.vertices.size() < 3) throw InvalidArgument("solve_effective: Wulff polygon needs >= 3 vertices");
  ScalarField2 out{eval, t, std::vector<double>(eval.node_count())};
  parallel_for(eval.node_count(), [&](std::size_t k) {
    const Vec2 x = eval.node(k);
    if (t == 0.0) {
      out.values[k] = u0(x);
      return;
    }
    std::vector<Vec2> poly;
    poly.reserve(w.vertices.size());
    for (const Vec2& v : w.vertices) poly.push_back(x + v * t);
    out.values[k] = sup_on_polygon(u0, poly);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Convergence study

HomogenizationTable homogenization_error(const FieldSpec& spec, std::uint64_t seed, const InitialData& u0,
                                         double T, std::span<const double> eps, double R,
                                         const HomogenizationOptions& options) {
  if (!(T > 0.0)) throw InvalidArgument("homogenization_error: T must be positive");
  if (!(R > 0.0)) throw InvalidArgument("homogenization_error: R must be positive");
  if (eps.empty()) throw InvalidArgument("homogenization_error: empty eps list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] <= 1.0) || (k > 0 && !(eps[k] < eps[k - 1])))
      throw InvalidArgument("homogenization_error: eps list must be decreasing within (0, 1]");
  }
  if (options.time_samples < 1) throw InvalidArgument("homogenization_error: need time samples");

  HomogenizationTable table;
  const std::vector<std::uint64_t> seeds =
      options.wulff_seeds.empty() ? std::vector<std::uint64_t>{seed} : options.wulff_seeds;
  GridPolicy policy;
  policy.h = options.h;
  policy.stencil = options.stencil;
  table.wulff = build_wulff(spec, seeds, options.wulff_directions, options.wulff_radii, policy);

  for (int k = 1; k <= options.time_samples; ++k) table.times.push_back(T * k / options.time_samples);
  const Grid2 eval = Grid2::covering({0, 0}, R, options.eval_spacing);
  std::vector<ScalarField2> ubar;
  for (double t : table.times) ubar.push_back(solve_effective(table.wulff, u0, t, eval));

  const FieldRealization field = sample_field(spec, seed);
  for (double e : eps) {
    const auto start = std::chrono::steady_clock::now();
    const auto ue = ueps_rep(field, e, u0, table.times, eval, {options.h, options.stencil});
    HomogenizationRow row;
    row.eps = e;
    row.error = 0.0;
    for (std::size_t k = 0; k < table.times.size(); ++k) {
      for (std::size_t n = 0; n < eval.node_count(); ++n) {
        if (norm(eval.node(n)) > R + 1e-9) continue;
        const double d = std::abs(ue[k].values[n] - ubar[k].values[n]);
        if (d > row.error) {
          row.error = d;
          row.where = eval.node(n);
          row.when = table.times[k];
        }
      }
    }
    // A reachable point lies within half a lattice diagonal of a node.
    row.noise_floor = u0.lipschitz() * e * options.h / std::sqrt(2.0);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    table.rows.push_back(row);
  }
  table.decreasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    if (!(table.rows[k].error < table.rows[k - 1].error)) table.decreasing = false;
  return table;
}

}  // namespace geqhom
