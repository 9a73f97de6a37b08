#include "geqhom/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "geqhom/errors.hpp"
#include "geqhom/parallel.hpp"

namespace geqhom {

void GridPolicy::validate() const {
  if (!(h > 0.0)) throw InvalidArgument("grid policy: h must be positive");
  if (stencil < 1 || stencil > 3) throw InvalidArgument("grid policy: stencil must be 1, 2 or 3");
  if (!(margin >= 0.0)) throw InvalidArgument("grid policy: margin must be >= 0");
  if (!(growth > 1.0)) throw InvalidArgument("grid policy: growth must exceed 1");
  if (max_growths < 0) throw InvalidArgument("grid policy: max_growths must be >= 0");
}

namespace {

void check_radii(std::span<const double> radii, std::size_t minimum) {
  if (radii.size() < minimum) {
    std::ostringstream msg;
    msg << "need at least " << minimum << " radii";
    throw InvalidArgument(msg.str());
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
      throw InvalidArgument("radii must be positive and strictly increasing");
  }
}

// Travel times from `source` sampled (bilinearly) at `targets`. The box is
// centred near `center`, snapped so the source is a node, and enlarged until
// every target value is certified.
std::vector<double> certified_samples(const FieldRealization& field, Vec2 source, Vec2 center,
                                      double half_width, std::span<const Vec2> targets,
                                      const GridPolicy& policy) {
  const double h = policy.h;
  const Vec2 snapped{source.x + h * std::round((center.x - source.x) / h),
                     source.y + h * std::round((center.y - source.y) / h)};
  double half = half_width;
  for (int attempt = 0;; ++attempt) {
    const Grid2 grid = Grid2::covering(snapped, half, h, policy.stencil);
    const Vec2 src[] = {source};
    const TravelTimeField t = solve_travel_time(field, src, grid);
    std::vector<double> out(targets.size());
    bool ok = true;
    for (std::size_t k = 0; k < targets.size() && ok; ++k) {
      out[k] = t.sample(targets[k]);
      const double bound = t.certified_bound(targets[k], 1.5 * h);
      ok = std::isfinite(out[k]) ? out[k] <= bound : !std::isfinite(bound);
    }
    if (ok) return out;
    if (attempt >= policy.max_growths) {
      std::ostringstream msg;
      msg << "grid half-width " << grid.half_width << " cannot certify travel times from ("
          << source.x << ", " << source.y << ")";
      throw GridTooSmall(msg.str());
    }
    half *= policy.growth;
  }
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<Vec2> roots_of_unity(int K) {
  std::vector<Vec2> out;
  for (int j = 0; j < K; ++j) out.push_back(unit_direction(2.0 * kPi * j / K));
  return out;
}

}  // namespace

DirectionalEstimate fit_qbar(Vec2 direction, std::span<const double> radii,
                             std::span<const double> ratios, double lower_bound) {
  DirectionalEstimate out;
  out.direction = direction;
  out.radii.assign(radii.begin(), radii.end());
  out.ratios.assign(ratios.begin(), ratios.end());
  out.lower_bound = lower_bound;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (!std::isfinite(ratios[k])) {
      out.homogenizing = false;
      out.witness = direction * radii[k];
      out.qbar = kInf;
      return out;
    }
  }
  if (radii.size() < 2) throw InvalidArgument("fit_qbar: need at least two radii");
  // Ordinary least squares in x = 1/r.
  const auto n = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double x = 1.0 / radii[k];
    sx += x;
    sy += ratios[k];
    sxx += x * x;
    sxy += x * ratios[k];
  }
  const double det = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - out.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = ratios[k] - intercept - out.slope / radii[k];
    rss += r * r;
  }
  out.residual = std::sqrt(rss / n);
  out.qbar = std::max(intercept, lower_bound);
  return out;
}

DirectionalEstimate estimate_qbar(const FieldSpec& spec, std::uint64_t seed, Vec2 p,
                                  std::span<const double> radii, const GridPolicy& policy) {
  policy.validate();
  check_radii(radii, 3);
  if (std::abs(norm(p) - 1.0) > 1e-9) throw InvalidArgument("estimate_qbar: p must be a unit vector");
  const FieldRealization field = sample_field(spec, seed);
  std::vector<Vec2> targets;
  for (double r : radii) targets.push_back(p * r);
  const double rmax = radii.back();
  const auto values = certified_samples(field, {0, 0}, p * (0.5 * rmax), 0.5 * rmax + policy.margin,
                                        targets, policy);
  std::vector<double> ratios(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) ratios[k] = values[k] / radii[k];
  return fit_qbar(p, radii, ratios, 1.0 / (field.v_inf() + 1.0));
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double radial_extent(std::span<const Vec2> polygon, Vec2 p) {
  // Exit through the supporting line n.z = c (c > 0) minimising c / (n.p).
  double best = kInf;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
    const Vec2 n{b.y - a.y, a.x - b.x};  // outward for counter-clockwise order
    const double np = dot(n, p);
    if (np > 0.0) best = std::min(best, dot(n, a) / np);
  }
  return best;
}

WulffSet wulff_from_qbar(std::vector<double> qbar, std::vector<double> qbar_se, double v_inf) {
  const int K = static_cast<int>(qbar.size());
  if (K < 3) throw InvalidArgument("wulff set needs at least 3 directions");
  if (qbar_se.size() != qbar.size()) throw InvalidArgument("wulff set: qbar_se size mismatch");
  WulffSet w;
  w.directions = roots_of_unity(K);
  w.v_inf = v_inf;
  std::vector<Vec2> polar;
  for (int j = 0; j < K; ++j) {
    if (!(qbar[static_cast<std::size_t>(j)] > 0.0) || !std::isfinite(qbar[static_cast<std::size_t>(j)]))
      throw NumericalFailure("wulff set: qbar must be positive and finite");
    polar.push_back(w.directions[static_cast<std::size_t>(j)] / qbar[static_cast<std::size_t>(j)]);
  }
  w.vertices = convex_hull(polar);
  for (std::size_t i = 0; i < w.vertices.size(); ++i) {
    const Vec2 a = w.vertices[i], b = w.vertices[(i + 1) % w.vertices.size()];
    if (!(cross(a, b) > 0.0)) throw NumericalFailure("wulff set: origin is not strictly interior");
  }
  for (int j = 0; j < K; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const double gain = radial_extent(w.vertices, w.directions[jj]) * qbar[jj] - 1.0;
    w.convexification_change = std::max(w.convexification_change, gain);
    w.estimator_noise = std::max(w.estimator_noise, qbar_se[jj] / qbar[jj]);
  }
  w.qbar = std::move(qbar);
  w.qbar_se = std::move(qbar_se);
  return w;
}

WulffSet build_wulff(const FieldSpec& spec, std::span<const std::uint64_t> seeds, int K,
                     std::span<const double> radii, const GridPolicy& policy) {
  policy.validate();
  check_radii(radii, 3);
  if (K < 8) throw InvalidArgument("build_wulff: K must be at least 8");
  if (seeds.empty()) throw InvalidArgument("build_wulff: need at least one seed");
  const auto dirs = roots_of_unity(K);
  std::vector<Vec2> targets;
  for (const Vec2& p : dirs)
    for (double r : radii) targets.push_back(p * r);

  struct PerSeed {
    std::vector<double> qbar;
    double v_inf = 0.0;
  };
  std::vector<PerSeed> rows(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    const FieldRealization field = sample_field(spec, seeds[s]);
    const auto values = certified_samples(field, {0, 0}, {0, 0}, radii.back() + policy.margin,
                                          targets, policy);
    const double lower = 1.0 / (field.v_inf() + 1.0);
    rows[s].v_inf = field.v_inf();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      std::vector<double> ratios(radii.size());
      for (std::size_t k = 0; k < radii.size(); ++k) ratios[k] = values[j * radii.size() + k] / radii[k];
      const auto est = fit_qbar(dirs[j], radii, ratios, lower);
      if (!est.homogenizing) {
        std::ostringstream msg;
        msg << "non-homogenizing: seed " << seeds[s] << " has tau = +inf from (0, 0) to ("
            << est.witness.x << ", " << est.witness.y << ")";
        throw NumericalFailure(msg.str());
      }
      rows[s].qbar.push_back(est.qbar);
    }
  });

  std::vector<double> qbar(dirs.size()), se(dirs.size());
  double v_inf = 0.0;
  for (const auto& row : rows) v_inf = std::max(v_inf, row.v_inf);
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    std::vector<double> col;
    for (const auto& row : rows) col.push_back(row.qbar[j]);
    qbar[j] = mean_of(col);
    se[j] = sd_of(col) / std::sqrt(static_cast<double>(col.size()));
  }
  WulffSet w = wulff_from_qbar(std::move(qbar), std::move(se), v_inf);
  w.seeds.assign(seeds.begin(), seeds.end());
  w.radii.assign(radii.begin(), radii.end());
  for (auto& row : rows) w.per_seed_qbar.push_back(std::move(row.qbar));
  return w;
}

double support(const WulffSet& w, Vec2 p) {
  if (p == Vec2{}) return 0.0;
  double best = -kInf;
  for (const Vec2& v : w.vertices) best = std::max(best, dot(p, v));
  return best;
}

ShapeDiagnostics shape_diagnostics(const FieldSpec& spec, std::span<const std::uint64_t> seeds,
                                   Vec2 p, std::span<const double> radii, Vec2 base,
                                   const GridPolicy& policy) {
  policy.validate();
  check_radii(radii, 1);
  if (seeds.size() < 5) throw InvalidArgument("shape_diagnostics: need at least 5 seeds");
  if (std::abs(norm(p) - 1.0) > 1e-9) throw InvalidArgument("shape_diagnostics: p must be a unit vector");
  const std::size_t ns = seeds.size(), nr = radii.size();

  // Job (s, 0) is the origin run for seed s; job (s, 1 + k) the base-point run at radius k.
  std::vector<double> from0(ns * nr), frombase(ns * nr);
  double v_inf = 0.0;
  std::vector<double> vinfs(ns);
  parallel_for(ns * (nr + 1), [&](std::size_t job) {
    const std::size_t s = job / (nr + 1), k = job % (nr + 1);
    const FieldRealization field = sample_field(spec, seeds[s]);
    if (k == 0) {
      vinfs[s] = field.v_inf();
      std::vector<Vec2> targets;
      for (double r : radii) targets.push_back(p * r);
      const auto v = certified_samples(field, {0, 0}, p * (0.5 * radii.back()),
                                       0.5 * radii.back() + policy.margin, targets, policy);
      for (std::size_t i = 0; i < nr; ++i) from0[s * nr + i] = v[i] / radii[i];
    } else {
      const double r = radii[k - 1];
      const Vec2 src = base * r;
      const Vec2 tgt[] = {src + p * r};
      const auto v = certified_samples(field, src, src + p * (0.5 * r), 0.5 * r + policy.margin, tgt, policy);
      frombase[s * nr + (k - 1)] = v[0] / r;
    }
  });
  for (double v : vinfs) v_inf = std::max(v_inf, v);

  ShapeDiagnostics out;
  out.direction = p;
  out.base = base;
  out.radii.assign(radii.begin(), radii.end());
  for (std::size_t i = 0; i < nr; ++i) {
    std::vector<double> a(ns), b(ns), d(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      a[s] = from0[s * nr + i];
      b[s] = frombase[s * nr + i];
      d[s] = b[s] - a[s];
    }
    const double m = mean_of(a);
    out.mean.push_back(m);
    out.spread.push_back(std::isfinite(m) && m > 0.0 ? sd_of(a) / m : kInf);
    out.base_mean.push_back(mean_of(b));
    out.base_gap.push_back(std::abs(mean_of(d)));
    out.base_slack.push_back(3.0 * sd_of(d) / std::sqrt(static_cast<double>(ns)) +
                             4.0 * policy.h * (v_inf + 1.0) / radii[i]);
    if (!(out.base_gap.back() <= out.base_slack.back())) out.base_agrees = false;
    if (i > 0 && out.spread[i] > out.spread[i - 1]) out.contracting = false;
  }
  for (std::size_t s = 0; s < ns; ++s)
    out.per_seed.emplace_back(from0.begin() + static_cast<std::ptrdiff_t>(s * nr),
                              from0.begin() + static_cast<std::ptrdiff_t>((s + 1) * nr));
  return out;
}

}  // namespace geqhom
