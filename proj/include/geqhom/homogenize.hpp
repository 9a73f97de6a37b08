#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geqhom/fields.hpp"
#include "geqhom/geometry.hpp"
#include "geqhom/traveltime.hpp"

namespace geqhom {

/// How the shape estimators size their lattices. A box that cannot certify
/// a requested value is enlarged by `growth` up to `max_growths` times before
/// GridTooSmall is thrown.
struct GridPolicy {
  double h = 0.1;
  int stencil = 3;
  double margin = 5.0;
  double growth = 1.5;
  int max_growths = 4;

  void validate() const;
};

/// tau(0, r p) / r along one direction for one realization, with the
/// least-squares fit q_r = qbar + c / r.
struct DirectionalEstimate {
  Vec2 direction;
  std::vector<double> radii;
  std::vector<double> ratios;
  double qbar = 0.0;        ///< fitted intercept, clamped at lower_bound
  double slope = 0.0;       ///< fitted c
  double residual = 0.0;    ///< RMS fit residual
  double lower_bound = 0.0; ///< 1 / (V_inf + 1)
  bool homogenizing = true;
  Vec2 witness;             ///< first target with tau = +inf
};

/// Fit q_r = qbar + c / r by least squares (needs >= 2 finite ratios).
DirectionalEstimate fit_qbar(Vec2 direction, std::span<const double> radii,
                             std::span<const double> ratios, double lower_bound);

DirectionalEstimate estimate_qbar(const FieldSpec& spec, std::uint64_t seed, Vec2 p,
                                  std::span<const double> radii, const GridPolicy& policy = {});

/// Convex polygon approximating W_1 = {z : qbar(z) <= 1}.
struct WulffSet {
  std::vector<Vec2> directions;      ///< the K-th roots of unity
  std::vector<double> qbar;          ///< seed-averaged estimate per direction
  std::vector<double> qbar_se;       ///< standard error across seeds (0 for one seed)
  std::vector<Vec2> vertices;        ///< convex hull of qbar(p)^-1 p, counter-clockwise
  double convexification_change = 0.0;  ///< max relative radial gain from the hull step
  double estimator_noise = 0.0;          ///< max relative standard error of qbar
  double v_inf = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> radii;
  std::vector<std::vector<double>> per_seed_qbar;  ///< [seed][direction]
};

/// Convex hull (Andrew's monotone chain), counter-clockwise, collinear
/// points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Distance from the origin to the boundary of a convex polygon containing
/// it, along the unit ray p.
double radial_extent(std::span<const Vec2> polygon, Vec2 p);

/// Assembles a Wulff set from per-direction qbar values (directions must be
/// the K-th roots of unity, K >= 3). Throws NumericalFailure when the origin
/// is not strictly interior.
WulffSet wulff_from_qbar(std::vector<double> qbar, std::vector<double> qbar_se, double v_inf);

/// Per-seed shape estimates in K directions; one travel-time solve per seed
/// covers every direction and radius. Throws NumericalFailure naming the
/// seed, direction and radius when some tau is +inf.
WulffSet build_wulff(const FieldSpec& spec, std::span<const std::uint64_t> seeds, int K,
                     std::span<const double> radii, const GridPolicy& policy = {});

/// H(p) = max over vertices of p . v; 0 at p = 0.
double support(const WulffSet& w, Vec2 p);

/// The effective Hamiltonian as the support function of a Wulff set.
struct EffectiveHamiltonian {
  WulffSet wulff;
  double operator()(Vec2 p) const { return support(wulff, p); }
};

struct ShapeDiagnostics {
  Vec2 direction;
  Vec2 base;                        ///< alternative base point, in units of r
  std::vector<double> radii;
  std::vector<double> mean;         ///< across-seed mean of q_r from 0
  std::vector<double> spread;       ///< across-seed sd / mean
  std::vector<double> base_mean;    ///< mean of tau(r b, r b + r p) / r
  std::vector<double> base_gap;     ///< |base_mean - mean|
  std::vector<double> base_slack;   ///< 3 se of the paired difference + snapping
  bool contracting = true;          ///< spread non-increasing in r
  bool base_agrees = true;
  std::vector<std::vector<double>> per_seed;  ///< [seed][radius]
};

/// Across-seed dispersion of q_r and base-point uniformity: q_r is also
/// measured from the base point r * base.
ShapeDiagnostics shape_diagnostics(const FieldSpec& spec, std::span<const std::uint64_t> seeds,
                                   Vec2 p, std::span<const double> radii, Vec2 base,
                                   const GridPolicy& policy = {});

}  // namespace geqhom
