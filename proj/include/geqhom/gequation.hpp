#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geqhom/fields.hpp"
#include "geqhom/geometry.hpp"
#include "geqhom/homogenize.hpp"
#include "geqhom/traveltime.hpp"

namespace geqhom {

/// Nodal snapshot u(t, .) on a Grid2.
struct ScalarField2 {
  Grid2 grid;
  double t = 0.0;
  std::vector<double> values;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double sup_norm() const;
};

enum class InitialKind { cosine, bump, disk, constant };

std::string_view to_string(InitialKind kind);
InitialKind initial_kind_from_string(std::string_view name);  // throws InvalidArgument

/// Closed-form bounded, Lipschitz initial data.
///
/// - cosine:   amplitude * cos(wavevector . x)
/// - bump:     amplitude * (1 - |x-c|^2/r^2)^2 inside B_r(c), 0 outside
/// - disk:     amplitude * tanh((r - |x-c|) / width), a smoothed signed distance
/// - constant: amplitude
struct InitialData {
  InitialKind kind = InitialKind::cosine;
  double amplitude = 1.0;
  Vec2 wavevector{1.0, 0.0};
  Vec2 center{};
  double radius = 1.0;
  double width = 0.25;

  static InitialData cosine(Vec2 wavevector, double amplitude = 1.0);
  static InitialData bump(Vec2 center, double radius, double amplitude = 1.0);
  static InitialData disk(Vec2 center, double radius, double width, double amplitude = 1.0);
  static InitialData constant(double value);

  void validate() const;
  double operator()(Vec2 x) const;
  double lipschitz() const;
  double sup_norm() const { return std::abs(amplitude); }
};

struct SchemeReport {
  double dt = 0.0;
  double sigma = 0.0;
  long steps = 0;
  double cone_radius = 0.0;  ///< n h: how far the stencil carries information
};

/// Explicit monotone Lax-Friedrichs scheme for u_t = |Du| - V(x/eps).Du on
/// `grid` (zero-gradient ghost nodes at the box edge). sigma = 1 + V_inf,
/// dt = cfl h / (2 sigma) shortened so every snapshot time is hit exactly.
/// Throws InvalidArgument unless 0 < cfl <= 1 and 0 < eps <= 1.
std::vector<ScalarField2> solve_geq(const FieldRealization& field, double eps, const InitialData& u0,
                                    std::span<const double> times, const Grid2& grid, double cfl = 0.5,
                                    SchemeReport* report = nullptr);

/// Lattice used for the rescaled travel-time solves of ueps_rep.
struct RepresentationOptions {
  double h = 0.25;  ///< spacing in the fast variable x / eps
  int stencil = 3;
};

/// u^eps(t, x) = sup of u0 over {y : eps tau(x/eps, y/eps) <= t}, the
/// sublevel envelope of the reachable set, for every node of `eval` and each
/// time. One horizon-limited solve per eval node serves all times.
std::vector<ScalarField2> ueps_rep(const FieldRealization& field, double eps, const InitialData& u0,
                                   std::span<const double> times, const Grid2& eval,
                                   const RepresentationOptions& options = {});

/// Exact sup of u0 over a convex polygon (counter-clockwise vertices). Every
/// library datum is a profile of one linear or radial coordinate, so the sup
/// reduces to the projection interval or the nearest / farthest point.
double sup_on_polygon(const InitialData& u0, std::span<const Vec2> polygon);

/// ubar(t, x) = sup of u0 over x + t W, exactly.
ScalarField2 solve_effective(const WulffSet& w, const InitialData& u0, double t, const Grid2& eval);

struct HomogenizationOptions {
  std::vector<double> wulff_radii{10, 20, 40};
  std::vector<std::uint64_t> wulff_seeds;  ///< empty: the realization's own seed only
  int wulff_directions = 32;
  double h = 0.25;          ///< lattice spacing for the Wulff set and the rescaled solves
  double eval_spacing = 1.0;
  int time_samples = 8;
  int stencil = 3;
};

struct HomogenizationRow {
  double eps = 0.0;
  double error = 0.0;  ///< max |u^eps - ubar| over times and eval points in B_R
  Vec2 where;
  double when = 0.0;
  double noise_floor = 0.0;
  double seconds = 0.0;
};

struct HomogenizationTable {
  std::vector<HomogenizationRow> rows;
  std::vector<double> times;
  bool decreasing = false;  ///< strictly decreasing in eps
  WulffSet wulff;
};

HomogenizationTable homogenization_error(const FieldSpec& spec, std::uint64_t seed, const InitialData& u0,
                                         double T, std::span<const double> eps, double R,
                                         const HomogenizationOptions& options = {});

}  // namespace geqhom
