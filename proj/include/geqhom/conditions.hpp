#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geqhom/fields.hpp"
#include "geqhom/geometry.hpp"

namespace geqhom {

struct Estimate {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;  ///< standard error or interval half-width; 0 when exact
};

struct Witness {
  std::string what;
  std::uint64_t seed = 0;
  Vec2 point;
  Vec2 other;
  double value = 0.0;
};

/// Small numeric table: one row per radius / seed / time.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Outcome of one empirical check. Verdicts are finite-sample evidence, never
/// proofs; `verdict` says which.
struct ConditionReport {
  std::string id;
  bool passed = false;
  std::string verdict;
  std::vector<Estimate> estimates;
  std::vector<Witness> witnesses;
  std::vector<std::pair<std::string, std::string>> parameters;
  Table table;

  /// Value of the named estimate; throws InvalidArgument if absent.
  double estimate(std::string_view name) const;
};

/// Wilson score interval for k successes out of n at z standard deviations.
std::pair<double, double> wilson_interval(int k, int n, double z = 1.96);

/// The cutoff profile: 0 for s <= M, s/2 - M/2 - 1/6 for s >= M+1, a cubic
/// bridge in between. Throws InvalidArgument for M <= 0.
double rho(double s, double M);

/// sup of |Psi(x) - Psi(center)| over |x - center| <= radius, sampled on a
/// lattice of the given spacing, plus v_inf * spacing / sqrt 2 so the result
/// is an upper bound.
double stream_oscillation(const FieldRealization& field, Vec2 center, double radius, double spacing = 0.05);

/// Psi_hat = Psi + phi with phi(x) = rho(|x - z|).
struct ModifiedStream {
  FieldRealization base;
  FieldRealization modified;
  Vec2 z;
  double M = 0.0;

  double phi(Vec2 x) const { return rho(norm(x - z), M); }
  double psi_hat(Vec2 x) const { return modified.psi(x); }
};

ModifiedStream modify_stream(const FieldRealization& field, Vec2 z, double M);

/// Dense check of the modified stream: Psi_hat = Psi on B_M(z), |grad phi| <= 1/2,
/// and, when |Psi - Psi(z)| <= K on B_{3M+5K}(z), the annulus bounds
/// K + 1/3 <= Psi_hat - Psi_hat(z) <= 3K + 1/3 + M for M+1+4K <= |x-z| <= 3M+1+4K.
ConditionReport check_modified_stream(const ModifiedStream& ms, double K, double spacing = 0.05);

/// Smallest K >= 1 (up to 5% inflation) with |Psi - Psi(z)| <= K on
/// B_{3M+5K}(z), by fixed-point iteration. Throws NumericalFailure when the
/// iteration diverges (stream growing too fast).
double hypothesis_K(const FieldRealization& field, Vec2 z, double M, double spacing = 0.05);

struct Lemma51Options {
  double h = 0.1;
  double slack = 1.1;  ///< absorbs discretization in the travel-time bounds
  double spacing = 0.05;
};

/// Travel-time bound from stream growth on sampled pairs of B_M(z): tau <= tau_hat
/// (modified field, controls of size 1/2, same lattice), tau <= 17 R slack with
/// R = 3M+1+4K from every sampled source to every node of B_M(z), and
/// tau <= (C1' K + C2' |x-y|) slack with C1' = 425, C2' = 204.
ConditionReport check_lemma51(const FieldSpec& spec, std::uint64_t seed, Vec2 z, double M, int samples,
                              const Lemma51Options& options = {});

struct GammaOptions {
  double h = 0.25;
  int sources = 16;
  double margin = 4.0;
  double drift_tol = 0.2;  ///< taubound: max relative change of the last two mean ratios
};

/// gamma_hat(R) / R per seed and radius. Bounded when no +inf appears and the
/// last two seed-mean ratios differ by less than drift_tol.
ConditionReport check_taubound(const FieldSpec& spec, std::span<const std::uint64_t> seeds,
                               std::span<const double> radii, const GammaOptions& options = {});

/// Monte Carlo mean of gamma_hat(R) over seeds first_seed, ..., first_seed+n-1,
/// with tail fractions P(gamma > q mean). Finite when no +inf appears and the
/// tail fractions do not increase with q.
ConditionReport check_gammaexp(const FieldSpec& spec, int n, double R, std::uint64_t first_seed = 0,
                               const GammaOptions& options = {});

/// P(sup_{|x|<=r} |Psi(x) - Psi(0)| > r/6) on the r grid with Wilson intervals,
/// and its trapezoid integral. For bounded streams the probability vanishes
/// beyond r_cut = 12 ||Psi||_inf.
ConditionReport stream_growth_integral(const FieldSpec& spec, std::span<const double> r_grid, int n,
                                       std::uint64_t first_seed = 0, double spacing = 0.05);

/// E|Psi(0)|^3 with standard error; fails for streams that are not stationary.
ConditionReport check_moment3(const FieldSpec& spec, int n, std::uint64_t first_seed = 0);

/// sup_{|x|<=r} |Psi(x)| / r over the radii. Sublinear when the ratio strictly
/// decreases over the last three doublings (or is identically 0).
ConditionReport check_sublinear(const FieldSpec& spec, std::uint64_t seed, std::span<const double> radii,
                                double spacing = 0.1);

/// Area of {y : tau(x, y) <= t} by node counting against pi t^2; requires a
/// divergence-free field. Passes when every area >= pi t^2 (1 - tol).
ConditionReport check_volume_bound(const FieldSpec& spec, std::uint64_t seed, Vec2 x,
                                   std::span<const double> times, double h = 0.05, double tol = 0.05);

}  // namespace geqhom
