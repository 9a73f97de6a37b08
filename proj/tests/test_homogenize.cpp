#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "geqhom/errors.hpp"
#include "geqhom/homogenize.hpp"
#include "geqhom/random.hpp"

using namespace geqhom;

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t first, int n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), first);
  return s;
}

}  // namespace

TEST_CASE("convex hull and radial extent") {
  const std::vector<Vec2> pts{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {0, 0}, {0.5, 0.2}, {1, 0}, {1, 1}};
  const auto hull = convex_hull(pts);
  REQUIRE(hull.size() == 4);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) area += cross(hull[i], hull[(i + 1) % hull.size()]);
  CHECK(area / 2 == doctest::Approx(4.0));  // counter-clockwise
  CHECK(radial_extent(hull, {1, 0}) == doctest::Approx(1.0));
  CHECK(radial_extent(hull, Vec2{1, 1} / std::sqrt(2.0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("fit_qbar recovers an exact q + c/r law") {
  const std::vector<double> radii{10, 20, 40, 80};
  std::vector<double> ratios;
  for (double r : radii) ratios.push_back(0.4 + 2.0 / r);
  const auto est = fit_qbar({1, 0}, radii, ratios, 0.25);
  CHECK(est.qbar == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(est.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(est.residual <= 1e-12);
  // Extrapolation never crosses the exact lower bound.
  CHECK(fit_qbar({1, 0}, radii, ratios, 0.45).qbar == 0.45);
  ratios[2] = kInf;
  CHECK_FALSE(fit_qbar({1, 0}, radii, ratios, 0.25).homogenizing);
}

TEST_CASE("estimate_qbar") {
  const std::vector<double> radii{5, 10, 20};
  SUBCASE("V = 0") {
    const auto est = estimate_qbar(FieldSpec::zero(), 0, {1, 0}, radii);
    for (double q : est.ratios) CHECK(q == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.qbar == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("shear A = 2 along the channel") {
    const std::vector<double> r2{10, 20, 40};
    const auto est = estimate_qbar(FieldSpec::shear(2.0), 3, {1, 0}, r2);
    CHECK(est.qbar == doctest::Approx(1.0 / 3.0).epsilon(0.10));
    CHECK(est.ratios.back() == doctest::Approx(1.0 / 3.0).epsilon(0.10));
    for (double q : est.ratios) CHECK(q >= est.lower_bound);
  }
  SUBCASE("lower bound holds in every direction") {
    for (int k = 0; k < 6; ++k) {
      const Vec2 p = unit_direction(0.37 + k);
      const auto est = estimate_qbar(FieldSpec::cellular(2.0), 7, p, radii, {0.1, 3, 3.0});
      for (double q : est.ratios) CHECK(q >= est.lower_bound);
    }
  }
  SUBCASE("trap is flagged non-homogenizing") {
    const auto est = estimate_qbar(FieldSpec::gradient_trap(), 0, {1, 0}, radii);
    CHECK_FALSE(est.homogenizing);
  }
  CHECK_THROWS_AS(estimate_qbar(FieldSpec::zero(), 0, {1, 0}, std::vector<double>{5, 10}), InvalidArgument);
  CHECK_THROWS_AS(estimate_qbar(FieldSpec::zero(), 0, {1, 0}, std::vector<double>{5, 20, 10}), InvalidArgument);
}

TEST_CASE("Wulff sets and the support function") {
  const std::vector<double> radii{5, 10, 20};
  SUBCASE("V = 0 gives the unit disk") {
    const std::uint64_t seeds[] = {0};
    const auto w = build_wulff(FieldSpec::zero(), seeds, 32, radii, {0.05, 3, 2.0});
    double worst = 0.0;
    for (const Vec2& v : w.vertices) worst = std::max(worst, std::abs(norm(v) - 1.0));
    CHECK(worst <= 0.02);
    for (int k = 0; k < 50; ++k) {
      const Vec2 p = unit_direction(0.1 * k);
      CHECK(support(w, p) == doctest::Approx(1.0).epsilon(0.02));
    }
  }
  SUBCASE("shear A = 2: long along the channel, short across") {
    const auto seeds = seed_range(0, 2);
    const auto w = build_wulff(FieldSpec::shear(2.0), seeds, 16, std::vector<double>{10, 20, 40},
                               {0.1, 3, 4.0});
    const double along = radial_extent(w.vertices, {1, 0});
    CHECK(along == doctest::Approx(3.0).epsilon(0.10));
    CHECK(along <= 3.0 * (1 + 1e-12));
    const double across = radial_extent(w.vertices, {0, 1});
    CHECK(across >= 1.0 / 3.0);
    CHECK(across <= 1.0 + w.estimator_noise + 0.02);
    CHECK(support(w, {1, 0}) >= 3.0 * 0.9);
  }
  SUBCASE("algebra is exact") {
    const std::uint64_t seeds[] = {4};
    const auto w = build_wulff(FieldSpec::cellular(1.0), seeds, 16, radii, {0.1, 3, 3.0});
    const CounterRng rng(5, 0);
    int homog = 0, subadd = 0;
    double min_unit = kInf;
    for (int k = 0; k < 1000; ++k) {
      const Vec2 p{4 * rng.uniform(4 * k) - 2, 4 * rng.uniform(4 * k + 1) - 2};
      const Vec2 q{4 * rng.uniform(4 * k + 2) - 2, 4 * rng.uniform(4 * k + 3) - 2};
      if (support(w, p * 2.0) != 2.0 * support(w, p)) ++homog;
      if (support(w, p + q) > support(w, p) + support(w, q) + 1e-15 * (norm(p) + norm(q))) ++subadd;
      min_unit = std::min(min_unit, support(w, unit_direction(2 * kPi * k / 1000.0)));
    }
    CHECK(homog == 0);
    CHECK(subadd == 0);
    CHECK(support(w, {0, 0}) == 0.0);
    CHECK(min_unit >= 1.0 / (1.0 + w.v_inf));
    const EffectiveHamiltonian H{w};
    CHECK(H({0.3, 0.4}) == support(w, {0.3, 0.4}));
  }
  SUBCASE("errors") {
    const std::uint64_t seeds[] = {0};
    CHECK_THROWS_AS(build_wulff(FieldSpec::zero(), seeds, 4, radii), InvalidArgument);
    CHECK_THROWS_AS(build_wulff(FieldSpec::gradient_trap(), seeds, 8, radii), NumericalFailure);
  }
}

TEST_CASE("convexification stays within estimator noise (cellular A = 1)") {
  const auto seeds = seed_range(20, 6);
  const auto w = build_wulff(FieldSpec::cellular(1.0), seeds, 16, std::vector<double>{40, 60, 80},
                             {0.2, 3, 4.0});
  CHECK(w.convexification_change <= w.estimator_noise);
}

TEST_CASE("shape diagnostics") {
  SUBCASE("V = 0 has no dispersion") {
    const auto seeds = seed_range(0, 5);
    const auto d = shape_diagnostics(FieldSpec::zero(), seeds, {1, 0}, std::vector<double>{5, 10}, {0.3, 0.2});
    for (double s : d.spread) CHECK(s == 0.0);
    CHECK(d.base_agrees);
  }
  SUBCASE("cellular A = 1 self-averages") {
    const auto seeds = seed_range(100, 8);
    const auto d = shape_diagnostics(FieldSpec::cellular(1.0), seeds, {1, 0}, std::vector<double>{20, 40, 80},
                                     {0.5, 0.25}, {0.2, 3, 4.0});
    CHECK(d.spread.back() <= 0.5 * d.spread.front());
    CHECK(d.base_gap[1] <= d.base_slack[1]);
  }
  const auto seeds = seed_range(0, 3);
  CHECK_THROWS_AS(shape_diagnostics(FieldSpec::zero(), seeds, {1, 0}, std::vector<double>{5}, {}), InvalidArgument);
}
