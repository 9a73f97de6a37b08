#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "geqhom/errors.hpp"
#include "geqhom/gequation.hpp"
#include "geqhom/random.hpp"

using namespace geqhom;

namespace {

// sup of cos(y1) over the closed disk B_t(x).
double cos_ball(Vec2 x, double t) {
  const double d = std::abs(std::remainder(x.x, 2 * kPi));
  return d <= t ? 1.0 : std::cos(d - t);
}

// sup of a nonnegative bump over B_t(z): the bump is radial and decreasing.
double bump_ball(const InitialData& b, Vec2 z, double t) {
  const double d = std::max(0.0, norm(z - b.center) - t);
  return d >= b.radius ? 0.0 : b.amplitude * std::pow(1.0 - d * d / (b.radius * b.radius), 2);
}

WulffSet exact_disk(int K) {
  return wulff_from_qbar(std::vector<double>(static_cast<std::size_t>(K), 1.0),
                         std::vector<double>(static_cast<std::size_t>(K), 0.0), 0.0);
}

}  // namespace

TEST_CASE("initial data library") {
  const auto c = InitialData::cosine({0.6, 0.8}, 2.0);
  CHECK(c({0, 0}) == 2.0);
  CHECK(c.lipschitz() == doctest::Approx(2.0));
  const auto b = InitialData::bump({1, 1}, 2.0, 3.0);
  CHECK(b({1, 1}) == 3.0);
  CHECK(b({4, 1}) == 0.0);
  // Lipschitz constant is attained near s = 1/sqrt 3.
  const double s = 1 / std::sqrt(3.0), ds = 1e-6;
  const double slope = (b({1 + 2 * (s + ds), 1}) - b({1 + 2 * (s - ds), 1})) / (4 * ds);
  CHECK(std::abs(slope) == doctest::Approx(b.lipschitz()).epsilon(1e-6));
  const auto d = InitialData::disk({0, 0}, 1.0, 0.5);
  CHECK(d({0, 1}) == 0.0);
  CHECK(d.lipschitz() == 2.0);
  CHECK(initial_kind_from_string("disk") == InitialKind::disk);
  CHECK_THROWS_AS(initial_kind_from_string("square"), InvalidArgument);
  CHECK_THROWS_AS(InitialData::bump({0, 0}, -1.0).validate(), InvalidArgument);
}

TEST_CASE("Lax-Friedrichs scheme") {
  const auto zero = sample_field(FieldSpec::zero(), 0);
  SUBCASE("V = 0, cosine data fills to 1 after t = pi") {
    // Half-width pi: the zero-gradient edges are symmetry lines of cos(x1).
    const Grid2 grid{{0, 0}, kPi, kPi / 64};
    const double times[] = {1.0, kPi + 0.2};
    SchemeReport rep;
    const auto u = solve_geq(zero, 1.0, InitialData::cosine({1, 0}), times, grid, 0.9, &rep);
    REQUIRE(u.size() == 2);
    CHECK(u[1].t == kPi + 0.2);
    CHECK(rep.sigma == 1.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      worst1 = std::max(worst1, std::abs(u[0].values[k] - cos_ball(grid.node(k), 1.0)));
      worst2 = std::max(worst2, std::abs(u[1].values[k] - 1.0));
    }
    CHECK(worst1 <= 0.03);
    CHECK(worst2 <= 0.03);
  }
  const auto cell = sample_field(FieldSpec::cellular(1.0), 2);
  const Grid2 grid{{0, 0}, 3.0, 0.05};
  const double times[] = {0.25, 0.5, 1.0};
  SUBCASE("constants are preserved exactly") {
    for (const auto& s : solve_geq(cell, 0.5, InitialData::constant(0.7), times, grid))
      for (double v : s.values) CHECK(v == 0.7);
  }
  SUBCASE("comparison for ordered pairs") {
    const CounterRng rng(11, 0);
    for (int k = 0; k < 4; ++k) {
      const Vec2 c{2 * rng.uniform(6 * k) - 1, 2 * rng.uniform(6 * k + 1) - 1};
      const double r = 0.5 + rng.uniform(6 * k + 2), a = 0.5 + rng.uniform(6 * k + 3);
      const auto lo = InitialData::bump(c, r, a);
      const auto hi = InitialData::bump(c, r * (1 + rng.uniform(6 * k + 4)), a * (1 + rng.uniform(6 * k + 5)));
      const auto u = solve_geq(cell, 0.5, lo, times, grid);
      const auto v = solve_geq(cell, 0.5, hi, times, grid);
      int bad = 0;
      for (std::size_t s = 0; s < u.size(); ++s)
        for (std::size_t n = 0; n < grid.node_count(); ++n)
          if (u[s].values[n] > v[s].values[n]) ++bad;
      CHECK(bad == 0);
    }
  }
  SUBCASE("sup norm never grows") {
    const auto u0 = InitialData::cosine({1.3, -0.4}, 1.5);
    for (const auto& s : solve_geq(cell, 0.25, u0, times, grid)) CHECK(s.sup_norm() <= 1.5 + 1e-12);
  }
  SUBCASE("finite domain of dependence") {
    // Data differ only on B_0.5((2.5, 0)); the stencil carries information
    // one node per step, so the origin is untouched while n h < 2.
    const double t[] = {0.1, 0.2};
    SchemeReport rep;
    const auto base = solve_geq(cell, 0.5, InitialData::constant(0.0), t, grid, 0.5, &rep);
    REQUIRE(rep.cone_radius < 2.0);
    const auto moved = solve_geq(cell, 0.5, InitialData::bump({2.5, 0}, 0.5), t, grid, 0.5);
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t n = 0; n < grid.node_count(); ++n)
        if (norm(grid.node(n) - Vec2{2.5, 0}) > 0.5 + rep.cone_radius + 1e-9)
          CHECK(moved[s].values[n] == base[s].values[n]);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(solve_geq(cell, 0.5, InitialData::constant(0), times, grid, 1.2), InvalidArgument);
    CHECK_THROWS_AS(solve_geq(cell, 0.0, InitialData::constant(0), times, grid), InvalidArgument);
    CHECK_THROWS_AS(solve_geq(cell, 2.0, InitialData::constant(0), times, grid), InvalidArgument);
    const double bad[] = {1.0, 0.5};
    CHECK_THROWS_AS(solve_geq(cell, 0.5, InitialData::constant(0), bad, grid), InvalidArgument);
  }
}

// The lattice only samples the reachable set, so the comparisons below use a
// fast-variable spacing fine enough that Lip * eps * h stays near 1%.
TEST_CASE("reachable-set representation") {
  const Grid2 eval{{0, 0}, 1.0, 0.5};
  const double times[] = {0.5, 1.0, 2.0};
  const auto u0 = InitialData::bump({0.8, -0.3}, 1.0);
  SUBCASE("V = 0 is the ball sup") {
    const auto u = ueps_rep(sample_field(FieldSpec::zero(), 0), 0.5, u0, times, eval, {0.05, 3});
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t n = 0; n < eval.node_count(); ++n)
        CHECK(std::abs(u[k].values[n] - bump_ball(u0, eval.node(n), times[k])) <= 0.03);
  }
  SUBCASE("constant V is the ball around x - tV") {
    const Vec2 V{0.5, 0.2};
    const auto u = ueps_rep(sample_field(FieldSpec::constant(V), 0), 0.25, u0, times, eval, {0.05, 3});
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t n = 0; n < eval.node_count(); ++n) {
        const double want = bump_ball(u0, eval.node(n) - V * times[k], times[k]);
        CHECK(std::abs(u[k].values[n] - want) <= 0.05);
      }
  }
  SUBCASE("agrees with the PDE on a cellular flow") {
    // V_inf < 1, so the <= t envelope and the exact-time set coincide.
    const auto field = sample_field(FieldSpec::cellular(0.5), 3);
    const auto c0 = InitialData::cosine({0.6, 0.8});
    const double t[] = {0.5, 1.0};
    const auto rep = ueps_rep(field, 0.5, c0, t, eval, {0.05, 3});
    const auto pde = solve_geq(field, 0.5, c0, t, Grid2{{0, 0}, 5.0, 0.02}, 0.9);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t n = 0; n < eval.node_count(); ++n) {
        const auto ij = pde[k].grid.nearest(eval.node(n));
        REQUIRE(ij);
        CHECK(std::abs(rep[k].values[n] - pde[k].at((*ij)[0], (*ij)[1])) <= 0.05);
      }
  }
  SUBCASE("non-decreasing in t") {
    const auto field = sample_field(FieldSpec::shear(2.0), 1);
    const auto u = ueps_rep(field, 0.25, InitialData::cosine({0.3, 0.1}), times, eval);
    for (std::size_t n = 0; n < eval.node_count(); ++n) {
      CHECK(u[0].values[n] >= InitialData::cosine({0.3, 0.1})(eval.node(n)));
      CHECK(u[1].values[n] >= u[0].values[n]);
      CHECK(u[2].values[n] >= u[1].values[n]);
    }
  }
  SUBCASE("errors") {
    const auto field = sample_field(FieldSpec::zero(), 0);
    const double bad[] = {0.0};
    CHECK_THROWS_AS(ueps_rep(field, 0.5, u0, bad, eval), InvalidArgument);
    CHECK_THROWS_AS(ueps_rep(field, 1.5, u0, times, eval), InvalidArgument);
  }
}

TEST_CASE("Hopf-Lax over a polygon") {
  const std::vector<Vec2> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  // Brute force: the sup over a fine lattice of the polygon never exceeds the
  // exact value and comes within Lip * spacing of it.
  auto scan = [](const InitialData& u0, std::span<const Vec2> poly) {
    double lo_x = kInf, lo_y = kInf, hi_x = -kInf, hi_y = -kInf;
    for (const Vec2& v : poly) {
      lo_x = std::min(lo_x, v.x), hi_x = std::max(hi_x, v.x);
      lo_y = std::min(lo_y, v.y), hi_y = std::max(hi_y, v.y);
    }
    double best = -kInf;
    for (const Vec2& v : poly) best = std::max(best, u0(v));
    const int n = 400;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const Vec2 p{lo_x + (hi_x - lo_x) * i / n, lo_y + (hi_y - lo_y) * j / n};
        bool in = true;
        for (std::size_t k = 0; k < poly.size(); ++k)
          if (cross(poly[(k + 1) % poly.size()] - poly[k], p - poly[k]) < 0) in = false;
        if (in) best = std::max(best, u0(p));
      }
    return best;
  };
  SUBCASE("closed forms against brute force") {
    const CounterRng rng(3, 0);
    const std::vector<InitialData> data{
        InitialData::cosine({1.7, -0.6}), InitialData::cosine({0.3, 0.2}, -2.0),
        InitialData::bump({0.4, 2.0}, 1.5), InitialData::bump({0.0, 0.3}, 0.5, -1.0),
        InitialData::disk({-2.0, 0.5}, 1.0, 0.3), InitialData::disk({0.2, 0.1}, 0.5, 0.3, -1.0),
        InitialData::constant(0.4)};
    for (std::size_t d = 0; d < data.size(); ++d)
      for (int k = 0; k < 20; ++k) {
        const Vec2 c{4 * rng.uniform(3 * k) - 2, 4 * rng.uniform(3 * k + 1) - 2};
        const double s = 0.2 + 1.5 * rng.uniform(3 * k + 2);
        std::vector<Vec2> poly;
        for (const Vec2& v : square) poly.push_back(c + v * s);
        const double exact = sup_on_polygon(data[d], poly);
        const double brute = scan(data[d], poly);
        CHECK(brute <= exact + 1e-12);
        CHECK(brute >= exact - data[d].lipschitz() * 2 * s / 400 * 1.5);
      }
  }
  const auto u0 = InitialData::bump({0.5, 0}, 1.0);
  const Grid2 eval{{0, 0}, 2.0, 0.5};
  SUBCASE("t = 0 returns the data") {
    const auto u = solve_effective(exact_disk(16), u0, 0.0, eval);
    for (std::size_t n = 0; n < eval.node_count(); ++n) CHECK(u.values[n] == u0(eval.node(n)));
  }
  SUBCASE("unit disk gives the ball formula") {
    const auto w = exact_disk(128);
    for (double t : {0.3, 1.0}) {
      const auto u = solve_effective(w, u0, t, eval);
      for (std::size_t n = 0; n < eval.node_count(); ++n)
        CHECK(std::abs(u.values[n] - bump_ball(u0, eval.node(n), t)) <= 2e-3);
    }
  }
  SUBCASE("semigroup") {
    // Samples y of x + tW give ubar(s, y) <= ubar(t + s, x); the sampled sup
    // comes within Lip * spacing of it.
    const auto w = wulff_from_qbar({1, 0.5, 0.8, 0.6, 1.2, 0.7}, std::vector<double>(6, 0.0), 1.0);
    const double t = 0.4, s = 0.7;
    const auto c0 = InitialData::cosine({1.1, 0.4});
    const auto direct = solve_effective(w, c0, t + s, eval);
    for (std::size_t n = 0; n < eval.node_count(); ++n) {
      const Vec2 x = eval.node(n);
      std::vector<Vec2> outer;
      for (const Vec2& v : w.vertices) outer.push_back(x + v * t);
      double two_step = -kInf;
      const int m = 60;
      for (std::size_t e = 0; e < outer.size(); ++e)
        for (int i = 0; i <= m; ++i)
          for (int j = 0; i + j <= m; ++j) {
            // fan triangulation from x
            const Vec2 y = x + (outer[e] - x) * (double(i) / m) + (outer[(e + 1) % outer.size()] - x) * (double(j) / m);
            std::vector<Vec2> inner;
            for (const Vec2& v : w.vertices) inner.push_back(y + v * s);
            two_step = std::max(two_step, sup_on_polygon(c0, inner));
          }
      CHECK(two_step <= direct.values[n] + 1e-12);
      CHECK(two_step >= direct.values[n] - c0.lipschitz() * 2.0 * t / m);
    }
  }
}

TEST_CASE("homogenization error table") {
  HomogenizationOptions opt;
  opt.wulff_radii = {5, 10, 20};
  opt.time_samples = 2;
  SUBCASE("V = 0 sits at the scheme tolerance") {
    const double eps[] = {0.5, 0.25};
    const auto table = homogenization_error(FieldSpec::zero(), 0, InitialData::cosine({0.6, 0.8}), 1.0, eps, 1.0, opt);
    REQUIRE(table.rows.size() == 2);
    for (const auto& row : table.rows) CHECK(row.error <= 0.03);
    CHECK(table.times.back() == 1.0);
  }
  SUBCASE("small-time modulus bound") {
    const double h = 0.25;
    const double eps[] = {0.25};
    const auto u0 = InitialData::cosine(Vec2{0.6, 0.8} / 4.0);
    const auto table = homogenization_error(FieldSpec::shear(2.0), 1, u0, h, eps, 2.0, opt);
    CHECK(table.rows[0].error <= 2 * u0.lipschitz() * h * (1 + table.wulff.v_inf));
  }
  const double bad[] = {0.25, 0.5};
  CHECK_THROWS_AS(homogenization_error(FieldSpec::zero(), 0, InitialData::constant(1), 1.0, bad, 1.0, opt),
                  InvalidArgument);
}
