#include <cmath>
#include <vector>

#include "doctest.h"
#include "geqhom/control.hpp"
#include "geqhom/errors.hpp"
#include "geqhom/random.hpp"
#include "geqhom/traveltime.hpp"

using namespace geqhom;

namespace {

// Closed form for constant V under dX/dt = -V + alpha: the smallest t with
// |y + tV| <= t, i.e. the positive root of (|V|^2 - 1) t^2 + 2 (y.V) t + |y|^2 = 0.
double drift_time(Vec2 y, Vec2 V) {
  const double a = 1.0 - norm2(V), b = -2.0 * dot(y, V), c = -norm2(y);
  return (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::isinf(a[k]) || std::isinf(b[k])) {
      if (a[k] != b[k]) return kInf;
      continue;
    }
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(b[k])));
  }
  return worst;
}

}  // namespace

TEST_CASE("oracle self-check") {
  CHECK(drift_time({1, 0}, {0.5, 0}) == doctest::Approx(2.0));
  CHECK(drift_time({0, 1}, {0.5, 0}) == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(drift_time({-1, 0}, {0.5, 0}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("stencil offsets") {
  CHECK(stencil_offsets(1).size() == 8);
  CHECK(stencil_offsets(2).size() == 16);
  CHECK(stencil_offsets(3).size() == 32);
  // Closed under the 8 lattice symmetries.
  const auto offs = stencil_offsets(3);
  for (auto [dx, dy] : offs) {
    for (std::array<int, 2> img : {std::array{-dx, dy}, std::array{dx, -dy}, std::array{dy, dx}})
      CHECK(std::find(offs.begin(), offs.end(), img) != offs.end());
  }
}

TEST_CASE("V = 0: values converge to the Euclidean distance") {
  const auto f = sample_field(FieldSpec::zero(), 0);
  const Grid2 grid{{0, 0}, 1.5, 0.01, 3};
  const Vec2 src[] = {{0, 0}};
  const auto t = solve_travel_time(f, src, grid);
  double worst = 0.0;
  for (int j = 0; j < grid.side(); ++j) {
    for (int i = 0; i < grid.side(); ++i) {
      const double r = norm(grid.node(i, j));
      if (r < 0.5 || r > 1.0) continue;
      worst = std::max(worst, std::abs(t.at(i, j) - r) / r);
    }
  }
  CHECK(worst <= 0.02);
  CHECK(t.nearest_value({0, 0}) == 0.0);
  CHECK(tau(f, {0.3, 0.2}, {0.3, 0.2}, grid) == 0.0);
}

TEST_CASE("constant drift matches the ball-drift closed form") {
  const auto f = sample_field(FieldSpec::constant({0.5, 0}), 0);
  const Grid2 grid{{0, 0}, 3.0, 0.01, 3};
  for (Vec2 y : {Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, 0}}) {
    const double v = tau(f, {0, 0}, y, grid);
    CHECK(v == doctest::Approx(drift_time(y, {0.5, 0})).epsilon(0.05));
  }
}

TEST_CASE("gradient trap: nothing beyond radius 1/2 is reachable") {
  const auto f = sample_field(FieldSpec::gradient_trap(), 0);
  const Grid2 grid{{0, 0}, 1.5, 0.01, 3};
  const Vec2 src[] = {{0, 0}};
  const auto t = solve_travel_time(f, src, grid);
  int bad_far = 0, bad_near = 0;
  for (int j = 0; j < grid.side(); ++j) {
    for (int i = 0; i < grid.side(); ++i) {
      const double r = norm(grid.node(i, j));
      if (r >= 0.55 && std::isfinite(t.at(i, j))) ++bad_far;
      if (r <= 0.45 && !std::isfinite(t.at(i, j))) ++bad_near;
    }
  }
  CHECK(bad_far == 0);
  CHECK(bad_near == 0);
  CHECK(t.certified({1.0, 0.0}));
  CHECK(std::isinf(tau(f, {0, 0}, {1.0, 0.0}, grid)));
}

TEST_CASE("graph-level invariants") {
  const auto f = sample_field(FieldSpec::cellular(2.0), 5);
  const Grid2 grid{{0.5, -0.25}, 3.0, 0.05, 3};
  const Vec2 src[] = {{0.3, 0.1}};

  SUBCASE("stencil monotonicity is exact") {
    Grid2 g1 = grid, g2 = grid;
    g1.stencil = 1;
    g2.stencil = 2;
    const auto t1 = solve_travel_time(f, src, g1);
    const auto t2 = solve_travel_time(f, src, g2);
    const auto t3 = solve_travel_time(f, src, grid);
    int violations = 0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      if (t2.values()[k] > t1.values()[k]) ++violations;
      if (t3.values()[k] > t2.values()[k]) ++violations;
    }
    CHECK(violations == 0);
  }
  SUBCASE("reverse duality") {
    const auto fwd = solve_travel_time(f, src, grid, -1);
    const CounterRng rng(3, 0);
    for (int k = 0; k < 10; ++k) {
      const Vec2 y{grid.center.x + 4 * rng.uniform(2 * k) - 2, grid.center.y + 4 * rng.uniform(2 * k + 1) - 2};
      const auto n = *grid.nearest(y);
      const Vec2 yn = grid.node(n[0], n[1]);
      const Vec2 sy[] = {yn};
      const auto back = solve_travel_time(f, sy, grid, +1);
      const double a = fwd.nearest_value(yn), b = back.nearest_value(src[0]);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
  SUBCASE("stationarity under grid-aligned shifts") {
    const Vec2 y{0.35, -0.7};  // 7 and -14 cells
    const auto g = f.shift(y);
    Grid2 shifted = grid;
    shifted.center = grid.center - y;
    const Vec2 src2[] = {src[0] - y};
    const auto a = solve_travel_time(f, src, grid);
    const auto b = solve_travel_time(g, src2, shifted);
    CHECK(max_rel_diff(a.values(), b.values()) <= 1e-12);
  }
  SUBCASE("finite speed lower bound and b-monotonicity") {
    const auto t1 = solve_travel_time(f, src, grid, -1, 1.0);
    const auto thalf = solve_travel_time(f, src, grid, -1, 0.5);
    const Vec2 s = grid.node(t1.source_nodes()[0]);
    int lower = 0, mono = 0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      const double d = norm(grid.node(k) - s);
      if (t1.values()[k] < d / t1.speed_bound() * (1 - 1e-12)) ++lower;
      if (thalf.values()[k] < d / thalf.speed_bound() * (1 - 1e-12)) ++lower;
      if (thalf.values()[k] < t1.values()[k] * (1 - 1e-12)) ++mono;
    }
    CHECK(lower == 0);
    CHECK(mono == 0);
  }
}

TEST_CASE("shear channel: tau(0, (r,0))/r approaches 1/(1+A)") {
  const auto f = sample_field(FieldSpec::shear(2.0), 0);
  double prev = kInf;
  for (double r : {10.0, 20.0, 40.0}) {
    const Grid2 grid = Grid2::covering({r / 2, 0}, r / 2 + 6.0, 0.1);
    const double q = tau(f, {0, 0}, {r, 0}, grid) / r;
    CHECK(q < prev);
    CHECK(q >= 1.0 / 3.0);
    prev = q;
  }
  CHECK(prev == doctest::Approx(1.0 / 3.0).epsilon(0.10));
}

TEST_CASE("gamma_hat") {
  SUBCASE("V = 0 gives the diameter") {
    const auto f = sample_field(FieldSpec::zero(), 0);
    const auto g = gamma_hat(f, 1.0, 16, Grid2{{0, 0}, 2.5, 0.01});
    CHECK(g.value == doctest::Approx(2.0).epsilon(0.03));
    CHECK(g.sources == 16);
  }
  SUBCASE("constant drift: worst pair runs against the drift") {
    const auto f = sample_field(FieldSpec::constant({0.5, 0}), 0);
    const auto g = gamma_hat(f, 1.0, 16, Grid2{{0, 0}, 6.0, 0.04});
    CHECK(g.value == doctest::Approx(4.0).epsilon(0.05));
    CHECK(g.witness_source.x < 0.0);
    CHECK(g.witness_target.x > 0.9);
  }
  SUBCASE("trap gives +inf with a witness") {
    const auto f = sample_field(FieldSpec::gradient_trap(), 0);
    const auto g = gamma_hat(f, 1.0, 8, Grid2{{0, 0}, 1.5, 0.02});
    CHECK(std::isinf(g.value));
    CHECK(norm(g.witness_target - g.witness_source) > 0.5);
  }
  CHECK_THROWS_AS(gamma_hat(sample_field(FieldSpec::zero(), 0), 1.0, 1, Grid2{{0, 0}, 2.0, 0.1}),
                  InvalidArgument);
}

TEST_CASE("triangle inequality") {
  const CounterRng rng(9, 0);
  auto triples = [&](int n, double half) {
    std::vector<Triple> out;
    for (int k = 0; k < n; ++k) {
      auto p = [&](int c) { return Vec2{half * (2 * rng.uniform(6 * k + c) - 1), half * (2 * rng.uniform(6 * k + c + 1) - 1)}; };
      out.push_back({p(0), p(2), p(4)});
    }
    return out;
  };
  const Grid2 grid{{0, 0}, 3.0, 0.05};
  SUBCASE("V = 0") {
    const auto tr = triples(100, 2.0);
    const auto rep = verify_triangle(sample_field(FieldSpec::zero(), 0), tr, grid);
    CHECK(rep.checked == 100);
    CHECK(rep.violations == 0);
  }
  SUBCASE("cellular A = 2") {
    const auto tr = triples(100, 2.0);
    const auto rep = verify_triangle(sample_field(FieldSpec::cellular(2.0), 1), tr, grid);
    CHECK(rep.violations == 0);
    CHECK(rep.slack == doctest::Approx(4 * 0.05 * 3.0));
  }
  SUBCASE("degenerate triple") {
    const std::vector<Triple> tr{{{0.2, 0.1}, {0.2, 0.1}, {1.5, -0.5}}};
    const auto rep = verify_triangle(sample_field(FieldSpec::cellular(2.0), 1), tr, grid);
    CHECK(rep.violations == 0);
    CHECK(std::abs(rep.worst_excess) <= rep.slack);
  }
}

TEST_CASE("errors") {
  const auto f = sample_field(FieldSpec::constant({0.9, 0}), 0);
  CHECK_THROWS_AS(tau(f, {0, 0}, {1, 0}, Grid2{{0, 0}, 2.0, 0.05}), GridTooSmall);
  CHECK(tau(f, {0, 0}, {1, 0}, Grid2{{0, 0}, 12.0, 0.05}) == doctest::Approx(10.0).epsilon(0.05));
  CHECK_THROWS_AS(solve_travel_time(f, std::span<const Vec2>{}, Grid2{{0, 0}, 1.0, 0.1}), InvalidArgument);
  const Vec2 outside[] = {{5, 5}};
  CHECK_THROWS_AS(solve_travel_time(f, outside, Grid2{{0, 0}, 1.0, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(Grid2({{0, 0}, 1.05, 0.1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(Grid2({{0, 0}, 1.0, 0.1, 4}).validate(), InvalidArgument);
}

TEST_CASE("descend_path") {
  SUBCASE("V = 0: straight path along a stencil direction") {
    const auto f = sample_field(FieldSpec::zero(), 0);
    const Grid2 grid{{0, 0}, 1.0, 0.02};
    const Vec2 src[] = {{0, 0}};
    const auto t = solve_travel_time(f, src, grid);
    const Vec2 y{0.6, 0.2};
    const auto p = descend_path(t, y);
    for (const Vec2& x : p.path.positions) CHECK(std::abs(cross(x, y / norm(y))) <= grid.h);
    CHECK(p.path_time == doctest::Approx(norm(y)).epsilon(1e-9));
    CHECK(std::abs(p.slack) <= 1e-12);
    CHECK(p.replay_error <= 1e-9);
  }
  SUBCASE("constant drift: straight and on time") {
    const auto f = sample_field(FieldSpec::constant({0.5, 0}), 0);
    const Grid2 grid{{0, 0}, 2.0, 0.02};
    const Vec2 src[] = {{0, 0}};
    const auto t = solve_travel_time(f, src, grid);
    const auto p = descend_path(t, {0, 1});
    for (const Vec2& x : p.path.positions) CHECK(std::abs(x.x) <= grid.h);
    CHECK(p.path_time == doctest::Approx(drift_time({0, 1}, {0.5, 0})).epsilon(0.05));
    CHECK(p.replay_error <= 1e-9);
  }
  SUBCASE("trap: radial escape time -ln(1 - 2r)/2") {
    const auto f = sample_field(FieldSpec::gradient_trap(), 0);
    const Grid2 grid{{0, 0}, 1.0, 0.01};
    const Vec2 src[] = {{0, 0}};
    const auto t = solve_travel_time(f, src, grid);
    const auto p = descend_path(t, {0.4, 0});
    CHECK(std::isfinite(p.path_time));
    CHECK(p.path_time == doctest::Approx(-std::log(1 - 0.8) / 2).epsilon(0.05));
    CHECK(p.replay_error <= 0.02);
    CHECK_THROWS_AS(descend_path(t, {0.8, 0}), NumericalFailure);
  }
}
