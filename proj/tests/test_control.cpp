#include <cmath>
#include <optional>

#include "doctest.h"
#include "geqhom/control.hpp"
#include "geqhom/errors.hpp"
#include "geqhom/random.hpp"

using namespace geqhom;

namespace {

// Brute force over speeds: the largest s on a fine grid with |s e - w| <= b.
std::optional<double> scan_speeds(Vec2 v, Vec2 e, int sign, double b, int n = 100000) {
  const Vec2 w = v * static_cast<double>(sign);
  const double smax = norm(w) + b;
  std::optional<double> best;
  for (int k = 1; k <= n; ++k) {
    const double s = smax * k / n;
    if (norm(e * s - w) <= b) best = s;
  }
  return best;
}

// Brute force over controls on the circle |alpha| = b: the largest component
// along e among controls whose resulting velocity w + alpha is parallel to e.
std::optional<double> scan_controls(Vec2 v, Vec2 e, int sign, double b, int n = 10000) {
  const Vec2 w = v * static_cast<double>(sign);
  std::optional<double> best;
  auto side = [&](double phi) { return cross(w + unit_direction(phi) * b, e); };
  for (int k = 0; k < n; ++k) {
    double lo = 2 * kPi * k / n, hi = 2 * kPi * (k + 1) / n;
    double flo = side(lo), fhi = side(hi);
    if ((flo > 0) == (fhi > 0) && flo != 0) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((side(mid) > 0) == (flo > 0)) { lo = mid; flo = side(mid); } else { hi = mid; }
    }
    const Vec2 u = w + unit_direction(0.5 * (lo + hi)) * b;
    const double s = dot(u, e);
    if (s > 0 && (!best || s > *best)) best = s;
  }
  return best;
}

}  // namespace

TEST_CASE("max_speed examples") {
  CHECK(*max_speed({0, 0}, {1, 0}, -1, 1.0) == doctest::Approx(1.0));
  CHECK(*max_speed({0, 0}, {1, 0}, 1, 1.0) == doctest::Approx(1.0));
  // Drift -V = (-2, 0): moving along -x reaches 3, along +x is infeasible.
  CHECK(*max_speed({2, 0}, {-1, 0}, -1, 1.0) == doctest::Approx(3.0));
  CHECK_FALSE(max_speed({2, 0}, {1, 0}, -1, 1.0).has_value());
  CHECK(*scan_controls({2, 0}, {-1, 0}, -1, 1.0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_FALSE(scan_controls({2, 0}, {1, 0}, -1, 1.0).has_value());

  const double s = *max_speed({0.5, 0}, {0, 1}, -1, 1.0);
  CHECK(s == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  CHECK(*scan_controls({0.5, 0}, {0, 1}, -1, 1.0) == doctest::Approx(s).epsilon(1e-9));
  CHECK(*scan_speeds({0.5, 0}, {0, 1}, -1, 1.0) == doctest::Approx(s).epsilon(1e-4));

  CHECK_THROWS_AS(max_speed({0, 0}, {2, 0}, -1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(max_speed({0, 0}, {1, 0}, 0, 1.0), InvalidArgument);
}

TEST_CASE("max_speed agrees with brute-force scans on random inputs") {
  const CounterRng rng(12, 0);
  int infeasible = 0;
  for (int k = 0; k < 300; ++k) {
    const Vec2 v = unit_direction(2 * kPi * rng.uniform(4 * k)) * (3.0 * rng.uniform(4 * k + 1));
    const Vec2 e = unit_direction(2 * kPi * rng.uniform(4 * k + 2));
    const int sign = rng.uniform(4 * k + 3) < 0.5 ? -1 : 1;
    const double b = k % 2 == 0 ? 1.0 : 0.5;
    const auto formula = max_speed(v, e, sign, b);
    const auto controls = scan_controls(v, e, sign, b);
    CHECK(formula.has_value() == controls.has_value());
    if (formula && controls) CHECK(*formula == doctest::Approx(*controls).epsilon(1e-7));
    if (!formula) {
      ++infeasible;
      // Feasibility boundary: only possible when |v| > b.
      CHECK(norm(v) > b);
    }
  }
  CHECK(infeasible > 0);
}

TEST_CASE("max_speed properties") {
  const CounterRng rng(13, 0);
  for (int k = 0; k < 2000; ++k) {
    const Vec2 v = unit_direction(2 * kPi * rng.uniform(3 * k)) * (2.5 * rng.uniform(3 * k + 1));
    const Vec2 e = unit_direction(2 * kPi * rng.uniform(3 * k + 2));
    // Time-reversal duality is exact.
    const auto a = max_speed(v, e, -1, 1.0), b = max_speed(-v, e, 1, 1.0);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(*a == *b);
    // Monotone in the control bound.
    const auto small = max_speed(v, e, -1, 0.5);
    if (small && a) CHECK(*small <= *a);
    if (small) CHECK(a.has_value());
    // Never faster than |V| + b.
    if (a) CHECK(*a <= norm(v) + 1.0 + 1e-12);
  }
}

TEST_CASE("integrate examples") {
  const auto still = sample_field(FieldSpec::zero(), 0);
  const auto t1 = integrate(still, {1, 1}, ControlSignal::constant({1, 0}, 1.0), 2.0, 0.01, -1);
  CHECK(t1.positions.back().x == doctest::Approx(3.0));
  CHECK(t1.positions.back().y == doctest::Approx(1.0));
  CHECK(t1.times.back() == 2.0);

  const auto drift = sample_field(FieldSpec::constant({0.5, 0}), 0);
  const auto t2 = integrate(drift, {0, 0}, ControlSignal::constant({0, 0}, 1.0), 2.0, 0.01, -1);
  CHECK(t2.positions.back().x == doctest::Approx(-1.0));

  SUBCASE("stream function is conserved along uncontrolled cellular flow") {
    const auto cell = sample_field(FieldSpec::cellular(1.0), 4);
    const Vec2 x0{0.4, 1.3};
    const auto tr = integrate(cell, x0, ControlSignal::constant({0, 0}, 1.0), 10.0, 1e-3, -1);
    double drift_psi = 0.0;
    for (const Vec2& p : tr.positions) drift_psi = std::max(drift_psi, std::abs(cell.psi(p) - cell.psi(x0)));
    CHECK(drift_psi <= 1e-6);
  }
  SUBCASE("RK4 is fourth order") {
    const auto cell = sample_field(FieldSpec::cellular(1.0), 4);
    const auto ctrl = ControlSignal::constant({0.3, -0.2}, 1.0);
    const Vec2 ref = integrate(cell, {0.1, 0.2}, ctrl, 2.0, 1e-4, -1).positions.back();
    const double e1 = norm(integrate(cell, {0.1, 0.2}, ctrl, 2.0, 0.1, -1).positions.back() - ref);
    const double e2 = norm(integrate(cell, {0.1, 0.2}, ctrl, 2.0, 0.05, -1).positions.back() - ref);
    CHECK(e1 / e2 > 12.0);
  }
}

TEST_CASE("trajectories respect finite propagation speed") {
  const CounterRng rng(44, 0);
  for (const auto& spec : {FieldSpec::cellular(2.0), FieldSpec::shear(1.5)}) {
    const auto f = sample_field(spec, 1);
    std::vector<Vec2> values;
    for (int k = 0; k < 40; ++k) values.push_back(unit_direction(2 * kPi * rng.uniform(k)) * rng.uniform(k + 100));
    const auto ctrl = ControlSignal::uniform(values, 0.1, 1.0);
    const auto tr = integrate(f, {0.5, 0.5}, ctrl, 4.0, 0.01, -1);
    const double speed = f.v_inf() + 1.0;
    for (std::size_t i = 0; i < tr.positions.size(); ++i) {
      CHECK(norm(tr.positions[i] - tr.positions[0]) <= speed * tr.times[i] + 1e-6);
      if (i > 0) {
        const double dt = tr.times[i] - tr.times[i - 1];
        CHECK(norm(tr.positions[i] - tr.positions[i - 1]) <= speed * dt * (1 + 1e-6));
      }
    }
  }
}

TEST_CASE("control signal validation") {
  CHECK_THROWS_AS(ControlSignal::constant({0.6, 0}, 0.5), InvalidArgument);
  CHECK_NOTHROW(ControlSignal::constant({0.5, 0}, 0.5));
  const auto c = ControlSignal::uniform({{1, 0}, {0, 1}}, 0.5, 1.0);
  CHECK(c.at(0.2) == Vec2{1, 0});
  CHECK(c.at(0.7) == Vec2{0, 1});
  CHECK(c.at(5.0) == Vec2{0, 1});
}
