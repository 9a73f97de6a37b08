#include <cmath>
#include <vector>

#include "doctest.h"
#include "geqhom/errors.hpp"
#include "geqhom/fields.hpp"
#include "geqhom/random.hpp"

using namespace geqhom;

namespace {

FieldRealization with_phases(const FieldSpec& spec, std::vector<double> phases) {
  return FieldRealization(spec, std::move(phases), {});
}

// Central-difference perp-gradient of psi, independent of velocity().
Vec2 fd_perp_grad(const FieldRealization& f, Vec2 x, double h) {
  const double d1 = (f.psi(x + Vec2{h, 0}) - f.psi(x - Vec2{h, 0})) / (2 * h);
  const double d2 = (f.psi(x + Vec2{0, h}) - f.psi(x - Vec2{0, h})) / (2 * h);
  return {-d2, d1};
}

double fd_divergence(const FieldRealization& f, Vec2 x, double h) {
  return (f.velocity(x + Vec2{h, 0}).x - f.velocity(x - Vec2{h, 0}).x) / (2 * h) +
         (f.velocity(x + Vec2{0, h}).y - f.velocity(x - Vec2{0, h}).y) / (2 * h);
}

std::vector<FieldSpec> unit_divergence_free_specs() {
  return {FieldSpec::shear(1.0), FieldSpec::cellular(1.0),
          FieldSpec::isotropic_fourier(8, 1.0, 1.0 / 8.0)};
}

}  // namespace

TEST_CASE("sample_field examples") {
  SUBCASE("constant field has constant velocity") {
    const auto f = sample_field(FieldSpec::constant({0.5, 0.0}), 17);
    CHECK(f.velocity({3.0, -2.0}) == Vec2{0.5, 0.0});
    CHECK(f.velocity({0.0, 0.0}) == Vec2{0.5, 0.0});
  }
  SUBCASE("cellular psi(0) uses the drawn phases") {
    const auto f = sample_field(FieldSpec::cellular(1.0), 5);
    const double u1 = f.phases()[0], u2 = f.phases()[1];
    CHECK(f.psi({0, 0}) == doctest::Approx(std::sin(u1) * std::sin(u2)).epsilon(1e-15));
    CHECK(u1 >= 0.0);
    CHECK(u1 < 2 * kPi);
  }
  SUBCASE("random-fourier sup |V| stays below sum |a||k|") {
    const auto spec = FieldSpec::isotropic_fourier(8, 1.0, 1.0 / 8.0);
    CHECK(spec.v_inf() == doctest::Approx(1.0));
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto f = sample_field(spec, seed);
      double sup = 0.0;
      for (int i = -200; i <= 200; ++i)
        for (int j = -200; j <= 200; ++j) sup = std::max(sup, norm(f.velocity({0.05 * i, 0.05 * j})));
      CHECK(sup <= spec.v_inf());
      CHECK(sup > 0.3);
    }
  }
  SUBCASE("identical (spec, seed) gives bit-identical fields") {
    const auto spec = FieldSpec::isotropic_fourier(6, 2.0, 0.1);
    const auto a = sample_field(spec, 99), b = sample_field(spec, 99), c = sample_field(spec, 100);
    CHECK(a.phases() == b.phases());
    CHECK(a.wavevectors() == b.wavevectors());
    CHECK(a.psi({1.3, -0.2}) == b.psi({1.3, -0.2}));
    CHECK(a.phases() != c.phases());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(field_kind_from_string("vortex"), InvalidArgument);
    FieldSpec empty;
    empty.kind = FieldKind::random_fourier;
    CHECK_THROWS_AS(sample_field(empty, 0), InvalidArgument);
  }
}

TEST_CASE("psi examples") {
  // Psi = c2 x1 - c1 x2 for V = (c1, c2), so V = (0.5, 0) gives Psi = -0.5 x2.
  const auto c = sample_field(FieldSpec::constant({0.5, 0.0}), 0);
  CHECK(c.psi({0, 2}) - c.psi({0, 0}) == doctest::Approx(-1.0));
  CHECK(fd_perp_grad(c, {0.3, 0.7}, 1e-3).x == doctest::Approx(0.5));

  const auto cell = with_phases(FieldSpec::cellular(1.0), {0.0, 0.0});
  CHECK(cell.psi({kPi / 2, kPi / 2}) == doctest::Approx(1.0));

  const auto sh = with_phases(FieldSpec::shear(2.0), {0.0});
  CHECK(sh.psi({5.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("velocity examples and the perp-gradient convention") {
  const auto sh = with_phases(FieldSpec::shear(2.0), {0.0});
  // perp grad of 2 cos(x2) is (2 sin x2, 0): (-2, 0) at x2 = -pi/2.
  const Vec2 v = sh.velocity({0.0, -kPi / 2});
  CHECK(v.x == doctest::Approx(-2.0));
  CHECK(v.y == doctest::Approx(0.0));
  const Vec2 fd = fd_perp_grad(sh, {0.0, -kPi / 2}, 1e-4);
  CHECK(fd.x == doctest::Approx(v.x).epsilon(1e-6));

  const auto cell = with_phases(FieldSpec::cellular(1.0), {0.0, 0.0});
  CHECK(norm(cell.velocity({0, 0})) == 0.0);

  const auto trap = sample_field(FieldSpec::gradient_trap(), 0);
  for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.5, 0.6}, Vec2{0.0, -0.99}}) {
    CHECK(trap.velocity(x).x == doctest::Approx(2 * x.x));
    CHECK(trap.velocity(x).y == doctest::Approx(2 * x.y));
  }
  CHECK(norm(trap.velocity({2.5, 0.0})) == 0.0);
  CHECK_FALSE(trap.spec().divergence_free());
  CHECK_FALSE(trap.spec().mean_zero());
  // Trap velocity is the gradient of the reported potential.
  for (Vec2 x : {Vec2{1.2, 0.3}, Vec2{0.4, 1.5}}) {
    const double h = 1e-5;
    const double gx = (trap.psi(x + Vec2{h, 0}) - trap.psi(x - Vec2{h, 0})) / (2 * h);
    const double gy = (trap.psi(x + Vec2{0, h}) - trap.psi(x - Vec2{0, h})) / (2 * h);
    CHECK(trap.velocity(x).x == doctest::Approx(gx).epsilon(1e-6));
    CHECK(trap.velocity(x).y == doctest::Approx(gy).epsilon(1e-6));
  }
  // The trap's speed bound dominates a dense radial scan.
  const double vinf = trap.v_inf();
  for (int i = 0; i <= 3000; ++i) CHECK(trap_radial_speed(i * 1e-3, 2.0) <= vinf);
}

TEST_CASE("velocity equals the analytic perp-gradient for every kind") {
  const CounterRng rng(7, 0);
  for (const auto& spec : unit_divergence_free_specs()) {
    const auto f = sample_field(spec, 3);
    for (int k = 0; k < 50; ++k) {
      const Vec2 x{20 * rng.uniform(2 * k) - 10, 20 * rng.uniform(2 * k + 1) - 10};
      const Vec2 fd = fd_perp_grad(f, x, 1e-4);
      CHECK(norm(fd - f.velocity(x)) < 1e-6);
    }
  }
}

TEST_CASE("shift action") {
  SUBCASE("shift(f, 0) == f and the group law") {
    const auto f = sample_field(FieldSpec::cellular(1.0), 11);
    const Vec2 a{0.7, -1.1}, b{2.5, 0.25}, x{0.3, 0.4};
    CHECK(f.shift({0, 0}).psi(x) == f.psi(x));
    CHECK(f.shift(a).shift(b).psi(x) == f.shift(a + b).psi(x));
  }
  SUBCASE("cellular is 2 pi periodic") {
    const auto f = sample_field(FieldSpec::cellular(1.0), 2);
    const auto g = f.shift({2 * kPi, 0});
    for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{-3.0, 4.0}}) {
      CHECK(g.psi(x) == doctest::Approx(f.psi(x)).epsilon(1e-12));
      CHECK(norm(g.velocity(x) - f.velocity(x)) < 1e-12);
    }
  }
  SUBCASE("shift equivariance is exact on 1000 random pairs") {
    const CounterRng rng(1, 1);
    for (const auto& spec : unit_divergence_free_specs()) {
      const auto f = sample_field(spec, 21);
      int mismatches = 0;
      for (int k = 0; k < 1000; ++k) {
        const Vec2 x{10 * rng.uniform(4 * k) - 5, 10 * rng.uniform(4 * k + 1) - 5};
        const Vec2 y{10 * rng.uniform(4 * k + 2) - 5, 10 * rng.uniform(4 * k + 3) - 5};
        if (f.shift(y).psi(x) != f.psi(x + y)) ++mismatches;
      }
      CHECK(mismatches == 0);
    }
  }
}

TEST_CASE("divergence-free fields have O(h^2) finite-difference divergence") {
  const CounterRng rng(3, 0);
  for (const auto& spec : unit_divergence_free_specs()) {
    const auto f = sample_field(spec, 8);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Vec2 x{40 * rng.uniform(2 * k) - 20, 40 * rng.uniform(2 * k + 1) - 20};
      worst = std::max(worst, std::abs(fd_divergence(f, x, 1e-3)));
    }
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("dense sup of |V| respects the generator bound") {
  for (const auto& spec : {FieldSpec::shear(2.0), FieldSpec::cellular(1.5)}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto f = sample_field(spec, seed);
      double sup = 0.0;
      for (int i = -150; i <= 150; ++i)
        for (int j = -150; j <= 150; ++j) sup = std::max(sup, norm(f.velocity({0.04 * i, 0.04 * j})));
      CHECK(sup <= spec.amplitude);
    }
  }
}

TEST_CASE("field_stats") {
  SUBCASE("cellular third moment matches (4/(3 pi))^2 A^3") {
    // Independent quadrature of E|sin U|^3 over one period.
    const int n = 200000;
    double q = 0.0;
    for (int k = 0; k < n; ++k) q += std::pow(std::abs(std::sin(2 * kPi * (k + 0.5) / n)), 3);
    q /= n;
    CHECK(q == doctest::Approx(4.0 / (3.0 * kPi)).epsilon(1e-8));
    const double expected = q * q;
    CHECK(expected == doctest::Approx(16.0 / (9.0 * kPi * kPi)).epsilon(1e-8));

    const auto stats = field_stats(FieldSpec::cellular(1.0), 4000, 0);
    CHECK(std::abs(stats.abs_psi3_mean - expected) <= 3 * stats.abs_psi3_se);
  }
  SUBCASE("shear mean velocity vanishes within 3 sigma") {
    const auto stats = field_stats(FieldSpec::shear(2.0), 2000, 10);
    CHECK(std::abs(stats.mean_velocity.x) <= 3 * stats.mean_velocity_se.x);
    CHECK(stats.mean_velocity.y == 0.0);
  }
  SUBCASE("constant field mean is exact") {
    const auto stats = field_stats(FieldSpec::constant({0.5, 0.0}), 10, 0);
    CHECK(stats.mean_velocity == Vec2{0.5, 0.0});
  }
  SUBCASE("mean-zero kinds converge at rate 1/sqrt(n)") {
    for (const auto& spec : unit_divergence_free_specs()) {
      for (int n : {100, 400, 1600}) {
        const auto stats = field_stats(spec, n, 1000);
        CHECK(norm(stats.mean_velocity) <= 5.0 / std::sqrt(n));
      }
    }
  }
  CHECK_THROWS_AS(field_stats(FieldSpec::shear(1.0), 0, 0), InvalidArgument);
}

TEST_CASE("pinned phases override the seed") {
  auto spec = FieldSpec::shear(2.0);
  spec.fixed_phases = {0.0};
  const auto a = sample_field(spec, 1), b = sample_field(spec, 2);
  CHECK(a.phases() == std::vector<double>{0.0});
  CHECK(a.psi({0.3, 0.7}) == b.psi({0.3, 0.7}));
  CHECK(a.velocity({0.0, -kPi / 2}).x == doctest::Approx(-2.0));
  spec.fixed_phases = {0.0, 1.0};
  CHECK_THROWS_AS(sample_field(spec, 0), InvalidArgument);
}
