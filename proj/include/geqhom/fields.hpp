#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geqhom/geometry.hpp"

namespace geqhom {

enum class FieldKind { shear, cellular, random_fourier, constant, gradient_trap };

std::string_view to_string(FieldKind kind);
FieldKind field_kind_from_string(std::string_view name);  // throws InvalidArgument

/// One Fourier mode of a random-fourier stream function,
/// Psi(x) = sum_k a_k cos(kappa_k . x + theta_k).
struct FourierMode {
  Vec2 wavevector;
  double coefficient = 0.0;

  bool operator==(const FourierMode&) const = default;
};

/// Law of a stationary 2-D drift field.
///
/// - shear:          Psi = A cos(x2 + U)
/// - cellular:       Psi = A sin(x1 + U1) sin(x2 + U2)
/// - random-fourier: Psi = sum a_k cos(kappa_k . x + theta_k); with
///                   `isotropic` the wavevector directions are redrawn
///                   uniformly per realization (magnitudes kept)
/// - constant:       V = constant_velocity, Psi linear
/// - gradient-trap:  V = grad Q with Q = |x|^2 on |x| < 1, smoothly cut off
///                   to a constant beyond `trap_cutoff`; not divergence-free
struct FieldSpec {
  FieldKind kind = FieldKind::constant;
  double amplitude = 1.0;
  std::vector<FourierMode> modes;
  bool isotropic = false;
  Vec2 constant_velocity{};
  double trap_cutoff = 2.0;
  /// Pins the phases (1 for shear, 2 for cellular, one per mode) instead of
  /// drawing them from the seed. Empty means random.
  std::vector<double> fixed_phases;

  static FieldSpec zero() { return constant({0.0, 0.0}); }
  static FieldSpec constant(Vec2 v);
  static FieldSpec shear(double amplitude);
  static FieldSpec cellular(double amplitude);
  static FieldSpec gradient_trap(double cutoff = 2.0);
  /// `count` modes with |kappa| = wavenumber and a_k = coefficient.
  static FieldSpec isotropic_fourier(int count, double wavenumber, double coefficient);

  /// Throws InvalidArgument on an unusable spec.
  void validate() const;

  /// Uniform bound on |V|: A for shear/cellular, sum |a_k||kappa_k| for
  /// random-fourier, |V| for constant, max_r |Q'(r)| for the trap.
  double v_inf() const;
  /// Upper bound on |Psi| for bounded generators (+inf when unbounded).
  double psi_bound() const;

  bool divergence_free() const { return kind != FieldKind::gradient_trap; }
  bool mean_zero() const {
    return kind == FieldKind::shear || kind == FieldKind::cellular ||
           kind == FieldKind::random_fourier ||
           (kind == FieldKind::constant && constant_velocity == Vec2{});
  }
  /// Psi itself is a stationary random field (its one-point law does not
  /// depend on x). False for linear streams and the trap.
  bool stationary_stream() const {
    return kind == FieldKind::shear || kind == FieldKind::cellular ||
           kind == FieldKind::random_fourier ||
           (kind == FieldKind::constant && constant_velocity == Vec2{});
  }

  bool operator==(const FieldSpec&) const = default;
};

/// A sampled realization Psi(., omega). Immutable; evaluation is analytic and
/// thread-safe. `offset` implements the shift action: every evaluation
/// happens at x + offset.
class FieldRealization {
 public:
  FieldRealization(FieldSpec spec, std::vector<double> phases, std::vector<Vec2> wavevectors,
                   Vec2 offset = {});

  const FieldSpec& spec() const { return spec_; }
  const std::vector<double>& phases() const { return phases_; }
  const std::vector<Vec2>& wavevectors() const { return wavevectors_; }
  Vec2 offset() const { return offset_; }
  double v_inf() const { return v_inf_; }

  double psi(Vec2 x) const;
  /// V = perp(grad Psi) = (-d2 Psi, d1 Psi); for the trap V = grad Q.
  Vec2 velocity(Vec2 x) const;

  FieldRealization shift(Vec2 y) const;

  /// Psi + rho(|x - z|; M), the stream function raised outside B_M(z) so that
  /// its level sets close up. Adds 1/2 to v_inf. Throws InvalidArgument for
  /// fields without a stream function or M <= 0.
  FieldRealization with_cutoff(Vec2 z, double M) const;
  struct Cutoff {
    Vec2 center;
    double M = 0.0;
  };
  const std::optional<Cutoff>& cutoff() const { return cutoff_; }

 private:
  double base_psi(Vec2 x) const;
  Vec2 base_velocity(Vec2 x) const;

  FieldSpec spec_;
  std::vector<double> phases_;
  std::vector<Vec2> wavevectors_;
  Vec2 offset_;
  double v_inf_;
  std::optional<Cutoff> cutoff_;
};

/// Deterministic in (spec, seed): identical inputs give bit-identical fields.
FieldRealization sample_field(const FieldSpec& spec, std::uint64_t seed);

struct FieldStats {
  int samples = 0;
  Vec2 mean_velocity;
  Vec2 mean_velocity_se;
  double v_inf_estimate = 0.0;  ///< max |V(0)| seen over the ensemble
  double abs_psi3_mean = 0.0;   ///< E|Psi(0)|^3
  double abs_psi3_se = 0.0;
};

/// Monte Carlo one-point statistics over seeds seed, seed+1, ..., seed+n-1.
FieldStats field_stats(const FieldSpec& spec, int n, std::uint64_t seed);

/// Radial cutoff profile: 0 for s <= M, s/2 - M/2 - 1/6 for s >= M + 1, and
/// the cubic u^2/2 - u^3/6 (u = s - M) in between. C^1, non-decreasing,
/// slope <= 1/2.
double cutoff_profile(double s, double M);
double cutoff_slope(double s, double M);

/// Trap radial profile: Q'(r) = 2 r chi(r), chi = 1 on [0,1], cubic
/// smoothstep down to 0 on [1, cutoff].
double trap_radial_speed(double r, double cutoff);

}  // namespace geqhom
