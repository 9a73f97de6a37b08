#include "geqhom/fields.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "geqhom/errors.hpp"
#include "geqhom/random.hpp"

namespace geqhom {

namespace {

// Streams of the counter generator, one per kind of draw.
constexpr std::uint64_t kPhaseStream = 1;
constexpr std::uint64_t kDirectionStream = 2;

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Potential Q(r) of the trap: r^2 on [0,1], integral of Q'(s) = 2 s chi(s)
// beyond.
double trap_potential(double r, double cutoff) {
  if (r <= 1.0) return r * r;
  const double d = cutoff - 1.0;
  const double u = std::min((r - 1.0) / d, 1.0);
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  return 1.0 + 2.0 * d *
                   (u - u3 + 0.5 * u4 + d * (0.5 * u2 - 0.75 * u4 + 0.4 * u5));
}

double trap_speed_bound(double cutoff) {
  // Q'(r) peaks just beyond r = 1; a dense scan plus a relative guard gives
  // an upper bound valid at every evaluation point.
  double best = 2.0;
  constexpr int kSamples = 200000;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = 1.0 + (cutoff - 1.0) * i / kSamples;
    best = std::max(best, trap_radial_speed(r, cutoff));
  }
  return best * (1.0 + 1e-9);
}

}  // namespace

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::shear: return "shear";
    case FieldKind::cellular: return "cellular";
    case FieldKind::random_fourier: return "random-fourier";
    case FieldKind::constant: return "constant";
    case FieldKind::gradient_trap: return "gradient-trap";
  }
  return "unknown";
}

FieldKind field_kind_from_string(std::string_view name) {
  for (auto k : {FieldKind::shear, FieldKind::cellular, FieldKind::random_fourier,
                 FieldKind::constant, FieldKind::gradient_trap}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown field kind '" + std::string(name) + "'");
}

double trap_radial_speed(double r, double cutoff) {
  const double chi = 1.0 - smoothstep((r - 1.0) / (cutoff - 1.0));
  return 2.0 * r * chi;
}

FieldSpec FieldSpec::constant(Vec2 v) {
  FieldSpec s;
  s.kind = FieldKind::constant;
  s.constant_velocity = v;
  s.amplitude = norm(v);
  return s;
}

FieldSpec FieldSpec::shear(double amplitude) {
  FieldSpec s;
  s.kind = FieldKind::shear;
  s.amplitude = amplitude;
  return s;
}

FieldSpec FieldSpec::cellular(double amplitude) {
  FieldSpec s;
  s.kind = FieldKind::cellular;
  s.amplitude = amplitude;
  return s;
}

FieldSpec FieldSpec::gradient_trap(double cutoff) {
  FieldSpec s;
  s.kind = FieldKind::gradient_trap;
  s.trap_cutoff = cutoff;
  return s;
}

FieldSpec FieldSpec::isotropic_fourier(int count, double wavenumber, double coefficient) {
  FieldSpec s;
  s.kind = FieldKind::random_fourier;
  s.isotropic = true;
  for (int k = 0; k < count; ++k) {
    // Placeholder directions; realizations redraw them.
    s.modes.push_back({unit_direction(2.0 * kPi * k / count) * wavenumber, coefficient});
  }
  return s;
}

void FieldSpec::validate() const {
  if (!std::isfinite(amplitude) || amplitude < 0.0)
    throw InvalidArgument("field amplitude must be finite and >= 0");
  if (!fixed_phases.empty()) {
    const std::size_t want = kind == FieldKind::shear      ? 1
                             : kind == FieldKind::cellular ? 2
                             : kind == FieldKind::random_fourier ? modes.size()
                                                                 : 0;
    if (fixed_phases.size() != want) throw InvalidArgument("fixed phases do not match the field kind");
    for (double u : fixed_phases)
      if (!std::isfinite(u)) throw InvalidArgument("fixed phases must be finite");
  }
  switch (kind) {
    case FieldKind::random_fourier:
      if (modes.empty()) throw InvalidArgument("random-fourier field needs a non-empty mode list");
      for (const auto& m : modes) {
        if (!std::isfinite(m.coefficient) || !std::isfinite(m.wavevector.x) ||
            !std::isfinite(m.wavevector.y))
          throw InvalidArgument("random-fourier mode has a non-finite entry");
      }
      break;
    case FieldKind::constant:
      if (!std::isfinite(constant_velocity.x) || !std::isfinite(constant_velocity.y))
        throw InvalidArgument("constant velocity must be finite");
      break;
    case FieldKind::gradient_trap:
      if (!(trap_cutoff > 1.0) || !std::isfinite(trap_cutoff))
        throw InvalidArgument("gradient-trap cutoff must exceed 1");
      break;
    default:
      break;
  }
}

double FieldSpec::v_inf() const {
  switch (kind) {
    case FieldKind::shear:
    case FieldKind::cellular:
      return amplitude;
    case FieldKind::random_fourier: {
      double sum = 0.0;
      for (const auto& m : modes) sum += std::abs(m.coefficient) * norm(m.wavevector);
      return sum;
    }
    case FieldKind::constant:
      return norm(constant_velocity);
    case FieldKind::gradient_trap:
      return trap_speed_bound(trap_cutoff);
  }
  return 0.0;
}

double FieldSpec::psi_bound() const {
  switch (kind) {
    case FieldKind::shear:
    case FieldKind::cellular:
      return amplitude;
    case FieldKind::random_fourier: {
      double sum = 0.0;
      for (const auto& m : modes) sum += std::abs(m.coefficient);
      return sum;
    }
    case FieldKind::constant:
      return constant_velocity == Vec2{} ? 0.0 : kInf;
    case FieldKind::gradient_trap:
      return kInf;
  }
  return kInf;
}

FieldRealization::FieldRealization(FieldSpec spec, std::vector<double> phases,
                                   std::vector<Vec2> wavevectors, Vec2 offset)
    : spec_(std::move(spec)),
      phases_(std::move(phases)),
      wavevectors_(std::move(wavevectors)),
      offset_(offset),
      v_inf_(spec_.v_inf()) {}

double FieldRealization::base_psi(Vec2 x) const {
  const Vec2 p = x + offset_;
  const double a = spec_.amplitude;
  switch (spec_.kind) {
    case FieldKind::shear:
      return a * std::cos(p.y + phases_[0]);
    case FieldKind::cellular:
      return a * std::sin(p.x + phases_[0]) * std::sin(p.y + phases_[1]);
    case FieldKind::random_fourier: {
      double sum = 0.0;
      for (std::size_t k = 0; k < phases_.size(); ++k)
        sum += spec_.modes[k].coefficient * std::cos(dot(wavevectors_[k], p) + phases_[k]);
      return sum;
    }
    case FieldKind::constant:
      // perp(grad Psi) = (c1, c2)  <=>  Psi = c2 x1 - c1 x2
      return spec_.constant_velocity.y * p.x - spec_.constant_velocity.x * p.y;
    case FieldKind::gradient_trap:
      // No stream function exists; report the potential Q instead.
      return trap_potential(norm(p), spec_.trap_cutoff);
  }
  return 0.0;
}

Vec2 FieldRealization::base_velocity(Vec2 x) const {
  const Vec2 p = x + offset_;
  const double a = spec_.amplitude;
  switch (spec_.kind) {
    case FieldKind::shear:
      // Psi = A cos(x2 + U): d2 Psi = -A sin(x2 + U), d1 Psi = 0
      return {a * std::sin(p.y + phases_[0]), 0.0};
    case FieldKind::cellular: {
      const double s1 = std::sin(p.x + phases_[0]), c1 = std::cos(p.x + phases_[0]);
      const double s2 = std::sin(p.y + phases_[1]), c2 = std::cos(p.y + phases_[1]);
      return {-a * s1 * c2, a * c1 * s2};
    }
    case FieldKind::random_fourier: {
      Vec2 grad{};
      for (std::size_t k = 0; k < phases_.size(); ++k) {
        const double s = std::sin(dot(wavevectors_[k], p) + phases_[k]);
        grad -= wavevectors_[k] * (spec_.modes[k].coefficient * s);
      }
      return perp(grad);
    }
    case FieldKind::constant:
      return spec_.constant_velocity;
    case FieldKind::gradient_trap: {
      const double r = norm(p);
      if (r <= 1.0) return p * 2.0;
      if (r >= spec_.trap_cutoff) return {};
      return p * (trap_radial_speed(r, spec_.trap_cutoff) / r);
    }
  }
  return {};
}

double FieldRealization::psi(Vec2 x) const {
  const double base = base_psi(x);
  return cutoff_ ? base + cutoff_profile(norm(x - cutoff_->center), cutoff_->M) : base;
}

Vec2 FieldRealization::velocity(Vec2 x) const {
  const Vec2 base = base_velocity(x);
  if (!cutoff_) return base;
  const Vec2 d = x - cutoff_->center;
  const double r = norm(d);
  if (r <= cutoff_->M) return base;
  return base + perp(d * (cutoff_slope(r, cutoff_->M) / r));
}

FieldRealization FieldRealization::shift(Vec2 y) const {
  FieldRealization out = *this;
  out.offset_ = offset_ + y;
  if (out.cutoff_) out.cutoff_->center = cutoff_->center - y;
  return out;
}

FieldRealization FieldRealization::with_cutoff(Vec2 z, double M) const {
  if (!spec_.divergence_free()) throw InvalidArgument("with_cutoff: field has no stream function");
  if (!(M > 0.0) || !std::isfinite(M)) throw InvalidArgument("with_cutoff: M must be positive");
  if (cutoff_) throw InvalidArgument("with_cutoff: field is already modified");
  FieldRealization out = *this;
  out.cutoff_ = Cutoff{z, M};
  out.v_inf_ = v_inf_ + 0.5;
  return out;
}

double cutoff_profile(double s, double M) {
  if (s <= M) return 0.0;
  if (s >= M + 1.0) return 0.5 * (s - M) - 1.0 / 6.0;
  const double u = s - M;
  return u * u / 2.0 - u * u * u / 6.0;
}

double cutoff_slope(double s, double M) {
  if (s <= M) return 0.0;
  if (s >= M + 1.0) return 0.5;
  const double u = s - M;
  return u - u * u / 2.0;
}

FieldRealization sample_field(const FieldSpec& spec, std::uint64_t seed) {
  spec.validate();
  const CounterRng phase_rng(seed, kPhaseStream);
  const CounterRng direction_rng(seed, kDirectionStream);
  std::vector<double> phases;
  std::vector<Vec2> wavevectors;
  switch (spec.kind) {
    case FieldKind::shear:
      phases = {2.0 * kPi * phase_rng.uniform(0)};
      break;
    case FieldKind::cellular:
      phases = {2.0 * kPi * phase_rng.uniform(0), 2.0 * kPi * phase_rng.uniform(1)};
      break;
    case FieldKind::random_fourier:
      for (std::size_t k = 0; k < spec.modes.size(); ++k) {
        phases.push_back(2.0 * kPi * phase_rng.uniform(k));
        const Vec2 kappa = spec.modes[k].wavevector;
        wavevectors.push_back(spec.isotropic
                                  ? unit_direction(2.0 * kPi * direction_rng.uniform(k)) * norm(kappa)
                                  : kappa);
      }
      break;
    case FieldKind::constant:
    case FieldKind::gradient_trap:
      break;
  }
  if (!spec.fixed_phases.empty()) phases = spec.fixed_phases;
  return FieldRealization(spec, std::move(phases), std::move(wavevectors));
}

FieldStats field_stats(const FieldSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("field_stats needs n >= 1");
  double sx = 0, sy = 0, sxx = 0, syy = 0, s3 = 0, s33 = 0, vmax = 0;
  for (int i = 0; i < n; ++i) {
    const auto f = sample_field(spec, seed + static_cast<std::uint64_t>(i));
    const Vec2 v = f.velocity({});
    const double a3 = std::pow(std::abs(f.psi({})), 3);
    sx += v.x; sy += v.y;
    sxx += v.x * v.x; syy += v.y * v.y;
    s3 += a3; s33 += a3 * a3;
    vmax = std::max(vmax, norm(v));
  }
  auto se = [n](double s, double ss) {
    if (n < 2) return 0.0;
    const double mean = s / n;
    const double var = std::max(0.0, (ss - n * mean * mean) / (n - 1));
    return std::sqrt(var / n);
  };
  FieldStats out;
  out.samples = n;
  out.mean_velocity = {sx / n, sy / n};
  out.mean_velocity_se = {se(sx, sxx), se(sy, syy)};
  out.v_inf_estimate = vmax;
  out.abs_psi3_mean = s3 / n;
  out.abs_psi3_se = se(s3, s33);
  return out;
}

}  // namespace geqhom
