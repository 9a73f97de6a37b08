#include "geqhom/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geqhom/errors.hpp"
#include "geqhom/parallel.hpp"
#include "geqhom/random.hpp"
#include "geqhom/traveltime.hpp"

namespace geqhom {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string tagged(std::string_view name, double v) {
  std::ostringstream out;
  out << name << "@" << v;
  return out.str();
}

std::string seed_list(std::span<const std::uint64_t> seeds) {
  std::ostringstream out;
  for (std::size_t k = 0; k < seeds.size(); ++k) out << (k ? "," : "") << seeds[k];
  return out.str();
}

std::string real_list(std::span<const double> v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << v[k];
  return out.str();
}

void require_increasing(std::span<const double> v, std::size_t min_size, const char* what) {
  if (v.size() < min_size) {
    std::ostringstream msg;
    msg << what << ": need at least " << min_size << " values";
    throw InvalidArgument(msg.str());
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k]) || v[k] < 0.0 || (k > 0 && !(v[k] > v[k - 1]))) {
      std::ostringstream msg;
      msg << what << ": values must be finite, >= 0 and strictly increasing";
      throw InvalidArgument(msg.str());
    }
  }
}

struct Profile {
  std::vector<double> sup;      // lattice sup per radius
  std::vector<Vec2> argmax;
};

// Lattice sup of |Psi(x) - ref| over B_r(center) for each sorted radius.
// A node at distance d counts toward every radius r with d <= r + spacing/sqrt 2,
// so every point of the disk lies within spacing/sqrt 2 of a counted node.
Profile lattice_profile(const FieldRealization& field, Vec2 center, std::span<const double> radii,
                        double spacing, bool relative) {
  if (!(spacing > 0.0)) throw InvalidArgument("stream sampling spacing must be positive");
  const double pad = spacing / std::sqrt(2.0);
  const double ref = relative ? field.psi(center) : 0.0;
  const int m = static_cast<int>(std::ceil((radii.back() + pad) / spacing));
  const int side = 2 * m + 1;
  const std::size_t nr = radii.size();
  struct Row {
    std::vector<double> sup;
    std::vector<Vec2> arg;
  };
  std::vector<Row> rows(static_cast<std::size_t>(side), Row{std::vector<double>(nr, 0.0), std::vector<Vec2>(nr, center)});
  parallel_for(static_cast<std::size_t>(side), [&](std::size_t jr) {
    Row& row = rows[jr];
    const double dy = (static_cast<int>(jr) - m) * spacing;
    for (int i = -m; i <= m; ++i) {
      const Vec2 off{i * spacing, dy};
      const double d = norm(off);
      const auto it = std::lower_bound(radii.begin(), radii.end(), d - pad);
      if (it == radii.end()) continue;
      const auto k = static_cast<std::size_t>(it - radii.begin());
      const Vec2 x = center + off;
      const double v = std::abs(field.psi(x) - ref);
      if (v > row.sup[k]) {
        row.sup[k] = v;
        row.arg[k] = x;
      }
    }
  });
  Profile out{std::vector<double>(nr, 0.0), std::vector<Vec2>(nr, center)};
  for (const Row& row : rows)
    for (std::size_t k = 0; k < nr; ++k)
      if (row.sup[k] > out.sup[k]) {
        out.sup[k] = row.sup[k];
        out.argmax[k] = row.arg[k];
      }
  for (std::size_t k = 1; k < nr; ++k)
    if (out.sup[k - 1] > out.sup[k]) {
      out.sup[k] = out.sup[k - 1];
      out.argmax[k] = out.argmax[k - 1];
    }
  return out;
}

// gamma_hat on a box grown until the value is certified.
GammaEstimate grown_gamma(const FieldRealization& field, double R, const GammaOptions& o) {
  double half = R + o.margin;
  for (int attempt = 0;; ++attempt) {
    try {
      return gamma_hat(field, R, o.sources, Grid2::covering({0, 0}, half, o.h));
    } catch (const GridTooSmall&) {
      if (attempt >= 4) throw;
      half *= 1.5;
    }
  }
}

void validate_gamma(const GammaOptions& o) {
  if (!(o.h > 0.0) || o.sources < 1 || !(o.margin >= 0.0) || !(o.drift_tol > 0.0))
    throw InvalidArgument("gamma options: need h > 0, sources >= 1, margin >= 0, drift_tol > 0");
}

}  // namespace

double ConditionReport::estimate(std::string_view name) const {
  for (const auto& e : estimates)
    if (e.name == name) return e.value;
  throw InvalidArgument("report " + id + " has no estimate '" + std::string(name) + "'");
}

std::pair<double, double> wilson_interval(int k, int n, double z) {
  if (n <= 0 || k < 0 || k > n) throw InvalidArgument("wilson_interval: need 0 <= k <= n, n > 0");
  const double p = static_cast<double>(k) / n, z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double mid = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

double rho(double s, double M) {
  if (!(M > 0.0)) throw InvalidArgument("rho: M must be positive");
  return cutoff_profile(s, M);
}

double stream_oscillation(const FieldRealization& field, Vec2 center, double radius, double spacing) {
  if (!(radius >= 0.0)) throw InvalidArgument("stream_oscillation: radius must be >= 0");
  const double r[] = {radius};
  return lattice_profile(field, center, r, spacing, true).sup[0] + field.v_inf() * spacing / std::sqrt(2.0);
}

ModifiedStream modify_stream(const FieldRealization& field, Vec2 z, double M) {
  return {field, field.with_cutoff(z, M), z, M};
}

ConditionReport check_modified_stream(const ModifiedStream& ms, double K, double spacing) {
  if (!(K > 0.0) || !(spacing > 0.0)) throw InvalidArgument("check_modified_stream: need K > 0, spacing > 0");
  ConditionReport rep;
  rep.id = "modified_stream";
  rep.parameters = {{"z", num(ms.z.x) + "," + num(ms.z.y)}, {"M", num(ms.M)}, {"K", num(K)}, {"spacing", num(spacing)}};
  const double M = ms.M;

  // Identity region, exact.
  int mismatches = 0, inside = 0;
  const int mi = static_cast<int>(std::floor(M / spacing));
  for (int j = -mi; j <= mi; ++j)
    for (int i = -mi; i <= mi; ++i) {
      const Vec2 x = ms.z + Vec2{i * spacing, j * spacing};
      if (norm(x - ms.z) > M) continue;
      ++inside;
      if (ms.psi_hat(x) != ms.base.psi(x)) {
        if (mismatches++ == 0) rep.witnesses.push_back({"psi_hat differs from psi inside B_M", 0, x, ms.z, ms.psi_hat(x)});
      }
    }
  rep.estimates.push_back({"identity_mismatches", static_cast<double>(mismatches)});
  rep.estimates.push_back({"identity_points", static_cast<double>(inside)});

  // |grad phi| from the velocity difference, densely along rays out to the annulus.
  const double R = 3 * M + 1 + 4 * K;
  double grad_max = 0.0;
  for (int a = 0; a < 64; ++a) {
    const Vec2 e = unit_direction(2 * kPi * a / 64.0);
    for (double s = 0.0; s <= R + 1.0; s += spacing) {
      const Vec2 x = ms.z + e * s;
      grad_max = std::max(grad_max, norm(ms.modified.velocity(x) - ms.base.velocity(x)));
    }
  }
  rep.estimates.push_back({"grad_phi_max", grad_max});
  const bool grad_ok = grad_max <= 0.5 + 1e-12;

  // Hypothesis, then the annulus bounds.
  const double r_hyp[] = {3 * M + 5 * K};
  const Profile hyp = lattice_profile(ms.base, ms.z, r_hyp, spacing, true);
  const bool hypothesis = hyp.sup[0] <= K;
  rep.estimates.push_back({"hypothesis_sup", hyp.sup[0]});
  bool annulus_ok = true;
  if (!hypothesis) {
    rep.witnesses.push_back({"|Psi - Psi(z)| exceeds K", 0, hyp.argmax[0], ms.z, hyp.sup[0]});
  } else {
    const double inner = M + 1 + 4 * K, outer = R;
    const double lo_bound = K + 1.0 / 3.0, hi_bound = 3 * K + 1.0 / 3.0 + M;
    const double at_z = ms.psi_hat(ms.z);
    const int m = static_cast<int>(std::ceil(outer / spacing));
    double lo = kInf, hi = -kInf;
    Vec2 lo_at, hi_at;
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) {
        const Vec2 off{i * spacing, j * spacing};
        const double d = norm(off);
        if (d < inner || d > outer) continue;
        const double v = ms.psi_hat(ms.z + off) - at_z;
        if (v < lo) lo = v, lo_at = ms.z + off;
        if (v > hi) hi = v, hi_at = ms.z + off;
      }
    rep.estimates.push_back({"annulus_min", lo});
    rep.estimates.push_back({"annulus_max", hi});
    if (lo < lo_bound) {
      annulus_ok = false;
      rep.witnesses.push_back({"annulus value below K + 1/3", 0, lo_at, ms.z, lo});
    }
    if (hi > hi_bound) {
      annulus_ok = false;
      rep.witnesses.push_back({"annulus value above 3K + 1/3 + M", 0, hi_at, ms.z, hi});
    }
  }
  rep.passed = mismatches == 0 && grad_ok && hypothesis && annulus_ok;
  rep.verdict = rep.passed ? "identity exact, gradient and annulus bounds hold at every sample"
                           : (hypothesis ? "a sampled bound failed" : "hypothesis on Psi fails");
  return rep;
}

double hypothesis_K(const FieldRealization& field, Vec2 z, double M, double spacing) {
  if (!(M > 0.0)) throw InvalidArgument("hypothesis_K: M must be positive");
  // K -> max(1, 1.05 osc(3M + 5K)) increases monotonically; stop once a step
  // gains less than 2.5%, which still leaves osc(3M + 5K) <= K.
  double K = std::max(1.0, 1.05 * stream_oscillation(field, z, 3 * M + 5.0, spacing));
  double step = kInf;
  for (int it = 0; it < 200; ++it) {
    const double next = std::max(1.0, 1.05 * stream_oscillation(field, z, 3 * M + 5 * K, spacing));
    if (next <= 1.025 * K) return K;
    if (next - K >= step) break;  // increments not shrinking: no fixed point
    step = next - K;
    K = next;
  }
  std::ostringstream msg;
  msg << "hypothesis_K: no K satisfies the stream bound around (" << z.x << ", " << z.y << ") with M = " << M;
  throw NumericalFailure(msg.str());
}

ConditionReport check_lemma51(const FieldSpec& spec, std::uint64_t seed, Vec2 z, double M, int samples,
                              const Lemma51Options& o) {
  if (samples < 1) throw InvalidArgument("check_lemma51: need samples >= 1");
  if (!(o.h > 0.0) || !(o.slack >= 1.0)) throw InvalidArgument("check_lemma51: need h > 0, slack >= 1");
  if (!spec.divergence_free()) throw InvalidArgument("check_lemma51: field has no stream function");
  const FieldRealization field = sample_field(spec, seed);
  const double K = hypothesis_K(field, z, M, o.spacing);
  const double R = 3 * M + 1 + 4 * K;
  // 17 R = 17 (3M + 1 + 4K) <= C1 K + C2 M with C1 = 85, C2 = 51 (K > 1);
  // the case analysis gives C1' = 2 C1 + 5 C2 and C2' = 4 C2.
  const double C1 = 85.0, C2 = 51.0, C1p = 2 * C1 + 5 * C2, C2p = 4 * C2;
  const ModifiedStream ms = modify_stream(field, z, M);

  ConditionReport rep = check_modified_stream(ms, K, o.spacing);
  rep.id = "lemma51";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"seed", std::to_string(seed)},
                    {"z", num(z.x) + "," + num(z.y)}, {"M", num(M)}, {"samples", std::to_string(samples)},
                    {"h", num(o.h)}, {"slack", num(o.slack)}, {"spacing", num(o.spacing)}};
  const bool stream_ok = rep.passed;
  rep.estimates.push_back({"K", K});
  rep.estimates.push_back({"R", R});
  rep.estimates.push_back({"C1", C1});
  rep.estimates.push_back({"C2", C2});
  rep.estimates.push_back({"C1p", C1p});
  rep.estimates.push_back({"C2p", C2p});

  // Sampled node pairs of the closed ball B_M(z).
  double half = M + 5.0;
  const CounterRng rng(seed, 0x51);
  for (int attempt = 0;; ++attempt) {
    const Grid2 grid = Grid2::covering(z, half, o.h);
    std::vector<std::array<Vec2, 2>> pairs;
    for (std::uint64_t c = 0; static_cast<int>(pairs.size()) < samples; c += 4) {
      std::array<Vec2, 2> pr;
      bool ok = true;
      for (int e = 0; e < 2; ++e) {
        const double r = M * std::sqrt(rng.uniform(c + 2 * e)), th = 2 * kPi * rng.uniform(c + 2 * e + 1);
        const auto ij = grid.nearest(z + unit_direction(th) * r);
        pr[e] = grid.node((*ij)[0], (*ij)[1]);
        if (norm(pr[e] - z) > M) ok = false;
      }
      if (ok) pairs.push_back(pr);
    }
    const MidpointTable table(field, grid), table_hat(ms.modified, grid);
    struct PairResult {
      double tau = 0.0, tau_hat = 0.0;
      double ball_max = 0.0;  // max of tau(x, .) over every node of B_M(z)
      bool certified = true;
    };
    std::vector<PairResult> res(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
      const Vec2 src[] = {pairs[k][0]};
      const auto t = solve_travel_time(field, src, grid, -1, 1.0, {kInf, &table});
      const auto th = solve_travel_time(ms.modified, src, grid, -1, 0.5, {kInf, &table_hat});
      const auto ij = grid.nearest(pairs[k][1]);
      res[k].tau = t.at((*ij)[0], (*ij)[1]);
      res[k].tau_hat = th.at((*ij)[0], (*ij)[1]);
      const int m = grid.cells();
      for (int j = 0; j <= 2 * m; ++j)
        for (int i = 0; i <= 2 * m; ++i)
          if (norm(grid.node(i, j) - z) <= M) res[k].ball_max = std::max(res[k].ball_max, t.at(i, j));
      res[k].certified = t.certified(pairs[k][1]) && res[k].ball_max <= t.certified_bound(z, M);
    });
    if (std::any_of(res.begin(), res.end(), [](const PairResult& r) { return !r.certified; })) {
      if (attempt >= 4) throw GridTooSmall("check_lemma51: box cannot certify the sampled travel times");
      half *= 1.5;
      continue;
    }
    rep.table.columns = {"x1", "x2", "y1", "y2", "tau", "tau_hat", "bound_17R", "bound_refined"};
    int order_bad = 0, crude_bad = 0, refined_bad = 0;
    double worst_crude = 0.0, worst_refined = 0.0, worst_hat = 0.0, worst_ball = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Vec2 x = pairs[k][0], y = pairs[k][1];
      const double tau = res[k].tau, tau_hat = res[k].tau_hat;
      const double crude = 17 * R * o.slack, refined = (C1p * K + C2p * norm(x - y)) * o.slack;
      rep.table.rows.push_back({x.x, x.y, y.x, y.y, tau, tau_hat, crude, refined});
      worst_crude = std::max(worst_crude, tau / (17 * R));
      worst_hat = std::max(worst_hat, tau_hat / (17 * R));
      if (norm(x - y) > 0) worst_refined = std::max(worst_refined, tau / (C1p * K + C2p * norm(x - y)));
      if (!(tau <= tau_hat * (1 + 1e-12))) {
        ++order_bad;
        rep.witnesses.push_back({"tau > tau_hat", seed, x, y, tau - tau_hat});
      }
      worst_ball = std::max(worst_ball, res[k].ball_max / (17 * R));
      if (!(tau <= crude) || !(res[k].ball_max <= crude)) {
        ++crude_bad;
        rep.witnesses.push_back({"max over B_M(z) of tau(x, .) > 17 R slack", seed, x, y, res[k].ball_max});
      }
      if (!(tau <= refined)) {
        ++refined_bad;
        rep.witnesses.push_back({"tau > (C1' K + C2' |x-y|) slack", seed, x, y, tau});
      }
    }
    rep.estimates.push_back({"pairs", static_cast<double>(pairs.size())});
    rep.estimates.push_back({"order_violations", static_cast<double>(order_bad)});
    rep.estimates.push_back({"crude_violations", static_cast<double>(crude_bad)});
    rep.estimates.push_back({"refined_violations", static_cast<double>(refined_bad)});
    rep.estimates.push_back({"max_tau_over_17R", worst_crude});
    rep.estimates.push_back({"max_tau_hat_over_17R", worst_hat});
    rep.estimates.push_back({"max_ball_tau_over_17R", worst_ball});
    rep.estimates.push_back({"max_tau_over_refined", worst_refined});
    rep.passed = stream_ok && order_bad == 0 && crude_bad == 0 && refined_bad == 0;
    rep.verdict = rep.passed ? "all sampled pairs satisfy tau <= tau_hat and both travel-time bounds"
                             : "violations found; see witnesses";
    return rep;
  }
}

ConditionReport check_taubound(const FieldSpec& spec, std::span<const std::uint64_t> seeds,
                               std::span<const double> radii, const GammaOptions& o) {
  validate_gamma(o);
  if (seeds.empty()) throw InvalidArgument("check_taubound: need at least one seed");
  require_increasing(radii, 4, "check_taubound radii");
  if (radii.front() <= 0.0) throw InvalidArgument("check_taubound: radii must be positive");
  ConditionReport rep;
  rep.id = "taubound";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"seeds", seed_list(seeds)},
                    {"radii", real_list(radii)}, {"h", num(o.h)}, {"sources", std::to_string(o.sources)},
                    {"margin", num(o.margin)}};
  rep.table.columns = {"seed", "R", "gamma", "ratio"};
  std::vector<double> mean(radii.size(), 0.0);
  bool infinite = false;
  for (std::uint64_t seed : seeds) {
    const FieldRealization field = sample_field(spec, seed);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const GammaEstimate g = grown_gamma(field, radii[k], o);
      const double ratio = g.value / radii[k];
      rep.table.rows.push_back({static_cast<double>(seed), radii[k], g.value, ratio});
      mean[k] += ratio / static_cast<double>(seeds.size());
      if (!std::isfinite(g.value)) {
        infinite = true;
        rep.witnesses.push_back({tagged("gamma = +inf at R", radii[k]), seed, g.witness_source, g.witness_target, g.value});
      }
    }
  }
  for (std::size_t k = 0; k < radii.size(); ++k) rep.estimates.push_back({tagged("mean_ratio", radii[k]), mean[k]});
  const auto [lo, hi] = std::minmax_element(mean.begin(), mean.end());
  const double flat = infinite ? kInf : *hi / *lo - 1.0;
  const double last = infinite ? kInf : std::abs(mean.back() - mean[mean.size() - 2]) / mean[mean.size() - 2];
  rep.estimates.push_back({"flatness", flat});
  rep.estimates.push_back({"last_change", last});
  rep.passed = !infinite && last < o.drift_tol;
  rep.verdict = infinite ? "unbounded: gamma is +inf" :
                (rep.passed ? "bounded at the sampled radii (finite-sample evidence)" : "ratio still drifting");
  return rep;
}

ConditionReport check_gammaexp(const FieldSpec& spec, int n, double R, std::uint64_t first_seed,
                               const GammaOptions& o) {
  validate_gamma(o);
  if (n < 10) throw InvalidArgument("check_gammaexp: need n >= 10 seeds");
  if (!(R > 0.0)) throw InvalidArgument("check_gammaexp: R must be positive");
  ConditionReport rep;
  rep.id = "gammaexp";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"n", std::to_string(n)}, {"R", num(R)},
                    {"first_seed", std::to_string(first_seed)}, {"h", num(o.h)},
                    {"sources", std::to_string(o.sources)}, {"margin", num(o.margin)}};
  rep.table.columns = {"seed", "gamma"};
  std::vector<double> values;
  for (int k = 0; k < n; ++k) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(k);
    const GammaEstimate g = grown_gamma(sample_field(spec, seed), R, o);
    rep.table.rows.push_back({static_cast<double>(seed), g.value});
    values.push_back(g.value);
    if (!std::isfinite(g.value))
      rep.witnesses.push_back({"gamma = +inf", seed, g.witness_source, g.witness_target, g.value});
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  if (std::isfinite(mean))
    for (double v : values) var += (v - mean) * (v - mean) / (n - 1);
  rep.estimates.push_back({"mean", mean, std::isfinite(mean) ? std::sqrt(var / n) : kInf});
  bool decaying = true;
  double prev = 1.0;
  for (double q : {1.1, 1.25, 1.5, 2.0}) {
    const auto over = std::count_if(values.begin(), values.end(), [&](double v) { return v > q * mean; });
    const double frac = static_cast<double>(over) / n;
    rep.estimates.push_back({tagged("tail", q), frac});
    if (frac > prev) decaying = false;
    prev = frac;
  }
  rep.passed = rep.witnesses.empty() && decaying;
  rep.verdict = rep.passed ? "finite mean (finite-sample evidence: no +inf in the draws)" : "gamma is +inf for some seeds";
  return rep;
}

ConditionReport stream_growth_integral(const FieldSpec& spec, std::span<const double> r_grid, int n,
                                       std::uint64_t first_seed, double spacing) {
  require_increasing(r_grid, 2, "stream_growth_integral r grid");
  if (r_grid.front() != 0.0) throw InvalidArgument("stream_growth_integral: r grid must start at 0");
  if (n < 1) throw InvalidArgument("stream_growth_integral: need n >= 1");
  if (!spec.divergence_free()) throw InvalidArgument("stream_growth_integral: field has no stream function");
  const double bound = spec.psi_bound();
  const double r_cut = 12.0 * bound;
  if (std::isfinite(r_cut) && r_grid.back() < r_cut)
    throw InvalidArgument("stream_growth_integral: r grid must reach r_cut = 12 ||Psi||");

  ConditionReport rep;
  rep.id = "streamgrowth";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"n", std::to_string(n)},
                    {"first_seed", std::to_string(first_seed)}, {"spacing", num(spacing)},
                    {"r_grid", real_list(r_grid)}};
  std::vector<int> exceed(r_grid.size(), 0);
  for (int s = 0; s < n; ++s) {
    const auto field = sample_field(spec, first_seed + static_cast<std::uint64_t>(s));
    const Profile p = lattice_profile(field, {0, 0}, r_grid, spacing, true);
    for (std::size_t k = 0; k < r_grid.size(); ++k)
      if (p.sup[k] > r_grid[k] / 6.0) ++exceed[k];
  }
  rep.table.columns = {"r", "probability", "wilson_lo", "wilson_hi"};
  std::vector<double> prob(r_grid.size());
  double tail = 0.0;
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    prob[k] = static_cast<double>(exceed[k]) / n;
    const auto [lo, hi] = wilson_interval(exceed[k], n);
    rep.table.rows.push_back({r_grid[k], prob[k], lo, hi});
    if (r_grid[k] > r_cut) tail = std::max(tail, prob[k]);
  }
  double integral = 0.0;
  for (std::size_t k = 1; k < r_grid.size(); ++k)
    integral += 0.5 * (prob[k] + prob[k - 1]) * (r_grid[k] - r_grid[k - 1]);
  rep.estimates.push_back({"integral", integral});
  rep.estimates.push_back({"psi_bound", bound});
  rep.estimates.push_back({"r_cut", r_cut});
  rep.estimates.push_back({"tail_probability", tail});
  if (std::isfinite(r_cut)) {
    rep.passed = tail == 0.0 && integral <= r_cut;
    rep.verdict = rep.passed ? "finite: probability vanishes beyond r_cut" : "nonzero probability beyond r_cut";
  } else {
    rep.passed = prob.back() == 0.0;
    rep.verdict = "no bound on Psi: integral truncated at the last r (finite-sample evidence only)";
  }
  return rep;
}

ConditionReport check_moment3(const FieldSpec& spec, int n, std::uint64_t first_seed) {
  if (n < 2) throw InvalidArgument("check_moment3: need n >= 2");
  ConditionReport rep;
  rep.id = "moment3";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"n", std::to_string(n)},
                    {"first_seed", std::to_string(first_seed)}};
  if (!spec.stationary_stream()) {
    rep.passed = false;
    rep.verdict = "not applicable: the stream function is not stationary";
    rep.witnesses.push_back({"non-stationary stream generator", first_seed, {}, {}, 0.0});
    return rep;
  }
  const FieldStats st = field_stats(spec, n, first_seed);
  rep.estimates.push_back({"abs_psi3_mean", st.abs_psi3_mean, st.abs_psi3_se});
  rep.passed = std::isfinite(st.abs_psi3_mean);
  rep.verdict = "finite third moment (Monte Carlo estimate)";
  return rep;
}

ConditionReport check_sublinear(const FieldSpec& spec, std::uint64_t seed, std::span<const double> radii,
                                double spacing) {
  require_increasing(radii, 4, "check_sublinear radii");
  if (radii.front() <= 0.0) throw InvalidArgument("check_sublinear: radii must be positive");
  if (!spec.divergence_free()) throw InvalidArgument("check_sublinear: field has no stream function");
  ConditionReport rep;
  rep.id = "sublinear";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"seed", std::to_string(seed)},
                    {"radii", real_list(radii)}, {"spacing", num(spacing)}};
  const Profile p = lattice_profile(sample_field(spec, seed), {0, 0}, radii, spacing, false);
  rep.table.columns = {"r", "sup_abs_psi", "ratio"};
  std::vector<double> ratio;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    ratio.push_back(p.sup[k] / radii[k]);
    rep.table.rows.push_back({radii[k], p.sup[k], ratio.back()});
    rep.estimates.push_back({tagged("ratio", radii[k]), ratio.back()});
  }
  for (std::size_t k = 1; k < ratio.size(); ++k)
    if (ratio[k - 1] > 0.0) rep.estimates.push_back({tagged("factor", radii[k]), ratio[k] / ratio[k - 1]});
  const bool zero = std::all_of(ratio.begin(), ratio.end(), [](double r) { return r == 0.0; });
  bool decreasing = true;
  for (std::size_t k = ratio.size() - 3; k < ratio.size(); ++k)
    if (!(ratio[k] < ratio[k - 1])) decreasing = false;
  rep.passed = zero || decreasing;
  rep.verdict = zero ? "Psi vanishes identically" :
                (decreasing ? "sup |Psi| / r decreasing over the last three radii (finite-sample evidence)"
                            : "no decay of sup |Psi| / r");
  if (!rep.passed) rep.witnesses.push_back({"ratio not decreasing", seed, p.argmax.back(), {}, ratio.back()});
  return rep;
}

ConditionReport check_volume_bound(const FieldSpec& spec, std::uint64_t seed, Vec2 x,
                                   std::span<const double> times, double h, double tol) {
  if (!spec.divergence_free()) throw InvalidArgument("check_volume_bound: requires a divergence-free field");
  require_increasing(times, 1, "check_volume_bound times");
  if (times.front() <= 0.0) throw InvalidArgument("check_volume_bound: times must be positive");
  if (!(h > 0.0) || !(tol >= 0.0)) throw InvalidArgument("check_volume_bound: need h > 0, tol >= 0");
  const FieldRealization field = sample_field(spec, seed);
  const double t_max = times.back();
  // Lattice paths of duration t never leave B_{(V_inf + 1) t}.
  const Grid2 grid = Grid2::covering(x, (field.v_inf() + 1.0) * t_max + 4 * h, h);
  const Vec2 src[] = {x};
  const auto tt = solve_travel_time(field, src, grid, -1, 1.0, {t_max, nullptr});
  const auto values = tt.values();

  ConditionReport rep;
  rep.id = "volume";
  rep.parameters = {{"spec", std::string(to_string(spec.kind))}, {"seed", std::to_string(seed)},
                    {"x", num(x.x) + "," + num(x.y)}, {"times", real_list(times)}, {"h", num(h)}, {"tol", num(tol)}};
  rep.table.columns = {"t", "area", "ratio"};
  bool ok = true;
  double prev = 0.0;
  bool monotone = true;
  for (double t : times) {
    const auto count = std::count_if(values.begin(), values.end(), [&](double v) { return v <= t; });
    const double area = static_cast<double>(count) * h * h;
    const double ratio = area / (kPi * t * t);
    rep.table.rows.push_back({t, area, ratio});
    rep.estimates.push_back({tagged("ratio", t), ratio});
    if (area < prev) monotone = false;
    prev = area;
    if (ratio < 1.0 - tol) {
      ok = false;
      rep.witnesses.push_back({tagged("area below pi t^2 (1 - tol) at t", t), seed, x, {}, area});
    }
  }
  rep.passed = ok && monotone;
  rep.verdict = rep.passed ? "area of the sublevel set at least pi t^2 (1 - tol) at every t" : "area bound fails";
  return rep;
}

}  // namespace geqhom
