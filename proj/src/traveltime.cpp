#include "geqhom/traveltime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "geqhom/control.hpp"
#include "geqhom/errors.hpp"
#include "geqhom/parallel.hpp"

namespace geqhom {

// ---------------------------------------------------------------------------
// Grid2

Grid2 Grid2::covering(Vec2 center, double half_width, double h, int stencil) {
  if (!(h > 0.0) || !(half_width > 0.0)) throw InvalidArgument("grid needs h > 0 and half_width > 0");
  const double cells = std::ceil(half_width / h - 1e-9);
  return Grid2{center, cells * h, h, stencil};
}

void Grid2::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  if (!(half_width >= h) || !std::isfinite(half_width))
    throw InvalidArgument("grid half-width must be at least one cell");
  const double ratio = half_width / h;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * std::max(1.0, ratio))
    throw InvalidArgument("grid half-width must be a whole number of cells");
  if (stencil < 1 || stencil > 3) throw InvalidArgument("stencil order must be 1, 2 or 3");
  if (side() > 46000) throw InvalidArgument("grid too large");
}

bool Grid2::contains(Vec2 p) const {
  const double tol = 0.5 * h;
  return std::abs(p.x - center.x) <= half_width + tol && std::abs(p.y - center.y) <= half_width + tol;
}

std::optional<std::array<int, 2>> Grid2::nearest(Vec2 p) const {
  if (!contains(p)) return std::nullopt;
  const int m = cells();
  const int i = std::clamp(static_cast<int>(std::lround((p.x - center.x) / h)) + m, 0, 2 * m);
  const int j = std::clamp(static_cast<int>(std::lround((p.y - center.y) / h)) + m, 0, 2 * m);
  return std::array<int, 2>{i, j};
}

std::vector<std::array<int, 2>> stencil_offsets(int k) {
  if (k < 1 || k > 3) throw InvalidArgument("stencil order must be 1, 2 or 3");
  std::vector<std::array<int, 2>> out;
  for (int dy = -k; dy <= k; ++dy) {
    for (int dx = -k; dx <= k; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (std::gcd(std::abs(dx), std::abs(dy)) != 1) continue;
      out.push_back({dx, dy});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TravelTimeField

TravelTimeField::TravelTimeField(std::shared_ptr<const FieldRealization> field, Grid2 grid,
                                 int drift_sign, double bound, double horizon)
    : field_(std::move(field)),
      grid_(grid),
      drift_sign_(drift_sign),
      bound_(bound),
      horizon_(horizon),
      values_(grid.node_count(), kInf),
      parents_(grid.node_count(), -1) {}

double TravelTimeField::nearest_value(Vec2 p) const {
  const auto n = grid_.nearest(p);
  if (!n) throw InvalidArgument("point outside the travel-time grid");
  return at((*n)[0], (*n)[1]);
}

double TravelTimeField::sample(Vec2 p) const {
  if (!grid_.contains(p)) throw InvalidArgument("point outside the travel-time grid");
  const int m = grid_.cells();
  const double fx = (p.x - grid_.center.x) / grid_.h + m;
  const double fy = (p.y - grid_.center.y) / grid_.h + m;
  const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, 2 * m - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, 2 * m - 1);
  const double wx = std::clamp(fx - i0, 0.0, 1.0);
  const double wy = std::clamp(fy - j0, 0.0, 1.0);
  const double v00 = at(i0, j0), v10 = at(i0 + 1, j0);
  const double v01 = at(i0, j0 + 1), v11 = at(i0 + 1, j0 + 1);
  if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v01) || !std::isfinite(v11))
    return nearest_value(p);
  return (1 - wy) * ((1 - wx) * v00 + wx * v10) + wy * ((1 - wx) * v01 + wx * v11);
}

double TravelTimeField::certified_bound(Vec2 c, double r) const {
  const int side = grid_.side();
  const int band = grid_.stencil;
  const double speed = speed_bound();
  double best = kInf;
  auto visit = [&](int i, int j) {
    double v = at(i, j);
    if (!std::isfinite(v)) {
      if (!std::isfinite(horizon_)) return;  // truly unreachable
      v = horizon_;
    }
    const double d = std::max(0.0, norm(grid_.node(i, j) - c) - r);
    best = std::min(best, v + d / speed);
  };
  for (int j = 0; j < side; ++j) {
    const bool edge_row = j < band || j >= side - band;
    if (edge_row) {
      for (int i = 0; i < side; ++i) visit(i, j);
    } else {
      for (int i = 0; i < band; ++i) visit(i, j);
      for (int i = side - band; i < side; ++i) visit(i, j);
    }
  }
  return best;
}

bool TravelTimeField::certified(Vec2 y) const {
  const double v = nearest_value(y);
  const double bound = certified_bound(y, 0.0);
  if (!std::isfinite(v)) return !std::isfinite(bound) && !std::isfinite(horizon_);
  return v <= bound;
}

// ---------------------------------------------------------------------------
// Solver

MidpointTable::MidpointTable(const FieldRealization& field, const Grid2& grid, unsigned jobs)
    : grid_(grid), side_(2 * grid.side() - 1) {
  grid.validate();
  values_.resize(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_));
  parallel_for(static_cast<std::size_t>(side_), [&](std::size_t row) {
    const int qj = static_cast<int>(row);
    for (int qi = 0; qi < side_; ++qi)
      values_[row * static_cast<std::size_t>(side_) + static_cast<std::size_t>(qi)] =
          field.velocity(grid.half_node(qi, qj));
  }, jobs);
}

namespace {
// Grids up to this many nodes get a private table when none is supplied.
constexpr std::size_t kTableNodes = std::size_t{1} << 20;

// Indexed 4-ary min-heap keyed by the caller's value array, with
// decrease-key. Ties break on the node index so the settle order is a pure
// function of the values.
class NodeHeap {
 public:
  NodeHeap(const std::vector<double>& key, std::size_t n) : key_(key), slot_(n, kAbsent) {}

  bool empty() const { return heap_.empty(); }
  std::int32_t top() const { return heap_.front(); }

  void push_or_decrease(std::int32_t node) {
    std::uint32_t pos = slot_[static_cast<std::size_t>(node)];
    if (pos == kAbsent) {
      pos = static_cast<std::uint32_t>(heap_.size());
      heap_.push_back(node);
      slot_[static_cast<std::size_t>(node)] = pos;
    }
    sift_up(pos);
  }

  void pop() {
    slot_[static_cast<std::size_t>(heap_.front())] = kAbsent;
    const std::int32_t last = heap_.back();
    heap_.pop_back();
    if (heap_.empty()) return;
    heap_[0] = last;
    slot_[static_cast<std::size_t>(last)] = 0;
    sift_down(0);
  }

 private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;

  bool less(std::int32_t a, std::int32_t b) const {
    const double ka = key_[static_cast<std::size_t>(a)], kb = key_[static_cast<std::size_t>(b)];
    return ka < kb || (ka == kb && a < b);
  }
  void place(std::uint32_t pos, std::int32_t node) {
    heap_[pos] = node;
    slot_[static_cast<std::size_t>(node)] = pos;
  }
  void sift_up(std::uint32_t pos) {
    const std::int32_t node = heap_[pos];
    while (pos > 0) {
      const std::uint32_t parent = (pos - 1) / 4;
      if (!less(node, heap_[parent])) break;
      place(pos, heap_[parent]);
      pos = parent;
    }
    place(pos, node);
  }
  void sift_down(std::uint32_t pos) {
    const std::int32_t node = heap_[pos];
    const auto n = static_cast<std::uint32_t>(heap_.size());
    for (;;) {
      const std::uint32_t first = 4 * pos + 1;
      if (first >= n) break;
      std::uint32_t best = first;
      const std::uint32_t end = std::min(first + 4, n);
      for (std::uint32_t c = first + 1; c < end; ++c)
        if (less(heap_[c], heap_[best])) best = c;
      if (!less(heap_[best], node)) break;
      place(pos, heap_[best]);
      pos = best;
    }
    place(pos, node);
  }

  const std::vector<double>& key_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::int32_t> heap_;
};
}  // namespace

TravelTimeField solve_travel_time(const FieldRealization& field, std::span<const Vec2> sources,
                                  const Grid2& grid, int drift_sign, double b,
                                  SolveOptions options) {
  grid.validate();
  if (sources.empty()) throw InvalidArgument("solve_travel_time: empty source set");
  if (drift_sign != 1 && drift_sign != -1) throw InvalidArgument("drift_sign must be +1 or -1");
  if (!(b > 0.0)) throw InvalidArgument("control bound must be positive");

  TravelTimeField out(std::make_shared<const FieldRealization>(field), grid, drift_sign, b,
                      options.horizon);
  auto& values = out.mutable_values();
  auto& parents = out.mutable_parents();
  auto& order = out.mutable_order();

  struct Edge {
    int dx, dy;
    std::int32_t node_step;
    double length;
    Vec2 direction;
  };
  std::vector<Edge> edges;
  for (auto [dx, dy] : stencil_offsets(grid.stencil)) {
    const double len = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
    edges.push_back({dx, dy, dy * grid.side() + dx, len * grid.h, Vec2{dx / len, dy / len}});
  }

  NodeHeap heap(values, grid.node_count());
  for (const Vec2& s : sources) {
    const auto n = grid.nearest(s);
    if (!n) throw InvalidArgument("solve_travel_time: source outside grid");
    const std::size_t idx = grid.index((*n)[0], (*n)[1]);
    if (values[idx] != 0.0) {
      values[idx] = 0.0;
      out.mutable_sources().push_back(idx);
      heap.push_or_decrease(static_cast<std::int32_t>(idx));
    }
  }

  std::optional<MidpointTable> own;
  const MidpointTable* table = options.table;
  if (table && (table->grid().center != grid.center || table->grid().h != grid.h ||
                table->grid().cells() != grid.cells()))
    throw InvalidArgument("solve_travel_time: velocity table built on a different grid");
  if (!table && grid.node_count() <= kTableNodes) table = &own.emplace(field, grid, 1u);

  const double sign = static_cast<double>(drift_sign);
  const int side = grid.side();
  const int reach = grid.stencil;
  std::vector<std::uint8_t> settled(grid.node_count(), 0);
  while (!heap.empty()) {
    const std::int32_t node = heap.top();
    const auto u = static_cast<std::size_t>(node);
    const double value = values[u];
    if (value > options.horizon) break;
    heap.pop();
    settled[u] = 1;
    order.push_back(node);
    const int i = node % side, j = node / side;
    const bool interior = i >= reach && j >= reach && i < side - reach && j < side - reach;
    for (const Edge& e : edges) {
      if (!interior) {
        const int ni = i + e.dx, nj = j + e.dy;
        if (ni < 0 || nj < 0 || ni >= side || nj >= side) continue;
      }
      const auto w = static_cast<std::size_t>(node + e.node_step);
      if (settled[w]) continue;
      const int qi = 2 * i + e.dx, qj = 2 * j + e.dy;
      const Vec2 v = table ? table->at(qi, qj) : field.velocity(grid.half_node(qi, qj));
      const double speed = speed_along(v * sign, e.direction, b);
      if (speed == 0.0) continue;
      const double candidate = value + e.length / speed;
      if (candidate < values[w]) {
        values[w] = candidate;
        parents[w] = node;
        heap.push_or_decrease(static_cast<std::int32_t>(w));
      }
    }
  }
  // Labels above the horizon are tentative; report them as unknown.
  if (std::isfinite(options.horizon)) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!settled[k]) {
        values[k] = kInf;
        parents[k] = -1;
      }
    }
  }
  return out;
}

double tau(const FieldRealization& field, Vec2 x, Vec2 y, const Grid2& grid, int drift_sign,
           double b) {
  if (!grid.contains(y)) throw InvalidArgument("tau: target outside grid");
  const Vec2 src[] = {x};
  const TravelTimeField t = solve_travel_time(field, src, grid, drift_sign, b);
  if (!t.certified(y)) {
    std::ostringstream msg;
    msg << "tau: grid half-width " << grid.half_width << " cannot certify the value at ("
        << y.x << ", " << y.y << ")";
    throw GridTooSmall(msg.str());
  }
  return t.nearest_value(y);
}

std::vector<Vec2> disk_sources(Vec2 center, double R, int n) {
  if (n < 2) throw InvalidArgument("need at least two sources");
  const int on_circle = (n + 1) / 2;
  const int inside = n - on_circle;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < on_circle; ++k)
    out.push_back(center + unit_direction(2.0 * kPi * k / on_circle) * R);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < inside; ++k) {
    const double r = R * std::sqrt(static_cast<double>(k) / inside);
    out.push_back(center + unit_direction(golden * k) * r);
  }
  return out;
}

GammaEstimate gamma_hat(const FieldRealization& field, double R, int n, const Grid2& grid,
                        int drift_sign, double b) {
  if (!(R > 0.0)) throw InvalidArgument("gamma_hat: R must be positive");
  const auto sources = disk_sources(grid.center, R, n);

  struct PerSource {
    double value = 0.0;
    Vec2 target;
    bool certified = true;
  };
  const MidpointTable table(field, grid);
  std::vector<PerSource> results(sources.size());
  parallel_for(sources.size(), [&](std::size_t s) {
    const Vec2 src[] = {sources[s]};
    const TravelTimeField t = solve_travel_time(field, src, grid, drift_sign, b, {kInf, &table});
    PerSource best;
    best.value = -1.0;
    const int side = grid.side();
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i < side; ++i) {
        const Vec2 p = grid.node(i, j);
        if (norm(p - grid.center) > R) continue;
        const double v = t.at(i, j);
        if (v > best.value) {
          best.value = v;
          best.target = p;
        }
      }
    }
    const double bound = t.certified_bound(grid.center, R);
    best.certified = std::isfinite(best.value) ? best.value <= bound : !std::isfinite(bound);
    results[s] = best;
  });

  GammaEstimate out;
  out.sources = n;
  out.sampling = "disk_sources: ceil(n/2) on circle from angle 0, rest golden-angle sunflower from the centre";
  out.value = -1.0;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (!results[s].certified) {
      std::ostringstream msg;
      msg << "gamma_hat: grid half-width " << grid.half_width << " cannot certify R = " << R;
      throw GridTooSmall(msg.str());
    }
    if (results[s].value > out.value) {
      out.value = results[s].value;
      out.witness_source = sources[s];
      out.witness_target = results[s].target;
    }
  }
  return out;
}

TriangleReport verify_triangle(const FieldRealization& field, std::span<const Triple> triples,
                               const Grid2& grid, int drift_sign, double b) {
  TriangleReport report;
  report.slack = 4.0 * grid.h * (field.v_inf() + 1.0);
  struct Row {
    double excess;
    bool ok;
  };
  const MidpointTable table(field, grid);
  std::vector<Row> rows(triples.size());
  parallel_for(triples.size(), [&](std::size_t k) {
    const Triple& tr = triples[k];
    const Vec2 sx[] = {tr.x};
    const Vec2 sy[] = {tr.y};
    const TravelTimeField from_x = solve_travel_time(field, sx, grid, drift_sign, b, {kInf, &table});
    const TravelTimeField from_y = solve_travel_time(field, sy, grid, drift_sign, b, {kInf, &table});
    const double xz = from_x.nearest_value(tr.z);
    const double xy = from_x.nearest_value(tr.y);
    const double yz = from_y.nearest_value(tr.z);
    const double rhs = xy + yz;
    double excess;
    if (!std::isfinite(xz)) {
      excess = std::isfinite(rhs) ? kInf : 0.0;
    } else {
      excess = std::isfinite(rhs) ? xz - rhs : -kInf;
    }
    rows[k] = {excess, excess <= report.slack};
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ++report.checked;
    report.worst_excess = std::max(report.worst_excess, rows[k].excess);
    if (!rows[k].ok) {
      ++report.violations;
      report.failures.push_back(triples[k]);
    }
  }
  return report;
}

}  // namespace geqhom
