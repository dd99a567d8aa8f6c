#include "dcxlab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

// Points bucketed by cell, cells addressed by a linear index.
class BucketGrid {
 public:
  BucketGrid(const PointPattern& p, double cell, bool torus) : torus_(torus) {
    const Window& w = p.window();
    const std::size_t d = p.dim();
    n_.resize(d);
    side_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double len = w.side(j);
      const double cells = std::floor(len / cell);
      n_[j] = static_cast<std::uint64_t>(std::clamp(cells, 1.0, 1048576.0));
    }
    // Keep the linear index well inside 64 bits for high dimensions.
    auto product = [&] {
      long double prod = 1.0L;
      for (auto v : n_) prod *= static_cast<long double>(v);
      return prod;
    };
    while (product() > 1e18L) {
      auto it = std::max_element(n_.begin(), n_.end());
      *it = std::max<std::uint64_t>(1, *it / 2);
    }
    for (std::size_t j = 0; j < d; ++j) side_[j] = w.side(j) / static_cast<double>(n_[j]);

    cell_of_.resize(p.size());
    std::vector<std::uint64_t> c(d);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto x = p.point(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double f = std::floor((x[j] - w.lower()[j]) / side_[j]);
        c[j] = static_cast<std::uint64_t>(std::clamp(f, 0.0, static_cast<double>(n_[j] - 1)));
      }
      cell_of_[i] = linear(c);
    }
    order_.resize(p.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](auto a, auto b) { return cell_of_[a] < cell_of_[b]; });
    for (std::size_t k = 0; k < order_.size();) {
      std::size_t e = k;
      while (e < order_.size() && cell_of_[order_[e]] == cell_of_[order_[k]]) ++e;
      cells_.push_back({cell_of_[order_[k]], k, e});
      k = e;
    }
  }

  struct Cell {
    std::uint64_t index;
    std::size_t begin, end;  // range in order_
  };

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t point_at(std::size_t k) const { return order_[k]; }

  // Occupied neighbouring cells (including the cell itself), deduplicated.
  std::vector<const Cell*> neighbours(std::uint64_t index) const {
    const std::size_t d = n_.size();
    std::vector<std::uint64_t> c(d);
    std::uint64_t rest = index;
    for (std::size_t j = d; j-- > 0;) {
      c[j] = rest % n_[j];
      rest /= n_[j];
    }
    std::vector<std::uint64_t> found;
    std::vector<std::uint64_t> nb(d);
    std::size_t combos = 1;
    for (std::size_t j = 0; j < d; ++j) combos *= 3;
    for (std::size_t t = 0; t < combos; ++t) {
      std::size_t code = t;
      bool ok = true;
      for (std::size_t j = 0; j < d; ++j) {
        const auto off = static_cast<std::int64_t>(code % 3) - 1;
        code /= 3;
        std::int64_t v = static_cast<std::int64_t>(c[j]) + off;
        const auto n = static_cast<std::int64_t>(n_[j]);
        if (torus_) v = ((v % n) + n) % n;
        else if (v < 0 || v >= n) ok = false;
        nb[j] = static_cast<std::uint64_t>(v);
      }
      if (ok) found.push_back(linear(nb));
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    std::vector<const Cell*> out;
    for (auto f : found) {
      auto it = std::lower_bound(cells_.begin(), cells_.end(), f, [](const Cell& a, std::uint64_t v) { return a.index < v; });
      if (it != cells_.end() && it->index == f) out.push_back(&*it);
    }
    return out;
  }

 private:
  std::uint64_t linear(const std::vector<std::uint64_t>& c) const {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < c.size(); ++j) v = v * n_[j] + c[j];
    return v;
  }

  bool torus_;
  std::vector<std::uint64_t> n_;
  std::vector<double> side_;
  std::vector<std::uint64_t> cell_of_;
  std::vector<std::size_t> order_;
  std::vector<Cell> cells_;
};

double squared_distance(const PointPattern& p, std::size_t a, std::size_t b, bool torus) {
  const auto x = p.point(a), y = p.point(b);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double d = std::abs(x[j] - y[j]);
    if (torus) d = std::min(d, p.window().side(j) - d);
    s += d * d;
  }
  return s;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    std::size_t root = i;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[i] != root) i = std::exchange(parent_[i], root);
    return root;
  }
  // The smaller index becomes the root, so roots are component minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError(std::string(what) + ": radius must be > 0");
}

std::vector<std::vector<std::size_t>> adjacency(const PointPattern& p, double r) {
  std::vector<std::vector<std::size_t>> adj(p.size());
  for (auto [a, b] : close_pairs(p, r)) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> close_pairs(const PointPattern& pattern, double dist, bool torus) {
  check_radius(dist, "close_pairs");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (pattern.size() < 2) return out;
  const BucketGrid grid(pattern, dist, torus);
  const double d2 = dist * dist;
  for (const auto& cell : grid.cells()) {
    for (const auto* other : grid.neighbours(cell.index)) {
      if (other->index < cell.index) continue;
      const bool same = other->index == cell.index;
      for (std::size_t s = cell.begin; s < cell.end; ++s) {
        const std::size_t i = grid.point_at(s);
        for (std::size_t t = same ? s + 1 : other->begin; t < other->end; ++t) {
          const std::size_t j = grid.point_at(t);
          if (squared_distance(pattern, i, j, torus) <= d2) out.emplace_back(std::min(i, j), std::max(i, j));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DiskGraph components(const PointPattern& pattern, double r, bool torus) {
  check_radius(r, "components");
  DiskGraph g;
  g.radius = r;
  const std::size_t n = pattern.size();
  UnionFind uf(n);
  for (auto [a, b] : close_pairs(pattern, 2.0 * r, torus)) uf.unite(a, b);
  g.labels.resize(n);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    g.labels[i] = uf.find(i);
    ++size[g.labels[i]];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (size[i] > 0) {
      g.roots.push_back(i);
      g.sizes.push_back(size[i]);
    }
  return g;
}

LargestFractions largest_fractions(const DiskGraph& g) {
  if (g.labels.empty()) throw PreconditionError("largest_fractions: empty pattern");
  std::size_t first = 0, second = 0;  // sizes; roots scanned in label order keep ties on the smaller label
  for (std::size_t s : g.sizes) {
    if (s > first) {
      second = first;
      first = s;
    } else if (s > second) {
      second = s;
    }
  }
  const double n = static_cast<double>(g.labels.size());
  return {static_cast<double>(first) / n, static_cast<double>(second) / n};
}

LargestFractions largest_fractions(const PointPattern& pattern, double r, bool torus) {
  if (pattern.empty()) throw PreconditionError("largest_fractions: empty pattern");
  return largest_fractions(components(pattern, r, torus));
}

double first_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= level) {
      if (i == 0) return x.front();
      const double t = (level - y[i - 1]) / (y[i] - y[i - 1]);
      return x[i - 1] + t * (x[i] - x[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SweepResult threshold_sweep(const GeneratorSpec& gen, const Window& window, const std::vector<double>& radii,
                            const SweepOptions& opt) {
  if (radii.empty()) throw PreconditionError("threshold_sweep: empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    check_radius(radii[i], "threshold_sweep");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw PreconditionError("threshold_sweep: radius grid must be increasing");
  }
  if (!(opt.crossing_level > 0.0 && opt.crossing_level < 1.0))
    throw PreconditionError("threshold_sweep: crossing_level must lie in (0,1)");
  if (opt.reps < 2) throw PreconditionError("threshold_sweep: need reps >= 2");

  const std::size_t nr = radii.size();
  SweepResult res;
  res.generator = describe(gen);
  res.radii = radii;
  res.reps = opt.reps;
  res.f1_samples.assign(opt.reps * nr, 0.0);
  std::vector<double> f2(opt.reps * nr, 0.0);
  parallel_for(opt.reps, opt.threads, [&](std::size_t rep) {
    Rng rng = make_rng(opt.seed, 0x5eed, rep);
    const PointPattern p = sample(gen, window, rng);
    for (std::size_t i = 0; i < nr; ++i) {
      if (p.empty()) continue;
      const auto f = largest_fractions(components(p, radii[i], opt.torus));
      res.f1_samples[rep * nr + i] = f.f1;
      f2[rep * nr + i] = f.f2;
    }
  });

  const double n = static_cast<double>(opt.reps);
  auto summarize = [&](const std::vector<double>& data, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(nr, 0.0);
    se.assign(nr, 0.0);
    for (std::size_t i = 0; i < nr; ++i) {
      double s = 0.0;
      for (std::size_t rep = 0; rep < opt.reps; ++rep) s += data[rep * nr + i];
      mean[i] = s / n;
      double ss = 0.0;
      for (std::size_t rep = 0; rep < opt.reps; ++rep) ss += (data[rep * nr + i] - mean[i]) * (data[rep * nr + i] - mean[i]);
      se[i] = std::sqrt(ss / (n - 1.0) / n);
    }
  };
  summarize(res.f1_samples, res.f1_mean, res.f1_se);
  summarize(f2, res.f2_mean, res.f2_se);

  const double level = opt.crossing_level;
  const double inf = std::numeric_limits<double>::infinity();
  // Crossing location with open ends mapped to 0 and +inf.
  auto locate = [&](const std::vector<double>& curve) {
    if (curve.front() >= level) return nr == 1 ? 0.0 : radii.front();
    const double x = first_crossing(radii, curve, level);
    return std::isnan(x) ? inf : x;
  };
  res.r_hat = first_crossing(radii, res.f1_mean, level);
  res.open_interval = nr == 1 || std::isnan(res.r_hat) || res.f1_mean.front() >= level;

  std::vector<double> boot(opt.bootstrap);
  std::vector<double> curve(nr);
  for (std::size_t b = 0; b < opt.bootstrap; ++b) {
    Rng rng = make_rng(opt.seed, 0xb007, b);
    std::fill(curve.begin(), curve.end(), 0.0);
    for (std::size_t k = 0; k < opt.reps; ++k) {
      const std::size_t rep = uniform_index(rng, opt.reps);
      for (std::size_t i = 0; i < nr; ++i) curve[i] += res.f1_samples[rep * nr + i] / n;
    }
    boot[b] = locate(curve);
  }
  if (!boot.empty()) {
    std::sort(boot.begin(), boot.end());
    const auto at = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(boot.size() - 1)));
      return boot[idx];
    };
    res.ci_lo = at(0.025);
    res.ci_hi = at(0.975);
  }
  if (res.open_interval) {
    if (std::isnan(res.r_hat)) {
      res.ci_lo = radii.back();
      res.ci_hi = inf;
    } else {
      res.ci_lo = 0.0;
      res.ci_hi = radii.front();
    }
  }
  return res;
}

PathCountResult count_paths(const PointPattern& pattern, double r, double m, const PathCaps& caps) {
  check_radius(r, "count_paths");
  if (!(m > 0.0)) throw PreconditionError("count_paths: window half-width m must be > 0");
  if (caps.max_length == 0 || caps.max_count == 0) throw PreconditionError("count_paths: caps must be positive");
  PathCountResult res;
  res.m = m;
  res.r = r;
  res.m_r = static_cast<std::int64_t>(std::floor(m / r * (1.0 + 1e-12))) - 1;
  res.by_length.assign(caps.max_length + 1, 0);
  const std::size_t n = pattern.size();
  if (n == 0) return res;
  const auto adj = adjacency(pattern, r);
  std::vector<char> terminal(n, 0), on_path(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double gap = INFINITY;
    for (double v : pattern.point(i)) gap = std::min(gap, m - std::abs(v));
    terminal[i] = gap <= r;
  }
  bool stop = false;
  // Depth-first over self-avoiding sequences; `len` points are on the path.
  auto dfs = [&](auto&& self, std::size_t v, std::size_t len) -> void {
    if (stop) return;
    if (++res.explored >= caps.max_count) {
      res.cap_hit = true;
      stop = true;
    }
    if (terminal[v]) {
      ++res.by_length[len];
      ++res.total;
    }
    if (stop) return;
    on_path[v] = 1;
    for (std::size_t w : adj[v]) {
      if (on_path[w]) continue;
      if (len == caps.max_length) {
        res.cap_hit = true;
        break;
      }
      self(self, w, len + 1);
      if (stop) break;
    }
    on_path[v] = 0;
  };
  for (std::size_t i = 0; i < n && !stop; ++i)
    if (norm(pattern.point(i)) <= r) dfs(dfs, i, 1);
  return res;
}

double unit_ball_volume(std::size_t d) {
  if (d == 0) throw PreconditionError("unit_ball_volume: dimension must be >= 1");
  const double h = 0.5 * static_cast<double>(d);
  return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

WalkCounts connective_constant_estimate(const PointPattern& pattern, double r, std::size_t n_max, const PathCaps& caps) {
  check_radius(r, "connective_constant_estimate");
  if (pattern.empty()) throw PreconditionError("connective_constant_estimate: empty pattern");
  WalkCounts res;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pattern.size(); ++i)
    if (norm(pattern.point(i)) < norm(pattern.point(best))) best = i;
  res.start = best;
  res.counts.assign(n_max + 1, 0);
  const auto adj = adjacency(pattern, r);
  std::vector<char> on_path(pattern.size(), 0);
  std::uint64_t explored = 0;
  auto dfs = [&](auto&& self, std::size_t v, std::size_t steps) -> void {
    if (res.cap_hit) return;
    if (++explored > caps.max_count) {
      res.cap_hit = true;
      return;
    }
    ++res.counts[steps];
    if (steps == n_max) return;
    on_path[v] = 1;
    for (std::size_t w : adj[v])
      if (!on_path[w]) self(self, w, steps + 1);
    on_path[v] = 0;
  };
  dfs(dfs, best, 0);
  res.roots.assign(n_max + 1, 1.0);
  for (std::size_t k = 1; k <= n_max; ++k)
    res.roots[k] = std::pow(static_cast<double>(res.counts[k]), 1.0 / static_cast<double>(k));
  return res;
}

BoundReport lower_bound_check(const GeneratorSpec& gen, std::size_t dim, double r, double m, std::size_t reps,
                              std::uint64_t seed, unsigned threads, const PathCaps& caps) {
  check_radius(r, "lower_bound_check");
  if (reps < 2) throw PreconditionError("lower_bound_check: need reps >= 2");
  BoundReport rep;
  rep.dim = dim;
  rep.r = r;
  rep.m = m;
  rep.reps = reps;
  rep.theta = unit_ball_volume(dim);
  const double t = rep.theta * std::pow(r, static_cast<double>(dim));
  rep.m_r = static_cast<std::int64_t>(std::floor(m / r * (1.0 + 1e-12))) - 1;
  rep.applicable = t < 1.0;
  if (rep.applicable) rep.bound = std::pow(t, static_cast<double>(rep.m_r)) / (1.0 - t);

  const Window window = Window::cube(dim, -m, m);
  std::vector<PathCountResult> runs(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, 0x9a7, i);
    runs[i] = count_paths(sample(gen, window, rng), r, m, caps);
  });
  const double n = static_cast<double>(reps);
  rep.mean_by_length.assign(caps.max_length + 1, 0.0);
  for (const auto& run : runs) {
    rep.mean += static_cast<double>(run.total) / n;
    for (std::size_t k = 0; k < run.by_length.size(); ++k) rep.mean_by_length[k] += static_cast<double>(run.by_length[k]) / n;
    bool short_path = false;
    for (std::int64_t k = 1; k < rep.m_r && k < static_cast<std::int64_t>(run.by_length.size()); ++k)
      short_path = short_path || run.by_length[static_cast<std::size_t>(k)] > 0;
    rep.short_path_reps += short_path;
    rep.cap_hits += run.cap_hit;
  }
  double ss = 0.0;
  for (const auto& run : runs) ss += (static_cast<double>(run.total) - rep.mean) * (static_cast<double>(run.total) - rep.mean);
  rep.std_error = std::sqrt(ss / (n - 1.0) / n);
  rep.pass = rep.applicable && rep.mean <= rep.bound && rep.short_path_reps == 0 && rep.cap_hits == 0;
  return rep;
}

}  // namespace dcx
