#include "dcxlab/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

bool stationary(const GeneratorSpec& gen) {
  if (const auto* p = std::get_if<PerturbationSpec>(&gen)) {
    const auto* lat = std::get_if<IntegerLattice>(&p->base);
    return lat != nullptr && lat->random_shift;
  }
  return true;
}

struct RepResult {
  std::vector<double> geometric;  // per k
  std::int64_t ball_count = 0;
};

// Covering multiplicity of every probe in one replication.
void rasterize(const PointPattern& p, double r, const Window& window, std::size_t per_axis,
               const std::vector<double>& probes, std::vector<std::uint32_t>& cover) {
  const std::size_t d = window.dim();
  std::vector<double> cell(d);
  for (std::size_t j = 0; j < d; ++j) cell[j] = window.side(j) / static_cast<double>(per_axis);
  std::vector<std::int64_t> lo(d), hi(d), idx(d);
  const double r2 = r * r;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto x = p.point(i);
    bool empty = false;
    for (std::size_t j = 0; j < d; ++j) {
      const double a = (x[j] - r - window.lower()[j]) / cell[j];
      const double b = (x[j] + r - window.lower()[j]) / cell[j];
      lo[j] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(a)));
      hi[j] = std::min<std::int64_t>(static_cast<std::int64_t>(per_axis) - 1, static_cast<std::int64_t>(std::floor(b)));
      empty = empty || hi[j] < lo[j];
    }
    if (empty) continue;
    idx = lo;
    for (;;) {
      std::size_t lin = 0;
      for (std::size_t j = 0; j < d; ++j) lin = lin * per_axis + static_cast<std::size_t>(idx[j]);
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = probes[lin * d + j] - x[j];
        s += diff * diff;
      }
      if (s <= r2) ++cover[lin];
      std::size_t axis = d;
      while (axis-- > 0) {
        if (++idx[axis] <= hi[axis]) break;
        idx[axis] = lo[axis];
      }
      if (axis == static_cast<std::size_t>(-1)) break;
    }
  }
}

void mean_se(const std::vector<double>& xs, double& mean, double& se) {
  const double n = static_cast<double>(xs.size());
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1.0) / n);
}

// Integral of sqrt(r^2 - t^2).
double half_chord_integral(double r, double t) {
  t = std::clamp(t, -r, r);
  return 0.5 * (t * std::sqrt(std::max(0.0, r * r - t * t)) + r * r * std::asin(t / r));
}

// Binomial thinning of a law with retention probability q.
std::vector<double> thin(std::span<const double> pmf, double q) {
  std::vector<double> out(pmf.size(), 0.0);
  if (q <= 0.0) {
    out.assign(1, 1.0);
    return out;
  }
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    if (pmf[n] == 0.0) continue;
    // Binomial(n, q) weights by the multiplicative recurrence in log space.
    for (std::size_t j = 0; j <= n; ++j) {
      const double lc = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
                        std::lgamma(static_cast<double>(n - j) + 1.0);
      const double lw = lc + static_cast<double>(j) * std::log(q) +
                        (q < 1.0 ? static_cast<double>(n - j) * std::log1p(-q) : (n == j ? 0.0 : -INFINITY));
      out[j] += pmf[n] * std::exp(lw);
    }
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace

CoverageCurve coverage_curve(const GeneratorSpec& gen, double r, const std::vector<int>& ks, const Window& window,
                             const CoverageOptions& opt) {
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("coverage: radius must be > 0");
  if (ks.empty()) throw PreconditionError("coverage: need at least one k");
  for (int k : ks)
    if (k < 1) throw PreconditionError("coverage: k must be >= 1, got " + std::to_string(k));
  if (opt.reps < 2) throw PreconditionError("coverage: need reps >= 2");
  const std::size_t d = window.dim();
  const double probes = std::pow(static_cast<double>(opt.probes_per_axis), static_cast<double>(d));
  if (probes < 1000.0)
    throw PreconditionError("coverage: " + std::to_string(static_cast<long long>(probes)) +
                            " probes is too few, need at least 1000");
  if (probes > 1e8) throw PreconditionError("coverage: too many probes");
  if (!stationary(gen))
    throw PreconditionError("coverage: generator must be stationary; give lattices a random shift (shift=1)");

  const auto n_probes = static_cast<std::size_t>(probes);
  const Window sampling = window.dilated(r);
  std::vector<double> centre(d);
  for (std::size_t j = 0; j < d; ++j) centre[j] = 0.5 * (window.lower()[j] + window.upper()[j]);

  std::vector<RepResult> runs(opt.reps);
  parallel_for(opt.reps, opt.threads, [&](std::size_t rep) {
    Rng rng = make_rng(opt.seed, 0xc0, rep);
    Rng jitter = make_rng(opt.seed, 0xc1, rep);
    const PointPattern p = sample(gen, sampling, rng);

    std::vector<double> probe(n_probes * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t lin = 0; lin < n_probes; ++lin) {
      std::size_t rest = lin;
      for (std::size_t j = d; j-- > 0;) {
        idx[j] = rest % opt.probes_per_axis;
        rest /= opt.probes_per_axis;
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double cell = window.side(j) / static_cast<double>(opt.probes_per_axis);
        probe[lin * d + j] = window.lower()[j] + cell * (static_cast<double>(idx[j]) + uniform01(jitter));
      }
    }
    std::vector<std::uint32_t> cover(n_probes, 0);
    rasterize(p, r, window, opt.probes_per_axis, probe, cover);

    RepResult& out = runs[rep];
    out.geometric.resize(ks.size());
    for (std::size_t t = 0; t < ks.size(); ++t) {
      std::size_t hit = 0;
      for (auto c : cover) hit += c >= static_cast<std::uint32_t>(ks[t]);
      out.geometric[t] = static_cast<double>(hit) / probes;
    }
    const double r2 = r * r;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (p.point(i)[j] - centre[j]) * (p.point(i)[j] - centre[j]);
      out.ball_count += s <= r2;
    }
  });

  CoverageCurve c;
  c.generator = describe(gen);
  c.r = r;
  c.ks = ks;
  c.reps = opt.reps;
  c.probes = n_probes;
  std::int64_t max_count = 0;
  for (const auto& run : runs) max_count = std::max(max_count, run.ball_count);
  c.ball_count_freq.assign(static_cast<std::size_t>(max_count) + 1, 0.0);
  for (const auto& run : runs) c.ball_count_freq[static_cast<std::size_t>(run.ball_count)] += 1.0 / static_cast<double>(opt.reps);

  std::vector<double> xs(opt.reps);
  for (std::size_t t = 0; t < ks.size(); ++t) {
    double m = 0.0, se = 0.0;
    for (std::size_t rep = 0; rep < opt.reps; ++rep) xs[rep] = runs[rep].geometric[t];
    mean_se(xs, m, se);
    c.frac_geometric.push_back(m);
    c.se_geometric.push_back(se);
    for (std::size_t rep = 0; rep < opt.reps; ++rep) xs[rep] = runs[rep].ball_count >= ks[t] ? 1.0 : 0.0;
    mean_se(xs, m, se);
    c.frac_countlaw.push_back(m);
    c.se_countlaw.push_back(se);
    const double comb = std::hypot(c.se_geometric[t], c.se_countlaw[t]);
    const double gap = std::abs(c.frac_geometric[t] - c.frac_countlaw[t]);
    const double z = comb > 0.0 ? gap / comb : (gap == 0.0 ? 0.0 : INFINITY);
    c.agreement_z.push_back(z);
    c.estimators_agree = c.estimators_agree && z <= 3.0;
  }
  return c;
}

CoverageFraction coverage_fraction(const GeneratorSpec& gen, double r, int k, const Window& window,
                                   const CoverageOptions& opt) {
  const auto c = coverage_curve(gen, r, {k}, window, opt);
  const std::string label = "coverage(k=" + std::to_string(k) + ")";
  return {{label + ":geometric", c.frac_geometric[0], c.se_geometric[0], c.reps, opt.seed},
          {label + ":countlaw", c.frac_countlaw[0], c.se_countlaw[0], c.reps, opt.seed},
          c.agreement_z[0]};
}

std::string to_string(CrossingVerdict v) {
  switch (v) {
    case CrossingVerdict::SingleCrossing: return "single_crossing";
    case CrossingVerdict::NoCrossing: return "no_crossing";
    case CrossingVerdict::MultipleCrossings: return "multiple_crossings";
  }
  return "?";
}

CrossingReport crossing_detect(const DiscreteLaw& a, const DiscreteLaw& b, double tol) {
  CrossingReport rep;
  const std::int64_t top = std::max(a.truncation(), b.truncation()) + 1;
  int current = 0;
  for (std::int64_t k = 1; k <= top; ++k) {
    const double diff = a.tail_probability(k) - b.tail_probability(k);
    rep.tail_differences.push_back(diff);
    if (std::abs(diff) <= tol) continue;
    const int s = diff > 0 ? 1 : -1;
    if (current == 0) {
      rep.first_sign = s;
    } else if (s != current) {
      ++rep.sign_changes;
    }
    if (rep.sign_changes == 0) rep.k0 = k;
    current = s;
  }
  if (rep.sign_changes == 0) {
    rep.verdict = CrossingVerdict::NoCrossing;
    rep.k0 = -1;
  } else if (rep.sign_changes == 1) {
    rep.verdict = CrossingVerdict::SingleCrossing;
  } else {
    rep.verdict = CrossingVerdict::MultipleCrossings;
  }

  // Log ratio on the common support.
  std::vector<double> lr;
  const std::int64_t common = std::min(a.truncation(), b.truncation());
  for (std::int64_t i = 0; i <= common; ++i) {
    const double fa = a.pmf(i), fb = b.pmf(i);
    if (fa <= 0.0 || fb <= 0.0) break;
    lr.push_back(std::log(fa) - std::log(fb));
  }
  rep.log_concave_ratio = true;
  for (std::size_t i = 1; i + 1 < lr.size(); ++i)
    if (lr[i - 1] + lr[i + 1] - 2.0 * lr[i] > 1e-9 * (1.0 + std::abs(lr[i]))) rep.log_concave_ratio = false;
  // Unimodal: non-decreasing then non-increasing.
  std::size_t i = 1;
  const double eps = 1e-12;
  while (i < lr.size() && lr[i] >= lr[i - 1] - eps) ++i;
  while (i < lr.size() && lr[i] <= lr[i - 1] + eps) ++i;
  rep.unimodal_ratio = i >= lr.size();
  return rep;
}

CurveCrossing compare_curves(const std::vector<int>& ks, const std::vector<double>& a, const std::vector<double>& sa,
                             const std::vector<double>& b, const std::vector<double>& sb, double z_threshold) {
  if (a.size() != ks.size() || b.size() != ks.size() || sa.size() != ks.size() || sb.size() != ks.size())
    throw PreconditionError("compare_curves: curves must have one value per k");
  CurveCrossing out;
  int current = 0;
  for (std::size_t t = 0; t < ks.size(); ++t) {
    const double comb = std::hypot(sa[t], sb[t]);
    const double gap = a[t] - b[t];
    const double z = comb > 0.0 ? gap / comb : (gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap));
    out.z.push_back(z);
    const int s = z >= z_threshold ? 1 : (z <= -z_threshold ? -1 : 0);
    out.resolved_sign.push_back(s);
    if (s == 0) continue;
    if (current == 0) out.first_sign = s;
    else if (s != current) ++out.sign_changes;
    if (out.sign_changes == 0) out.k0 = ks[t];
    current = s;
    out.last_sign = s;
  }
  if (out.sign_changes == 0) out.k0 = -1;
  return out;
}

double disk_rectangle_area(double r, double x0, double x1, double y0, double y1) {
  if (!(r > 0.0)) return 0.0;
  x0 = std::max(x0, -r);
  x1 = std::min(x1, r);
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  // Integrate the length of [y0, y1] cut by [-h(x), h(x)], h = sqrt(r^2 - x^2),
  // piecewise between the points where h crosses |y0| or |y1|.
  std::vector<double> cuts{x0, x1};
  for (double y : {y0, y1}) {
    if (std::abs(y) < r) {
      const double w = std::sqrt(r * r - y * y);
      for (double c : {-w, w})
        if (c > x0 && c < x1) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    const double h = std::sqrt(std::max(0.0, r * r - mid * mid));
    const bool top_is_h = h < y1;    // upper end is h(x) rather than y1
    const bool bottom_is_h = -h > y0;  // lower end is -h(x) rather than y0
    const double top = top_is_h ? h : y1;
    const double bottom = bottom_is_h ? -h : y0;
    if (top <= bottom) continue;
    const double hint = half_chord_integral(r, b) - half_chord_integral(r, a);
    area += (top_is_h ? hint : y1 * (b - a)) - (bottom_is_h ? -hint : y0 * (b - a));
  }
  return area;
}

DiscreteLaw lattice_ball_count_law(const PerturbationSpec& spec, double r, std::span<const double> centre,
                                   std::size_t offsets_per_axis) {
  spec.validate();
  const auto* lat = std::get_if<IntegerLattice>(&spec.base);
  const auto* cell = std::get_if<UniformCell>(&spec.translation);
  if (lat == nullptr || cell == nullptr)
    throw PreconditionError("lattice_ball_count_law: needs a lattice base with uniform-cell translations");
  if (centre.size() != 2 || (lat->dim != 0 && lat->dim != 2))
    throw PreconditionError("lattice_ball_count_law: only planar lattices are supported");
  if (!(r > 0.0)) throw PreconditionError("lattice_ball_count_law: radius must be > 0");
  if (offsets_per_axis == 0) throw PreconditionError("lattice_ball_count_law: need at least one offset");

  const double s = lat->spacing, side = cell->side;
  const auto table = spec.replication.pmf_table();
  const std::size_t grid = lat->random_shift ? offsets_per_axis : 1;
  std::vector<double> mixed;
  for (std::size_t ou = 0; ou < grid; ++ou) {
    for (std::size_t ov = 0; ov < grid; ++ov) {
      // Lattice offset relative to the ball centre.
      double shift_x = 0.0, shift_y = 0.0;
      if (lat->random_shift) {
        shift_x = s * (static_cast<double>(ou) + 0.5) / static_cast<double>(grid);
        shift_y = s * (static_cast<double>(ov) + 0.5) / static_cast<double>(grid);
      }
      std::vector<DiscreteLaw> parts;
      const auto range = [&](double c, double sh) {
        return std::pair{static_cast<std::int64_t>(std::floor((c - r - side - sh) / s)),
                         static_cast<std::int64_t>(std::ceil((c + r - sh) / s))};
      };
      const auto [ix0, ix1] = range(centre[0], shift_x);
      const auto [iy0, iy1] = range(centre[1], shift_y);
      for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
        for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
          const double bx = shift_x + s * static_cast<double>(ix) - centre[0];
          const double by = shift_y + s * static_cast<double>(iy) - centre[1];
          const double q = disk_rectangle_area(r, bx, bx + side, by, by + side) / (side * side);
          if (q <= 0.0) continue;
          parts.push_back(DiscreteLaw::empirical(thin(table, std::min(q, 1.0))));
        }
      }
      const auto conv = parts.empty() ? DiscreteLaw::dirac(0) : DiscreteLaw::convolution(parts);
      const auto t = conv.pmf_table();
      if (mixed.size() < t.size()) mixed.resize(t.size(), 0.0);
      for (std::size_t i = 0; i < t.size(); ++i) mixed[i] += t[i] / static_cast<double>(grid * grid);
    }
  }
  return DiscreteLaw::empirical(mixed);
}

}  // namespace dcx
