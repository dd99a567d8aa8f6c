#include "dcxlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

enum Stream : std::uint64_t { kVoid = 1, kMean = 2, kMoment = 3, kMomentMeans = 4 };

void require_reps(const McOptions& opt) {
  if (opt.reps < 100) throw PreconditionError("estimator: need reps >= 100, got " + std::to_string(opt.reps));
}

Window bounding(std::span<const Window> boxes) {
  Window w = boxes.front();
  for (const auto& b : boxes.subspan(1)) w = w.bounding_union(b);
  return w;
}

// counts[rep * boxes.size() + b] = Phi(box b) in replication rep.
std::vector<double> simulate_counts(const GeneratorSpec& gen, std::span<const Window> boxes, const McOptions& opt,
                                    std::uint64_t stream) {
  const Window window = opt.sampling_window.value_or(bounding(boxes));
  for (const auto& b : boxes)
    if (b.dim() != window.dim()) throw PreconditionError("estimator: box dimension mismatch");
  std::vector<double> counts(opt.reps * boxes.size());
  parallel_for(opt.reps, opt.threads, [&](std::size_t rep) {
    Rng rng = make_rng(opt.seed, stream, rep);
    const PointPattern p = sample(gen, window, rng);
    for (std::size_t b = 0; b < boxes.size(); ++b)
      counts[rep * boxes.size() + b] = static_cast<double>(count_in(p, boxes[b]));
  });
  return counts;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

std::string box_label(const Window& b) {
  std::string s = "[";
  for (std::size_t i = 0; i < b.dim(); ++i) {
    s += (i ? "x" : "");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g..%.4g", b.lower()[i], b.upper()[i]);
    s += buf;
  }
  return s + "]";
}

Side decide(std::span<const double> z, double threshold) {
  const bool neg = std::any_of(z.begin(), z.end(), [&](double v) { return v <= -threshold; });
  const bool pos = std::any_of(z.begin(), z.end(), [&](double v) { return v >= threshold; });
  if (neg && !pos) return Side::Sub;
  if (pos && !neg) return Side::Super;
  return Side::Inconclusive;
}

void finish(WeakClassVerdict& v) {
  std::vector<Side> sides{v.void_side};
  for (const auto& [k, s] : v.moment_sides) sides.push_back(s);
  const bool all_sub = std::all_of(sides.begin(), sides.end(), [](Side s) { return s == Side::Sub; });
  const bool all_super = std::all_of(sides.begin(), sides.end(), [](Side s) { return s == Side::Super; });
  const bool any_sub = std::any_of(sides.begin(), sides.end(), [](Side s) { return s == Side::Sub; });
  const bool any_super = std::any_of(sides.begin(), sides.end(), [](Side s) { return s == Side::Super; });
  if (all_sub) v.overall = WeakClass::WeaklySub;
  else if (all_super) v.overall = WeakClass::WeaklySuper;
  else if (any_sub && any_super) v.overall = WeakClass::Neither;
  else v.overall = WeakClass::Inconclusive;
}

void check_disjoint(std::span<const Window> boxes) {
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (boxes[i].overlaps(boxes[j]))
        throw PreconditionError("factorial moment: boxes " + std::to_string(i) + " and " + std::to_string(j) +
                                " overlap; the product formula needs pairwise disjoint boxes");
}

}  // namespace

std::string to_string(Side s) {
  switch (s) {
    case Side::Sub: return "sub";
    case Side::Super: return "super";
    case Side::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(WeakClass c) {
  switch (c) {
    case WeakClass::WeaklySub: return "weakly_sub";
    case WeakClass::WeaklySuper: return "weakly_super";
    case WeakClass::Neither: return "neither";
    case WeakClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

EstimateWithCI estimate_void(const GeneratorSpec& gen, const Window& box, const McOptions& opt) {
  require_reps(opt);
  const Window boxes[] = {box};
  const auto counts = simulate_counts(gen, boxes, opt, kVoid);
  const double n = static_cast<double>(opt.reps);
  const double empties = static_cast<double>(std::count(counts.begin(), counts.end(), 0.0));
  const double p = empties / n;
  return {"void" + box_label(box), p, std::sqrt(p * (1.0 - p) / n), opt.reps, opt.seed};
}

EstimateWithCI estimate_mean_count(const GeneratorSpec& gen, const Window& box, const McOptions& opt) {
  require_reps(opt);
  const Window boxes[] = {box};
  const auto counts = simulate_counts(gen, boxes, opt, kMean);
  const auto ms = mean_se(counts);
  return {"mean" + box_label(box), ms.mean, ms.se, opt.reps, opt.seed};
}

EstimateWithCI estimate_factorial_moment(const GeneratorSpec& gen, std::span<const Window> boxes,
                                         const McOptions& opt) {
  require_reps(opt);
  if (boxes.empty()) throw PreconditionError("factorial moment: need at least one box");
  check_disjoint(boxes);
  const auto counts = simulate_counts(gen, boxes, opt, kMoment);
  std::vector<double> prod(opt.reps, 1.0);
  for (std::size_t r = 0; r < opt.reps; ++r)
    for (std::size_t b = 0; b < boxes.size(); ++b) prod[r] *= counts[r * boxes.size() + b];
  const auto ms = mean_se(prod);
  std::string label = "alpha" + std::to_string(boxes.size());
  for (const auto& b : boxes) label += box_label(b);
  return {label, ms.mean, ms.se, opt.reps, opt.seed};
}

std::vector<Window> default_box_family(std::size_t dim, std::uint64_t seed, double region) {
  Rng rng = make_rng(seed, 0xb0c5);
  std::vector<Window> out;
  for (double side : {0.5, 1.0, 2.0}) {
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = region * uniform01(rng);
      hi[i] = lo[i] + side;
    }
    out.emplace_back(std::move(lo), std::move(hi));
  }
  return out;
}

std::vector<Window> moment_boxes(const Window& cube, int k) {
  if (k < 1) throw PreconditionError("moment_boxes: order must be >= 1");
  std::vector<Window> out;
  for (int j = 0; j < k; ++j) out.push_back(cube.translated(0, j * cube.side(0)));
  return out;
}

WeakClassVerdict classify_weak(const GeneratorSpec& gen, std::span<const Window> family, std::span<const int> orders,
                               const McOptions& opt, double z_threshold) {
  require_reps(opt);
  if (family.empty()) throw PreconditionError("classify_weak: empty box family");
  WeakClassVerdict v;
  std::vector<double> void_z;
  std::map<int, std::vector<double>> moment_z;
  for (std::size_t b = 0; b < family.size(); ++b) {
    const Window& cube = family[b];
    McOptions o = opt;
    // Independent runs per quantity and per cube.
    o.seed = derive_seed(opt.seed, b, 0);
    const Window one[] = {cube};
    const auto vcounts = simulate_counts(gen, one, o, kVoid);
    const auto mcounts = simulate_counts(gen, one, o, kMean);
    const double n = static_cast<double>(opt.reps);
    const double nu = static_cast<double>(std::count(vcounts.begin(), vcounts.end(), 0.0)) / n;
    const double nu_se = std::sqrt(nu * (1.0 - nu) / n);
    const auto m = mean_se(mcounts);
    const double ref = std::exp(-m.mean);
    const double se = std::sqrt(nu_se * nu_se + ref * ref * m.se * m.se);
    const double z = se > 0 ? (nu - ref) / se : (nu == ref ? 0.0 : std::copysign(INFINITY, nu - ref));
    void_z.push_back(z);
    v.z_scores.push_back(z);
    v.labels.push_back("void" + box_label(cube));

    for (int k : orders) {
      if (k < 2) throw PreconditionError("classify_weak: moment orders must be >= 2");
      const auto boxes = moment_boxes(cube, k);
      const auto acounts = simulate_counts(gen, boxes, o, kMoment + 16 * static_cast<std::uint64_t>(k));
      const auto bcounts = simulate_counts(gen, boxes, o, kMomentMeans + 16 * static_cast<std::uint64_t>(k));
      const std::size_t kk = boxes.size();
      std::vector<double> prod(opt.reps, 1.0);
      for (std::size_t r = 0; r < opt.reps; ++r)
        for (std::size_t i = 0; i < kk; ++i) prod[r] *= acounts[r * kk + i];
      const auto alpha = mean_se(prod);
      // Product of means with delta-method variance from the joint covariance.
      std::vector<double> means(kk, 0.0);
      for (std::size_t r = 0; r < opt.reps; ++r)
        for (std::size_t i = 0; i < kk; ++i) means[i] += bcounts[r * kk + i] / n;
      double product = 1.0;
      for (double mi : means) product *= mi;
      std::vector<double> grad(kk, 1.0);
      for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = 0; j < kk; ++j)
          if (j != i) grad[i] *= means[j];
      double var = 0.0;
      for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = 0; j < kk; ++j) {
          double cov = 0.0;
          for (std::size_t r = 0; r < opt.reps; ++r)
            cov += (bcounts[r * kk + i] - means[i]) * (bcounts[r * kk + j] - means[j]);
          cov /= (n - 1.0);
          var += grad[i] * grad[j] * cov / n;
        }
      const double se_k = std::sqrt(alpha.se * alpha.se + std::max(var, 0.0));
      const double gap = alpha.mean - product;
      const double zk = se_k > 0 ? gap / se_k : (gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap));
      moment_z[k].push_back(zk);
      v.z_scores.push_back(zk);
      v.labels.push_back("alpha" + std::to_string(k) + box_label(cube));
    }
  }
  v.void_side = decide(void_z, z_threshold);
  for (const auto& [k, zs] : moment_z) v.moment_sides[k] = decide(zs, z_threshold);
  finish(v);
  return v;
}

// --- exact models -----------------------------------------------------------

SpectralAnnuliModel::SpectralAnnuliModel(AnnuliSpectrum spectrum, SpectralMode mode)
    : spectrum_(std::move(spectrum)), mode_(mode) {}

SpectralAnnuliModel SpectralAnnuliModel::ginibre_disk(double r, SpectralMode mode, std::size_t parts) {
  if (parts == 0) throw PreconditionError("ginibre_disk: need at least one annulus");
  std::vector<Annulus> annuli;
  for (std::size_t i = 0; i < parts; ++i)
    annuli.push_back({r * std::sqrt(static_cast<double>(i) / parts), r * std::sqrt(static_cast<double>(i + 1) / parts)});
  return SpectralAnnuliModel(annuli_eigenvalues(annuli), mode);
}

double SpectralAnnuliModel::void_probability(std::size_t region) const {
  double log_v = 0.0;
  for (std::size_t k = 0; k < spectrum_.rows(); ++k) {
    const double l = spectrum_.at(k, region);
    switch (mode_) {
      case SpectralMode::Determinantal: log_v += std::log1p(-l); break;
      case SpectralMode::Permanental: log_v -= std::log1p(l); break;
      case SpectralMode::PoissonRef: log_v -= l; break;
    }
  }
  return std::exp(log_v);
}

double SpectralAnnuliModel::mean(std::size_t region) const {
  double m = 0.0;
  for (std::size_t k = 0; k < spectrum_.rows(); ++k) m += spectrum_.at(k, region);
  return m;
}

double SpectralAnnuliModel::product_moment(std::span<const std::size_t> regions) const {
  const std::size_t n = regions.size();
  if (n > 16) throw PreconditionError("product_moment: at most 16 regions");
  if (mode_ == SpectralMode::PoissonRef) {
    double p = 1.0;
    for (std::size_t i : regions) p *= mean(i);
    return p;
  }
  // dp[S] = E[prod_{i in S} N_i restricted to the eigenfunctions seen so far].
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> dp(full + 1, 0.0);
  dp[0] = 1.0;
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t j = 1; j <= n; ++j) factorial[j] = factorial[j - 1] * static_cast<double>(j);
  for (std::size_t k = 0; k < spectrum_.rows(); ++k) {
    std::vector<double> next = dp;
    for (std::size_t s = 0; s < full; ++s) {
      if (dp[s] == 0.0) continue;
      const std::size_t rest = full & ~s;
      for (std::size_t t = rest; t != 0; t = (t - 1) & rest) {
        const auto size = static_cast<std::size_t>(std::popcount(t));
        // Bernoulli counts have vanishing factorial moments of order >= 2.
        if (mode_ == SpectralMode::Determinantal && size > 1) continue;
        double w = factorial[size];
        for (std::size_t i = 0; i < n; ++i)
          if (t >> i & 1) w *= spectrum_.at(k, regions[i]);
        next[s | t] += dp[s] * w;
      }
    }
    dp = std::move(next);
  }
  return dp[full];
}

std::string SpectralAnnuliModel::describe() const {
  std::string s = to_string(mode_) + " ginibre annuli";
  for (const auto& a : spectrum_.annuli()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.6g,%.6g]", a.inner, a.outer);
    s += buf;
  }
  return s;
}

CounterexampleModel::CounterexampleModel(std::int64_t k) : k_(k) {
  if (k < 2) throw PreconditionError("counterexample: need k >= 2, got " + std::to_string(k));
  elementary_.assign(static_cast<std::size_t>(k) + 1, 0.0);
  elementary_[0] = 1.0;
  for (std::int64_t v = 0; v < k; ++v)
    for (std::size_t j = static_cast<std::size_t>(v) + 1; j >= 1; --j) elementary_[j] += elementary_[j - 1] * v;
}

double CounterexampleModel::product_moment(std::span<const std::size_t> regions) const {
  const std::size_t j = regions.size();
  if (j > static_cast<std::size_t>(k_)) return 0.0;
  // Ordered j-tuples of distinct values, averaged: j! e_j / (k)_j.
  double v = elementary_[j];
  for (std::size_t i = 0; i < j; ++i) v *= static_cast<double>(i + 1) / static_cast<double>(k_ - static_cast<std::int64_t>(i));
  return v;
}

std::string CounterexampleModel::describe() const {
  return "permutation of (0..." + std::to_string(k_ - 1) + ") on " + std::to_string(k_) + " sites";
}

WeakClassVerdict classify_exact(const ExactCountModel& model, std::span<const int> orders, double rel_tol) {
  WeakClassVerdict v;
  v.exact = true;
  auto side_of = [&](std::span<const double> gaps, std::span<const double> scales) {
    bool all_neg = true, all_pos = true;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      all_neg = all_neg && gaps[i] < -rel_tol * scales[i];
      all_pos = all_pos && gaps[i] > rel_tol * scales[i];
    }
    if (all_neg) return Side::Sub;
    if (all_pos) return Side::Super;
    return Side::Inconclusive;
  };
  std::vector<double> gaps, scales;
  for (std::size_t i = 0; i < model.regions(); ++i) {
    const double ref = std::exp(-model.mean(i));
    gaps.push_back(model.void_probability(i) - ref);
    scales.push_back(ref);
    v.z_scores.push_back(gaps.back());
    v.labels.push_back("void[" + std::to_string(i) + "]");
  }
  v.void_side = side_of(gaps, scales);
  for (int k : orders) {
    if (k < 2 || static_cast<std::size_t>(k) > model.regions()) continue;
    gaps.clear();
    scales.clear();
    std::vector<std::size_t> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    for (int count = 0; count < 200; ++count) {
      double product = 1.0;
      for (std::size_t i : subset) product *= model.mean(i);
      gaps.push_back(model.product_moment(subset) - product);
      scales.push_back(product);
      std::string label = "alpha" + std::to_string(k) + "[";
      for (std::size_t j = 0; j < subset.size(); ++j) label += (j ? "," : "") + std::to_string(subset[j]);
      v.z_scores.push_back(gaps.back());
      v.labels.push_back(label + "]");
      // next k-subset in lexicographic order
      std::size_t pos = subset.size();
      while (pos > 0 && subset[pos - 1] == model.regions() - subset.size() + pos - 1) --pos;
      if (pos == 0) break;
      ++subset[pos - 1];
      for (std::size_t j = pos; j < subset.size(); ++j) subset[j] = subset[j - 1] + 1;
    }
    v.moment_sides[k] = side_of(gaps, scales);
  }
  finish(v);
  return v;
}

}  // namespace dcx
