#include "dcxlab/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

std::string fmt_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Exact in double for the small arguments used by hypergeometric kernels.
double choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (n > 60) return std::exp(log_choose(static_cast<double>(n), static_cast<double>(k)));
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::int64_t i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / i;
  return static_cast<double>(std::round(c));
}

// Guards against runaway tables for pathological parameters.
constexpr std::size_t kMaxTable = 50'000'000;

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::Binomial: return "binomial";
    case Family::HyperGeometric: return "hypergeometric";
    case Family::NegBinomial: return "neg_binomial";
    case Family::Geometric: return "geometric";
    case Family::GeoMixture: return "geo_mixture";
    case Family::Dirac: return "dirac";
    case Family::Empirical: return "empirical";
    case Family::Convolution: return "convolution";
  }
  return "unknown";
}

void DiscreteLaw::finalize_cdf() {
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    acc += pmf_[i];
    cdf_[i] = acc;
  }
}

DiscreteLaw DiscreteLaw::poisson(double mean, double tail_tol) {
  if (!std::isfinite(mean) || mean < 0.0)
    throw ParameterError("poisson: mean must be finite and >= 0, got " + fmt_real(mean));
  DiscreteLaw law;
  law.family_ = Family::Poisson;
  law.params_ = {mean};
  law.mean_ = mean;
  law.variance_ = mean;
  if (mean == 0.0) {
    law.pmf_ = {1.0};
    law.finalize_cdf();
    return law;
  }
  const bool recurrence = mean < 600.0;
  const double log_mean = std::log(mean);
  double p = recurrence ? std::exp(-mean) : 0.0;
  for (std::int64_t i = 0;; ++i) {
    if (!recurrence) p = std::exp(i * log_mean - mean - std::lgamma(i + 1.0));
    law.pmf_.push_back(p);
    const double next = recurrence ? p * mean / (i + 1) : std::exp((i + 1) * log_mean - mean - std::lgamma(i + 2.0));
    const double ratio = mean / (i + 2);
    if (i + 1 > mean && ratio < 1.0) {
      const double tail = next / (1.0 - ratio);
      if (tail < tail_tol) {
        law.tail_mass_ = tail;
        // sum_{j>T} j P(j) = mean * P(X >= T)
        law.tail_mean_ = mean * (p + tail);
        break;
      }
    }
    if (recurrence) p = next;
    if (law.pmf_.size() > kMaxTable) throw ParameterError("poisson: mean too large to tabulate");
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::binomial(std::int64_t n, double p) {
  if (n < 0) throw ParameterError("binomial: n must be >= 0, got " + std::to_string(n));
  if (!is_prob(p)) throw ParameterError("binomial: p must lie in [0,1], got " + fmt_real(p));
  DiscreteLaw law;
  law.family_ = Family::Binomial;
  law.params_ = {static_cast<double>(n), p};
  law.mean_ = n * p;
  law.variance_ = n * p * (1.0 - p);
  law.pmf_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0) {
    law.pmf_[0] = 1.0;
  } else if (p == 1.0) {
    law.pmf_[n] = 1.0;
  } else {
    const double p0 = std::pow(1.0 - p, static_cast<double>(n));
    if (p0 > 1e-280) {
      double v = p0;
      const double odds = p / (1.0 - p);
      for (std::int64_t i = 0; i <= n; ++i) {
        law.pmf_[i] = v;
        v *= odds * static_cast<double>(n - i) / static_cast<double>(i + 1);
      }
    } else {
      const double lp = std::log(p), lq = std::log1p(-p);
      for (std::int64_t i = 0; i <= n; ++i)
        law.pmf_[i] = std::exp(log_choose(n, i) + i * lp + (n - i) * lq);
    }
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::hypergeometric(std::int64_t n, std::int64_t m, std::int64_t k) {
  if (n < 0 || m < 0 || k < 0 || m > n || k > n)
    throw ParameterError("hypergeometric: need 0 <= m <= n and 0 <= k <= n, got (" +
                         std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(k) + ")");
  DiscreteLaw law;
  law.family_ = Family::HyperGeometric;
  law.params_ = {static_cast<double>(n), static_cast<double>(m), static_cast<double>(k)};
  const double frac = n > 0 ? static_cast<double>(m) / n : 0.0;
  law.mean_ = k * frac;
  law.variance_ = n > 1 ? k * frac * (1.0 - frac) * (n - k) / (n - 1.0) : 0.0;
  const std::int64_t lo = std::max<std::int64_t>(k - n + m, 0);
  const std::int64_t hi = std::min(m, k);
  law.pmf_.assign(static_cast<std::size_t>(hi) + 1, 0.0);
  if (n <= 60) {
    const double total = choose(n, k);
    for (std::int64_t i = lo; i <= hi; ++i) law.pmf_[i] = choose(m, i) * choose(n - m, k - i) / total;
  } else {
    const double lt = log_choose(n, k);
    for (std::int64_t i = lo; i <= hi; ++i)
      law.pmf_[i] = std::exp(log_choose(m, i) + log_choose(n - m, k - i) - lt);
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::neg_binomial(double r, double p, double tail_tol) {
  if (!std::isfinite(r) || r <= 0.0) throw ParameterError("neg_binomial: r must be > 0, got " + fmt_real(r));
  if (!std::isfinite(p) || p < 0.0 || p >= 1.0)
    throw ParameterError("neg_binomial: p must lie in [0,1), got " + fmt_real(p));
  DiscreteLaw law;
  law.family_ = Family::NegBinomial;
  law.params_ = {r, p};
  law.mean_ = r * p / (1.0 - p);
  law.variance_ = r * p / ((1.0 - p) * (1.0 - p));
  if (p == 0.0) {
    law.pmf_ = {1.0};
    law.finalize_cdf();
    return law;
  }
  const double log_p0 = r * std::log1p(-p);
  const bool recurrence = log_p0 > -600.0;
  double v = recurrence ? std::exp(log_p0) : 0.0;
  for (std::int64_t i = 0;; ++i) {
    if (!recurrence)
      v = std::exp(std::lgamma(r + i) - std::lgamma(r) - std::lgamma(i + 1.0) + i * std::log(p) + log_p0);
    law.pmf_.push_back(v);
    const double next = recurrence ? v * p * (r + i) / (i + 1)
                                   : std::exp(std::lgamma(r + i + 1) - std::lgamma(r) - std::lgamma(i + 2.0) +
                                              (i + 1) * std::log(p) + log_p0);
    // sup_{j >= i+1} P(j+1)/P(j)
    const double ratio = r >= 1.0 ? p * (r + i + 1) / (i + 2) : p;
    if (i + 1 > law.mean_ && ratio < 1.0) {
      const double tail = next / (1.0 - ratio);
      if (tail < tail_tol) {
        const double t1 = static_cast<double>(i + 1);
        law.tail_mass_ = tail;
        law.tail_mean_ = next * (t1 / (1.0 - ratio) + ratio / ((1.0 - ratio) * (1.0 - ratio)));
        break;
      }
    }
    if (recurrence) v = next;
    if (law.pmf_.size() > kMaxTable) throw ParameterError("neg_binomial: parameters too extreme to tabulate");
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::geometric(double p, double tail_tol) {
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0)
    throw ParameterError("geometric: p must lie in (0,1], got " + fmt_real(p));
  DiscreteLaw law;
  law.family_ = Family::Geometric;
  law.params_ = {p};
  const double q = 1.0 - p;
  law.mean_ = q / p;
  law.variance_ = q / (p * p);
  double v = p;
  double qpow = 1.0;  // q^i
  for (std::int64_t i = 0;; ++i) {
    law.pmf_.push_back(v);
    qpow *= q;  // q^{i+1}
    if (qpow < tail_tol) {
      law.tail_mass_ = qpow;
      law.tail_mean_ = qpow * (static_cast<double>(i + 1) + q / p);
      break;
    }
    v *= q;
    if (law.pmf_.size() > kMaxTable) throw ParameterError("geometric: p too small to tabulate");
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::geo_mixture(std::vector<double> weights, std::vector<double> ps, double tail_tol) {
  if (weights.empty() || weights.size() != ps.size())
    throw ParameterError("geo_mixture: weights and p lists must be non-empty and of equal length");
  double wsum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!is_prob(weights[j])) throw ParameterError("geo_mixture: weight outside [0,1]: " + fmt_real(weights[j]));
    if (!std::isfinite(ps[j]) || ps[j] <= 0.0 || ps[j] > 1.0)
      throw ParameterError("geo_mixture: p outside (0,1]: " + fmt_real(ps[j]));
    wsum += weights[j];
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ParameterError("geo_mixture: weights must sum to 1, got " + fmt_real(wsum));
  DiscreteLaw law;
  law.family_ = Family::GeoMixture;
  law.params_ = weights;
  law.params2_ = ps;
  double second = 0.0;
  law.mean_ = -1.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double q = 1.0 - ps[j];
    law.mean_ += weights[j] / ps[j];
    second += weights[j] * (q / (ps[j] * ps[j]) + (q / ps[j]) * (q / ps[j]));
  }
  law.variance_ = second - law.mean_ * law.mean_;
  std::vector<double> qpow(weights.size(), 1.0);
  for (std::int64_t i = 0;; ++i) {
    double v = 0.0, tail = 0.0, tail_mean = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double q = 1.0 - ps[j];
      v += weights[j] * ps[j] * qpow[j];
      qpow[j] *= q;
      tail += weights[j] * qpow[j];
      tail_mean += weights[j] * qpow[j] * (static_cast<double>(i + 1) + q / ps[j]);
    }
    law.pmf_.push_back(v);
    if (tail < tail_tol) {
      law.tail_mass_ = tail;
      law.tail_mean_ = tail_mean;
      break;
    }
    if (law.pmf_.size() > kMaxTable) throw ParameterError("geo_mixture: p too small to tabulate");
  }
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::dirac(std::int64_t n) {
  if (n < 0) throw ParameterError("dirac: atom must be >= 0, got " + std::to_string(n));
  DiscreteLaw law;
  law.family_ = Family::Dirac;
  law.params_ = {static_cast<double>(n)};
  law.mean_ = static_cast<double>(n);
  law.pmf_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  law.pmf_[n] = 1.0;
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::empirical(std::vector<double> pmf) {
  if (pmf.empty()) throw ParameterError("empirical: pmf must be non-empty");
  double total = 0.0;
  for (double v : pmf) {
    if (!std::isfinite(v) || v < 0.0) throw ParameterError("empirical: pmf entries must be finite and >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("empirical: pmf must sum to 1, got " + fmt_real(total));
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  DiscreteLaw law;
  law.family_ = Family::Empirical;
  for (double& v : pmf) v /= total;
  law.pmf_ = std::move(pmf);
  law.params_ = law.pmf_;
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < law.pmf_.size(); ++i) {
    m += i * law.pmf_[i];
    s += static_cast<double>(i) * i * law.pmf_[i];
  }
  law.mean_ = m;
  law.variance_ = s - m * m;
  law.finalize_cdf();
  return law;
}

DiscreteLaw DiscreteLaw::convolution(std::span<const DiscreteLaw> parts, double tail_tol) {
  DiscreteLaw law;
  law.family_ = Family::Convolution;
  law.components_.assign(parts.begin(), parts.end());
  std::vector<double> acc{1.0};
  double missing_mass = 0.0;
  for (const auto& part : parts) {
    law.mean_ += part.mean();
    law.variance_ += part.variance();
    missing_mass += part.tail_mass_bound();
    const auto& t = part.pmf_;
    std::vector<double> out(acc.size() + t.size() - 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == 0.0) continue;
      for (std::size_t j = 0; j < t.size(); ++j) out[i + j] += acc[i] * t[j];
    }
    acc = std::move(out);
  }
  // E[X; some part beyond its table] <= sum_j E[X_j; X_j > T_j] + P(X_j > T_j) E[rest]
  double missing_mean = 0.0;
  for (const auto& part : parts)
    missing_mean += part.tail_mean_bound() + part.tail_mass_bound() * (law.mean_ - part.mean());
  double trimmed_mass = 0.0, trimmed_mean = 0.0;
  while (acc.size() > 1) {
    const double v = acc.back();
    if (v != 0.0 && missing_mass + trimmed_mass + v >= tail_tol) break;
    trimmed_mass += v;
    trimmed_mean += v * static_cast<double>(acc.size() - 1);
    acc.pop_back();
  }
  law.pmf_ = std::move(acc);
  law.tail_mass_ = missing_mass + trimmed_mass;
  law.tail_mean_ = missing_mean + trimmed_mean;
  law.finalize_cdf();
  return law;
}

double DiscreteLaw::pmf(std::int64_t i) const {
  if (i < 0) throw PreconditionError("pmf: index must be >= 0, got " + std::to_string(i));
  return i < static_cast<std::int64_t>(pmf_.size()) ? pmf_[i] : 0.0;
}

double DiscreteLaw::truncated_mean() const {
  double m = 0.0;
  for (std::size_t i = 1; i < pmf_.size(); ++i) m += i * pmf_[i];
  return m;
}

double DiscreteLaw::tail_probability(std::int64_t k) const {
  if (k <= 0) return cdf_.back();
  double s = 0.0;
  for (std::size_t i = pmf_.size(); i-- > static_cast<std::size_t>(k);) s += pmf_[i];
  return s;
}

std::int64_t DiscreteLaw::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return truncation();
  return it - cdf_.begin();
}

std::string DiscreteLaw::describe() const {
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_real(v[i]);
    return s + "]";
  };
  switch (family_) {
    case Family::Poisson: return "poi(" + fmt_real(params_[0]) + ")";
    case Family::Binomial: return "bin(" + fmt_real(params_[0]) + "," + fmt_real(params_[1]) + ")";
    case Family::HyperGeometric:
      return "hgeo(" + fmt_real(params_[0]) + "," + fmt_real(params_[1]) + "," + fmt_real(params_[2]) + ")";
    case Family::NegBinomial: return "nbin(" + fmt_real(params_[0]) + "," + fmt_real(params_[1]) + ")";
    case Family::Geometric: return "geo(" + fmt_real(params_[0]) + ")";
    case Family::GeoMixture: return "mixgeo(" + list(params_) + "," + list(params2_) + ")";
    case Family::Dirac: return "dirac(" + fmt_real(params_[0]) + ")";
    case Family::Empirical: return "emp(" + list(params_) + ")";
    case Family::Convolution: {
      std::string s = "conv(";
      for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? "," : "") + components_[i].describe();
      return s + ")";
    }
  }
  return "?";
}

Interval stop_loss_bounds(const DiscreteLaw& law, double a) {
  if (a <= 0.0) {
    const double v = law.mean() - a;
    return {v, v};
  }
  const auto t = law.pmf_table();
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(std::floor(a)) + 1; i < t.size(); ++i) s += (i - a) * t[i];
  return {s, s + law.tail_mean_bound()};
}

double stop_loss(const DiscreteLaw& law, double a) { return stop_loss_bounds(law, a).mid(); }

std::string to_string(CxVerdict v) {
  switch (v) {
    case CxVerdict::Ordered: return "ordered";
    case CxVerdict::Reversed: return "reversed";
    case CxVerdict::Crossed: return "crossed";
    case CxVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> default_cx_grid(const DiscreteLaw& a, const DiscreteLaw& b) {
  const std::int64_t t = std::max(a.truncation(), b.truncation());
  std::vector<double> grid(static_cast<std::size_t>(2 * t + 1));
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = 0.5 * static_cast<double>(j);
  return grid;
}

CxComparison cx_compare(const DiscreteLaw& lo, const DiscreteLaw& hi, std::span<const double> grid, double tol) {
  if (!(std::abs(lo.mean() - hi.mean()) <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cx_compare: convex order requires equal means, got mean(lo)=" << lo.mean() << " (" << lo.describe()
        << ") and mean(hi)=" << hi.mean() << " (" << hi.describe() << ")";
    throw PreconditionError(msg.str());
  }
  std::vector<double> own;
  if (grid.empty()) {
    own = default_cx_grid(lo, hi);
    grid = own;
  }
  CxComparison out;
  out.grid_points = grid.size();
  out.max_forward_gap = -std::numeric_limits<double>::infinity();
  out.max_backward_gap = -std::numeric_limits<double>::infinity();
  bool fwd_holds = true, bwd_holds = true, fwd_refuted = false, bwd_refuted = false;
  for (double a : grid) {
    const Interval l = stop_loss_bounds(lo, a);
    const Interval h = stop_loss_bounds(hi, a);
    if (l.hi > h.lo + tol) fwd_holds = false;
    if (h.hi > l.lo + tol) bwd_holds = false;
    if (l.lo > h.hi + tol) fwd_refuted = true;
    if (h.lo > l.hi + tol) bwd_refuted = true;
    out.max_forward_gap = std::max(out.max_forward_gap, l.mid() - h.mid());
    out.max_backward_gap = std::max(out.max_backward_gap, h.mid() - l.mid());
  }
  out.forward = fwd_holds;
  out.backward = bwd_holds;
  if (fwd_holds) out.verdict = CxVerdict::Ordered;
  else if (bwd_holds) out.verdict = CxVerdict::Reversed;
  else if (fwd_refuted && bwd_refuted) out.verdict = CxVerdict::Crossed;
  else out.verdict = CxVerdict::Inconclusive;
  return out;
}

bool second_difference_convex(const std::map<std::int64_t, double>& values, double tol) {
  if (values.size() < 3)
    throw PreconditionError("second_difference_convex: need at least 3 points, got " +
                            std::to_string(values.size()));
  if (values.rbegin()->first - values.begin()->first + 1 != static_cast<std::int64_t>(values.size()))
    throw PreconditionError("second_difference_convex: keys must form a contiguous integer range");
  std::vector<double> g;
  g.reserve(values.size());
  for (const auto& [n, v] : values) g.push_back(v);
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    if (g[i - 1] + g[i + 1] - 2.0 * g[i] < -tol) return false;
  return true;
}

}  // namespace dcx
