#pragma once

// Discrete laws on the non-negative integers: replication kernels and count
// laws, with exact pmf tables, stop-loss transforms and convex-order checks.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dcxlab/random.hpp"

namespace dcx {

enum class Family {
  Poisson,
  Binomial,
  HyperGeometric,
  NegBinomial,
  Geometric,
  GeoMixture,
  Dirac,
  Empirical,
  Convolution,
};

std::string to_string(Family f);

/// Tail mass beyond which infinite-support laws are cut.
inline constexpr double kDefaultTailTolerance = 1e-14;

/// Closed interval of reals, used for quantities known up to a rigorous bound.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

/// Immutable probability law on {0, 1, 2, ...}.
///
/// The pmf is tabulated on {0, ..., truncation()}. For infinite-support
/// families the table stops once the remaining mass is below the tail
/// tolerance, and two analytic bounds are kept for what was cut:
/// tail_mass_bound() >= P(X > T) and tail_mean_bound() >= E[X; X > T].
///
/// Parameterizations:
///   poisson(l)             P(i) = e^-l l^i / i!
///   binomial(n, p)         P(i) = C(n,i) p^i (1-p)^(n-i)
///   hypergeometric(n,m,k)  P(i) = C(m,i) C(n-m,k-i) / C(n,k),
///                          max(k-n+m, 0) <= i <= min(m, k)
///   neg_binomial(r, p)     P(i) = C(r+i-1,i) p^i (1-p)^r,  mean rp/(1-p)
///   geometric(p)           P(i) = p (1-p)^i,               mean 1/p - 1
///   geo_mixture(w, p)      sum_j w_j geometric(p_j)
///
/// Sampling is by inversion of the tabulated cdf (binary search). Draws
/// landing in the cut tail (probability below the tail tolerance) return
/// truncation().
class DiscreteLaw {
 public:
  static DiscreteLaw poisson(double mean, double tail_tol = kDefaultTailTolerance);
  static DiscreteLaw binomial(std::int64_t n, double p);
  static DiscreteLaw bernoulli(double p) { return binomial(1, p); }
  static DiscreteLaw hypergeometric(std::int64_t n, std::int64_t m, std::int64_t k);
  static DiscreteLaw neg_binomial(double r, double p, double tail_tol = kDefaultTailTolerance);
  static DiscreteLaw geometric(double p, double tail_tol = kDefaultTailTolerance);
  static DiscreteLaw geo_mixture(std::vector<double> weights, std::vector<double> ps,
                                 double tail_tol = kDefaultTailTolerance);
  static DiscreteLaw dirac(std::int64_t n);
  /// pmf must be non-negative and sum to 1 within 1e-9; it is renormalized.
  static DiscreteLaw empirical(std::vector<double> pmf);
  /// Law of the sum of independent variables with the given laws.
  static DiscreteLaw convolution(std::span<const DiscreteLaw> parts,
                                 double tail_tol = kDefaultTailTolerance);

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<DiscreteLaw>& components() const { return components_; }

  double pmf(std::int64_t i) const;
  std::span<const double> pmf_table() const { return pmf_; }
  std::int64_t truncation() const { return static_cast<std::int64_t>(pmf_.size()) - 1; }
  bool finite_support() const { return tail_mass_ == 0.0 && tail_mean_ == 0.0; }
  double tail_mass_bound() const { return tail_mass_; }
  double tail_mean_bound() const { return tail_mean_; }

  /// Closed-form mean of the family.
  double mean() const { return mean_; }
  /// Closed-form variance of the family.
  double variance() const { return variance_; }
  /// sum_{i <= T} i P(i).
  double truncated_mean() const;
  /// P(X >= k) from the table (the cut tail is not included).
  double tail_probability(std::int64_t k) const;

  std::int64_t sample(Rng& rng) const;

  /// Canonical text form, parseable by parse_law().
  std::string describe() const;

 private:
  DiscreteLaw() = default;
  void finalize_cdf();

  Family family_ = Family::Dirac;
  std::vector<double> params_;
  std::vector<double> params2_;
  std::vector<DiscreteLaw> components_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double tail_mass_ = 0.0;
  double tail_mean_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// E[(X - a)^+] bracketed: the table part is exact, the cut tail contributes
/// somewhere in [0, tail_mean_bound()].
Interval stop_loss_bounds(const DiscreteLaw& law, double a);

/// Point value of E[(X - a)^+] (midpoint of stop_loss_bounds).
double stop_loss(const DiscreteLaw& law, double a);

enum class CxVerdict { Ordered, Reversed, Crossed, Inconclusive };
std::string to_string(CxVerdict v);

struct CxComparison {
  CxVerdict verdict = CxVerdict::Inconclusive;
  bool forward = false;   ///< lo <=_cx hi certified on the grid
  bool backward = false;  ///< hi <=_cx lo certified on the grid
  /// max over the grid of stop_loss(lo) - stop_loss(hi) (point values).
  double max_forward_gap = 0.0;
  /// max over the grid of stop_loss(hi) - stop_loss(lo) (point values).
  double max_backward_gap = 0.0;
  std::size_t grid_points = 0;
};

/// Half-integer grid {j/2 : j = 0..2T}, T the larger truncation index.
std::vector<double> default_cx_grid(const DiscreteLaw& a, const DiscreteLaw& b);

/// Convex-order test by stop-loss comparison. The means must agree within
/// tol (PreconditionError otherwise). "forward" holds when the upper bound of
/// stop_loss(lo, a) is <= the lower bound of stop_loss(hi, a) + tol at every
/// grid point; it is refuted when the lower bound exceeds the upper bound by
/// more than tol somewhere. Verdict: Ordered if forward holds, else Reversed
/// if backward holds, Crossed if both directions are refuted, otherwise
/// Inconclusive. An empty grid selects default_cx_grid().
CxComparison cx_compare(const DiscreteLaw& lo, const DiscreteLaw& hi,
                        std::span<const double> grid = {}, double tol = 1e-12);

/// True iff g(n-1) + g(n+1) - 2 g(n) >= -tol at every interior point.
/// The keys must form a contiguous integer range with at least 3 entries.
bool second_difference_convex(const std::map<std::int64_t, double>& values,
                              double tol = 1e-12);

}  // namespace dcx
