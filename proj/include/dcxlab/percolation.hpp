#pragma once

// Boolean-model connectivity on point patterns: connected components of the
// grain union, largest-component curves and a finite-window threshold
// estimate, and self-avoiding path counts from the origin to the boundary of
// [-m, m]^d with the geometric bound on their expectation.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dcxlab/generators.hpp"

namespace dcx {

/// Unordered pairs {i, j}, i < j, with |x_i - x_j| <= dist, found with a
/// bucket grid of cell side `dist` (3^d neighbouring cells per point). With
/// `torus` distances wrap around the pattern window.
std::vector<std::pair<std::size_t, std::size_t>> close_pairs(const PointPattern& pattern, double dist,
                                                             bool torus = false);

/// Components of the union of radius-r balls: two centres are adjacent iff
/// they are within 2r.
struct DiskGraph {
  double radius = 0.0;
  /// labels[i] is the smallest point index in the component of point i.
  std::vector<std::size_t> labels;
  /// Component labels in increasing order, with their sizes.
  std::vector<std::size_t> roots;
  std::vector<std::size_t> sizes;

  std::size_t component_count() const { return roots.size(); }
};

DiskGraph components(const PointPattern& pattern, double r, bool torus = false);

struct LargestFractions {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Fractions of points in the largest and second largest component (ties
/// broken by smallest label). PreconditionError on an empty pattern.
LargestFractions largest_fractions(const PointPattern& pattern, double r, bool torus = false);
LargestFractions largest_fractions(const DiskGraph& graph);

struct SweepOptions {
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double crossing_level = 0.5;
  std::size_t bootstrap = 200;
  bool torus = false;
};

/// Mean largest-component fractions over a radius grid. Every replication
/// draws one pattern that is shared by all radii, so f1 is non-decreasing in
/// r replication by replication.
///
/// r_hat is the linear interpolation of the first grid crossing of
/// crossing_level by mean f1, a finite-window stand-in for the critical
/// radius. When mean f1 never reaches the level, or already exceeds it at the
/// first radius, or the grid has a single point, the estimate is an open
/// interval and `open_interval` is set: [r_max, inf) or [0, r_min].
/// [ci_lo, ci_hi] is a percentile bootstrap interval over replications.
struct SweepResult {
  std::string generator;
  std::vector<double> radii;
  std::size_t reps = 0;
  std::vector<double> f1_mean, f1_se, f2_mean, f2_se;
  double r_hat = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = 0.0;
  double ci_hi = std::numeric_limits<double>::infinity();
  bool open_interval = false;
  /// f1 per replication, row-major reps x radii (bootstrap input).
  std::vector<double> f1_samples;
};

SweepResult threshold_sweep(const GeneratorSpec& gen, const Window& window, const std::vector<double>& radii,
                            const SweepOptions& opt);

/// First crossing of `level` by the curve y over x; NaN when there is none.
/// Returns x.front() when y.front() >= level already.
double first_crossing(const std::vector<double>& x, const std::vector<double>& y, double level);

struct PathCaps {
  std::size_t max_length = 20;
  std::uint64_t max_count = 10'000'000;
};

/// Self-avoiding point sequences (X_1, ..., X_k) of the pattern with
/// |X_1| <= r, |X_{i+1} - X_i| <= r and X_k within r of the boundary of
/// W_m = [-m, m]^d. Ordered tuples are counted, so a path and its reversal
/// count separately when both qualify.
///
/// max_count bounds the number of sequences explored; hitting it, or being
/// unable to extend past max_length, sets cap_hit and leaves the counts as
/// lower bounds.
struct PathCountResult {
  double m = 0.0;
  double r = 0.0;
  std::int64_t m_r = 0;                 // floor(m / r) - 1
  std::vector<std::uint64_t> by_length;  // by_length[k] = N_{m,k}, index 0 unused
  std::uint64_t total = 0;
  std::uint64_t explored = 0;
  bool cap_hit = false;
};

PathCountResult count_paths(const PointPattern& pattern, double r, double m, const PathCaps& caps = {});

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

/// Self-avoiding walks with steps <= r from the pattern point nearest the
/// origin. counts[n] = c_n for n = 0..n_max (c_0 = 1), roots[n] = c_n^{1/n}.
struct WalkCounts {
  std::size_t start = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> roots;
  bool cap_hit = false;
};

WalkCounts connective_constant_estimate(const PointPattern& pattern, double r, std::size_t n_max,
                                        const PathCaps& caps = {});

/// Monte Carlo check of E N_m <= (theta_d r^d)^{m_r} / (1 - theta_d r^d)
/// for a generator sampled on W_m. Only applicable when theta_d r^d < 1.
struct BoundReport {
  std::size_t dim = 2;
  double r = 0.0;
  double m = 0.0;
  double theta = 0.0;
  std::int64_t m_r = 0;
  bool applicable = false;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  /// Replications with some N_{m,k} > 0 for k < m_r (must stay 0).
  std::size_t short_path_reps = 0;
  std::size_t cap_hits = 0;
  std::vector<double> mean_by_length;
  bool pass = false;
};

BoundReport lower_bound_check(const GeneratorSpec& gen, std::size_t dim, double r, double m, std::size_t reps,
                              std::uint64_t seed, unsigned threads = 1, const PathCaps& caps = {});

}  // namespace dcx
