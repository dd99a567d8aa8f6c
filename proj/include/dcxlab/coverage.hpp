#pragma once

// k-coverage of the Boolean model: the volume fraction of a window covered by
// at least k grains of radius r, estimated geometrically from probe points
// and, independently, from the law of the number of germs in a ball around a
// fixed location. Also single-crossing analysis of coverage curves and of
// ball-count laws.

#include <cstdint>
#include <string>
#include <vector>

#include "dcxlab/estimators.hpp"
#include "dcxlab/generators.hpp"
#include "dcxlab/kernels.hpp"

namespace dcx {

struct CoverageOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Stratified probes: this many grid cells per axis, one uniformly
  /// jittered probe per cell and replication. The total must be >= 1000.
  std::size_t probes_per_axis = 128;
};

/// Per k: (a) fraction of probes covered by >= k balls and (b) fraction of
/// replications with >= k germs within r of the window centre. Both estimate
/// Pr{Phi(B_O(r)) >= k} for a stationary generator.
struct CoverageCurve {
  std::string generator;
  double r = 0.0;
  std::vector<int> ks;
  std::vector<double> frac_geometric, se_geometric;
  std::vector<double> frac_countlaw, se_countlaw;
  /// |a - b| / sqrt(se_a^2 + se_b^2) per k, and whether all are <= 3.
  std::vector<double> agreement_z;
  bool estimators_agree = true;
  /// Empirical law of the ball count from estimator (b): freq[j] = share of
  /// replications with exactly j germs in the ball.
  std::vector<double> ball_count_freq;
  std::size_t reps = 0;
  std::size_t probes = 0;
};

/// PreconditionError when k < 1, r <= 0, fewer than 1000 probes, or the
/// generator is not stationary (lattices need random_shift).
CoverageCurve coverage_curve(const GeneratorSpec& gen, double r, const std::vector<int>& ks, const Window& window,
                             const CoverageOptions& opt);

struct CoverageFraction {
  EstimateWithCI geometric;
  EstimateWithCI countlaw;
  double agreement_z = 0.0;
};

CoverageFraction coverage_fraction(const GeneratorSpec& gen, double r, int k, const Window& window,
                                   const CoverageOptions& opt);

enum class CrossingVerdict { SingleCrossing, NoCrossing, MultipleCrossings };
std::string to_string(CrossingVerdict v);

/// Sign changes in k of D(k) = Pr{A >= k} - Pr{B >= k}, k = 1, 2, ...;
/// differences within tol of 0 are skipped. For a single crossing, A is on
/// side `first_sign` for k <= k0 and on the opposite side beyond.
///
/// log_concave_ratio reports whether log(f_A / f_B) has non-positive second
/// differences on the common support (a sufficient condition for the density
/// ratio to be unimodal), checked numerically on the truncated tables.
struct CrossingReport {
  CrossingVerdict verdict = CrossingVerdict::NoCrossing;
  std::int64_t k0 = -1;
  int first_sign = 0;
  std::vector<double> tail_differences;  // index k, starting at k = 1 in slot 0
  std::int64_t sign_changes = 0;
  bool log_concave_ratio = false;
  bool unimodal_ratio = false;
};

CrossingReport crossing_detect(const DiscreteLaw& a, const DiscreteLaw& b, double tol = 1e-12);

/// Crossing analysis of two estimated curves over the same ks. Only
/// differences resolved at |z| >= z_threshold take part. k0 is the last k of
/// the first resolved sign block.
struct CurveCrossing {
  std::vector<double> z;
  std::vector<int> resolved_sign;  // -1, 0 (unresolved), +1
  std::int64_t sign_changes = 0;
  int first_sign = 0;
  int last_sign = 0;
  int k0 = -1;
};

CurveCrossing compare_curves(const std::vector<int>& ks, const std::vector<double>& a, const std::vector<double>& sa,
                             const std::vector<double>& b, const std::vector<double>& sb, double z_threshold = 3.0);

/// Area of the disk of radius r centred at the origin intersected with
/// [x0, x1] x [y0, y1].
double disk_rectangle_area(double r, double x0, double x1, double y0, double y1);

/// Law of Phi(B_c(r)) for a planar perturbed lattice with uniform-cell
/// translations: each site contributes an independent thinning of the
/// replication law, and the counts of all sites are convolved. With
/// random_shift the law is averaged over a grid of offsets_per_axis^2 lattice
/// offsets (midpoint rule); otherwise c is the given centre.
DiscreteLaw lattice_ball_count_law(const PerturbationSpec& spec, double r, std::span<const double> centre,
                                   std::size_t offsets_per_axis = 16);

}  // namespace dcx
