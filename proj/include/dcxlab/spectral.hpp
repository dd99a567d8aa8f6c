#pragma once

// Count laws of determinantal and permanental processes on domains where the
// kernel's eigenvalues are known (Ginibre disks and centred annuli), the
// Poisson reference with the same mean, and the Kostlan sampler for the
// squared radii of the Ginibre process.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dcxlab/kernels.hpp"
#include "dcxlab/random.hpp"

namespace dcx {

enum class SpectralMode { Determinantal, PoissonRef, Permanental };
std::string to_string(SpectralMode m);

/// Eigenvalues of a kernel restricted to a domain plus the interpretation of
/// the count: sum of Bernoulli(l_j), Poisson(sum l_j), or sum of
/// Geometric(1/(1+l_j)).
struct SpectralCountLaw {
  std::vector<double> eigenvalues;
  SpectralMode mode = SpectralMode::Determinantal;
  std::string domain;

  /// Determinantal needs every l_j in [0,1]; the other modes need l_j >= 0
  /// and a finite sum. Throws ParameterError.
  void validate() const;
  double mean() const;
  /// Number of eigenvalues kept before the tail cutoff.
  std::size_t cutoff() const { return eigenvalues.size(); }
};

/// l_k = P(Gamma(k,1) <= r^2), k = 1, 2, ..., stopping before the first
/// l_k < tail_tol. These are the eigenvalues of the Ginibre kernel on the
/// centred disk of radius r; they sum to r^2.
std::vector<double> ginibre_disk_eigenvalues(double r, double tail_tol = 1e-15);

/// Exact count law (truncated per the kernels policy).
DiscreteLaw count_law(const SpectralCountLaw& s, double tail_tol = kDefaultTailTolerance);

/// One realization of the Ginibre squared-radius process restricted to
/// [0, r_max^2]: independent G_k ~ Gamma(k,1), k = 1, 2, ..., kept when
/// G_k <= r_max^2, until P(Gamma(k,1) <= r_max^2) < 1e-12. Sorted.
std::vector<double> sample_ginibre_radial(double r_max, Rng& rng);

/// Centred annulus {inner < |x| <= outer} (radii, not squared radii).
struct Annulus {
  double inner = 0.0;
  double outer = 1.0;
};

/// l_{k,i} = P(inner_i^2 < Gamma(k,1) <= outer_i^2), rows k = 1..cutoff.
class AnnuliSpectrum {
 public:
  AnnuliSpectrum(std::vector<Annulus> annuli, std::vector<double> values, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return annuli_.size(); }
  const std::vector<Annulus>& annuli() const { return annuli_; }
  /// k is 0-based (row 0 is the first eigenfunction).
  double at(std::size_t k, std::size_t i) const { return values_[k * cols() + i]; }
  /// Eigenvalues of the union domain: l_k = sum_i l_{k,i}.
  std::vector<double> row_sums() const;
  /// Eigenvalues of annulus i alone.
  std::vector<double> column(std::size_t i) const;

 private:
  std::vector<Annulus> annuli_;
  std::vector<double> values_;
  std::size_t rows_;
};

/// Throws PreconditionError for overlapping or malformed annuli.
AnnuliSpectrum annuli_eigenvalues(std::span<const Annulus> annuli, double tail_tol = 1e-15);

/// Joint counts in the annuli by multinomial thinning: eigenfunction k
/// contributes Bernoulli(l_k) (Determinantal) or Geometric(1/(1+l_k))
/// (Permanental) points, each placed in annulus i with probability
/// l_{k,i} / l_k.
std::vector<std::int64_t> sample_annuli_counts(const AnnuliSpectrum& spectrum, SpectralMode mode, Rng& rng);

/// Both legs of det <=cx Poisson <=cx perm plus the variance and void
/// inequalities for one eigenvalue list.
struct SandwichReport {
  std::size_t cutoff = 0;
  double eigen_sum = 0.0;
  CxComparison det_vs_poisson;
  CxComparison poisson_vs_perm;
  double var_det = 0.0, var_perm = 0.0;   // sum l(1-l), sum l(1+l)
  double void_det = 0.0, void_poisson = 0.0, void_perm = 0.0;
  bool variance_ordered = false;
  bool void_ordered = false;              // strict, with positive margins
  bool ok() const;
};

SandwichReport spectral_sandwich(std::span<const double> eigenvalues, double tol = 1e-12);

void write_eigenvalues_csv(std::span<const double> eigenvalues, const std::filesystem::path& path);
void write_pmf_csv(const DiscreteLaw& law, const std::filesystem::path& path);

}  // namespace dcx
