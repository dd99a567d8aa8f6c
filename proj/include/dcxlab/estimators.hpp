#pragma once

// Monte Carlo estimation of void probabilities, mean counts and factorial
// moment measures on boxes, and the weak sub-/super-Poisson classification.
// Models whose joint count laws are known exactly are classified without
// simulation.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcxlab/generators.hpp"
#include "dcxlab/spectral.hpp"

namespace dcx {

struct EstimateWithCI {
  std::string estimand;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  double half_width(double z = 3.0) const { return z * std_error; }
};

struct McOptions {
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Window the generator is sampled on; defaults to the bounding box of the
  /// query boxes (exact for every generator here, see perturb()).
  std::optional<Window> sampling_window;
};

/// Pr{Phi(box) = 0}; binomial standard error. Needs reps >= 100.
EstimateWithCI estimate_void(const GeneratorSpec& gen, const Window& box, const McOptions& opt);

/// E[Phi(box)].
EstimateWithCI estimate_mean_count(const GeneratorSpec& gen, const Window& box, const McOptions& opt);

/// E[prod_i Phi(B_i)] over pairwise disjoint boxes (PreconditionError if two
/// boxes overlap). Needs reps >= 100.
EstimateWithCI estimate_factorial_moment(const GeneratorSpec& gen, std::span<const Window> boxes,
                                         const McOptions& opt);

enum class Side { Sub, Super, Inconclusive };
enum class WeakClass { WeaklySub, WeaklySuper, Neither, Inconclusive };
std::string to_string(Side s);
std::string to_string(WeakClass c);

/// Outcome of classify_weak / classify_exact.
///
/// overall is WeaklySub iff the void side and every tested moment side are
/// Sub (WeaklySuper symmetrically), Neither when resolved sides disagree, and
/// Inconclusive otherwise. z_scores holds the standardized gaps
/// (estimate - Poisson value) / SE in the order given by labels; for exact
/// models it holds the raw gaps instead.
struct WeakClassVerdict {
  Side void_side = Side::Inconclusive;
  std::map<int, Side> moment_sides;
  WeakClass overall = WeakClass::Inconclusive;
  std::vector<double> z_scores;
  std::vector<std::string> labels;
  bool exact = false;
};

/// Cubes of side {0.5, 1, 2} at uniformly random offsets in [0, region)^d.
std::vector<Window> default_box_family(std::size_t dim, std::uint64_t seed, double region = 4.0);

/// `cube` and its k-1 successive translates along the first axis.
std::vector<Window> moment_boxes(const Window& cube, int k);

/// Per cube B of the family: z for (nu(B) - exp(-E Phi(B))) and, for every
/// order k, z for (alpha^(k) - prod E Phi(B_i)) on moment_boxes(B, k). Each
/// quantity comes from its own independent run. A side is declared when some
/// |z| >= z_threshold and no z of the opposite sign reaches the threshold.
WeakClassVerdict classify_weak(const GeneratorSpec& gen, std::span<const Window> family, std::span<const int> orders,
                               const McOptions& opt, double z_threshold = 3.0);

/// Count model with exactly computable void probabilities, means and product
/// moments on a fixed collection of disjoint regions.
class ExactCountModel {
 public:
  virtual ~ExactCountModel() = default;
  virtual std::size_t regions() const = 0;
  virtual double void_probability(std::size_t region) const = 0;
  virtual double mean(std::size_t region) const = 0;
  /// E[prod_{i in regions} N_i] for distinct regions.
  virtual double product_moment(std::span<const std::size_t> regions) const = 0;
  virtual std::string describe() const = 0;
};

/// Determinantal, permanental or Poisson counts on disjoint centred annuli
/// of the Ginibre kernel.
class SpectralAnnuliModel : public ExactCountModel {
 public:
  SpectralAnnuliModel(AnnuliSpectrum spectrum, SpectralMode mode);
  /// Disk of radius r split into `parts` annuli of equal area.
  static SpectralAnnuliModel ginibre_disk(double r, SpectralMode mode, std::size_t parts = 3);

  std::size_t regions() const override { return spectrum_.cols(); }
  double void_probability(std::size_t region) const override;
  double mean(std::size_t region) const override;
  double product_moment(std::span<const std::size_t> regions) const override;
  std::string describe() const override;

 private:
  AnnuliSpectrum spectrum_;
  SpectralMode mode_;
};

/// Multiplicities at k sites distributed as a uniform permutation of
/// (0, 1, ..., k-1).
class CounterexampleModel : public ExactCountModel {
 public:
  explicit CounterexampleModel(std::int64_t k);

  std::size_t regions() const override { return static_cast<std::size_t>(k_); }
  double void_probability(std::size_t) const override { return 1.0 / static_cast<double>(k_); }
  double mean(std::size_t) const override { return 0.5 * static_cast<double>(k_ - 1); }
  double variance() const { return (static_cast<double>(k_) * k_ - 1.0) / 12.0; }
  double product_moment(std::span<const std::size_t> regions) const override;
  std::string describe() const override;

 private:
  std::int64_t k_;
  std::vector<double> elementary_;  // e_j(0, 1, ..., k-1)
};

/// Exact counterpart of classify_weak: a side is Sub (Super) when every gap
/// is negative (positive) beyond rel_tol relative to the Poisson value.
/// Moments of order k use every k-subset of regions (first 200 in
/// lexicographic order).
WeakClassVerdict classify_exact(const ExactCountModel& model, std::span<const int> orders, double rel_tol = 1e-12);

}  // namespace dcx
