#pragma once

// Point pattern generators: homogeneous Poisson, perturbed lattices and
// patterns (independent replication + translation of every base point), and
// the permutation-distribution counterexample.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcxlab/kernels.hpp"
#include "dcxlab/random.hpp"

namespace dcx {

/// Axis-aligned box in R^d.
class Window {
 public:
  Window(std::vector<double> lower, std::vector<double> upper);
  static Window cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double side(std::size_t i) const { return upper_[i] - lower_[i]; }
  double volume() const;

  /// Closed-box membership.
  bool contains_closed(std::span<const double> x) const;
  /// Half-open [lower, upper) membership, used for counting.
  bool contains(std::span<const double> x) const;
  Window dilated(double by) const;
  Window translated(std::size_t axis, double by) const;
  /// Interiors overlap.
  bool overlaps(const Window& other) const;
  Window bounding_union(const Window& other) const;

  bool operator==(const Window&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;
};

/// Finite multiset of points in R^d, stored row-major.
class PointPattern {
 public:
  PointPattern(Window window, Provenance provenance = {});

  std::size_t dim() const { return window_.dim(); }
  std::size_t size() const { return coords_.size() / dim(); }
  bool empty() const { return coords_.empty(); }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim(), dim()}; }
  std::span<const double> coords() const { return coords_; }
  const Window& window() const { return window_; }
  const Provenance& provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }
  /// Asserts that points are pairwise distinct (holds a.s. for every
  /// generator here, which all use continuous translations).
  bool simple() const { return simple_; }
  void set_simple(bool s) { simple_ = s; }

  /// Throws PreconditionError if x lies outside the closed window.
  void add(std::span<const double> x);
  void reserve(std::size_t n) { coords_.reserve(n * dim()); }

 private:
  Window window_;
  Provenance provenance_;
  std::vector<double> coords_;
  bool simple_ = true;
};

/// Number of points in the half-open box [lower, upper).
std::size_t count_in(const PointPattern& pattern, const Window& box);

// --- perturbation kernels ---------------------------------------------------

/// Integer lattice spacing * Z^d. dim == 0 takes the dimension of the
/// sampling window. With random_shift the whole lattice is translated by a
/// uniform vector in [0, spacing)^d, which makes the perturbed process
/// stationary (not only lattice-stationary).
struct IntegerLattice {
  double spacing = 1.0;
  std::size_t dim = 0;
  bool random_shift = false;
};

struct ExplicitPattern {
  PointPattern pattern;
};

using BaseSpec = std::variant<IntegerLattice, ExplicitPattern>;

/// Uniform on [0, side)^d.
struct UniformCell {
  double side = 1.0;
};
/// Uniform on the closed ball of the given radius.
struct UniformBall {
  double radius = 1.0;
};
/// Isotropic Gaussian conditioned on |Y| <= truncation_radius.
struct Gaussian {
  double sigma = 1.0;
  double truncation_radius = 6.0;
};

using TranslationSpec = std::variant<UniformCell, UniformBall, Gaussian>;

/// Per-axis support [lo, hi] of a translation kernel.
struct SupportBox {
  double lo = 0.0;
  double hi = 0.0;
};
SupportBox translation_support(const TranslationSpec& t);

/// Spatially constant replication and translation kernels over a base.
struct PerturbationSpec {
  BaseSpec base = IntegerLattice{};
  DiscreteLaw replication = DiscreteLaw::dirac(1);
  TranslationSpec translation = UniformCell{};

  /// Throws ParameterError for invalid kernels (non-positive spacing or
  /// scale, unbounded translation support).
  void validate() const;
};

/// Homogeneous Poisson process.
struct PoissonSpec {
  double intensity = 1.0;
};

/// Poisson parents of the given intensity, then perturbed: a
/// Poisson-Poisson cluster process when replication is Poisson.
struct ClusterSpec {
  double parent_intensity = 1.0;
  DiscreteLaw replication = DiscreteLaw::poisson(1.0);
  TranslationSpec translation = UniformBall{0.5};
};

using GeneratorSpec = std::variant<PoissonSpec, PerturbationSpec, ClusterSpec>;

PointPattern sample_poisson(double intensity, const Window& window, Rng& rng);

/// Base points are enumerated in the window dilated by the translation
/// support, so the result is the exact restriction of the process on R^d.
PointPattern perturb(const PerturbationSpec& spec, const Window& window, Rng& rng);

PointPattern sample(const GeneratorSpec& spec, const Window& window, Rng& rng);

/// Mean number of points per unit volume in dimension `dim`.
double intensity(const GeneratorSpec& spec, std::size_t dim);

/// Canonical text form, parseable by parse_generator().
std::string describe(const GeneratorSpec& spec);
std::string describe(const TranslationSpec& spec);

/// Uniform random permutation of (0, 1, ..., k-1): multiplicities at k sites.
std::vector<std::int64_t> sample_counterexample(std::int64_t k, Rng& rng);

}  // namespace dcx
