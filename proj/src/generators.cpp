#include "dcxlab/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

std::string fmt_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Box of base locations whose translates can land in `window`.
Window base_region(const Window& window, const SupportBox& support) {
  std::vector<double> lo(window.dim()), hi(window.dim());
  for (std::size_t i = 0; i < window.dim(); ++i) {
    lo[i] = window.lower()[i] - support.hi;
    hi[i] = window.upper()[i] - support.lo;
  }
  return Window(std::move(lo), std::move(hi));
}

void sample_translation(const TranslationSpec& spec, Rng& rng, std::span<double> out) {
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, UniformCell>) {
          for (double& y : out) y = t.side * uniform01(rng);
        } else if constexpr (std::is_same_v<T, UniformBall>) {
          for (;;) {
            double r2 = 0.0;
            for (double& y : out) {
              y = t.radius * (2.0 * uniform01(rng) - 1.0);
              r2 += y * y;
            }
            if (r2 <= t.radius * t.radius) return;
          }
        } else {
          for (;;) {
            double r2 = 0.0;
            for (double& y : out) {
              y = t.sigma * standard_normal(rng);
              r2 += y * y;
            }
            if (r2 <= t.truncation_radius * t.truncation_radius) return;
          }
        }
      },
      spec);
}

// Daughters of one base point, drawn from that point's own stream.
void emit_daughters(const PerturbationSpec& spec, std::span<const double> base, Rng& rng, PointPattern& out,
                    std::vector<double>& scratch) {
  const std::int64_t n = spec.replication.sample(rng);
  for (std::int64_t j = 0; j < n; ++j) {
    sample_translation(spec.translation, rng, scratch);
    for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] += base[i];
    if (out.window().contains(scratch)) out.add(scratch);
  }
}

std::uint64_t site_key(std::span<const std::int64_t> z) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::int64_t c : z) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

}  // namespace

// --- Window -----------------------------------------------------------------

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw ParameterError("window: lower and upper must be non-empty and of equal dimension");
  for (std::size_t i = 0; i < lower_.size(); ++i)
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(upper_[i] > lower_[i]))
      throw ParameterError("window: need upper > lower on axis " + std::to_string(i) + ", got [" +
                           fmt_real(lower_[i]) + "," + fmt_real(upper_[i]) + "]");
}

Window Window::cube(std::size_t dim, double lo, double hi) {
  return Window(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

double Window::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool Window::contains_closed(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  return true;
}

bool Window::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lower_[i] || x[i] >= upper_[i]) return false;
  return true;
}

Window Window::dilated(double by) const {
  auto lo = lower_, hi = upper_;
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] -= by;
    hi[i] += by;
  }
  return Window(std::move(lo), std::move(hi));
}

Window Window::translated(std::size_t axis, double by) const {
  auto lo = lower_, hi = upper_;
  lo.at(axis) += by;
  hi.at(axis) += by;
  return Window(std::move(lo), std::move(hi));
}

bool Window::overlaps(const Window& other) const {
  if (other.dim() != dim()) throw PreconditionError("window: dimension mismatch");
  for (std::size_t i = 0; i < dim(); ++i)
    if (upper_[i] <= other.lower_[i] || other.upper_[i] <= lower_[i]) return false;
  return true;
}

Window Window::bounding_union(const Window& other) const {
  if (other.dim() != dim()) throw PreconditionError("window: dimension mismatch");
  auto lo = lower_, hi = upper_;
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = std::min(lo[i], other.lower_[i]);
    hi[i] = std::max(hi[i], other.upper_[i]);
  }
  return Window(std::move(lo), std::move(hi));
}

// --- PointPattern -----------------------------------------------------------

PointPattern::PointPattern(Window window, Provenance provenance)
    : window_(std::move(window)), provenance_(std::move(provenance)) {}

void PointPattern::add(std::span<const double> x) {
  if (x.size() != dim()) throw PreconditionError("pattern: point dimension mismatch");
  if (!window_.contains_closed(x)) throw PreconditionError("pattern: point outside window");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

std::size_t count_in(const PointPattern& pattern, const Window& box) {
  if (box.dim() != pattern.dim())
    throw PreconditionError("count_in: box dimension " + std::to_string(box.dim()) + " != pattern dimension " +
                            std::to_string(pattern.dim()));
  std::size_t n = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (box.contains(pattern.point(i))) ++n;
  return n;
}

// --- kernels ----------------------------------------------------------------

SupportBox translation_support(const TranslationSpec& t) {
  return std::visit(
      [](const auto& k) -> SupportBox {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformCell>) return {0.0, k.side};
        else if constexpr (std::is_same_v<T, UniformBall>) return {-k.radius, k.radius};
        else return {-k.truncation_radius, k.truncation_radius};
      },
      t);
}

void PerturbationSpec::validate() const {
  if (const auto* lat = std::get_if<IntegerLattice>(&base)) {
    if (!std::isfinite(lat->spacing) || lat->spacing <= 0.0)
      throw ParameterError("lattice: spacing must be > 0, got " + fmt_real(lat->spacing));
  }
  if (!std::isfinite(replication.mean())) throw ParameterError("perturbation: replication mean must be finite");
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformCell>) {
          if (!std::isfinite(k.side) || k.side <= 0.0) throw ParameterError("translation cell: side must be > 0");
        } else if constexpr (std::is_same_v<T, UniformBall>) {
          if (!std::isfinite(k.radius) || k.radius < 0.0)
            throw ParameterError("translation ball: radius must be finite and >= 0");
        } else {
          if (!std::isfinite(k.sigma) || k.sigma <= 0.0) throw ParameterError("translation gauss: sigma must be > 0");
          if (!std::isfinite(k.truncation_radius) || k.truncation_radius <= 0.0)
            throw ParameterError("translation gauss: unbounded support, a finite truncation radius is required");
        }
      },
      translation);
}

// --- samplers ---------------------------------------------------------------

PointPattern sample_poisson(double intensity, const Window& window, Rng& rng) {
  if (!std::isfinite(intensity) || intensity <= 0.0)
    throw ParameterError("poisson: intensity must be > 0, got " + fmt_real(intensity));
  const auto count_law = DiscreteLaw::poisson(intensity * window.volume());
  const std::int64_t n = count_law.sample(rng);
  PointPattern out(window, {"poisson(" + fmt_real(intensity) + ")", 0});
  out.reserve(static_cast<std::size_t>(n));
  std::vector<double> x(window.dim());
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = window.lower()[i] + window.side(i) * uniform01(rng);
    // x can round up to upper when side*u is within an ulp of side.
    if (window.contains(x)) out.add(x);
  }
  return out;
}

PointPattern perturb(const PerturbationSpec& spec, const Window& window, Rng& rng) {
  spec.validate();
  const std::size_t d = window.dim();
  const Window region = base_region(window, translation_support(spec.translation));
  PointPattern out(window);
  std::vector<double> scratch(d);

  if (const auto* lat = std::get_if<IntegerLattice>(&spec.base)) {
    if (lat->dim != 0 && lat->dim != d)
      throw PreconditionError("perturb: lattice dimension " + std::to_string(lat->dim) +
                              " != window dimension " + std::to_string(d));
    std::vector<double> shift(d, 0.0);
    if (lat->random_shift)
      for (double& s : shift) s = lat->spacing * uniform01(rng);
    const std::uint64_t key = rng();
    std::vector<std::int64_t> first(d), last(d);
    for (std::size_t i = 0; i < d; ++i) {
      first[i] = static_cast<std::int64_t>(std::ceil((region.lower()[i] - shift[i]) / lat->spacing));
      last[i] = static_cast<std::int64_t>(std::floor((region.upper()[i] - shift[i]) / lat->spacing));
      if (last[i] < first[i]) return out;
    }
    std::vector<std::int64_t> z = first;
    std::vector<double> base(d);
    for (;;) {
      for (std::size_t i = 0; i < d; ++i) base[i] = shift[i] + lat->spacing * static_cast<double>(z[i]);
      Rng site(derive_seed(key, site_key(z), 0));
      emit_daughters(spec, base, site, out, scratch);
      std::size_t axis = d;
      while (axis-- > 0) {
        if (++z[axis] <= last[axis]) break;
        z[axis] = first[axis];
      }
      if (axis == static_cast<std::size_t>(-1)) break;
    }
  } else {
    const auto& base = std::get<ExplicitPattern>(spec.base).pattern;
    if (base.dim() != d) throw PreconditionError("perturb: base pattern dimension mismatch");
    const std::uint64_t key = rng();
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (!region.contains_closed(base.point(j))) continue;
      Rng site(derive_seed(key, j, 1));
      emit_daughters(spec, base.point(j), site, out, scratch);
    }
  }
  return out;
}

PointPattern sample(const GeneratorSpec& spec, const Window& window, Rng& rng) {
  PointPattern out = std::visit(
      [&](const auto& g) -> PointPattern {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PoissonSpec>) {
          return sample_poisson(g.intensity, window, rng);
        } else if constexpr (std::is_same_v<T, PerturbationSpec>) {
          return perturb(g, window, rng);
        } else {
          PerturbationSpec p{IntegerLattice{}, g.replication, g.translation};
          p.validate();
          const Window region = base_region(window, translation_support(g.translation));
          p.base = ExplicitPattern{sample_poisson(g.parent_intensity, region, rng)};
          return perturb(p, window, rng);
        }
      },
      spec);
  out.set_provenance({describe(spec), 0});
  return out;
}

double intensity(const GeneratorSpec& spec, std::size_t dim) {
  return std::visit(
      [dim](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PoissonSpec>) {
          return g.intensity;
        } else if constexpr (std::is_same_v<T, PerturbationSpec>) {
          if (const auto* lat = std::get_if<IntegerLattice>(&g.base))
            return g.replication.mean() / std::pow(lat->spacing, static_cast<double>(dim));
          return std::numeric_limits<double>::quiet_NaN();
        } else {
          return g.parent_intensity * g.replication.mean();
        }
      },
      spec);
}

std::string describe(const TranslationSpec& spec) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformCell>) return "cell(" + fmt_real(k.side) + ")";
        else if constexpr (std::is_same_v<T, UniformBall>) return "ball(" + fmt_real(k.radius) + ")";
        else return "gauss(" + fmt_real(k.sigma) + "," + fmt_real(k.truncation_radius) + ")";
      },
      spec);
}

std::string describe(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PoissonSpec>) {
          return "poisson(" + fmt_real(g.intensity) + ")";
        } else if constexpr (std::is_same_v<T, PerturbationSpec>) {
          if (const auto* lat = std::get_if<IntegerLattice>(&g.base)) {
            std::string s = "lattice(" + g.replication.describe() + ",spacing=" + fmt_real(lat->spacing);
            if (lat->dim != 0) s += ",dim=" + std::to_string(lat->dim);
            s += ",shift=" + std::string(lat->random_shift ? "1" : "0");
            return s + ",translation=" + describe(g.translation) + ")";
          }
          return "perturbed(explicit[" + std::to_string(std::get<ExplicitPattern>(g.base).pattern.size()) + "]," +
                 g.replication.describe() + ",translation=" + describe(g.translation) + ")";
        } else {
          return "cluster(" + fmt_real(g.parent_intensity) + "," + g.replication.describe() +
                 ",translation=" + describe(g.translation) + ")";
        }
      },
      spec);
}

std::vector<std::int64_t> sample_counterexample(std::int64_t k, Rng& rng) {
  if (k < 2) throw PreconditionError("counterexample: need k >= 2, got " + std::to_string(k));
  std::vector<std::int64_t> v(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) v[i] = i;
  for (std::size_t i = v.size() - 1; i > 0; --i) std::swap(v[i], v[uniform_index(rng, i + 1)]);
  return v;
}

}  // namespace dcx
