#include "dcxlab/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "dcxlab/error.hpp"
#include "dcxlab/special_functions.hpp"

namespace dcx {
namespace {

std::string fmt_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// P(lo < Gamma(k,1) <= hi), differenced on whichever side keeps precision.
double gamma_interval(double k, double lo, double hi) {
  if (lo <= 0.0) return gamma_p(k, hi);
  if (gamma_p(k, lo) > 0.5) return gamma_q(k, lo) - gamma_q(k, hi);
  return gamma_p(k, hi) - gamma_p(k, lo);
}

// Geometric(1/(1+l)) by inversion.
std::int64_t sample_geometric_mean(double l, Rng& rng) {
  if (l <= 0.0) return 0;
  const double q = l / (1.0 + l);
  return static_cast<std::int64_t>(std::floor(std::log(uniform_pos(rng)) / std::log(q)));
}

}  // namespace

std::string to_string(SpectralMode m) {
  switch (m) {
    case SpectralMode::Determinantal: return "determinantal";
    case SpectralMode::PoissonRef: return "poisson";
    case SpectralMode::Permanental: return "permanental";
  }
  return "?";
}

void SpectralCountLaw::validate() const {
  double sum = 0.0;
  for (double l : eigenvalues) {
    if (!std::isfinite(l) || l < 0.0) throw ParameterError("spectral: eigenvalues must be finite and >= 0, got " + fmt_real(l));
    if (mode == SpectralMode::Determinantal && l > 1.0)
      throw ParameterError("spectral: determinantal eigenvalues must lie in [0,1], got " + fmt_real(l));
    sum += l;
  }
  if (!std::isfinite(sum)) throw ParameterError("spectral: eigenvalue sum must be finite (trace class)");
}

double SpectralCountLaw::mean() const {
  double s = 0.0;
  for (double l : eigenvalues) s += l;
  return s;
}

std::vector<double> ginibre_disk_eigenvalues(double r, double tail_tol) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("ginibre: radius must be > 0, got " + fmt_real(r));
  const double x = r * r;
  std::vector<double> out;
  for (double k = 1.0;; k += 1.0) {
    const double l = gamma_p(k, x);
    if (l < tail_tol) break;
    out.push_back(l);
  }
  return out;
}

DiscreteLaw count_law(const SpectralCountLaw& s, double tail_tol) {
  s.validate();
  if (s.mode == SpectralMode::PoissonRef) return DiscreteLaw::poisson(s.mean(), tail_tol);
  std::vector<DiscreteLaw> parts;
  parts.reserve(s.eigenvalues.size());
  const double part_tol = tail_tol / static_cast<double>(s.eigenvalues.size() + 1);
  for (double l : s.eigenvalues) {
    if (s.mode == SpectralMode::Determinantal) parts.push_back(DiscreteLaw::bernoulli(l));
    else parts.push_back(DiscreteLaw::geometric(1.0 / (1.0 + l), part_tol));
  }
  return DiscreteLaw::convolution(parts, tail_tol);
}

std::vector<double> sample_ginibre_radial(double r_max, Rng& rng) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw ParameterError("ginibre radial: r_max must be > 0, got " + fmt_real(r_max));
  const double t = r_max * r_max;
  std::vector<double> out;
  for (std::int64_t k = 1;; ++k) {
    if (gamma_p(static_cast<double>(k), t) < 1e-12) break;
    double g = 0.0;
    bool kept = true;
    for (std::int64_t j = 0; j < k; ++j) {
      g += standard_exponential(rng);
      // Draw all k terms regardless so the stream layout does not depend on t.
      if (g > t) kept = false;
    }
    if (kept) out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AnnuliSpectrum::AnnuliSpectrum(std::vector<Annulus> annuli, std::vector<double> values, std::size_t rows)
    : annuli_(std::move(annuli)), values_(std::move(values)), rows_(rows) {}

std::vector<double> AnnuliSpectrum::row_sums() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t k = 0; k < rows_; ++k)
    for (std::size_t i = 0; i < cols(); ++i) out[k] += at(k, i);
  return out;
}

std::vector<double> AnnuliSpectrum::column(std::size_t i) const {
  std::vector<double> out(rows_);
  for (std::size_t k = 0; k < rows_; ++k) out[k] = at(k, i);
  return out;
}

AnnuliSpectrum annuli_eigenvalues(std::span<const Annulus> annuli, double tail_tol) {
  if (annuli.empty()) throw PreconditionError("annuli: need at least one annulus");
  double r_max = 0.0;
  for (const auto& a : annuli) {
    if (!(a.inner >= 0.0) || !(a.outer > a.inner) || !std::isfinite(a.outer))
      throw PreconditionError("annuli: need 0 <= inner < outer, got (" + fmt_real(a.inner) + "," + fmt_real(a.outer) + ")");
    r_max = std::max(r_max, a.outer);
  }
  for (std::size_t i = 0; i < annuli.size(); ++i)
    for (std::size_t j = i + 1; j < annuli.size(); ++j)
      if (annuli[i].inner < annuli[j].outer && annuli[j].inner < annuli[i].outer)
        throw PreconditionError("annuli: annulus " + std::to_string(i) + " overlaps annulus " + std::to_string(j));
  const double x = r_max * r_max;
  std::vector<double> values;
  std::size_t rows = 0;
  for (double k = 1.0; gamma_p(k, x) >= tail_tol; k += 1.0, ++rows)
    for (const auto& a : annuli) values.push_back(gamma_interval(k, a.inner * a.inner, a.outer * a.outer));
  return AnnuliSpectrum({annuli.begin(), annuli.end()}, std::move(values), rows);
}

std::vector<std::int64_t> sample_annuli_counts(const AnnuliSpectrum& spectrum, SpectralMode mode, Rng& rng) {
  if (mode == SpectralMode::PoissonRef)
    throw PreconditionError("sample_annuli_counts: thinning applies to determinantal or permanental mode");
  std::vector<std::int64_t> counts(spectrum.cols(), 0);
  const auto totals = spectrum.row_sums();
  for (std::size_t k = 0; k < spectrum.rows(); ++k) {
    const double l = totals[k];
    std::int64_t n = 0;
    if (mode == SpectralMode::Determinantal) n = uniform01(rng) < l ? 1 : 0;
    else n = sample_geometric_mean(l, rng);
    for (std::int64_t j = 0; j < n; ++j) {
      double u = uniform01(rng) * l;
      std::size_t i = 0;
      while (i + 1 < spectrum.cols() && u >= spectrum.at(k, i)) u -= spectrum.at(k, i++);
      ++counts[i];
    }
  }
  return counts;
}

bool SandwichReport::ok() const {
  return det_vs_poisson.verdict == CxVerdict::Ordered && poisson_vs_perm.verdict == CxVerdict::Ordered &&
         variance_ordered && void_ordered;
}

SandwichReport spectral_sandwich(std::span<const double> eigenvalues, double tol) {
  SandwichReport rep;
  const std::vector<double> ev(eigenvalues.begin(), eigenvalues.end());
  const SpectralCountLaw det{ev, SpectralMode::Determinantal, ""};
  const SpectralCountLaw poi{ev, SpectralMode::PoissonRef, ""};
  const SpectralCountLaw perm{ev, SpectralMode::Permanental, ""};
  rep.cutoff = ev.size();
  rep.eigen_sum = det.mean();
  const auto det_law = count_law(det), poi_law = count_law(poi), perm_law = count_law(perm);
  rep.det_vs_poisson = cx_compare(det_law, poi_law, {}, tol);
  rep.poisson_vs_perm = cx_compare(poi_law, perm_law, {}, tol);
  double log_det = 0.0, log_perm = 0.0;
  for (double l : ev) {
    rep.var_det += l * (1.0 - l);
    rep.var_perm += l * (1.0 + l);
    log_det += std::log1p(-l);
    log_perm -= std::log1p(l);
  }
  rep.void_det = std::exp(log_det);
  rep.void_poisson = std::exp(-rep.eigen_sum);
  rep.void_perm = std::exp(log_perm);
  rep.variance_ordered = rep.var_det <= rep.eigen_sum && rep.eigen_sum <= rep.var_perm;
  rep.void_ordered = log_det < -rep.eigen_sum && -rep.eigen_sum < log_perm;
  return rep;
}

void write_eigenvalues_csv(std::span<const double> eigenvalues, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "k,lambda\r\n";
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) out << (k + 1) << ',' << fmt_real(eigenvalues[k]) << "\r\n";
}

void write_pmf_csv(const DiscreteLaw& law, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "i,pmf\r\n";
  const auto t = law.pmf_table();
  for (std::size_t i = 0; i < t.size(); ++i) out << i << ',' << fmt_real(t[i]) << "\r\n";
}

}  // namespace dcx
