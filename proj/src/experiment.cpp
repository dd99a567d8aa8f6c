#include "dcxlab/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dcxlab/coverage.hpp"
#include "dcxlab/error.hpp"
#include "dcxlab/estimators.hpp"
#include "dcxlab/generators.hpp"
#include "dcxlab/kernels.hpp"
#include "dcxlab/law_grammar.hpp"
#include "dcxlab/pattern_io.hpp"
#include "dcxlab/percolation.hpp"
#include "dcxlab/spectral.hpp"
#include "dcxlab/svg_plot.hpp"

namespace dcx {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// JSON cannot hold inf/nan; they are written as strings.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180 field quoting.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Context {
 public:
  explicit Context(const ExperimentConfig& c) : cfg(c), dir(c.out) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      throw IoError("out: cannot create output directory '" + dir.string() + "': " + ec.message());
  }

  fs::path path(const std::string& name) const { return dir / name; }
  void record(const std::string& name) { files.push_back(name); }

  void write_text(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw IoError("out: cannot write '" + path(name).string() + "'");
    f << content;
    if (!f) throw IoError("out: failed writing '" + path(name).string() + "'");
    record(name);
  }
  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

  std::uint64_t seed() const { return *cfg.seed; }

  const ExperimentConfig& cfg;
  fs::path dir;
  std::vector<std::string> files;
  json summary = json::object();
  bool inconclusive = false;
};

Window config_window(const ExperimentConfig& c) {
  if (c.window_lower.size() != c.window_upper.size() || c.window_lower.empty())
    throw PreconditionError("window: lower and upper must have the same non-zero length");
  try {
    return Window(c.window_lower, c.window_upper);
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("window: ") + e.what());
  }
}

template <class F>
auto field(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(name + ": " + e.what());
  }
}

std::vector<GeneratorSpec> parse_generators(const ExperimentConfig& c, std::size_t min_count, std::size_t max_count) {
  if (c.generators.size() < min_count || c.generators.size() > max_count)
    throw PreconditionError("generators: expected between " + std::to_string(min_count) + " and " +
                            std::to_string(max_count) + " entries, got " + std::to_string(c.generators.size()));
  std::vector<GeneratorSpec> out;
  for (std::size_t i = 0; i < c.generators.size(); ++i)
    out.push_back(field("generators[" + std::to_string(i) + "]", [&] { return parse_generator(c.generators[i]); }));
  return out;
}

std::vector<DiscreteLaw> parse_laws(const ExperimentConfig& c, std::size_t min_count) {
  if (c.laws.size() < min_count)
    throw PreconditionError("laws: expected at least " + std::to_string(min_count) + " entries, got " +
                            std::to_string(c.laws.size()));
  std::vector<DiscreteLaw> out;
  for (std::size_t i = 0; i < c.laws.size(); ++i)
    out.push_back(field("laws[" + std::to_string(i) + "]", [&] { return parse_law(c.laws[i]); }));
  return out;
}

double single_radius(const ExperimentConfig& c) {
  if (c.radii.size() != 1) throw PreconditionError("radii: this experiment needs exactly one radius");
  if (!(c.radii[0] > 0.0)) throw PreconditionError("radii: radius must be > 0");
  return c.radii[0];
}

json verdict_json(const WeakClassVerdict& v) {
  json moments = json::object();
  for (const auto& [k, s] : v.moment_sides) moments[std::to_string(k)] = to_string(s);
  json scores = json::array();
  for (std::size_t i = 0; i < v.labels.size(); ++i) scores.push_back({{"label", v.labels[i]}, {"value", num(v.z_scores[i])}});
  return {{"void_side", to_string(v.void_side)},
          {"moment_sides", moments},
          {"overall", to_string(v.overall)},
          {"exact", v.exact},
          {v.exact ? "gaps" : "z_scores", scores}};
}

json cx_json(const CxComparison& c) {
  return {{"verdict", to_string(c.verdict)},
          {"forward", c.forward},
          {"backward", c.backward},
          {"max_forward_gap", num(c.max_forward_gap)},
          {"max_backward_gap", num(c.max_backward_gap)},
          {"grid_points", c.grid_points}};
}

// --- experiments ------------------------------------------------------------

void run_generate(Context& ctx) {
  const auto gens = parse_generators(ctx.cfg, 1, 64);
  const Window w = config_window(ctx.cfg);
  json out = json::array();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    Rng rng = make_rng(ctx.seed(), 0x6e, i);
    PointPattern p = sample(gens[i], w, rng);
    p.set_provenance({describe(gens[i]), ctx.seed()});
    const std::string name = "pattern_" + std::to_string(i) + ".csv";
    write_pattern(p, ctx.path(name));
    ctx.record(name);
    ctx.record(sidecar_path(name).string());
    out.push_back({{"generator", describe(gens[i])}, {"points", p.size()}, {"file", name}});
  }
  ctx.summary["patterns"] = out;
}

void run_classify(Context& ctx) {
  const auto gens = parse_generators(ctx.cfg, 1, 64);
  if (ctx.cfg.orders.empty()) throw PreconditionError("orders: at least one moment order is required");
  const std::size_t dim = ctx.cfg.window_lower.size();
  if (dim == 0) throw PreconditionError("window: dimension must be >= 1");
  const auto family = default_box_family(dim, ctx.seed());
  json boxes = json::array();
  for (const auto& b : family) boxes.push_back({{"lower", b.lower()}, {"upper", b.upper()}});
  json results = json::array();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    McOptions opt;
    opt.reps = ctx.cfg.reps;
    opt.seed = derive_seed(ctx.seed(), 0xc1a5, i);
    opt.threads = ctx.cfg.threads;
    const auto v = classify_weak(gens[i], family, ctx.cfg.orders, opt);
    if (v.overall == WeakClass::Inconclusive) ctx.inconclusive = true;
    json r = verdict_json(v);
    r["generator"] = describe(gens[i]);
    results.push_back(r);
  }
  const json doc = {{"box_family", boxes}, {"reps", ctx.cfg.reps}, {"z_threshold", 3.0}, {"results", results}};
  ctx.write_json("classify.json", doc);
  ctx.summary["verdicts"] = json::array();
  for (const auto& r : results) ctx.summary["verdicts"].push_back(r["overall"]);
}

void run_cx_chain(Context& ctx) {
  const auto laws = parse_laws(ctx.cfg, 2);
  json members = json::array();
  for (std::size_t i = 0; i < laws.size(); ++i)
    members.push_back({{"law", ctx.cfg.laws[i]}, {"canonical", laws[i].describe()}, {"mean", num(laws[i].mean())}});
  json pairs = json::array();
  std::int64_t top = 0;
  for (const auto& l : laws) top = std::max(top, l.truncation());
  for (std::size_t i = 0; i + 1 < laws.size(); ++i) {
    const std::string name = "laws[" + std::to_string(i) + "], laws[" + std::to_string(i + 1) + "]";
    CxComparison c;
    try {
      c = cx_compare(laws[i], laws[i + 1], {}, ctx.cfg.tol);
    } catch (const PreconditionError& e) {
      throw PreconditionError(name + ": " + e.what());
    }
    if (c.verdict == CxVerdict::Inconclusive) ctx.inconclusive = true;
    json p = cx_json(c);
    p["lo"] = ctx.cfg.laws[i];
    p["hi"] = ctx.cfg.laws[i + 1];
    pairs.push_back(p);
  }
  ctx.write_json("cx_chain.json", {{"tol", ctx.cfg.tol}, {"laws", members}, {"pairs", pairs}});

  std::string csv = "a";
  for (const auto& l : ctx.cfg.laws) csv += "," + csv_field(l);
  csv += "\r\n";
  for (std::int64_t j = 0; j <= 2 * top; ++j) {
    const double a = 0.5 * static_cast<double>(j);
    csv += real(a);
    for (const auto& l : laws) csv += "," + real(stop_loss(l, a));
    csv += "\r\n";
  }
  ctx.write_text("stop_loss.csv", csv);
  ctx.summary["verdicts"] = json::array();
  for (const auto& p : pairs) ctx.summary["verdicts"].push_back(p["verdict"]);
}

void run_spectral(Context& ctx) {
  if (ctx.cfg.radii.empty()) throw PreconditionError("radii: at least one disk radius is required");
  json results = json::array();
  for (std::size_t i = 0; i < ctx.cfg.radii.size(); ++i) {
    const double r = ctx.cfg.radii[i];
    const auto ev = field("radii[" + std::to_string(i) + "]", [&] { return ginibre_disk_eigenvalues(r); });
    const std::string tag = "r" + std::to_string(i);
    write_eigenvalues_csv(ev, ctx.path("eigenvalues_" + tag + ".csv"));
    ctx.record("eigenvalues_" + tag + ".csv");
    for (auto mode : {SpectralMode::Determinantal, SpectralMode::PoissonRef, SpectralMode::Permanental}) {
      const std::string name = "pmf_" + tag + "_" + to_string(mode) + ".csv";
      write_pmf_csv(count_law({ev, mode, "ginibre disk r=" + real(r)}), ctx.path(name));
      ctx.record(name);
    }
    const auto rep = spectral_sandwich(ev);
    json r_json = {{"r", r},
                   {"cutoff", rep.cutoff},
                   {"eigen_sum", num(rep.eigen_sum)},
                   {"det_vs_poisson", cx_json(rep.det_vs_poisson)},
                   {"poisson_vs_perm", cx_json(rep.poisson_vs_perm)},
                   {"var_det", num(rep.var_det)},
                   {"var_perm", num(rep.var_perm)},
                   {"void_det", num(rep.void_det)},
                   {"void_poisson", num(rep.void_poisson)},
                   {"void_perm", num(rep.void_perm)},
                   {"variance_ordered", rep.variance_ordered},
                   {"void_ordered", rep.void_ordered},
                   {"sandwich_ok", rep.ok()}};
    for (auto mode : {SpectralMode::Determinantal, SpectralMode::Permanental}) {
      const auto model = SpectralAnnuliModel::ginibre_disk(r, mode, 3);
      r_json["annuli_" + to_string(mode)] = verdict_json(classify_exact(model, ctx.cfg.orders));
    }
    results.push_back(r_json);
  }
  ctx.write_json("spectral.json", {{"results", results}});
  ctx.summary["sandwich_ok"] = json::array();
  for (const auto& r : results) ctx.summary["sandwich_ok"].push_back(r["sandwich_ok"]);
}

void run_perc_sweep(Context& ctx) {
  const auto gens = parse_generators(ctx.cfg, 1, 16);
  const Window w = config_window(ctx.cfg);
  if (ctx.cfg.radii.empty()) throw PreconditionError("radii: the radius grid is empty");
  SweepOptions opt;
  opt.reps = ctx.cfg.reps;
  opt.seed = ctx.seed();
  opt.threads = ctx.cfg.threads;
  opt.crossing_level = ctx.cfg.crossing_level;
  std::string csv = "generator,r,rep_count,f1_mean,f1_se,f2_mean,f2_se\r\n";
  std::vector<PlotSeries> f1_series, f2_series;
  json thresholds = json::array();
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const auto res = field("radii", [&] { return threshold_sweep(gens[g], w, ctx.cfg.radii, opt); });
    for (std::size_t i = 0; i < res.radii.size(); ++i)
      csv += csv_field(res.generator) + "," + real(res.radii[i]) + "," + std::to_string(res.reps) + "," +
             real(res.f1_mean[i]) + "," + real(res.f1_se[i]) + "," + real(res.f2_mean[i]) + "," + real(res.f2_se[i]) + "\r\n";
    f1_series.push_back({ctx.cfg.generators[g], res.radii, res.f1_mean, res.f1_se});
    f2_series.push_back({ctx.cfg.generators[g], res.radii, res.f2_mean, res.f2_se});
    thresholds.push_back({{"generator", res.generator},
                          {"r_hat", num(res.r_hat)},
                          {"ci", {num(res.ci_lo), num(res.ci_hi)}},
                          {"open_interval", res.open_interval},
                          {"crossing_level", opt.crossing_level}});
  }
  ctx.write_text("sweep.csv", csv);
  ctx.write_json("threshold.json", {{"window", {{"lower", w.lower()}, {"upper", w.upper()}}}, {"reps", opt.reps},
                                    {"thresholds", thresholds}});
  PlotStyle style;
  style.x_label = "grain radius r";
  style.y_label = "mean fraction in largest component";
  style.title = "Largest component";
  style.error_z = 3.0;
  emit_plot(f1_series, style, ctx.path("sweep_f1.svg"));
  ctx.record("sweep_f1.svg");
  style.y_label = "mean fraction in second largest component";
  style.title = "Second largest component";
  emit_plot(f2_series, style, ctx.path("sweep_f2.svg"));
  ctx.record("sweep_f2.svg");
  ctx.summary["thresholds"] = thresholds;
}

void run_path_bound(Context& ctx) {
  const auto gens = parse_generators(ctx.cfg, 1, 16);
  const double r = single_radius(ctx.cfg);
  const std::size_t dim = ctx.cfg.window_lower.size();
  json reports = json::array();
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const auto rep = lower_bound_check(gens[g], dim, r, ctx.cfg.m, ctx.cfg.reps, derive_seed(ctx.seed(), 0x9b, g),
                                       ctx.cfg.threads);
    if (rep.cap_hits > 0) ctx.inconclusive = true;
    reports.push_back({{"generator", describe(gens[g])},
                       {"dim", rep.dim},
                       {"r", rep.r},
                       {"m", rep.m},
                       {"theta", num(rep.theta)},
                       {"m_r", rep.m_r},
                       {"applicable", rep.applicable},
                       {"bound", num(rep.bound)},
                       {"mean", num(rep.mean)},
                       {"std_error", num(rep.std_error)},
                       {"margin", num(rep.bound - rep.mean)},
                       {"reps", rep.reps},
                       {"short_path_reps", rep.short_path_reps},
                       {"cap_hits", rep.cap_hits},
                       {"mean_by_length", nums(rep.mean_by_length)},
                       {"pass", rep.pass}});
  }
  ctx.write_json("path_bound.json", {{"reports", reports}});
  ctx.summary["pass"] = json::array();
  for (const auto& r : reports) ctx.summary["pass"].push_back(r["pass"]);
}

std::optional<DiscreteLaw> exact_ball_law(const GeneratorSpec& g, double r) {
  const auto* p = std::get_if<PerturbationSpec>(&g);
  if (p == nullptr) {
    if (const auto* poi = std::get_if<PoissonSpec>(&g))
      return DiscreteLaw::poisson(poi->intensity * r * r * std::numbers::pi);
    return std::nullopt;
  }
  if (!std::holds_alternative<IntegerLattice>(p->base) || !std::holds_alternative<UniformCell>(p->translation))
    return std::nullopt;
  const double centre[] = {0.0, 0.0};
  return lattice_ball_count_law(*p, r, centre);
}

json crossing_json(const CrossingReport& c) {
  return {{"verdict", to_string(c.verdict)},
          {"k0", c.k0},
          {"first_sign", c.first_sign},
          {"sign_changes", c.sign_changes},
          {"log_concave_ratio", c.log_concave_ratio},
          {"unimodal_ratio", c.unimodal_ratio},
          {"tail_differences", nums(c.tail_differences)}};
}

void run_coverage(Context& ctx) {
  const auto gens = parse_generators(ctx.cfg, 1, 2);
  const double r = single_radius(ctx.cfg);
  const Window w = config_window(ctx.cfg);
  std::vector<int> ks = ctx.cfg.ks;
  if (ks.empty())
    for (int k = 1; k <= 8; ++k) ks.push_back(k);
  CoverageOptions opt;
  opt.reps = ctx.cfg.reps;
  opt.seed = ctx.seed();
  opt.threads = ctx.cfg.threads;
  opt.probes_per_axis = ctx.cfg.probes_per_axis;
  std::vector<CoverageCurve> curves;
  std::vector<PlotSeries> series;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    curves.push_back(field("generators[" + std::to_string(g) + "]", [&] { return coverage_curve(gens[g], r, ks, w, opt); }));
    const auto& c = curves.back();
    std::string csv = "k,frac_geometric,se_g,frac_countlaw,se_c\r\n";
    std::vector<double> x;
    for (std::size_t t = 0; t < ks.size(); ++t) {
      csv += std::to_string(ks[t]) + "," + real(c.frac_geometric[t]) + "," + real(c.se_geometric[t]) + "," +
             real(c.frac_countlaw[t]) + "," + real(c.se_countlaw[t]) + "\r\n";
      x.push_back(ks[t]);
    }
    ctx.write_text("coverage_" + std::to_string(g) + ".csv", csv);
    series.push_back({ctx.cfg.generators[g], x, c.frac_geometric, c.se_geometric});
  }
  PlotStyle style;
  style.title = "k-coverage";
  style.x_label = "k";
  style.y_label = "covered fraction";
  style.error_z = 3.0;
  emit_plot(series, style, ctx.path("coverage.svg"));
  ctx.record("coverage.svg");

  json agree = json::array();
  for (const auto& c : curves) agree.push_back(c.estimators_agree);
  ctx.summary["estimators_agree"] = agree;
  if (curves.size() == 2) {
    const auto& a = curves[0];
    const auto& b = curves[1];
    const auto cc = compare_curves(ks, a.frac_geometric, a.se_geometric, b.frac_geometric, b.se_geometric);
    json report = {{"k0", cc.k0},
                   {"sign_changes", cc.sign_changes},
                   {"directions", {{"first", cc.first_sign}, {"last", cc.last_sign}}},
                   {"z_scores", nums(cc.z)}};
    const auto la = exact_ball_law(gens[0], r), lb = exact_ball_law(gens[1], r);
    if (la && lb) report["exact"] = crossing_json(crossing_detect(*la, *lb));
    if (cc.first_sign == 0) ctx.inconclusive = true;
    ctx.write_json("crossing.json", report);
    ctx.summary["crossing"] = report;
  }
}

void run_crossing(Context& ctx) {
  std::vector<DiscreteLaw> laws;
  if (!ctx.cfg.laws.empty()) {
    laws = parse_laws(ctx.cfg, 2);
    if (laws.size() != 2) throw PreconditionError("laws: crossing compares exactly two laws");
  } else {
    const auto gens = parse_generators(ctx.cfg, 2, 2);
    const double r = single_radius(ctx.cfg);
    for (std::size_t g = 0; g < 2; ++g) {
      auto l = exact_ball_law(gens[g], r);
      if (!l)
        throw PreconditionError("generators[" + std::to_string(g) +
                                "]: no exact ball-count law (needs poisson or a planar lattice with cell translations)");
      laws.push_back(*l);
    }
  }
  const auto rep = crossing_detect(laws[0], laws[1]);
  ctx.write_json("crossing.json", crossing_json(rep));
  ctx.summary["verdict"] = to_string(rep.verdict);
  ctx.summary["k0"] = rep.k0;
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"generate",   "classify", "cx-chain", "spectral",
                                              "perc-sweep", "path-bound", "coverage", "crossing"};
  return names;
}

json ExperimentConfig::to_json() const {
  json j = {{"experiment", experiment},
            {"generators", generators},
            {"laws", laws},
            {"window", {{"lower", window_lower}, {"upper", window_upper}}},
            {"radii", radii},
            {"ks", ks},
            {"orders", orders},
            {"m", m},
            {"reps", reps},
            {"out", out},
            {"threads", threads},
            {"tol", tol},
            {"crossing_level", crossing_level},
            {"probes_per_axis", probes_per_axis}};
  if (seed) j["seed"] = *seed;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("config: top level must be a JSON object");
  static const std::vector<std::string> known{"experiment", "generators", "laws",   "window", "radii",
                                              "ks",         "orders",     "m",      "reps",   "seed",
                                              "out",        "threads",    "tol",    "crossing_level",
                                              "probes_per_axis"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError("config: unknown field '" + key + "'");
  ExperimentConfig c;
  read_field(j, "experiment", c.experiment);
  read_field(j, "generators", c.generators);
  read_field(j, "laws", c.laws);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (!w.is_object()) throw ParseError("config field 'window': expected {\"lower\": [...], \"upper\": [...]}");
    read_field(w, "lower", c.window_lower);
    read_field(w, "upper", c.window_upper);
  }
  read_field(j, "radii", c.radii);
  read_field(j, "ks", c.ks);
  read_field(j, "orders", c.orders);
  read_field(j, "m", c.m);
  read_field(j, "reps", c.reps);
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    read_field(j, "seed", s);
    c.seed = s;
  }
  read_field(j, "out", c.out);
  read_field(j, "threads", c.threads);
  read_field(j, "tol", c.tol);
  read_field(j, "crossing_level", c.crossing_level);
  read_field(j, "probes_per_axis", c.probes_per_axis);
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError("config: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for hashing");
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  if (md == nullptr || EVP_DigestInit_ex(md, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(md);
    throw IoError("sha256: digest initialisation failed");
  }
  char buf[1 << 14];
  while (f) {
    f.read(buf, sizeof buf);
    if (f.gcount() > 0) EVP_DigestUpdate(md, buf, static_cast<std::size_t>(f.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md, digest, &len);
  EVP_MD_CTX_free(md);
  std::string hex;
  char h[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", digest[i]);
    hex += h;
  }
  return hex;
}

RunOutcome run(const ExperimentConfig& config) {
  RunOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), config.experiment) == names.end())
      throw PreconditionError("experiment: unknown experiment '" + config.experiment + "'");
    if (!config.seed) throw PreconditionError("seed: a seed is required (there is no clock-based default)");
    if (config.threads == 0) throw PreconditionError("threads: must be >= 1");
    if (config.reps == 0) throw PreconditionError("reps: must be >= 1");

    Context ctx(config);
    const std::string& e = config.experiment;
    if (e == "generate") run_generate(ctx);
    else if (e == "classify") run_classify(ctx);
    else if (e == "cx-chain") run_cx_chain(ctx);
    else if (e == "spectral") run_spectral(ctx);
    else if (e == "perc-sweep") run_perc_sweep(ctx);
    else if (e == "path-bound") run_path_bound(ctx);
    else if (e == "coverage") run_coverage(ctx);
    else run_crossing(ctx);

    outcome.exit_code = ctx.inconclusive ? kExitInconclusive : kExitOk;
    outcome.message = ctx.inconclusive ? "inconclusive: more replications or a wider grid are needed" : "ok";
    outcome.summary = ctx.summary;

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json files = json::array();
    for (const auto& name : ctx.files) {
      const fs::path p = ctx.path(name);
      files.push_back({{"path", name}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    const json manifest = {{"tool", "dcxlab"},
                           {"version", kVersion},
                           {"experiment", config.experiment},
                           {"seed", *config.seed},
                           {"config", config.to_json()},
                           {"wall_time_seconds", wall},
                           {"exit_code", outcome.exit_code},
                           {"summary", ctx.summary},
                           {"files", files}};
    outcome.manifest = ctx.path("manifest.json");
    std::ofstream f(outcome.manifest, std::ios::binary);
    if (!f) throw IoError("out: cannot write '" + outcome.manifest.string() + "'");
    f << manifest.dump(2) << "\n";
  } catch (const ParseError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.message = std::string("parse error: ") + e.what();
  } catch (const ParameterError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.message = std::string("parameter error: ") + e.what();
  } catch (const PreconditionError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.message = std::string("precondition error: ") + e.what();
  } catch (const IoError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.message = std::string("i/o error: ") + e.what();
  }
  return outcome;
}

}  // namespace dcx
