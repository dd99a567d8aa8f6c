#include <doctest.h>

#include <cmath>

#include "dcxlab/error.hpp"
#include "dcxlab/estimators.hpp"
#include "dcxlab/law_grammar.hpp"

using namespace dcx;

namespace {

McOptions options(std::size_t reps, std::uint64_t seed) {
  McOptions o;
  o.reps = reps;
  o.seed = seed;
  return o;
}

const Window kUnit = Window::cube(2, 0.0, 1.0);
const Window kOffsetUnit({0.5, 0.5}, {1.5, 1.5});

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("void probabilities") {
  const auto poi = estimate_void(PoissonSpec{1.0}, kUnit, options(100000, 1));
  CHECK(std::abs(poi.value - std::exp(-1.0)) <= poi.half_width());
  CHECK(poi.reps == 100000);

  const auto simple = estimate_void(parse_generator("lattice(dirac(1))"), kUnit, options(1000, 2));
  CHECK(simple.value == 0.0);

  const auto geo = estimate_void(parse_generator("lattice(geo(0.5))"), kUnit, options(20000, 3));
  CHECK(geo.value - std::exp(-1.0) >= 3.0 * geo.std_error);

  CHECK_THROWS_AS(estimate_void(PoissonSpec{1.0}, kUnit, options(99, 1)), PreconditionError);
}

TEST_CASE("mean counts") {
  const auto m = estimate_mean_count(PoissonSpec{2.0}, Window({0.0, 0.0}, {1.0, 2.0}), options(20000, 4));
  CHECK(std::abs(m.value - 4.0) <= m.half_width());
}

TEST_CASE("standard error shrinks like one over root reps") {
  const auto a = estimate_mean_count(PoissonSpec{1.0}, kUnit, options(20000, 5));
  const auto b = estimate_mean_count(PoissonSpec{1.0}, kUnit, options(40000, 6));
  const double ratio = b.std_error / a.std_error;
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.1));
}

TEST_CASE("factorial moments on disjoint boxes") {
  const Window two[] = {kUnit, kUnit.translated(0, 1.0)};
  const auto poi = estimate_factorial_moment(PoissonSpec{1.0}, two, options(20000, 7));
  CHECK(std::abs(poi.value - 1.0) <= poi.half_width());

  const auto simple = estimate_factorial_moment(parse_generator("lattice(dirac(1))"), two, options(500, 8));
  CHECK(simple.value == 1.0);
  CHECK(simple.std_error == 0.0);

  // Boxes straddling cells: the binomial kernel makes neighbouring counts
  // negatively correlated (expected value 15/16).
  const Window straddle[] = {kOffsetUnit, kOffsetUnit.translated(0, 1.0)};
  const auto bin = estimate_factorial_moment(parse_generator("lattice(bin(2,0.5))"), straddle, options(100000, 9));
  CHECK(bin.value < 1.0 - 3.0 * bin.std_error);
  CHECK(std::abs(bin.value - 15.0 / 16.0) <= bin.half_width());

  const Window overlapping[] = {kUnit, Window::cube(2, 0.5, 1.5)};
  CHECK_THROWS_AS(estimate_factorial_moment(PoissonSpec{1.0}, overlapping, options(1000, 1)), PreconditionError);
}

TEST_CASE("void probabilities and means along the kernel chain") {
  const char* chain[] = {"lattice(hgeo(12,6,2))", "lattice(bin(2,0.5))", "lattice(poi(1))",
                         "lattice(nbin(2,0.3333333333333333))", "lattice(geo(0.5))"};
  std::vector<EstimateWithCI> voids, means;
  for (const char* g : chain) {
    voids.push_back(estimate_void(parse_generator(g), kOffsetUnit, options(20000, 10)));
    means.push_back(estimate_mean_count(parse_generator(g), kOffsetUnit, options(20000, 11)));
  }
  for (std::size_t i = 0; i < voids.size(); ++i) {
    CAPTURE(chain[i]);
    CHECK(std::abs(means[i].value - 1.0) <= means[i].half_width());
    if (i + 1 < voids.size())
      CHECK(voids[i].value <= voids[i + 1].value + 3.0 * std::hypot(voids[i].std_error, voids[i + 1].std_error));
  }
}

TEST_CASE("box families") {
  const auto fam = default_box_family(2, 42);
  REQUIRE(fam.size() == 3);
  CHECK(fam[0].side(0) == 0.5);
  CHECK(fam[2].side(1) == 2.0);
  const auto boxes = moment_boxes(fam[1], 3);
  REQUIRE(boxes.size() == 3);
  CHECK_FALSE(boxes[0].overlaps(boxes[1]));
  CHECK(boxes[2].lower()[0] == doctest::Approx(fam[1].lower()[0] + 2.0));
}

TEST_CASE("monte carlo classification") {
  const int orders[] = {2};
  const auto fam = default_box_family(2, 7);
  const auto poi = classify_weak(PoissonSpec{1.0}, fam, orders, options(20000, 12));
  CHECK(poi.overall != WeakClass::WeaklySub);
  CHECK(poi.overall != WeakClass::WeaklySuper);
  CHECK(poi.z_scores.size() == poi.labels.size());

  const auto geo = classify_weak(parse_generator("lattice(geo(0.5),shift=1)"), fam, orders, options(20000, 13));
  CHECK(geo.void_side == Side::Super);
  CHECK(geo.overall == WeakClass::WeaklySuper);
}

TEST_CASE("exact classification of determinantal and permanental counts") {
  const int orders[] = {2, 3};
  for (double r : {0.5, 1.0, 2.0}) {
    CAPTURE(r);
    const auto det = classify_exact(SpectralAnnuliModel::ginibre_disk(r, SpectralMode::Determinantal), orders);
    CHECK(det.overall == WeakClass::WeaklySub);
    const auto perm = classify_exact(SpectralAnnuliModel::ginibre_disk(r, SpectralMode::Permanental), orders);
    CHECK(perm.overall == WeakClass::WeaklySuper);
  }
}

TEST_CASE("product moments of annuli counts") {
  const Annulus parts[] = {{0.0, 0.6}, {0.6, 1.3}};
  const auto spec = annuli_eigenvalues(parts);
  const SpectralAnnuliModel det(spec, SpectralMode::Determinantal), perm(spec, SpectralMode::Permanental);
  double cross = 0.0;
  for (std::size_t k = 0; k < spec.rows(); ++k) cross += spec.at(k, 0) * spec.at(k, 1);
  const std::size_t both[] = {0, 1};
  const double prod = det.mean(0) * det.mean(1);
  CHECK(det.product_moment(both) == doctest::Approx(prod - cross).epsilon(1e-12));
  CHECK(perm.product_moment(both) == doctest::Approx(prod + cross).epsilon(1e-12));
}

TEST_CASE("the permutation counterexample is neither sub- nor super-Poisson") {
  const CounterexampleModel model(20);
  CHECK(model.void_probability(0) == 0.05);
  CHECK(model.mean(0) == 9.5);
  CHECK(model.variance() == doctest::Approx(33.25));
  const std::size_t pair[] = {0, 1};
  CHECK(model.product_moment(pair) == doctest::Approx(88.5).epsilon(1e-12));
  const int orders[] = {2};
  const auto v = classify_exact(model, orders);
  CHECK(v.void_side == Side::Super);
  CHECK(v.moment_sides.at(2) == Side::Sub);
  CHECK(v.overall == WeakClass::Neither);
  CHECK_THROWS_AS(CounterexampleModel(1), PreconditionError);
}

}  // TEST_SUITE
