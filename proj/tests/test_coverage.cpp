#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dcxlab/coverage.hpp"
#include "dcxlab/error.hpp"
#include "dcxlab/law_grammar.hpp"
#include "dcxlab/special_functions.hpp"

using namespace dcx;

namespace {

CoverageOptions options(std::size_t reps, std::uint64_t seed, std::size_t probes = 32) {
  CoverageOptions o;
  o.reps = reps;
  o.seed = seed;
  o.probes_per_axis = probes;
  return o;
}

const Window kWindow = Window::cube(2, 0.0, 10.0);

}  // namespace

TEST_SUITE("coverage") {

TEST_CASE("poisson coverage follows the poisson tail") {
  const std::vector<int> ks{1, 2, 3, 4, 5, 6};
  const auto c = coverage_curve(PoissonSpec{1.0}, 1.0, ks, kWindow, options(400, 1));
  CHECK(c.probes == 1024);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CAPTURE(ks[i]);
    const double exact = gamma_p(ks[i], std::numbers::pi);
    CHECK(std::abs(c.frac_geometric[i] - exact) <= 3.0 * c.se_geometric[i]);
    CHECK(std::abs(c.frac_countlaw[i] - exact) <= 3.0 * c.se_countlaw[i]);
    if (i > 0) {
      CHECK(c.frac_geometric[i] <= c.frac_geometric[i - 1]);
      CHECK(c.frac_countlaw[i] <= c.frac_countlaw[i - 1]);
    }
  }
  CHECK(c.estimators_agree);
}

TEST_CASE("saturation and empty tails") {
  const auto full = coverage_curve(PoissonSpec{10.0}, 2.0, {1}, kWindow, options(20, 2));
  CHECK(full.frac_geometric[0] == 1.0);
  CHECK(full.frac_countlaw[0] == 1.0);
  const auto none = coverage_curve(PoissonSpec{1.0}, 0.5, {40}, kWindow, options(20, 3));
  CHECK(none.frac_geometric[0] == 0.0);
  CHECK(none.frac_countlaw[0] == 0.0);
}

TEST_CASE("shifted lattices are accepted, fixed lattices are not") {
  CHECK_NOTHROW(coverage_curve(parse_generator("lattice(geo(0.5),shift=1)"), 0.6, {1, 2}, kWindow, options(20, 4)));
  CHECK_THROWS_AS(coverage_curve(parse_generator("lattice(geo(0.5))"), 0.6, {1}, kWindow, options(20, 4)),
                  PreconditionError);
  CHECK_THROWS_AS(coverage_curve(PoissonSpec{1.0}, 0.6, {1}, kWindow, options(20, 4, 16)), PreconditionError);
  CHECK_THROWS_AS(coverage_curve(PoissonSpec{1.0}, 0.6, {0}, kWindow, options(20, 4)), PreconditionError);
  CHECK_THROWS_AS(coverage_curve(PoissonSpec{1.0}, 0.0, {1}, kWindow, options(20, 4)), PreconditionError);
}

TEST_CASE("crossings of tail functions") {
  const auto poi = parse_law("poi(1)");
  CHECK(crossing_detect(poi, poi).verdict == CrossingVerdict::NoCrossing);

  const auto bin = crossing_detect(parse_law("bin(4,0.25)"), poi);
  CHECK(bin.verdict == CrossingVerdict::SingleCrossing);
  CHECK(bin.first_sign == 1);
  CHECK(bin.k0 == 1);

  const auto geo = crossing_detect(poi, parse_law("geo(0.5)"));
  CHECK(geo.verdict == CrossingVerdict::SingleCrossing);
  CHECK(geo.first_sign == 1);
  CHECK(geo.k0 == 2);
  CHECK(geo.tail_differences[0] == doctest::Approx(0.5 - std::exp(-1.0)));

  const auto two = crossing_detect(parse_law("emp([0,0.5,0,0.5])"), parse_law("emp([0.25,0,0.5,0,0.25])"));
  CHECK(two.verdict == CrossingVerdict::MultipleCrossings);
  CHECK(two.sign_changes >= 2);
}

TEST_CASE("comparing estimated curves") {
  const std::vector<int> ks{1, 2, 3, 4};
  const std::vector<double> a{0.9, 0.5, 0.2, 0.05}, b{0.8, 0.5, 0.3, 0.1}, se(4, 0.01);
  const auto c = compare_curves(ks, a, se, b, se);
  CHECK(c.resolved_sign == std::vector<int>{1, 0, -1, -1});
  CHECK(c.sign_changes == 1);
  CHECK(c.first_sign == 1);
  CHECK(c.last_sign == -1);
  CHECK(c.k0 == 1);
}

TEST_CASE("area of a disk inside a rectangle") {
  const double r = 1.3, pi = std::numbers::pi;
  CHECK(disk_rectangle_area(r, -2, 2, -2, 2) == doctest::Approx(pi * r * r).epsilon(1e-13));
  CHECK(disk_rectangle_area(r, 0, 2, 0, 2) == doctest::Approx(pi * r * r / 4).epsilon(1e-13));
  CHECK(disk_rectangle_area(r, -2, 2, 0, 5) == doctest::Approx(pi * r * r / 2).epsilon(1e-13));
  CHECK(disk_rectangle_area(r, -0.1, 0.1, -0.2, 0.2) == doctest::Approx(0.08).epsilon(1e-13));
  CHECK(disk_rectangle_area(r, 2, 3, 0, 1) == 0.0);

  Rng rng = make_rng(8);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = 0.3 + 1.2 * uniform01(rng), y = -0.5 + 0.9 * uniform01(rng);
    hits += x * x + y * y <= r * r;
  }
  const double p = hits / double(n), box = 1.2 * 0.9;
  CHECK(std::abs(disk_rectangle_area(r, 0.3, 1.5, -0.5, 0.4) - p * box) <= 4.0 * box * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("ball count laws of perturbed lattices") {
  const double centre[] = {0.5, 0.5};
  const auto simple = std::get<PerturbationSpec>(parse_generator("lattice(dirac(1))"));
  const auto inside = lattice_ball_count_law(simple, 0.3, centre);
  CHECK(inside.pmf(1) == doctest::Approx(std::numbers::pi * 0.09).epsilon(1e-12));
  CHECK(inside.pmf(2) == 0.0);

  const auto shifted = std::get<PerturbationSpec>(parse_generator("lattice(geo(0.5),shift=1)"));
  for (double r : {0.4, 0.6, 1.1}) {
    const auto law = lattice_ball_count_law(shifted, r, centre);
    CHECK(law.mean() == doctest::Approx(std::numbers::pi * r * r).epsilon(2e-3));
  }
  const auto ball = std::get<PerturbationSpec>(parse_generator("lattice(poi(1),translation=ball(0.3))"));
  CHECK_THROWS_AS(lattice_ball_count_law(ball, 0.5, centre), PreconditionError);
}

}  // TEST_SUITE
