#include <doctest.h>

#include <cmath>

#include "dcxlab/error.hpp"
#include "dcxlab/kernels.hpp"
#include "oracles.hpp"

using namespace dcx;

namespace {

std::vector<double> table(const DiscreteLaw& l) { return {l.pmf_table().begin(), l.pmf_table().end()}; }

// The mean-one chain used throughout: each law is cx-below the next.
std::vector<DiscreteLaw> mean_one_chain() {
  return {DiscreteLaw::hypergeometric(12, 6, 2), DiscreteLaw::binomial(6, 1.0 / 6), DiscreteLaw::binomial(12, 1.0 / 12),
          DiscreteLaw::poisson(1.0),             DiscreteLaw::neg_binomial(2, 1.0 / 3), DiscreteLaw::neg_binomial(1, 0.5)};
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("pmf values of the basic families") {
  CHECK(DiscreteLaw::binomial(2, 0.5).pmf(1) == doctest::Approx(0.5).epsilon(1e-15));
  const auto geo = DiscreteLaw::geometric(0.5);
  for (int i = 0; i < 20; ++i) CHECK(geo.pmf(i) == doctest::Approx(std::pow(0.5, i + 1)).epsilon(1e-14));
  CHECK(DiscreteLaw::hypergeometric(12, 6, 2).pmf(0) == doctest::Approx(15.0 / 66.0).epsilon(1e-14));
  CHECK(DiscreteLaw::poisson(2.0).pmf(3) == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-14));
  CHECK(DiscreteLaw::dirac(3).pmf(3) == 1.0);
  CHECK(DiscreteLaw::dirac(3).pmf(2) == 0.0);
  CHECK(DiscreteLaw::binomial(4, 0.25).pmf(7) == 0.0);
}

TEST_CASE("negative binomial with r = 1 is geometric") {
  const auto nb = DiscreteLaw::neg_binomial(1, 0.5);
  const auto geo = DiscreteLaw::geometric(0.5);
  for (int i = 0; i < 30; ++i) CHECK(nb.pmf(i) == doctest::Approx(geo.pmf(i)).epsilon(1e-13));
}

TEST_CASE("hypergeometric support bounds") {
  // n = 10, m = 7, k = 5: support max(5-10+7,0)=2 .. min(7,5)=5
  const auto h = DiscreteLaw::hypergeometric(10, 7, 5);
  CHECK(h.pmf(0) == 0.0);
  CHECK(h.pmf(1) == 0.0);
  CHECK(h.pmf(2) > 0.0);
  CHECK(h.pmf(5) > 0.0);
  CHECK(h.mean() == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(DiscreteLaw::binomial(3, 1.5), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::binomial(-1, 0.5), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::hypergeometric(5, 3, 6), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::poisson(-1.0), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::geometric(0.0), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::neg_binomial(2, 1.0), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::geo_mixture({0.5, 0.6}, {0.5, 0.5}), ParameterError);
  CHECK_THROWS_AS(DiscreteLaw::empirical({0.5, 0.4}), ParameterError);
  CHECK_THROWS(DiscreteLaw::poisson(1.0).pmf(-1));
}

TEST_CASE("total mass and closed-form means") {
  const std::vector<DiscreteLaw> laws{DiscreteLaw::poisson(3.7),
                                      DiscreteLaw::binomial(9, 0.3),
                                      DiscreteLaw::hypergeometric(20, 8, 6),
                                      DiscreteLaw::neg_binomial(2.5, 0.4),
                                      DiscreteLaw::geometric(0.2),
                                      DiscreteLaw::geo_mixture({0.3, 0.7}, {0.25, 0.75}),
                                      DiscreteLaw::dirac(4)};
  const std::vector<double> means{3.7, 2.7, 2.4, 2.5 * 0.4 / 0.6, 4.0, 0.3 / 0.25 + 0.7 / 0.75 - 1.0, 4.0};
  for (std::size_t i = 0; i < laws.size(); ++i) {
    CAPTURE(laws[i].describe());
    double mass = 0.0;
    for (double p : laws[i].pmf_table()) {
      CHECK(p >= 0.0);
      mass += p;
    }
    CHECK(std::abs(mass - 1.0) <= laws[i].tail_mass_bound() + 1e-12);
    CHECK(laws[i].mean() == doctest::Approx(means[i]).epsilon(1e-12));
    const double tm = laws[i].truncated_mean();
    CHECK(laws[i].mean() - tm <= laws[i].tail_mean_bound() + 1e-10);
    CHECK(laws[i].mean() - tm >= -1e-10);
  }
}

TEST_CASE("chain members share mean one") {
  for (const auto& l : mean_one_chain()) CHECK(std::abs(l.mean() - 1.0) <= 1e-10);
}

TEST_CASE("convolution equals the direct sum of products") {
  const auto a = DiscreteLaw::binomial(7, 0.3);
  const auto b = DiscreteLaw::poisson(2.0);
  const DiscreteLaw parts[] = {a, b};
  const auto c = DiscreteLaw::convolution(parts);
  const auto direct = oracle::convolve(table(a), table(b));
  for (std::size_t i = 0; i <= 50; ++i) {
    const double expect = i < direct.size() ? direct[i] : 0.0;
    CHECK(std::abs(c.pmf(static_cast<std::int64_t>(i)) - expect) <= 1e-13);
  }
  CHECK(c.mean() == doctest::Approx(4.1).epsilon(1e-12));
}

TEST_CASE("sampling") {
  Rng rng = make_rng(7);
  CHECK(DiscreteLaw::dirac(1).sample(rng) == 1);

  const auto poi = DiscreteLaw::poisson(1.0);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(poi.sample(rng));
  CHECK(std::abs(sum / n - 1.0) <= 3e-3);

  const auto bin = DiscreteLaw::binomial(4, 0.25);
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += bin.sample(rng) == 0;
  const double p0 = std::pow(0.75, 4);
  CHECK(std::abs(zeros / double(n) - p0) <= 3.0 * std::sqrt(p0 * (1 - p0) / n));
}

TEST_CASE("sampling is deterministic given the seed") {
  const auto law = DiscreteLaw::neg_binomial(2, 0.3);
  Rng a = make_rng(99, 3, 4), b = make_rng(99, 3, 4);
  for (int i = 0; i < 1000; ++i) CHECK(law.sample(a) == law.sample(b));
}

TEST_CASE("stop-loss values") {
  CHECK(stop_loss(DiscreteLaw::dirac(2), 0.0) == doctest::Approx(2.0));
  CHECK(stop_loss(DiscreteLaw::poisson(1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(stop_loss(DiscreteLaw::geometric(0.5), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(stop_loss(DiscreteLaw::poisson(1.0), -2.0) == doctest::Approx(3.0).epsilon(1e-13));
  const auto nb = DiscreteLaw::neg_binomial(2, 1.0 / 3);
  for (double a : {0.5, 1.0, 2.5, 7.0})
    CHECK(stop_loss(nb, a) == doctest::Approx(oracle::stop_loss(table(nb), a)).epsilon(1e-12));
  const auto bounds = stop_loss_bounds(DiscreteLaw::geometric(0.5), 3.0);
  CHECK(bounds.lo <= bounds.hi);
  CHECK(bounds.hi - bounds.lo <= 1e-12);
}

TEST_CASE("cx comparisons") {
  CHECK(cx_compare(DiscreteLaw::binomial(2, 0.5), DiscreteLaw::poisson(1.0)).verdict == CxVerdict::Ordered);
  CHECK(cx_compare(DiscreteLaw::poisson(1.0), DiscreteLaw::geometric(0.5)).verdict == CxVerdict::Ordered);
  const auto self = cx_compare(DiscreteLaw::poisson(1.0), DiscreteLaw::poisson(1.0));
  CHECK(self.verdict == CxVerdict::Ordered);
  CHECK(self.forward);
  CHECK(self.backward);
  CHECK(cx_compare(DiscreteLaw::geometric(0.5), DiscreteLaw::poisson(1.0)).verdict == CxVerdict::Reversed);
  CHECK_THROWS_AS(cx_compare(DiscreteLaw::poisson(1.0), DiscreteLaw::poisson(2.0)), PreconditionError);
  try {
    cx_compare(DiscreteLaw::poisson(1.0), DiscreteLaw::poisson(2.0));
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('1') != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
}

TEST_CASE("crossed stop-loss transforms") {
  // All four laws have mean 2.
  const auto a = DiscreteLaw::empirical({0.5, 0.0, 0.0, 0.0, 0.5});
  const auto b = DiscreteLaw::empirical({0.0, 0.5, 0.0, 0.5});
  CHECK(cx_compare(b, a).verdict == CxVerdict::Ordered);
  const auto c = DiscreteLaw::empirical({0.0, 0.75, 0.0, 0.0, 0.0, 0.25});
  const auto d = DiscreteLaw::empirical({1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0});
  const auto v = cx_compare(c, d).verdict;
  CHECK(v == CxVerdict::Crossed);
}

TEST_CASE("chain is ordered pair by pair and end to end") {
  const auto chain = mean_one_chain();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    CAPTURE(i);
    CHECK(cx_compare(chain[i], chain[i + 1]).verdict == CxVerdict::Ordered);
  }
  CHECK(cx_compare(chain.front(), chain.back()).verdict == CxVerdict::Ordered);
  CHECK(cx_compare(chain[1], chain[4]).verdict == CxVerdict::Ordered);
}

TEST_CASE("every law dominates the point mass at its mean") {
  const auto dirac = DiscreteLaw::dirac(1);
  for (const auto& l : mean_one_chain())
    for (double a = 0.0; a <= 20.0; a += 0.5) CHECK(stop_loss(l, a) >= stop_loss(dirac, a) - 1e-12);
}

TEST_CASE("mixtures of geometrics sit above the geometric of the same mean") {
  // weights sum to 1 and sum w_j / p_j = 2 (mean one)
  const auto mix = DiscreteLaw::geo_mixture({0.5, 0.5}, {1.0 / 3.0, 1.0});
  CHECK(mix.mean() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cx_compare(DiscreteLaw::geometric(0.5), mix).verdict == CxVerdict::Ordered);
}

TEST_CASE("second differences") {
  CHECK(second_difference_convex({{0, 0.0}, {1, 1.0}, {2, 4.0}}));
  CHECK_FALSE(second_difference_convex({{0, 0.0}, {1, 2.0}, {2, 3.0}}));
  CHECK_THROWS_AS(second_difference_convex({{0, 0.0}, {1, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(second_difference_convex({{0, 0.0}, {1, 1.0}, {3, 9.0}}), PreconditionError);

  std::map<std::int64_t, double> g;
  for (int n = 0; n <= 4; ++n) g[n] = oracle::bernoulli_functional(n, 0.5, [](int s) { return double(s) * s; });
  CHECK(g[2] == doctest::Approx(1.5));
  CHECK(second_difference_convex(g));
}

TEST_CASE("canonical descriptions") {
  CHECK(DiscreteLaw::poisson(1.0).describe() == "poi(1)");
  CHECK(DiscreteLaw::binomial(4, 0.25).describe() == "bin(4,0.25)");
  CHECK(DiscreteLaw::hypergeometric(12, 6, 2).describe() == "hgeo(12,6,2)");
}

}  // TEST_SUITE
