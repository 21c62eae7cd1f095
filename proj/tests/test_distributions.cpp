#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doomsday/distributions.hpp"
#include "doomsday/error.hpp"
#include "doomsday/quadrature.hpp"

using namespace doomsday;

namespace {

std::vector<DistributionSpec> zoo() {
  return {DistributionSpec::pareto(2.0, 1.0), DistributionSpec::pareto(1.5, 40.0), DistributionSpec::pareto(0.7, 3.0),
          DistributionSpec::lognormal(3.0, 2.0), DistributionSpec::lognormal(-1.0, 0.3),
          DistributionSpec::bimodal(0.7, {1.0, 0.5}, {6.0, 1.2})};
}

}  // namespace

TEST_CASE("closed-form values") {
  const auto p = DistributionSpec::pareto(2.0, 1.0);
  CHECK(pdf(p, 2.0) == doctest::Approx(2.0 / 8.0));
  CHECK(cdf(p, 2.0) == doctest::Approx(0.75));
  CHECK(sf(p, 10.0) == doctest::Approx(0.01));
  CHECK(pdf(p, 0.5) == 0.0);
  CHECK(cdf(p, 0.5) == 0.0);
  CHECK(quantile(p, 0.5) == doctest::Approx(std::sqrt(2.0)));
  CHECK(quantile(p, 0.0) == 1.0);
  CHECK(std::isinf(quantile(p, 1.0)));
  CHECK(mean(p) == doctest::Approx(2.0));
  CHECK(support_lower(p) == 1.0);

  const auto l = DistributionSpec::lognormal(3.0, 2.0);
  CHECK(quantile(l, 0.5) == doctest::Approx(std::exp(3.0)).epsilon(1e-12));
  CHECK(quantile(l, 0.5) == doctest::Approx(20.0855).epsilon(1e-5));
  CHECK(mean(l) == doctest::Approx(std::exp(3.0 + 2.0)));
  CHECK(support_lower(l) == 0.0);

  const auto m = DistributionSpec::bimodal(0.25, {0.0, 1.0}, {2.0, 0.5});
  CHECK(mean(m) == doctest::Approx(0.25 * std::exp(0.5) + 0.75 * std::exp(2.125)));
  CHECK(cdf(m, 3.0) ==
        doctest::Approx(0.25 * normal_cdf(std::log(3.0)) + 0.75 * normal_cdf((std::log(3.0) - 2.0) / 0.5)));
}

TEST_CASE("standard normal helpers") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-11));
  CHECK(normal_sf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
  for (double p : {1e-12, 0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DistributionSpec::pareto(0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::pareto(2.0, -1.0), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::pareto(NAN, 1.0), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::lognormal(0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::lognormal(INFINITY, 1.0), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::bimodal(1.0, {0, 1}, {1, 1}), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::bimodal(0.5, {0, -1}, {1, 1}), InvalidParameter);
  CHECK_THROWS_AS(quantile(DistributionSpec::pareto(2, 1), 1.5), InvalidParameter);
  CHECK_THROWS_AS(mean(DistributionSpec::pareto(1.0, 1.0)), InfiniteMean);
  CHECK_THROWS_AS(size_biased(DistributionSpec::pareto(0.9, 1.0)), InfiniteMean);
  CHECK_THROWS_AS(sample(DistributionSpec::pareto(2, 1), 1, 0), InvalidParameter);
}

TEST_CASE("pdf integrates to cdf differences") {
  for (const auto& d : zoo()) {
    CAPTURE(d.family_name());
    const double a = quantile(d, 0.1), b = quantile(d, 0.9);
    const auto mass = quad::integrate([&](double x) { return pdf(d, x); }, a, b, {1e-13, 1e-11});
    CHECK(mass.value == doctest::Approx(cdf(d, b) - cdf(d, a)).epsilon(1e-9));
  }
}

TEST_CASE("quantile inverts cdf and sf complements cdf") {
  for (const auto& d : zoo()) {
    CAPTURE(d.family_name());
    for (double p : {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1 - 1e-6}) {
      const double x = quantile(d, p);
      CHECK(cdf(d, x) == doctest::Approx(p).epsilon(1e-9));
      CHECK(sf(d, x) == doctest::Approx(1.0 - p).epsilon(1e-8));
    }
  }
}

TEST_CASE("size-biased view") {
  SUBCASE("Pareto index drops by one") {
    const auto v = size_biased(DistributionSpec::pareto(2.0, 1.0));
    const auto& eq = std::get<Pareto>(v.equivalent().params());
    CHECK(eq.alpha == doctest::Approx(1.0));
    CHECK(eq.n_min == 1.0);
    CHECK(v.normalizer() == doctest::Approx(2.0));
  }
  SUBCASE("lognormal location shifts by sigma squared") {
    const auto v = size_biased(DistributionSpec::lognormal(1.0, 0.8));
    const auto& eq = std::get<Lognormal>(v.equivalent().params());
    CHECK(eq.mu_log == doctest::Approx(1.64));
    CHECK(eq.sigma == doctest::Approx(0.8));
  }
  SUBCASE("mixture weights tilt by component means") {
    const Lognormal a{0.0, 1.0}, b{3.0, 0.5};
    const auto v = size_biased(DistributionSpec::bimodal(0.9, a, b));
    const auto& eq = std::get<BimodalLognormal>(v.equivalent().params());
    const double ma = std::exp(0.5), mb = std::exp(3.125);
    CHECK(eq.weight == doctest::Approx(0.9 * ma / (0.9 * ma + 0.1 * mb)));
    CHECK(eq.first.mu_log == doctest::Approx(1.0));
    CHECK(eq.second.mu_log == doctest::Approx(3.25));
  }
  SUBCASE("density is n pdf / mean and agrees with the family member") {
    for (const auto& d : zoo()) {
      if (d.family() == Family::Pareto && std::get<Pareto>(d.params()).alpha <= 1.0) continue;
      CAPTURE(d.family_name());
      const auto v = size_biased(d);
      for (double p : {0.05, 0.3, 0.5, 0.8, 0.97}) {
        const double x = v.quantile(p);
        CHECK(v.density(x) == doctest::Approx(x * pdf(d, x) / mean(d)).epsilon(1e-10));
        CHECK(v.density(x) == doctest::Approx(pdf(v.equivalent(), x)).epsilon(1e-10));
        CHECK(v.cdf(x) == doctest::Approx(p).epsilon(1e-9));
        CHECK(v.sf(x) == doctest::Approx(1.0 - p).epsilon(1e-8));
      }
      // Independent oracle: integrate n pdf(n) / mean numerically.
      const double x = v.quantile(0.6);
      const double lo = std::max(support_lower(d), quantile(d, 1e-12));
      const auto numeric = quad::integrate([&](double n) { return n * pdf(d, n); }, lo, x, {1e-14, 1e-12});
      CHECK(numeric.value / mean(d) == doctest::Approx(0.6).epsilon(1e-7));
    }
  }
}

TEST_CASE("group and individual medians") {
  const auto p = DistributionSpec::pareto(2.0, 1.0);
  CHECK(median_group(p) == doctest::Approx(std::sqrt(2.0)));
  CHECK(median_individual(p) == doctest::Approx(2.0));

  // Pareto{alpha, n_min}: M_I = n_min 2^(1/(alpha-1)).
  const auto q = DistributionSpec::pareto(1.25, 10.0);
  CHECK(median_individual(q) == doctest::Approx(10.0 * std::pow(2.0, 4.0)));

  const auto l = DistributionSpec::lognormal(2.0, 1.5);
  CHECK(median_group(l) == doctest::Approx(std::exp(2.0)));
  CHECK(median_individual(l) == doctest::Approx(std::exp(2.0 + 2.25)));

  for (const auto& d : zoo()) {
    if (d.family() == Family::Pareto && std::get<Pareto>(d.params()).alpha <= 1.0) continue;
    CHECK(median_individual(d) > median_group(d));
  }
}

TEST_CASE("sampling") {
  const auto p = DistributionSpec::pareto(2.0, 1.0);
  auto draws = sample(p, 7, 1'000'000);
  std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
  const double med = draws[draws.size() / 2];
  CHECK(med >= 1.405);
  CHECK(med <= 1.425);

  CHECK(sample(p, 11, 100) == sample(p, 11, 100));
  CHECK(sample(p, 11, 100) != sample(p, 12, 100));
  for (double x : sample(p, 3, 10000)) CHECK(x >= 1.0);

  // Mixture component shares follow the weight.
  const auto m = DistributionSpec::bimodal(0.3, {0.0, 0.1}, {10.0, 0.1});
  const auto xs = sample(m, 5, 200000);
  const auto small = std::count_if(xs.begin(), xs.end(), [](double x) { return x < 100.0; });
  const double share = static_cast<double>(small) / static_cast<double>(xs.size());
  CHECK(std::abs(share - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / 200000.0));
}
