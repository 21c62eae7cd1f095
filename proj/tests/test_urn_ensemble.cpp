#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doomsday/error.hpp"
#include "doomsday/urn_ensemble.hpp"

using namespace doomsday;

namespace {

// Lists every ball label in the ensemble and counts the r's directly.
Rational enumerated_likelihood(const UrnEnsemble& e, std::uint64_t r) {
  std::vector<std::uint64_t> balls;
  for (std::uint64_t c : e.counts())
    for (std::uint64_t label = 1; label <= c; ++label) balls.push_back(label);
  std::int64_t hits = 0;
  for (std::uint64_t b : balls) hits += b == r;
  return Rational(hits, static_cast<std::int64_t>(balls.size()));
}

UrnEnsemble fixture(const char* name) {
  std::ifstream in(std::string(DOOMSDAY_TEST_DATA_DIR) + "/urns/" + name);
  REQUIRE(in);
  return read_ensemble(in);
}

std::vector<EnsembleCandidate> fig2() {
  return {{fixture("fig2_a.txt"), Rational{1}, "a"},
          {fixture("fig2_b.txt"), Rational{1}, "b"},
          {fixture("fig2_c.txt"), Rational{1}, "c"}};
}

}  // namespace

TEST_CASE("ensemble bookkeeping") {
  const UrnEnsemble e({3, 1, 4, 1, 5});
  CHECK(e.urns() == 5);
  CHECK(e.total() == 14);
  CHECK(e.largest() == 5);
  CHECK(e.urns_at_least(1) == 5);
  CHECK(e.urns_at_least(2) == 3);
  CHECK(e.urns_at_least(5) == 1);
  CHECK(e.urns_at_least(6) == 0);
  const auto twice = e.replicated(2);
  CHECK(twice.urns() == 10);
  CHECK(twice.total() == 28);
  CHECK_THROWS_AS(UrnEnsemble({}), InvalidParameter);
  CHECK_THROWS_AS(UrnEnsemble({0, 0}), InvalidParameter);
  CHECK_THROWS_AS(e.replicated(0), InvalidParameter);
}

TEST_CASE("rank likelihood matches ball enumeration") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> size(1, 12), urns(1, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> counts(urns(rng));
    for (auto& c : counts) c = size(rng);
    const UrnEnsemble e(counts);
    for (std::uint64_t r = 1; r <= 13; ++r) CHECK(rank_likelihood(e, r) == enumerated_likelihood(e, r));
  }
  CHECK_THROWS_AS(rank_likelihood(UrnEnsemble({2}), 0), InvalidParameter);
}

TEST_CASE("bundled ensembles give odds of five to one") {
  const auto cands = fig2();
  REQUIRE(cands[0].ensemble.total() == 20);
  REQUIRE(cands[1].ensemble.total() == 20);
  REQUIRE(cands[2].ensemble.total() == 20);
  const auto post = candidate_posterior(cands, 3);
  CHECK(post[0] == Rational(0));
  CHECK(post[1] == Rational(5, 6));
  CHECK(post[2] == Rational(1, 6));
  CHECK(post[1] / post[2] == Rational(5));

  const auto source = source_urn_posterior(cands, 3);
  REQUIRE(source.size() == 2);
  CHECK(source.at(3) == Rational(5, 6));
  CHECK(source.at(11) == Rational(1, 6));
}

TEST_CASE("candidate posterior follows Bayes on enumerated joint counts") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> size(1, 8), urns(1, 6), weight(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EnsembleCandidate> cands;
    for (int k = 0; k < 4; ++k) {
      std::vector<std::uint64_t> counts(urns(rng));
      for (auto& c : counts) c = size(rng);
      cands.push_back({UrnEnsemble(counts), Rational(static_cast<std::int64_t>(weight(rng))), ""});
    }
    const std::uint64_t r = 1 + trial % 4;
    Rational evidence{0};
    std::vector<Rational> joint;
    for (const auto& c : cands) {
      joint.push_back(c.prior_weight * enumerated_likelihood(c.ensemble, r));
      evidence += joint.back();
    }
    if (evidence.is_zero()) {
      CHECK_THROWS_AS(candidate_posterior(cands, r), ImpossibleObservation);
      continue;
    }
    const auto post = candidate_posterior(cands, r);
    Rational total{0};
    for (std::size_t k = 0; k < cands.size(); ++k) {
      CHECK(post[k] == joint[k] / evidence);
      total += post[k];
    }
    CHECK(total == Rational(1));
  }
}

TEST_CASE("impossible observations") {
  std::vector<EnsembleCandidate> cands{{UrnEnsemble({2, 2}), Rational{1}, ""}};
  CHECK_THROWS_AS(candidate_posterior(cands, 3), ImpossibleObservation);
  CHECK_THROWS_AS(monte_carlo_oracle(cands, 3, 1, 1000), InsufficientSamples);
  CHECK_THROWS_AS(candidate_posterior(std::vector<EnsembleCandidate>{}, 1), InvalidParameter);
}

TEST_CASE("uniform scan falls as one over the mean size") {
  std::vector<std::uint64_t> mus;
  for (std::uint64_t m = 1; m <= 60; ++m) mus.push_back(m);
  const auto scan = uniform_ensemble_scan(1'000'000, 20, mus);
  for (const auto& p : scan) {
    CAPTURE(p.mean_size);
    if (p.mean_size < 20) {
      CHECK(p.likelihood.is_zero());
    } else {
      CHECK(p.likelihood == Rational(1, static_cast<std::int64_t>(p.mean_size)));
      CHECK(p.relative == Rational(20, static_cast<std::int64_t>(p.mean_size)));
    }
  }
  // Direct construction of a divisible case agrees with enumeration.
  const UrnEnsemble built(std::vector<std::uint64_t>(50, 40));
  CHECK(rank_likelihood(built, 20) == Rational(1, 40));

  const std::uint64_t bad[] = {0};
  CHECK_THROWS_AS(uniform_ensemble_scan(100, 2, bad), InvalidParameter);
}

TEST_CASE("scan does not depend on the ball total once it dwarfs the rank") {
  const std::uint64_t totals[] = {2000, 10'000, 1'000'000};
  const double grid[] = {0.5, 1.0, 1.5, 2.0, 4.0, 8.0};
  CHECK(nu_insensitivity_check(totals, 20, grid) == 0.0);
  const std::uint64_t too_small[] = {1999};
  CHECK_THROWS_AS(nu_insensitivity_check(too_small, 20, grid), PreconditionError);
}

TEST_CASE("Monte Carlo oracle") {
  const auto cands = fig2();
  const auto mc = monte_carlo_oracle(cands, 3, 42, 400'000);
  CHECK(mc.trials == 400'000);
  CHECK(mc.accepted_per_candidate[0] == 0);
  const double n = static_cast<double>(mc.accepted);
  // Each trial accepts with probability (1/4 + 1/20) / 3 = 1/10.
  CHECK(std::abs(n / 400'000.0 - 0.1) < 4.0 * std::sqrt(0.09 / 400'000.0));
  const double sigma = std::sqrt((5.0 / 6.0) * (1.0 / 6.0) / n);
  CHECK(std::abs(mc.posterior[1] - 5.0 / 6.0) < 4.0 * sigma);

  SUBCASE("counts are identical for any worker count") {
    for (unsigned w : {2u, 3u, 8u}) {
      const auto other = monte_carlo_oracle(cands, 3, 42, 400'000, w);
      CHECK(other.accepted_per_candidate == mc.accepted_per_candidate);
    }
  }
  SUBCASE("seed changes the stream") {
    CHECK(monte_carlo_oracle(cands, 3, 43, 400'000).accepted != mc.accepted);
  }
  SUBCASE("prior weights are honoured") {
    auto weighted = cands;
    weighted[2].prior_weight = Rational(5);
    const auto exact = candidate_posterior(weighted, 3);
    CHECK(exact[1] == Rational(1, 2));
    const auto w = monte_carlo_oracle(weighted, 3, 7, 400'000);
    CHECK(std::abs(w.posterior[1] - 0.5) < 4.0 * std::sqrt(0.25 / static_cast<double>(w.accepted)));
  }
}

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference generator seeded with 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64(0x9E3779B97F4A7C15ull) == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("ensemble text format") {
  std::istringstream in("# comment\n3\n\n 1 \n4 # trailing\n");
  const auto e = read_ensemble(in);
  CHECK(e.urns() == 3);
  CHECK(e.total() == 8);
  std::ostringstream out;
  write_ensemble(out, e);
  std::istringstream back(out.str());
  CHECK(read_ensemble(back).total() == 8);

  std::istringstream bad("3\nx\n");
  try {
    read_ensemble(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
  }
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_ensemble(empty), ParseError);
}
