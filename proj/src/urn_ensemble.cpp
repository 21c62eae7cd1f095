#include "doomsday/urn_ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "doomsday/error.hpp"

namespace doomsday {
namespace {

void require_rank(std::uint64_t r) {
  if (r < 1) throw InvalidParameter("rank must be at least 1");
}

Rational as_rational(std::uint64_t v) {
  if (v > static_cast<std::uint64_t>(INT64_MAX)) throw InvalidParameter("count exceeds 2^63");
  return Rational(static_cast<std::int64_t>(v));
}

}  // namespace

UrnEnsemble::UrnEnsemble(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw InvalidParameter("ensemble needs at least one urn");
  for (std::uint64_t c : counts_) {
    if (c > UINT64_MAX - total_) throw InvalidParameter("ensemble total overflows");
    total_ += c;
  }
  if (total_ < 1) throw InvalidParameter("ensemble needs at least one ball");
}

std::uint64_t UrnEnsemble::largest() const noexcept {
  return *std::max_element(counts_.begin(), counts_.end());
}

std::uint64_t UrnEnsemble::urns_at_least(std::uint64_t r) const noexcept {
  return static_cast<std::uint64_t>(
      std::count_if(counts_.begin(), counts_.end(), [r](std::uint64_t c) { return c >= r; }));
}

UrnEnsemble UrnEnsemble::replicated(std::size_t copies) const {
  if (copies < 1) throw InvalidParameter("replication needs at least one copy");
  std::vector<std::uint64_t> out;
  out.reserve(counts_.size() * copies);
  for (std::size_t k = 0; k < copies; ++k) out.insert(out.end(), counts_.begin(), counts_.end());
  return UrnEnsemble(std::move(out));
}

Rational rank_likelihood(const UrnEnsemble& ensemble, std::uint64_t r) {
  require_rank(r);
  return as_rational(ensemble.urns_at_least(r)) / as_rational(ensemble.total());
}

std::vector<Rational> candidate_posterior(std::span<const EnsembleCandidate> candidates, std::uint64_t r) {
  if (candidates.empty()) throw InvalidParameter("need at least one candidate");
  std::vector<Rational> joint;
  joint.reserve(candidates.size());
  Rational evidence{0};
  for (const auto& c : candidates) {
    if (c.prior_weight < Rational{0}) throw InvalidParameter("prior weights must be nonnegative");
    joint.push_back(c.prior_weight * rank_likelihood(c.ensemble, r));
    evidence += joint.back();
  }
  if (evidence.is_zero())
    throw ImpossibleObservation("no candidate holds a ball labelled " + std::to_string(r));
  for (auto& j : joint) j = j / evidence;
  return joint;
}

std::map<std::uint64_t, Rational> source_urn_posterior(std::span<const EnsembleCandidate> candidates,
                                                       std::uint64_t r) {
  const std::vector<Rational> weights = candidate_posterior(candidates, r);
  std::map<std::uint64_t, Rational> out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (weights[k].is_zero()) continue;
    const UrnEnsemble& e = candidates[k].ensemble;
    const Rational m_r = as_rational(e.urns_at_least(r));
    // Within candidate k, each urn of size N >= r owns exactly one r-ball.
    std::map<std::uint64_t, std::uint64_t> sizes;
    for (std::uint64_t c : e.counts())
      if (c >= r) ++sizes[c];
    for (const auto& [size, n] : sizes) out[size] += weights[k] * as_rational(n) / m_r;
  }
  return out;
}

std::vector<ScanPoint> uniform_ensemble_scan(std::uint64_t total, std::uint64_t r,
                                             std::span<const std::uint64_t> mean_sizes) {
  require_rank(r);
  if (total < 1) throw InvalidParameter("scan needs at least one ball");
  std::vector<ScanPoint> out;
  out.reserve(mean_sizes.size());
  Rational best{0};
  for (std::uint64_t mu : mean_sizes) {
    if (mu < 1 || mu > total) throw InvalidParameter("mean size must lie in [1, total]");
    ScanPoint p;
    p.mean_size = mu;
    p.urns = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(static_cast<double>(total) / static_cast<double>(mu))));
    // k urns of mu balls each: m_r = k when mu >= r, so m_r / N_U = 1 / mu.
    p.likelihood = mu >= r ? Rational(1, static_cast<std::int64_t>(mu)) : Rational(0);
    best = std::max(best, p.likelihood);
    out.push_back(p);
  }
  for (auto& p : out) p.relative = best.is_zero() ? Rational(0) : p.likelihood / best;
  return out;
}

double nu_insensitivity_check(std::span<const std::uint64_t> totals, std::uint64_t r,
                              std::span<const double> mean_over_rank) {
  require_rank(r);
  if (totals.empty()) throw InvalidParameter("need at least one total");
  std::vector<std::vector<double>> scans;
  for (std::uint64_t total : totals) {
    if (total < 100 * r) throw PreconditionError("ball total must be at least 100 r");
    std::vector<std::uint64_t> grid;
    for (double m : mean_over_rank) {
      const auto mu = static_cast<std::uint64_t>(std::llround(m * static_cast<double>(r)));
      grid.push_back(std::clamp<std::uint64_t>(mu, 1, total));
    }
    const auto scan = uniform_ensemble_scan(total, r, grid);
    Rational norm{0};
    for (const auto& p : scan) norm += p.relative;
    std::vector<double> posterior;
    for (const auto& p : scan) posterior.push_back(norm.is_zero() ? 0.0 : (p.relative / norm).to_double());
    scans.push_back(std::move(posterior));
  }
  double worst = 0.0;
  for (const auto& s : scans)
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] - scans.front()[i]));
  return worst;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

MonteCarloResult monte_carlo_oracle(std::span<const EnsembleCandidate> candidates, std::uint64_t r,
                                    std::uint64_t seed, std::uint64_t trials, unsigned workers) {
  require_rank(r);
  if (candidates.empty()) throw InvalidParameter("need at least one candidate");
  if (trials < 1) throw InvalidParameter("need at least one trial");

  std::vector<double> prior_cdf;
  double acc = 0.0;
  for (const auto& c : candidates) {
    acc += c.prior_weight.to_double();
    prior_cdf.push_back(acc);
  }
  if (!(acc > 0.0)) throw InvalidParameter("prior weights sum to zero");

  std::vector<std::vector<std::uint64_t>> prefix;
  for (const auto& c : candidates) {
    std::vector<std::uint64_t> p(c.ensemble.urns());
    std::inclusive_scan(c.ensemble.counts().begin(), c.ensemble.counts().end(), p.begin());
    prefix.push_back(std::move(p));
  }

  const std::uint64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::vector<std::uint64_t>> chunk_counts(chunks, std::vector<std::uint64_t>(candidates.size()));

  auto run_chunk = [&](std::uint64_t chunk) {
    std::mt19937_64 rng(splitmix64(seed + chunk));
    const std::uint64_t begin = chunk * kMonteCarloChunk;
    const std::uint64_t n = std::min(kMonteCarloChunk, trials - begin);
    auto& counts = chunk_counts[chunk];
    for (std::uint64_t t = 0; t < n; ++t) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
      const std::size_t k = std::min<std::size_t>(
          std::upper_bound(prior_cdf.begin(), prior_cdf.end(), u) - prior_cdf.begin(), candidates.size() - 1);
      const std::uint64_t total = candidates[k].ensemble.total();
      // Unbiased uniform ball index in [0, total).
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % total;
      std::uint64_t x;
      do x = rng();
      while (x >= limit);
      const std::uint64_t ball = x % total;
      const auto& p = prefix[k];
      const std::size_t urn = std::upper_bound(p.begin(), p.end(), ball) - p.begin();
      const std::uint64_t start = urn == 0 ? 0 : p[urn - 1];
      if (ball - start + 1 == r) ++counts[k];
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (n_workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += n_workers) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  MonteCarloResult result;
  result.trials = trials;
  result.accepted_per_candidate.assign(candidates.size(), 0);
  for (const auto& counts : chunk_counts)
    for (std::size_t k = 0; k < counts.size(); ++k) result.accepted_per_candidate[k] += counts[k];
  for (std::uint64_t a : result.accepted_per_candidate) result.accepted += a;
  if (result.accepted == 0)
    throw InsufficientSamples("no trial produced a ball labelled " + std::to_string(r));
  for (std::uint64_t a : result.accepted_per_candidate)
    result.posterior.push_back(static_cast<double>(a) / static_cast<double>(result.accepted));
  return result;
}

UrnEnsemble read_ensemble(std::istream& in) {
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view field(line.data() + first, last - first + 1);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw ParseError("expected a nonnegative integer urn count, got '" + std::string(field) + "'", line_no);
    counts.push_back(v);
  }
  if (counts.empty()) throw ParseError("no urn counts found", line_no);
  return UrnEnsemble(std::move(counts));
}

void write_ensemble(std::ostream& out, const UrnEnsemble& ensemble) {
  for (std::uint64_t c : ensemble.counts()) out << c << '\n';
}

}  // namespace doomsday
