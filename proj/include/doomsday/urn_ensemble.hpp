#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "doomsday/rational.hpp"

namespace doomsday {

/// A finite set of urns; urn i holds balls labelled 1..counts[i].
class UrnEnsemble {
 public:
  explicit UrnEnsemble(std::vector<std::uint64_t> counts);

  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::size_t urns() const noexcept { return counts_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t largest() const noexcept;
  /// m_r: number of urns holding a ball labelled r.
  std::uint64_t urns_at_least(std::uint64_t r) const noexcept;
  /// k copies of every urn.
  UrnEnsemble replicated(std::size_t copies) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct EnsembleCandidate {
  UrnEnsemble ensemble;
  Rational prior_weight{1};
  std::string label;
};

/// Probability that a ball drawn uniformly from every ball in the ensemble
/// carries label r: m_r / N_U.
Rational rank_likelihood(const UrnEnsemble& ensemble, std::uint64_t r);

/// Posterior over candidates, proportional to prior * rank likelihood.
/// Throws ImpossibleObservation when no candidate can produce label r.
std::vector<Rational> candidate_posterior(std::span<const EnsembleCandidate> candidates, std::uint64_t r);

/// Posterior over the population of the urn the drawn ball came from.
std::map<std::uint64_t, Rational> source_urn_posterior(std::span<const EnsembleCandidate> candidates,
                                                       std::uint64_t r);

struct ScanPoint {
  std::uint64_t mean_size = 0;
  std::uint64_t urns = 0;
  Rational likelihood;  ///< 1/mu when mu >= r, else 0
  Rational relative;    ///< likelihood / max over the grid
};

/// Equal-size ensembles of N_U balls split into round(N_U / mu) urns of mu
/// balls each, scored against a single drawn label r.
std::vector<ScanPoint> uniform_ensemble_scan(std::uint64_t total, std::uint64_t r,
                                             std::span<const std::uint64_t> mean_sizes);

/// Runs the uniform scan for each total with mean sizes round(m * r) and
/// returns the largest difference between the normalized scans. Requires
/// total >= 100 r for every total.
double nu_insensitivity_check(std::span<const std::uint64_t> totals, std::uint64_t r,
                              std::span<const double> mean_over_rank);

struct MonteCarloResult {
  std::vector<double> posterior;
  std::vector<std::uint64_t> accepted_per_candidate;
  std::uint64_t accepted = 0;
  std::uint64_t trials = 0;
};

/// Trials are split into fixed chunks of `kMonteCarloChunk`; chunk c draws from
/// mt19937_64(splitmix64(seed + c)). Workers only pick which chunks they run,
/// so the counts are identical for any worker count.
inline constexpr std::uint64_t kMonteCarloChunk = 1u << 16;

MonteCarloResult monte_carlo_oracle(std::span<const EnsembleCandidate> candidates, std::uint64_t r,
                                    std::uint64_t seed, std::uint64_t trials, unsigned workers = 1);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// One urn count per line; blank lines and anything after a "#" are skipped.
UrnEnsemble read_ensemble(std::istream& in);
void write_ensemble(std::ostream& out, const UrnEnsemble& ensemble);

}  // namespace doomsday
