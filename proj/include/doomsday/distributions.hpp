#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace doomsday {

/// Power law with a hard floor: density alpha * n_min^alpha / n^(alpha+1)
/// for n >= n_min. Any alpha > 0 is representable so that size-biased views
/// of heavy-tailed ensembles stay in the family; the mean is finite only for
/// alpha > 1.
struct Pareto {
  double alpha = 2.0;
  double n_min = 1.0;
};

/// ln N ~ Normal(mu_log, sigma^2).
struct Lognormal {
  double mu_log = 0.0;
  double sigma = 1.0;
};

/// weight * first + (1 - weight) * second.
struct BimodalLognormal {
  double weight = 0.5;
  Lognormal first;
  Lognormal second;
};

enum class Family { Pareto, Lognormal, BimodalLognormal };

/// A validated group-size distribution. Parameters are checked once at
/// construction, so every instance in flight is evaluable.
class DistributionSpec {
 public:
  using Params = std::variant<Pareto, Lognormal, BimodalLognormal>;

  static DistributionSpec pareto(double alpha, double n_min);
  static DistributionSpec lognormal(double mu_log, double sigma);
  static DistributionSpec bimodal(double weight, Lognormal first, Lognormal second);
  static DistributionSpec from(const Params& params);

  const Params& params() const noexcept { return params_; }
  Family family() const noexcept { return static_cast<Family>(params_.index()); }
  std::string family_name() const;

 private:
  explicit DistributionSpec(Params p) : params_(p) {}
  Params params_;
};

double pdf(const DistributionSpec& spec, double n);
double cdf(const DistributionSpec& spec, double n);
/// 1 - cdf, computed without cancellation in the far tail.
double sf(const DistributionSpec& spec, double n);
double quantile(const DistributionSpec& spec, double p);
/// Throws InfiniteMean for Pareto with alpha <= 1.
double mean(const DistributionSpec& spec);
/// Smallest population with positive density (0 for lognormal families).
double support_lower(const DistributionSpec& spec);

/// The distribution of group sizes as seen by a uniformly chosen member:
/// density(n) = n * pdf(n) / mean.
class SizeBiasedView {
 public:
  const DistributionSpec& base() const noexcept { return base_; }
  double normalizer() const noexcept { return normalizer_; }

  double density(double n) const;
  double cdf(double n) const;
  double sf(double n) const;
  double quantile(double p) const;

  /// The same law written as a member of the family: Pareto index drops by
  /// one, lognormal location shifts by sigma^2, mixture weights tilt by
  /// component means.
  const DistributionSpec& equivalent() const noexcept { return equivalent_; }

 private:
  friend SizeBiasedView size_biased(const DistributionSpec& spec);
  SizeBiasedView(DistributionSpec base, double normalizer, DistributionSpec equivalent)
      : base_(base), normalizer_(normalizer), equivalent_(equivalent) {}

  DistributionSpec base_;
  double normalizer_;
  DistributionSpec equivalent_;
};

SizeBiasedView size_biased(const DistributionSpec& spec);

/// M_G: median over groups.
double median_group(const DistributionSpec& spec);
/// M_I: median of the size-biased view, the group of the median member.
double median_individual(const DistributionSpec& spec);

/// Inverse-CDF draws from a mt19937_64 stream seeded with `seed`.
std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t count);

/// Standard normal helpers shared by the lognormal families.
double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);

}  // namespace doomsday
