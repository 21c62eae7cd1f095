#pragma once

#include <cstddef>
#include <vector>

#include "doomsday/distributions.hpp"

namespace doomsday::fermi {

inline constexpr double kDefaultTarget = 7e9;
inline constexpr double kDefaultParetoNmin = 4000.0;
inline constexpr double kDefaultLognormalSigma = 3.7;

/// Two lognormal components: a populous "small" one and a rare "large" one
/// whose median is `separation` times larger. Both share a common shift
/// that the calibration solves for.
struct BimodalShape {
  double weight_small = 0.99;
  double sigma_small = 1.5;
  double sigma_large = 1.5;
  double separation = 1e4;
};

/// Solves median_individual(Pareto{alpha, n_min}) = target for alpha in
/// (1, 20] by bisection.
DistributionSpec calibrate_pareto(double n_min = kDefaultParetoNmin, double target = kDefaultTarget);

/// mu_log = ln(target) - sigma^2: the size-biased lognormal has median
/// exp(mu_log + sigma^2).
DistributionSpec calibrate_lognormal(double sigma = kDefaultLognormalSigma, double target = kDefaultTarget);

DistributionSpec calibrate_bimodal(const BimodalShape& shape = {}, double target = kDefaultTarget);

struct ModelReport {
  DistributionSpec spec;
  double m_group = 0.0;
  double m_individual = 0.0;
  double frac_exceeding = 0.0;  ///< share of groups larger than m_individual
};

ModelReport report(const DistributionSpec& spec);

/// True and size-biased densities on a log grid, with the mass each curve
/// carries outside the grid.
struct Curves {
  std::vector<double> n;
  std::vector<double> pdf_true;
  std::vector<double> pdf_size_biased;
  double m_group = 0.0;
  double m_individual = 0.0;
  double true_outside_mass = 0.0;
  double biased_outside_mass = 0.0;
};

Curves curves(const DistributionSpec& spec, std::size_t points = 512);

}  // namespace doomsday::fermi
