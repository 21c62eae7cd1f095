#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "doomsday/rational.hpp"

namespace doomsday {

// ---------------------------------------------------------------------------
// Rank priors
// ---------------------------------------------------------------------------

struct ExactRank {
  double r = 1.0;
};

/// Density proportional to 1/r on [lo, hi].
struct LogUniformRank {
  double lo = 1.0;
  double hi = 2.0;
};

class RankPrior {
 public:
  using Params = std::variant<ExactRank, LogUniformRank>;

  static RankPrior exact(double r);
  static RankPrior log_uniform(double lo, double hi);
  /// Log-uniform on [r0 / factor, r0 * factor].
  static RankPrior around(double r0, double factor = 3.0);

  const Params& params() const noexcept { return params_; }
  bool is_exact() const noexcept { return std::holds_alternative<ExactRank>(params_); }
  double density(double r) const;
  /// Smallest and largest rank with positive prior density.
  double lower() const;
  double upper() const;

  struct Node {
    double rank;
    double weight;
  };
  /// Quadrature nodes in ln r (Gauss-Legendre), weights summing to 1. An
  /// exact rank yields a single node of weight 1.
  std::vector<Node> nodes(std::size_t count = kDefaultRankNodes) const;

  static constexpr std::size_t kDefaultRankNodes = 256;

 private:
  explicit RankPrior(Params p) : params_(p) {}
  Params params_;
};

// ---------------------------------------------------------------------------
// Tabulated posterior
// ---------------------------------------------------------------------------

/// Log-spaced grid, anchored so that `anchor` is a node.
struct GridSpec {
  std::size_t points = 4096;
  double decades_below = 1.0;
  double decades_above = 6.0;
};

/// Density and CDF sampled on a strictly increasing log-spaced grid. Mass
/// below the first node and above the last node is carried analytically in
/// `lower_mass` and `upper_mass`, so cdf[i] = P(X <= grid[i]) and
/// lower_mass + (cdf.back() - cdf.front()) + upper_mass = 1.
class TabulatedPosterior {
 public:
  struct ClosedForm {
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
  };

  TabulatedPosterior(std::vector<double> grid, std::vector<double> density, std::vector<double> cdf,
                     double lower_mass, double upper_mass, double support_min,
                     std::optional<ClosedForm> closed_form = std::nullopt);

  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> density() const noexcept { return density_; }
  std::span<const double> cdf() const noexcept { return cdf_; }
  double lower_mass() const noexcept { return lower_mass_; }
  double upper_mass() const noexcept { return upper_mass_; }
  double support_min() const noexcept { return support_min_; }
  bool has_closed_form() const noexcept { return closed_form_.has_value(); }

  /// Log-log interpolation between nodes; 0 outside the support.
  double density_at(double x) const;
  double cdf_at(double x) const;
  double quantile(double p) const;
  double median() const { return quantile(0.5); }

  /// Total mass: Simpson's rule on the log axis from the support start,
  /// plus the analytic mass outside the grid.
  double quadrature_mass() const;
  /// Total mass by the log-axis trapezoid rule, plus the outside mass.
  double trapezoid_mass() const;
  /// Largest disagreement between cdf increments and Simpson integrals of
  /// the density over pairs of panels.
  double max_cdf_inconsistency() const;

 private:
  std::size_t support_index() const;

  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cdf_;
  double lower_mass_;
  double upper_mass_;
  double support_min_;
  std::optional<ClosedForm> closed_form_;
};

/// Log-spaced grid with `anchor` as an exact node.
std::vector<double> make_log_grid(double anchor, const GridSpec& spec);

// ---------------------------------------------------------------------------
// Parameter priors over the Pareto family
// ---------------------------------------------------------------------------

struct UniformAlpha {
  double lo = 1.0;
  double hi = 3.0;
};
/// rate * exp(-rate * (alpha - 1)) on (1, inf).
struct ExponentialAlpha {
  double rate = 1.0;
};
struct PointAlpha {
  double alpha = 2.0;
};
struct CustomAlpha {
  std::function<double(double)> density;
  double lo = 1.0;
  double hi = 20.0;
  std::string name = "custom";
};

class AlphaPrior {
 public:
  using Params = std::variant<UniformAlpha, ExponentialAlpha, PointAlpha, CustomAlpha>;

  /// Validates properness; improper or empty priors throw InvalidParameter.
  AlphaPrior(Params p);

  const Params& params() const noexcept { return params_; }
  std::string describe() const;

 private:
  Params params_;
};

/// pi(N_min) proportional to 1/N_min on [lo, hi].
struct JeffreysNmin {
  double lo = 1e-300;
  double hi = 0.0;  ///< 0 means: the top of the evaluation grid
};
struct PointNmin {
  double n_min = 1.0;
};

struct ParameterPrior {
  AlphaPrior alpha{UniformAlpha{}};
  std::variant<JeffreysNmin, PointNmin> n_min{JeffreysNmin{}};
};

struct MarginalizationOptions {
  /// Upper end of the alpha integration, alpha in (1, alpha_max].
  double alpha_max = 20.0;
  /// Smallest alpha - 1 resolved by the log-spaced beta rule.
  double beta_min = 1e-10;
  std::size_t alpha_panels = 32;
  std::size_t nodes_per_panel = 8;
  unsigned workers = 1;
};

/// p(N | r) proportional to the integral of p(N | alpha, N_min) / mean * prior
/// over the Pareto parameters, zero below the continuity-corrected rank r - 1/2.
TabulatedPosterior general_posterior(const ParameterPrior& prior, double r, const GridSpec& grid = {},
                                     const MarginalizationOptions& options = {});

/// p(N | r) = (r - 1/2) / N^2 for N >= r - 1/2.
TabulatedPosterior pareto_closed_form(double r, const GridSpec& grid = {});

/// Same density mixed over a rank prior; reduces to pareto_closed_form for
/// an exact rank. The log-uniform mixture is integrated in closed form.
TabulatedPosterior rank_posterior(const RankPrior& rank, const GridSpec& grid = {});

struct InsensitivityReport {
  double max_pairwise = 0.0;          ///< sup over pairs of posteriors, density * r
  double max_vs_closed_form = 0.0;    ///< sup against (r - 1/2) / N^2, density * r
};

InsensitivityReport prior_insensitivity_check(std::span<const AlphaPrior> priors, double r,
                                              const GridSpec& grid = {},
                                              const MarginalizationOptions& options = {});

/// Future births B = N - r: p(B | r) = r / (B + r)^2, mixed over the rank prior.
TabulatedPosterior future_count_posterior(const RankPrior& rank, const GridSpec& grid = {4096, 4.0, 6.0},
                                          std::size_t rank_nodes = RankPrior::kDefaultRankNodes);

/// Closed-form evaluations of the future-count mixture on its quadrature nodes.
double future_count_density(const RankPrior& rank, double births,
                            std::size_t rank_nodes = RankPrior::kDefaultRankNodes);
double future_count_cdf(const RankPrior& rank, double births,
                        std::size_t rank_nodes = RankPrior::kDefaultRankNodes);

/// Observer-weighted 1/N prior truncated at n_max: share of the mass in
/// [n_max / 100, n_max].
double sia_truncation_demo(double n_max);

/// N_hat = 2 r - 1.
std::uint64_t frequentist_estimate(std::uint64_t r);

/// Sum over r = 1..n of (2 r - 1) / n, exactly.
Rational unbiasedness_check(std::uint64_t n);

/// Fraction of ranks r in 1..n whose q-credible upper bound (r - 1/2) / (1 - q)
/// reaches n.
double coverage_check(std::uint64_t n, double q);

}  // namespace doomsday
