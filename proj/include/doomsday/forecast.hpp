#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "doomsday/posterior_engine.hpp"

namespace doomsday {

/// Constant number of births per calendar year, counted from `epoch`.
struct BirthRateModel {
  double rate = 1.4e8;
  double epoch = 2016.0;

  void validate() const;
};

struct YearRange {
  double first = 2016.0;
  double last = 3016.0;
  double step = 1.0;

  std::vector<double> years() const;
};

/// Extinction probability by calendar year. `hazard` is the instantaneous
/// annual rate (dP/dt) / (1 - P).
struct ForecastCurve {
  double epoch = 2016.0;
  std::vector<double> years;
  std::vector<double> p_extinct;
  std::vector<double> hazard;
};

/// Future births accumulated between the epoch and `year`. Throws for years
/// before the epoch.
double births_to_year(const BirthRateModel& model, double year);

/// P(extinct by t) = CDF_B(births_to_year(t)); hazard by centered differences.
ForecastCurve extinction_curve(const TabulatedPosterior& births_posterior, const BirthRateModel& model,
                               const YearRange& range);

/// P(t) = 1 - (1 - h)^(t - epoch).
ForecastCurve constant_hazard_curve(double annual_probability, const BirthRateModel& model, const YearRange& range);

/// The constant-hazard model on the births axis via the constant birth rate.
double constant_hazard_births_cdf(double annual_probability, const BirthRateModel& model, double births);
double constant_hazard_births_density(double annual_probability, const BirthRateModel& model, double births);

struct Milestones {
  std::vector<std::pair<double, double>> p_at;  ///< (year, probability)
  std::optional<double> median_year;            ///< empty when the curve never reaches 0.5
};

/// Linear interpolation of p_extinct at the requested years, plus the year at
/// which p_extinct first reaches 0.5.
Milestones milestones(const ForecastCurve& curve, std::span<const double> years);

/// Least-squares constant annual probability h for 1 - (1 - h)^(t - epoch)
/// against the curve samples with first <= t <= last.
double hazard_fit_window(const ForecastCurve& curve, double first, double last);

}  // namespace doomsday
