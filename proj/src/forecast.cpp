#include "doomsday/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "doomsday/error.hpp"

namespace doomsday {
namespace {

ForecastCurve curve_from(const std::function<double(double)>& p_of_year, const BirthRateModel& model,
                         const YearRange& range) {
  ForecastCurve curve;
  curve.epoch = model.epoch;
  curve.years = range.years();
  const double d = range.step;
  for (double t : curve.years) {
    const double p = p_of_year(t);
    curve.p_extinct.push_back(p);
    // Centered where both neighbours lie after the epoch, forward otherwise.
    const double lo = (t - d >= model.epoch) ? t - d : t;
    const double hi = t + d;
    const double slope = (p_of_year(hi) - p_of_year(lo)) / (hi - lo);
    curve.hazard.push_back(p < 1.0 ? std::max(0.0, slope) / (1.0 - p) : 0.0);
  }
  return curve;
}

void require_probability(double h) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidParameter("annual probability must lie in (0, 1)");
}

}  // namespace

void BirthRateModel::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidParameter("birth rate must be positive");
  if (!std::isfinite(epoch)) throw InvalidParameter("epoch must be finite");
}

std::vector<double> YearRange::years() const {
  if (!(step > 0.0)) throw InvalidParameter("year step must be positive");
  if (!(last >= first)) throw InvalidParameter("year range is empty");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double t = first + static_cast<double>(k) * step;
    if (t > last + 1e-9 * step) break;
    out.push_back(t);
  }
  return out;
}

double births_to_year(const BirthRateModel& model, double year) {
  model.validate();
  if (year < model.epoch) throw InvalidParameter("year precedes the epoch");
  return model.rate * (year - model.epoch);
}

ForecastCurve extinction_curve(const TabulatedPosterior& births_posterior, const BirthRateModel& model,
                               const YearRange& range) {
  model.validate();
  if (range.first < model.epoch) throw InvalidParameter("year range starts before the epoch");
  auto p_of_year = [&](double t) {
    if (t <= model.epoch) return 0.0;
    return std::clamp(births_posterior.cdf_at(model.rate * (t - model.epoch)), 0.0, 1.0);
  };
  return curve_from(p_of_year, model, range);
}

ForecastCurve constant_hazard_curve(double h, const BirthRateModel& model, const YearRange& range) {
  require_probability(h);
  model.validate();
  if (range.first < model.epoch) throw InvalidParameter("year range starts before the epoch");
  const double log_survive = std::log1p(-h);
  ForecastCurve curve;
  curve.epoch = model.epoch;
  curve.years = range.years();
  for (double t : curve.years) {
    curve.p_extinct.push_back(-std::expm1(log_survive * (t - model.epoch)));
    curve.hazard.push_back(-log_survive);
  }
  return curve;
}

double constant_hazard_births_cdf(double h, const BirthRateModel& model, double births) {
  require_probability(h);
  model.validate();
  if (births <= 0.0) return 0.0;
  return -std::expm1(std::log1p(-h) * births / model.rate);
}

double constant_hazard_births_density(double h, const BirthRateModel& model, double births) {
  require_probability(h);
  model.validate();
  if (births < 0.0) return 0.0;
  const double k = -std::log1p(-h) / model.rate;
  return k * std::exp(-k * births);
}

Milestones milestones(const ForecastCurve& curve, std::span<const double> years) {
  if (curve.years.empty()) throw InvalidParameter("empty forecast curve");
  Milestones out;
  const auto& ys = curve.years;
  const auto& ps = curve.p_extinct;
  for (double year : years) {
    if (year < ys.front() || year > ys.back()) throw InvalidParameter("milestone year outside the curve");
    const auto it = std::lower_bound(ys.begin(), ys.end(), year);
    const std::size_t i = static_cast<std::size_t>(it - ys.begin());
    double p = ps[i];
    if (ys[i] != year) {
      const double w = (year - ys[i - 1]) / (ys[i] - ys[i - 1]);
      p = (1.0 - w) * ps[i - 1] + w * ps[i];
    }
    out.p_at.emplace_back(year, p);
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] < 0.5) continue;
    if (i == 0) {
      out.median_year = ys[0];
    } else {
      const double w = (0.5 - ps[i - 1]) / (ps[i] - ps[i - 1]);
      out.median_year = ys[i - 1] + w * (ys[i] - ys[i - 1]);
    }
    break;
  }
  return out;
}

double hazard_fit_window(const ForecastCurve& curve, double first, double last) {
  if (!(last > first)) throw InvalidParameter("hazard window is empty");
  if (curve.years.empty() || first < curve.years.front() - 1e-9 || last > curve.years.back() + 1e-9)
    throw InvalidParameter("hazard window outside the curve");
  std::vector<double> dt, p;
  for (std::size_t i = 0; i < curve.years.size(); ++i) {
    if (curve.years[i] < first - 1e-9 || curve.years[i] > last + 1e-9) continue;
    dt.push_back(curve.years[i] - curve.epoch);
    p.push_back(curve.p_extinct[i]);
  }
  // Derivative of the squared error in h; its root is the least-squares fit.
  auto gradient = [&](double h) {
    double g = 0.0;
    for (std::size_t i = 0; i < dt.size(); ++i) {
      const double survive = std::pow(1.0 - h, dt[i]);
      const double model = 1.0 - survive;
      const double dmodel = dt[i] > 0.0 ? dt[i] * std::pow(1.0 - h, dt[i] - 1.0) : 0.0;
      g += (model - p[i]) * dmodel;
    }
    return g;
  };
  if (gradient(0.0) >= 0.0) return 0.0;
  double lo = 0.0, hi = 0.5;
  while (gradient(hi) < 0.0 && hi < 1.0 - 1e-12) hi = 0.5 * (hi + 1.0);
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gradient(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace doomsday
