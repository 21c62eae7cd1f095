#include "doomsday/fermi.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "doomsday/error.hpp"

namespace doomsday::fermi {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kTargetTolerance = 1e-6;

// Bisection on an increasing function of x; returns x with f(x) ~ 0.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw NoRoot("calibration target is not bracketed");
  for (int i = 0; i < kMaxIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void check_target(double achieved, double target) {
  if (std::abs(achieved / target - 1.0) > kTargetTolerance)
    throw NoRoot("calibration did not converge: reached " + std::to_string(achieved));
}

}  // namespace

DistributionSpec calibrate_pareto(double n_min, double target) {
  if (!(n_min > 0.0)) throw InvalidParameter("n_min must be positive");
  if (!(target > n_min)) throw InvalidParameter("target must exceed n_min");
  const double log_target = std::log(target);
  // M_I falls as alpha grows, so negate to get an increasing function.
  auto f = [&](double alpha) { return log_target - std::log(median_individual(DistributionSpec::pareto(alpha, n_min))); };
  const double alpha_lo = 1.0 + 1e-9;
  const double alpha_hi = 20.0;
  if (f(alpha_hi) < 0.0) throw NoRoot("no Pareto index in (1, 20] reaches the target");
  const double alpha = bisect_increasing(f, alpha_lo, alpha_hi);
  DistributionSpec spec = DistributionSpec::pareto(alpha, n_min);
  check_target(median_individual(spec), target);
  return spec;
}

DistributionSpec calibrate_lognormal(double sigma, double target) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (!(target > 0.0)) throw InvalidParameter("target must be positive");
  DistributionSpec spec = DistributionSpec::lognormal(std::log(target) - sigma * sigma, sigma);
  check_target(median_individual(spec), target);
  return spec;
}

DistributionSpec calibrate_bimodal(const BimodalShape& shape, double target) {
  if (!(target > 0.0)) throw InvalidParameter("target must be positive");
  if (!(shape.separation > 0.0)) throw InvalidParameter("component separation must be positive");
  const double gap = std::log(shape.separation);
  auto build = [&](double shift) {
    return DistributionSpec::bimodal(shape.weight_small, Lognormal{shift, shape.sigma_small},
                                     Lognormal{shift + gap, shape.sigma_large});
  };
  // Validate the shape before searching.
  (void)build(0.0);
  const double log_target = std::log(target);
  auto f = [&](double shift) { return std::log(median_individual(build(shift))) - log_target; };
  const double span = 50.0 + 10.0 * (shape.sigma_small + shape.sigma_large) + std::abs(gap);
  const double shift = bisect_increasing(f, log_target - span, log_target + span);
  DistributionSpec spec = build(shift);
  check_target(median_individual(spec), target);
  return spec;
}

ModelReport report(const DistributionSpec& spec) {
  ModelReport r{spec};
  r.m_group = median_group(spec);
  r.m_individual = median_individual(spec);
  r.frac_exceeding = sf(spec, r.m_individual);
  return r;
}

Curves curves(const DistributionSpec& spec, std::size_t points) {
  if (points < 3) throw InvalidParameter("curves need at least 3 points");
  const SizeBiasedView view = size_biased(spec);
  Curves c;
  c.m_group = median_group(spec);
  c.m_individual = view.quantile(0.5);

  const double lo = std::max(support_lower(spec), quantile(spec, 1e-6));
  const double hi = view.quantile(1.0 - 1e-4);
  const double h = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double n = (i == 0) ? lo : lo * std::exp(h * static_cast<double>(i));
    c.n.push_back(n);
    c.pdf_true.push_back(pdf(spec, n));
    c.pdf_size_biased.push_back(view.density(n));
  }
  c.true_outside_mass = cdf(spec, lo) + sf(spec, c.n.back());
  c.biased_outside_mass = view.cdf(lo) + view.sf(c.n.back());
  return c;
}

}  // namespace doomsday::fermi
