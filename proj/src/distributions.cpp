#include "doomsday/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "doomsday/error.hpp"

namespace doomsday {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const Lognormal& p) {
  if (!std::isfinite(p.mu_log)) throw InvalidParameter("lognormal mu_log must be finite");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw InvalidParameter("lognormal sigma must be positive and finite");
}

double lognormal_pdf(const Lognormal& p, double n) {
  if (!(n > 0.0) || std::isinf(n)) return 0.0;
  const double z = (std::log(n) - p.mu_log) / p.sigma;
  return std::exp(-0.5 * z * z) / (n * p.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(const Lognormal& p, double n) {
  if (!(n > 0.0)) return 0.0;
  if (std::isinf(n)) return 1.0;
  return normal_cdf((std::log(n) - p.mu_log) / p.sigma);
}

double lognormal_sf(const Lognormal& p, double n) {
  if (!(n > 0.0)) return 1.0;
  if (std::isinf(n)) return 0.0;
  return normal_sf((std::log(n) - p.mu_log) / p.sigma);
}

double lognormal_quantile(const Lognormal& p, double q) {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return kInf;
  return std::exp(p.mu_log + p.sigma * normal_quantile(q));
}

double lognormal_mean(const Lognormal& p) { return std::exp(p.mu_log + 0.5 * p.sigma * p.sigma); }

// Mixture quantile by bisection on ln n, bracketed by the component quantiles.
double mixture_quantile(const BimodalLognormal& m, double q) {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return kInf;
  double lo = std::log(std::min(lognormal_quantile(m.first, q), lognormal_quantile(m.second, q)));
  double hi = std::log(std::max(lognormal_quantile(m.first, q), lognormal_quantile(m.second, q)));
  const auto mix_cdf = [&](double t) {
    const double n = std::exp(t);
    return m.weight * lognormal_cdf(m.first, n) + (1.0 - m.weight) * lognormal_cdf(m.second, n);
  };
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mix_cdf(mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double uniform_open(std::mt19937_64& rng) {
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

DistributionSpec DistributionSpec::pareto(double alpha, double n_min) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("Pareto alpha must be positive and finite");
  if (!(n_min > 0.0) || !std::isfinite(n_min))
    throw InvalidParameter("Pareto n_min must be positive and finite");
  return DistributionSpec(Pareto{alpha, n_min});
}

DistributionSpec DistributionSpec::lognormal(double mu_log, double sigma) {
  Lognormal p{mu_log, sigma};
  validate(p);
  return DistributionSpec(p);
}

DistributionSpec DistributionSpec::bimodal(double weight, Lognormal first, Lognormal second) {
  if (!(weight > 0.0 && weight < 1.0)) throw InvalidParameter("mixture weight must lie in (0, 1)");
  validate(first);
  validate(second);
  return DistributionSpec(BimodalLognormal{weight, first, second});
}

DistributionSpec DistributionSpec::from(const Params& params) {
  return std::visit(Overloaded{
                        [](const Pareto& p) { return pareto(p.alpha, p.n_min); },
                        [](const Lognormal& p) { return lognormal(p.mu_log, p.sigma); },
                        [](const BimodalLognormal& p) { return bimodal(p.weight, p.first, p.second); },
                    },
                    params);
}

std::string DistributionSpec::family_name() const {
  switch (family()) {
    case Family::Pareto: return "pareto";
    case Family::Lognormal: return "lognormal";
    case Family::BimodalLognormal: return "bimodal";
  }
  return "unknown";
}

double pdf(const DistributionSpec& spec, double n) {
  return std::visit(
      Overloaded{
          [n](const Pareto& p) {
            if (n < p.n_min || std::isinf(n)) return 0.0;
            return p.alpha / p.n_min * std::pow(p.n_min / n, p.alpha + 1.0);
          },
          [n](const Lognormal& p) { return lognormal_pdf(p, n); },
          [n](const BimodalLognormal& m) {
            return m.weight * lognormal_pdf(m.first, n) + (1.0 - m.weight) * lognormal_pdf(m.second, n);
          },
      },
      spec.params());
}

double cdf(const DistributionSpec& spec, double n) {
  return std::visit(
      Overloaded{
          [n](const Pareto& p) {
            if (n <= p.n_min) return 0.0;
            return -std::expm1(p.alpha * std::log(p.n_min / n));
          },
          [n](const Lognormal& p) { return lognormal_cdf(p, n); },
          [n](const BimodalLognormal& m) {
            return m.weight * lognormal_cdf(m.first, n) + (1.0 - m.weight) * lognormal_cdf(m.second, n);
          },
      },
      spec.params());
}

double sf(const DistributionSpec& spec, double n) {
  return std::visit(
      Overloaded{
          [n](const Pareto& p) {
            if (n <= p.n_min) return 1.0;
            return std::pow(p.n_min / n, p.alpha);
          },
          [n](const Lognormal& p) { return lognormal_sf(p, n); },
          [n](const BimodalLognormal& m) {
            return m.weight * lognormal_sf(m.first, n) + (1.0 - m.weight) * lognormal_sf(m.second, n);
          },
      },
      spec.params());
}

double quantile(const DistributionSpec& spec, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile probability must lie in [0, 1]");
  return std::visit(
      Overloaded{
          [q](const Pareto& p) {
            if (q >= 1.0) return kInf;
            return p.n_min * std::exp(-std::log1p(-q) / p.alpha);
          },
          [q](const Lognormal& p) { return lognormal_quantile(p, q); },
          [q](const BimodalLognormal& m) { return mixture_quantile(m, q); },
      },
      spec.params());
}

double mean(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Pareto& p) {
            if (p.alpha <= 1.0) throw InfiniteMean("Pareto mean diverges for alpha <= 1");
            return p.alpha * p.n_min / (p.alpha - 1.0);
          },
          [](const Lognormal& p) { return lognormal_mean(p); },
          [](const BimodalLognormal& m) {
            return m.weight * lognormal_mean(m.first) + (1.0 - m.weight) * lognormal_mean(m.second);
          },
      },
      spec.params());
}

double support_lower(const DistributionSpec& spec) {
  if (const auto* p = std::get_if<Pareto>(&spec.params())) return p->n_min;
  return 0.0;
}

SizeBiasedView size_biased(const DistributionSpec& spec) {
  const double mu = mean(spec);
  DistributionSpec equivalent = std::visit(
      Overloaded{
          [](const Pareto& p) { return DistributionSpec::pareto(p.alpha - 1.0, p.n_min); },
          [](const Lognormal& p) {
            return DistributionSpec::lognormal(p.mu_log + p.sigma * p.sigma, p.sigma);
          },
          [mu](const BimodalLognormal& m) {
            // Component k is reweighted by its share of the total mass.
            const double w = m.weight * lognormal_mean(m.first) / mu;
            const Lognormal a{m.first.mu_log + m.first.sigma * m.first.sigma, m.first.sigma};
            const Lognormal b{m.second.mu_log + m.second.sigma * m.second.sigma, m.second.sigma};
            return DistributionSpec::bimodal(std::clamp(w, 1e-300, 1.0 - 1e-16), a, b);
          },
      },
      spec.params());
  return SizeBiasedView(spec, mu, equivalent);
}

double SizeBiasedView::density(double n) const { return n * pdf(base_, n) / normalizer_; }
double SizeBiasedView::cdf(double n) const { return doomsday::cdf(equivalent_, n); }
double SizeBiasedView::sf(double n) const { return doomsday::sf(equivalent_, n); }
double SizeBiasedView::quantile(double p) const { return doomsday::quantile(equivalent_, p); }

double median_group(const DistributionSpec& spec) { return quantile(spec, 0.5); }

double median_individual(const DistributionSpec& spec) { return size_biased(spec).quantile(0.5); }

std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw InvalidParameter("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform_open(rng);
    out.push_back(std::visit(
        Overloaded{
            // u plays the role of 1 - U, which has the same law.
            [u](const Pareto& p) { return p.n_min * std::exp(-std::log(u) / p.alpha); },
            [u](const Lognormal& p) { return std::exp(p.mu_log + p.sigma * normal_quantile(u)); },
            [u, &rng](const BimodalLognormal& m) {
              const Lognormal& c = (u < m.weight) ? m.first : m.second;
              return std::exp(c.mu_log + c.sigma * normal_quantile(uniform_open(rng)));
            },
        },
        spec.params()));
  }
  return out;
}

}  // namespace doomsday
