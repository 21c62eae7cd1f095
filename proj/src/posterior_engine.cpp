#include "doomsday/posterior_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "doomsday/error.hpp"
#include "doomsday/quadrature.hpp"

namespace doomsday {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_rank(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidParameter("rank must be a finite count >= 1");
}

// Inverts a continuous nondecreasing cdf by bisection on ln x over [lo, hi].
double invert_cdf(const std::function<double(double)>& cdf, double p, double lo, double hi) {
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 300 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    const double mid = 0.5 * (a + b);
    if (cdf(std::exp(mid)) < p)
      a = mid;
    else
      b = mid;
  }
  return std::exp(0.5 * (a + b));
}

// Share of a panel's mass in [x0, x] when the density is a power law
// through (x0, d0) and (x1, d1); log-linear when either end is zero.
double panel_exponent(double x0, double x1, double d0, double d1) {
  return std::log(d1 / d0) / std::log(x1 / x0) + 1.0;
}

double panel_fraction(double x0, double x1, double d0, double d1, double x) {
  const double l = std::log(x / x0), h = std::log(x1 / x0);
  if (!(d0 > 0.0 && d1 > 0.0)) return l / h;
  const double k = panel_exponent(x0, x1, d0, d1);
  if (std::abs(k * h) < 1e-12) return l / h;
  return std::expm1(k * l) / std::expm1(k * h);
}

double panel_inverse(double x0, double x1, double d0, double d1, double w) {
  const double h = std::log(x1 / x0);
  if (!(d0 > 0.0 && d1 > 0.0)) return x0 * std::exp(w * h);
  const double k = panel_exponent(x0, x1, d0, d1);
  if (std::abs(k * h) < 1e-12) return x0 * std::exp(w * h);
  return x0 * std::exp(std::log1p(w * std::expm1(k * h)) / k);
}

// Composite Simpson on a uniform log axis over node indices [first, last].
double simpson_log(std::span<const double> x, std::span<const double> f, std::size_t first,
                   std::size_t last) {
  if (last <= first) return 0.0;
  const double h = std::log(x[first + 1] / x[first]);
  auto g = [&](std::size_t i) { return f[i] * x[i]; };
  std::size_t panels = last - first;
  double total = 0.0;
  std::size_t end = last;
  if (panels == 1) return 0.5 * h * (g(first) + g(last));
  if (panels % 2 == 1) {
    // Simpson 3/8 over the final three panels.
    end = last - 3;
    total += 3.0 * h / 8.0 * (g(end) + 3.0 * g(end + 1) + 3.0 * g(end + 2) + g(last));
    panels -= 3;
  }
  double s = 0.0;
  for (std::size_t i = first; i < end; i += 2) s += g(i) + 4.0 * g(i + 1) + g(i + 2);
  return total + s * h / 3.0;
}

struct AlphaNode {
  double beta;    // alpha - 1
  double weight;  // prior mass carried by the node
};

// Composite Gauss-Legendre rule in ln(beta) over [beta_lo, beta_hi].
std::vector<AlphaNode> beta_rule(double beta_lo, double beta_hi, const std::function<double(double)>& prior,
                                 const MarginalizationOptions& opt) {
  std::vector<AlphaNode> out;
  if (!(beta_hi > beta_lo)) return out;
  const double a = std::log(beta_lo), b = std::log(beta_hi);
  const double width = (b - a) / static_cast<double>(opt.alpha_panels);
  for (std::size_t k = 0; k < opt.alpha_panels; ++k) {
    const auto rule = quad::gauss_legendre(opt.nodes_per_panel, a + width * static_cast<double>(k),
                                           a + width * static_cast<double>(k + 1));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double beta = std::exp(rule.nodes[i]);
      out.push_back({beta, rule.weights[i] * beta * prior(1.0 + beta)});
    }
  }
  return out;
}

std::vector<AlphaNode> alpha_nodes(const AlphaPrior& prior, const MarginalizationOptions& opt) {
  const double beta_cap = opt.alpha_max - 1.0;
  return std::visit(
      Overloaded{
          [&](const UniformAlpha& u) {
            const double density = 1.0 / (u.hi - u.lo);
            return beta_rule(std::max(u.lo - 1.0, opt.beta_min), std::min(u.hi - 1.0, beta_cap),
                             [density](double) { return density; }, opt);
          },
          [&](const ExponentialAlpha& e) {
            return beta_rule(opt.beta_min, beta_cap,
                             [rate = e.rate](double alpha) { return rate * std::exp(-rate * (alpha - 1.0)); },
                             opt);
          },
          [&](const PointAlpha& p) { return std::vector<AlphaNode>{{p.alpha - 1.0, 1.0}}; },
          [&](const CustomAlpha& c) {
            return beta_rule(std::max(c.lo - 1.0, opt.beta_min), std::min(c.hi - 1.0, beta_cap), c.density, opt);
          },
      },
      prior.params());
}

// Weighted contribution of one alpha node, divided by N^-2, on the fine grid:
// K(N) = integral of beta (m / N)^beta dm / m over the N_min prior (m <= N).
std::vector<double> node_kernel(double beta, const std::variant<JeffreysNmin, PointNmin>& nmin,
                                std::span<const double> fine, double jeff_hi) {
  std::vector<double> k(fine.size(), 0.0);
  if (const auto* point = std::get_if<PointNmin>(&nmin)) {
    for (std::size_t j = 0; j < fine.size(); ++j)
      if (fine[j] >= point->n_min) k[j] = beta * std::exp(beta * std::log(point->n_min / fine[j]));
    return k;
  }
  const auto& jeff = std::get<JeffreysNmin>(nmin);
  const double lo = jeff.lo;
  const double hi = jeff_hi;
  const double norm = 1.0 / (std::log(hi) - std::log(lo));
  const quad::Tolerance tight{1e-15, 1e-12};
  // Integral of beta * e^(beta s) ds over [s0, s1], s = ln(m / N).
  auto piece = [&](double s0, double s1) {
    if (!(s1 > s0)) return 0.0;
    return quad::integrate([beta](double s) { return beta * std::exp(beta * s); }, s0, s1, tight).value;
  };
  const double h = std::log(fine[1] / fine[0]);
  const double decay = std::exp(-beta * h);
  const double full_panel = piece(-h, 0.0);

  double kj = 0.0;
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const double n = fine[j];
    if (j == 0) {
      kj = (lo < n) ? piece(std::log(lo) - std::log(n), std::log(std::min(n, hi) / n)) : 0.0;
    } else {
      const double prev = fine[j - 1];
      const double from = std::max(prev, lo);
      const double to = std::min(n, hi);
      double added;
      if (from == prev && to == n)
        added = full_panel;
      else
        added = (to > from) ? piece(std::log(from / n), std::log(to / n)) : 0.0;
      kj = kj * decay + added;
    }
    k[j] = kj * norm;
  }
  return k;
}

// Mass above `top` for one node: integral of K(N) N^-2 dN over (top, inf).
double node_tail(double beta, const std::variant<JeffreysNmin, PointNmin>& nmin, double top, double k_top,
                 double jeff_hi) {
  if (const auto* point = std::get_if<PointNmin>(&nmin)) {
    const double x = std::max(top, point->n_min);
    return beta * std::exp(beta * std::log(point->n_min / x)) / (x * (1.0 + beta));
  }
  const auto& jeff = std::get<JeffreysNmin>(nmin);
  const double norm = 1.0 / (std::log(jeff_hi) - std::log(jeff.lo));
  if (jeff_hi <= top) return k_top / (top * (1.0 + beta));
  // Between top and jeff_hi the prior keeps adding mass at m in (top, N].
  const double k0 = k_top / norm;
  auto kernel = [&](double n) {
    const double ratio = std::exp(beta * std::log(top / std::min(n, jeff_hi)));
    double k = k0 * ratio + (1.0 - ratio);
    if (n > jeff_hi) k *= std::exp(beta * std::log(jeff_hi / n));
    return norm * k / (n * n);
  };
  const double breaks[] = {jeff_hi};
  return quad::integrate_log_axis(kernel, top, kInf, breaks, {1e-15, 1e-10}).value;
}

}  // namespace

// ---------------------------------------------------------------------------
// RankPrior
// ---------------------------------------------------------------------------

RankPrior RankPrior::exact(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("rank must be positive and finite");
  return RankPrior(ExactRank{r});
}

RankPrior RankPrior::log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw InvalidParameter("log-uniform rank prior needs 0 < lo < hi < inf");
  return RankPrior(LogUniformRank{lo, hi});
}

RankPrior RankPrior::around(double r0, double factor) {
  if (!(factor > 1.0)) throw InvalidParameter("rank spread factor must exceed 1");
  return log_uniform(r0 / factor, r0 * factor);
}

double RankPrior::density(double r) const {
  return std::visit(Overloaded{
                        [r](const ExactRank& e) { return r == e.r ? kInf : 0.0; },
                        [r](const LogUniformRank& u) {
                          if (r < u.lo || r > u.hi) return 0.0;
                          return 1.0 / (r * std::log(u.hi / u.lo));
                        },
                    },
                    params_);
}

double RankPrior::lower() const {
  return std::visit(Overloaded{[](const ExactRank& e) { return e.r; }, [](const LogUniformRank& u) { return u.lo; }},
                    params_);
}

double RankPrior::upper() const {
  return std::visit(Overloaded{[](const ExactRank& e) { return e.r; }, [](const LogUniformRank& u) { return u.hi; }},
                    params_);
}

std::vector<RankPrior::Node> RankPrior::nodes(std::size_t count) const {
  if (const auto* e = std::get_if<ExactRank>(&params_)) return {{e->r, 1.0}};
  const auto& u = std::get<LogUniformRank>(params_);
  const double width = std::log(u.hi / u.lo);
  const auto rule = quad::gauss_legendre(count, std::log(u.lo), std::log(u.hi));
  std::vector<Node> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({std::exp(rule.nodes[i]), rule.weights[i] / width});
  return out;
}

// ---------------------------------------------------------------------------
// TabulatedPosterior
// ---------------------------------------------------------------------------

std::vector<double> make_log_grid(double anchor, const GridSpec& spec) {
  if (spec.points < 3) throw InvalidParameter("grid needs at least 3 points");
  if (!(spec.decades_below >= 0.0) || !(spec.decades_above > 0.0))
    throw InvalidParameter("grid decades must be nonnegative (below) and positive (above)");
  if (!(anchor > 0.0)) throw InvalidParameter("grid anchor must be positive");
  const double span = (spec.decades_below + spec.decades_above) * std::numbers::ln10;
  const double h = span / static_cast<double>(spec.points - 1);
  const auto anchor_index = static_cast<long>(std::lround(spec.decades_below * std::numbers::ln10 / h));
  std::vector<double> grid(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i)
    grid[i] = anchor * std::exp(static_cast<double>(static_cast<long>(i) - anchor_index) * h);
  grid[static_cast<std::size_t>(anchor_index)] = anchor;
  return grid;
}

namespace {

// Log grid anchored at `anchor` whose step is shrunk so that `kink` lands on a
// node an even number of steps above the anchor, keeping Simpson pairs smooth.
std::vector<double> kinked_log_grid(double anchor, double kink, const GridSpec& spec) {
  std::vector<double> grid = make_log_grid(anchor, spec);
  if (!(kink > anchor) || kink >= grid.back()) return grid;
  const double h = std::log(grid[1] / grid[0]);
  const double gap = std::log(kink / anchor);
  const double steps = std::max(2.0, 2.0 * std::ceil(gap / (2.0 * h)));
  const double h_aligned = gap / steps;
  const auto anchor_index = static_cast<long>(std::lround(spec.decades_below * std::numbers::ln10 / h_aligned));
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = anchor * std::exp(static_cast<double>(static_cast<long>(i) - anchor_index) * h_aligned);
  grid[static_cast<std::size_t>(anchor_index)] = anchor;
  const auto kink_index = static_cast<std::size_t>(anchor_index + static_cast<long>(steps));
  if (kink_index < grid.size()) grid[kink_index] = kink;
  return grid;
}

}  // namespace

TabulatedPosterior::TabulatedPosterior(std::vector<double> grid, std::vector<double> density,
                                       std::vector<double> cdf, double lower_mass, double upper_mass,
                                       double support_min, std::optional<ClosedForm> closed_form)
    : grid_(std::move(grid)),
      density_(std::move(density)),
      cdf_(std::move(cdf)),
      lower_mass_(lower_mass),
      upper_mass_(upper_mass),
      support_min_(support_min),
      closed_form_(std::move(closed_form)) {
  if (grid_.size() < 3 || density_.size() != grid_.size() || cdf_.size() != grid_.size())
    throw InvalidParameter("posterior table columns must have equal length >= 3");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (i > 0 && !(grid_[i] > grid_[i - 1])) throw InvalidParameter("posterior grid must increase strictly");
    if (i > 0 && cdf_[i] < cdf_[i - 1]) throw InvalidParameter("posterior cdf must be nondecreasing");
    if (!(density_[i] >= 0.0)) throw InvalidParameter("posterior density must be nonnegative");
  }
  if (lower_mass_ < 0.0 || upper_mass_ < 0.0) throw InvalidParameter("tail masses must be nonnegative");
}

std::size_t TabulatedPosterior::support_index() const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), support_min_ * (1.0 - 1e-12));
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - grid_.begin(), grid_.size() - 1));
}

double TabulatedPosterior::density_at(double x) const {
  if (x < support_min_) return 0.0;
  if (x < grid_.front() || x > grid_.back()) return 0.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return density_.back();
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double d0 = density_[i - 1], d1 = density_[i];
  const double w = std::log(x / grid_[i - 1]) / std::log(grid_[i] / grid_[i - 1]);
  if (d0 > 0.0 && d1 > 0.0) return std::exp((1.0 - w) * std::log(d0) + w * std::log(d1));
  return (1.0 - w) * d0 + w * d1;
}

double TabulatedPosterior::cdf_at(double x) const {
  if (closed_form_) return closed_form_->cdf(x);
  if (x <= support_min_) return 0.0;
  if (x <= grid_.front()) {
    if (grid_.front() <= support_min_) return 0.0;
    return lower_mass_ * (x - support_min_) / (grid_.front() - support_min_);
  }
  if (x >= grid_.back()) return 1.0 - upper_mass_ * grid_.back() / x;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double w = panel_fraction(grid_[i - 1], grid_[i], density_[i - 1], density_[i], x);
  return (1.0 - w) * cdf_[i - 1] + w * cdf_[i];
}

double TabulatedPosterior::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("quantile probability must lie in [0, 1]");
  if (closed_form_) return closed_form_->quantile(p);
  if (p >= 1.0) return kInf;
  if (p <= cdf_.front()) {
    if (cdf_.front() <= 0.0) return std::max(support_min_, grid_.front());
    return support_min_ + (grid_.front() - support_min_) * p / cdf_.front();
  }
  if (p >= cdf_.back()) return grid_.back() * upper_mass_ / (1.0 - p);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  const double w = (p - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
  return panel_inverse(grid_[i - 1], grid_[i], density_[i - 1], density_[i], w);
}

double TabulatedPosterior::quadrature_mass() const {
  return lower_mass_ + simpson_log(grid_, density_, support_index(), grid_.size() - 1) + upper_mass_;
}

double TabulatedPosterior::trapezoid_mass() const {
  double s = 0.0;
  for (std::size_t i = support_index(); i + 1 < grid_.size(); ++i)
    s += 0.5 * std::log(grid_[i + 1] / grid_[i]) * (density_[i] * grid_[i] + density_[i + 1] * grid_[i + 1]);
  return lower_mass_ + s + upper_mass_;
}

double TabulatedPosterior::max_cdf_inconsistency() const {
  double worst = 0.0;
  for (std::size_t i = support_index(); i + 2 < grid_.size(); i += 2) {
    const double simpson = simpson_log(grid_, density_, i, i + 2);
    worst = std::max(worst, std::abs((cdf_[i + 2] - cdf_[i]) - simpson));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Alpha priors
// ---------------------------------------------------------------------------

AlphaPrior::AlphaPrior(Params p) : params_(std::move(p)) {
  std::visit(Overloaded{
                 [](const UniformAlpha& u) {
                   if (!(u.lo >= 1.0) || !(u.hi > u.lo) || !std::isfinite(u.hi))
                     throw InvalidParameter("uniform alpha prior needs 1 <= lo < hi < inf");
                 },
                 [](const ExponentialAlpha& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate))
                     throw InvalidParameter("exponential alpha prior needs a positive finite rate");
                 },
                 [](const PointAlpha& a) {
                   if (!(a.alpha > 1.0) || !std::isfinite(a.alpha))
                     throw InvalidParameter("point alpha prior needs alpha > 1");
                 },
                 [](const CustomAlpha& c) {
                   if (!c.density) throw InvalidParameter("custom alpha prior needs a density");
                   if (!(c.lo >= 1.0) || !(c.hi > c.lo)) throw InvalidParameter("custom alpha prior support invalid");
                   const auto mass = quad::integrate(c.density, c.lo, c.hi, {1e-12, 1e-8});
                   if (!std::isfinite(mass.value) || !(mass.value > 0.0) || mass.error > 1e-3 * mass.value)
                     throw InvalidParameter("custom alpha prior is improper or empty");
                 },
             },
             params_);
}

std::string AlphaPrior::describe() const {
  return std::visit(
      Overloaded{
          [](const UniformAlpha& u) { return "uniform(" + std::to_string(u.lo) + "," + std::to_string(u.hi) + ")"; },
          [](const ExponentialAlpha& e) { return "exponential(" + std::to_string(e.rate) + ")"; },
          [](const PointAlpha& a) { return "point(" + std::to_string(a.alpha) + ")"; },
          [](const CustomAlpha& c) { return c.name; },
      },
      params_);
}

// ---------------------------------------------------------------------------
// Posteriors on N
// ---------------------------------------------------------------------------

TabulatedPosterior general_posterior(const ParameterPrior& prior, double r, const GridSpec& spec,
                                     const MarginalizationOptions& options) {
  require_rank(r);
  // A point N_min above the cut is a hard floor where the density jumps.
  double cut = r - 0.5;
  if (const auto* p = std::get_if<PointNmin>(&prior.n_min)) cut = std::max(cut, p->n_min);
  const std::vector<double> grid = make_log_grid(cut, spec);
  const std::size_t n = grid.size();

  // Fine grid: nodes plus log midpoints, for Simpson panels.
  std::vector<double> fine(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    fine[2 * i] = grid[i];
    if (i + 1 < n) fine[2 * i + 1] = std::sqrt(grid[i] * grid[i + 1]);
  }

  double jeff_hi = 0.0;
  if (const auto* j = std::get_if<JeffreysNmin>(&prior.n_min)) {
    jeff_hi = j->hi > 0.0 ? j->hi : grid.back();
    if (!(j->lo > 0.0) || !(jeff_hi > j->lo)) throw InvalidParameter("Jeffreys N_min range must satisfy 0 < lo < hi");
  } else if (!(std::get<PointNmin>(prior.n_min).n_min > 0.0)) {
    throw InvalidParameter("point N_min must be positive");
  }

  const std::vector<AlphaNode> nodes = alpha_nodes(prior.alpha, options);
  if (nodes.empty()) throw InvalidParameter("alpha prior has no mass on (1, alpha_max]");

  // Each node's weighted kernel, then a fixed pairwise reduction per point.
  std::vector<std::vector<double>> contrib(nodes.size());
  std::vector<double> tails(nodes.size());
  auto work = [&](std::size_t k) {
    std::vector<double> kern = node_kernel(nodes[k].beta, prior.n_min, fine, jeff_hi);
    tails[k] = nodes[k].weight * node_tail(nodes[k].beta, prior.n_min, fine.back(), kern.back(), jeff_hi);
    for (double& v : kern) v *= nodes[k].weight;
    contrib[k] = std::move(kern);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(nodes.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < nodes.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < nodes.size(); k += workers) work(k);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<double> raw(fine.size(), 0.0);
  std::vector<double> column(nodes.size());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    if (fine[j] < cut) continue;
    for (std::size_t k = 0; k < nodes.size(); ++k) column[k] = contrib[k][j];
    raw[j] = quad::pairwise_sum(column) / (fine[j] * fine[j]);
  }
  const double tail = quad::pairwise_sum(tails);

  // Simpson per coarse panel in ln N, starting at the cut node.
  const double h = std::log(grid[1] / grid[0]);
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double mass = 0.0;
    if (grid[i] >= cut)
      mass = h / 6.0 *
             (raw[2 * i] * fine[2 * i] + 4.0 * raw[2 * i + 1] * fine[2 * i + 1] + raw[2 * i + 2] * fine[2 * i + 2]);
    cumulative[i + 1] = cumulative[i] + mass;
  }
  const double z = cumulative.back() + tail;
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidParameter("posterior normalization failed");

  std::vector<double> density(n), cdf(n);
  for (std::size_t i = 0; i < n; ++i) {
    density[i] = raw[2 * i] / z;
    cdf[i] = cumulative[i] / z;
  }
  return TabulatedPosterior(grid, std::move(density), std::move(cdf), 0.0, tail / z, cut);
}

TabulatedPosterior pareto_closed_form(double r, const GridSpec& spec) {
  require_rank(r);
  const double cut = r - 0.5;
  std::vector<double> grid = make_log_grid(cut, spec);
  std::vector<double> density(grid.size()), cdf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    density[i] = x >= cut ? cut / (x * x) : 0.0;
    cdf[i] = x >= cut ? 1.0 - cut / x : 0.0;
  }
  const double upper = cut / grid.back();
  TabulatedPosterior::ClosedForm closed{
      [cut](double x) { return x <= cut ? 0.0 : 1.0 - cut / x; },
      [cut](double p) { return p >= 1.0 ? kInf : cut / (1.0 - p); },
  };
  return TabulatedPosterior(std::move(grid), std::move(density), std::move(cdf), 0.0, upper, cut, closed);
}

TabulatedPosterior rank_posterior(const RankPrior& rank, const GridSpec& spec) {
  if (const auto* e = std::get_if<ExactRank>(&rank.params())) return pareto_closed_form(e->r, spec);
  require_rank(rank.lower());
  const auto& u = std::get<LogUniformRank>(rank.params());
  const double width = std::log(u.hi / u.lo);
  const double support = u.lo - 0.5;
  // Ranks contributing at N are those with r - 1/2 < N, i.e. r in [lo, min(hi, N + 1/2)].
  auto reach = [u](double x) { return std::min(u.hi, x + 0.5); };
  auto mixture_cdf = [u, width, support, reach](double x) {
    if (x <= support) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double top = reach(x);
    return (std::log(top / u.lo) * (1.0 + 0.5 / x) - (top - u.lo) / x) / width;
  };
  auto mixture_density = [u, width, support, reach](double x) {
    if (x < support) return 0.0;
    const double top = reach(x);
    return ((top - u.lo) - 0.5 * std::log(top / u.lo)) / (width * x * x);
  };
  std::vector<double> grid = kinked_log_grid(support, u.hi - 0.5, spec);
  std::vector<double> density(grid.size()), cdf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    density[i] = mixture_density(grid[i]);
    cdf[i] = mixture_cdf(grid[i]);
  }
  const double upper = 1.0 - cdf.back();
  const double r_hi = u.hi;
  TabulatedPosterior::ClosedForm closed{
      mixture_cdf,
      [mixture_cdf, support, r_hi](double p) {
        if (p <= 0.0) return support;
        if (p >= 1.0) return kInf;
        return invert_cdf(mixture_cdf, p, support, r_hi / (1.0 - p));
      },
  };
  return TabulatedPosterior(std::move(grid), std::move(density), std::move(cdf), 0.0, upper, support, closed);
}

InsensitivityReport prior_insensitivity_check(std::span<const AlphaPrior> priors, double r, const GridSpec& grid,
                                              const MarginalizationOptions& options) {
  if (priors.empty()) throw InvalidParameter("need at least one alpha prior");
  const TabulatedPosterior reference = pareto_closed_form(r, grid);
  std::vector<TabulatedPosterior> posteriors;
  for (const auto& p : priors) posteriors.push_back(general_posterior(ParameterPrior{p, JeffreysNmin{}}, r, grid, options));

  InsensitivityReport report;
  for (std::size_t a = 0; a < posteriors.size(); ++a) {
    const auto da = posteriors[a].density();
    for (std::size_t i = 0; i < da.size(); ++i)
      report.max_vs_closed_form = std::max(report.max_vs_closed_form, r * std::abs(da[i] - reference.density()[i]));
    for (std::size_t b = a + 1; b < posteriors.size(); ++b) {
      const auto db = posteriors[b].density();
      for (std::size_t i = 0; i < da.size(); ++i)
        report.max_pairwise = std::max(report.max_pairwise, r * std::abs(da[i] - db[i]));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Future births
// ---------------------------------------------------------------------------

double future_count_density(const RankPrior& rank, double births, std::size_t rank_nodes) {
  if (births < 0.0) return 0.0;
  double s = 0.0;
  for (const auto& nd : rank.nodes(rank_nodes)) s += nd.weight * nd.rank / ((births + nd.rank) * (births + nd.rank));
  return s;
}

double future_count_cdf(const RankPrior& rank, double births, std::size_t rank_nodes) {
  if (births <= 0.0) return 0.0;
  if (std::isinf(births)) return 1.0;
  double s = 0.0;
  for (const auto& nd : rank.nodes(rank_nodes)) s += nd.weight * births / (births + nd.rank);
  return s;
}

TabulatedPosterior future_count_posterior(const RankPrior& rank, const GridSpec& spec, std::size_t rank_nodes) {
  const auto nodes = rank.nodes(rank_nodes);
  const double anchor = std::sqrt(rank.lower() * rank.upper());
  std::vector<double> grid = make_log_grid(anchor, spec);

  auto density_fn = [nodes](double b) {
    if (b < 0.0) return 0.0;
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.weight * nd.rank / ((b + nd.rank) * (b + nd.rank));
    return s;
  };
  auto cdf_fn = [nodes](double b) {
    if (b <= 0.0) return 0.0;
    if (std::isinf(b)) return 1.0;
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.weight * b / (b + nd.rank);
    return s;
  };

  std::vector<double> density(grid.size()), cdf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    density[i] = density_fn(grid[i]);
    cdf[i] = cdf_fn(grid[i]);
  }
  double upper = 0.0;
  for (const auto& nd : nodes) upper += nd.weight * nd.rank / (grid.back() + nd.rank);

  const double r_lo = nodes.front().rank, r_hi = nodes.back().rank;
  TabulatedPosterior::ClosedForm closed{
      cdf_fn,
      [cdf_fn, r_lo, r_hi](double p) {
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return kInf;
        // Every component quantile is r p / (1 - p); the mixture lies between.
        const double odds = p / (1.0 - p);
        if (r_lo == r_hi) return r_lo * odds;
        return invert_cdf(cdf_fn, p, r_lo * odds, r_hi * odds);
      },
  };
  const double lower = cdf[0];
  return TabulatedPosterior(std::move(grid), std::move(density), std::move(cdf), lower, upper, 0.0, closed);
}

// ---------------------------------------------------------------------------
// Scalar checks
// ---------------------------------------------------------------------------

double sia_truncation_demo(double n_max) {
  if (!(n_max > 1.0) || !std::isfinite(n_max)) throw InvalidParameter("n_max must be finite and > 1");
  // 1/N prior times N observer weighting is flat on [1, n_max].
  const double lo = std::max(1.0, n_max / 100.0);
  return (n_max - lo) / (n_max - 1.0);
}

std::uint64_t frequentist_estimate(std::uint64_t r) {
  if (r < 1) throw InvalidParameter("rank must be at least 1");
  if (r > (std::numeric_limits<std::uint64_t>::max() >> 1)) throw InvalidParameter("rank too large");
  return 2 * r - 1;
}

Rational unbiasedness_check(std::uint64_t n) {
  if (n < 1) throw InvalidParameter("group size must be at least 1");
  unsigned __int128 sum = 0;
  for (std::uint64_t r = 1; r <= n; ++r) sum += 2 * static_cast<unsigned __int128>(r) - 1;
  if (sum > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()) ||
      n > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    throw InvalidParameter("group size too large for exact arithmetic");
  return Rational(static_cast<std::int64_t>(sum), static_cast<std::int64_t>(n));
}

double coverage_check(std::uint64_t n, double q) {
  if (n < 1) throw InvalidParameter("group size must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("confidence must lie in (0, 1)");
  std::uint64_t covered = 0;
  const double target = static_cast<double>(n);
  for (std::uint64_t r = 1; r <= n; ++r)
    if ((static_cast<double>(r) - 0.5) / (1.0 - q) >= target) ++covered;
  return static_cast<double>(covered) / target;
}

}  // namespace doomsday
