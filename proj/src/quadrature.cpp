#include "doomsday/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "doomsday/error.hpp"

namespace doomsday::quad {
namespace {

// Kronrod 15-point abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed abscissae.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWk[7];
  double g = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = h * kXk[j];
    const double s = f(c - dx) + f(c + dx);
    k += kWk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  k *= h;
  g *= h;
  return {a, b, k, std::abs(k - g)};
}

Result integrate_finite(const Integrand& f, double a, double b, Tolerance tol,
                        std::size_t max_intervals) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  std::size_t evals = 15;
  while (error > std::max(tol.absolute, tol.relative * std::abs(value)) &&
         heap.size() < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    Segment left = kronrod(f, worst.a, mid);
    Segment right = kronrod(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the pieces to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, evals};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, Tolerance tol,
                 std::size_t max_intervals) {
  if (std::isnan(a) || std::isnan(b)) throw InvalidParameter("integration bound is NaN");
  if (a > b) {
    Result r = integrate(f, b, a, tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (lo_inf && hi_inf) {
    Result left = integrate(f, a, 0.0, tol, max_intervals);
    Result right = integrate(f, 0.0, b, tol, max_intervals);
    return {left.value + right.value, left.error + right.error,
            left.evaluations + right.evaluations};
  }
  if (hi_inf) {
    // x = a + s / (1 - s)
    auto g = [&](double s) {
      const double one_minus = 1.0 - s;
      if (one_minus <= 0.0) return 0.0;
      return f(a + s / one_minus) / (one_minus * one_minus);
    };
    return integrate_finite(g, 0.0, 1.0, tol, max_intervals);
  }
  if (lo_inf) {
    auto g = [&](double s) {
      const double one_minus = 1.0 - s;
      if (one_minus <= 0.0) return 0.0;
      return f(b - s / one_minus) / (one_minus * one_minus);
    };
    return integrate_finite(g, 0.0, 1.0, tol, max_intervals);
  }
  return integrate_finite(f, a, b, tol, max_intervals);
}

Result integrate_log_axis(const Integrand& f, double lo, double hi, Tolerance tol) {
  return integrate_log_axis(f, lo, hi, {}, tol);
}

Result integrate_log_axis(const Integrand& f, double lo, double hi,
                          std::span<const double> breakpoints, Tolerance tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidParameter("log-axis integration needs 0 < lo < hi");
  std::vector<double> cuts{std::log(lo)};
  std::vector<double> inner;
  for (double p : breakpoints)
    if (p > lo && p < hi) inner.push_back(std::log(p));
  std::sort(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(std::isinf(hi) ? std::numeric_limits<double>::infinity() : std::log(hi));

  auto g = [&](double t) {
    const double x = std::exp(t);
    if (x == 0.0 || std::isinf(x)) return 0.0;
    return f(x) * x;
  };
  Result total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Result piece = integrate(g, cuts[i], cuts[i + 1], tol);
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
  }
  return total;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidParameter("Gauss-Legendre rule needs at least one node");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        const double jd = static_cast<double>(j);
        p0 = ((2.0 * jd - 1.0) * x * p1 - (jd - 1.0) * p2) / jd;
      }
      dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
      const double step = p0 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

double pairwise_sum(std::span<const double> terms) {
  if (terms.empty()) return 0.0;
  if (terms.size() <= 8) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace doomsday::quad
