#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace doomsday::quad {

struct Tolerance {
  double absolute = 1e-9;
  double relative = 1e-6;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Either bound
/// may be infinite; infinite ranges are mapped onto finite ones first.
Result integrate(const Integrand& f, double a, double b, Tolerance tol = {},
                 std::size_t max_intervals = 4000);

/// Integrates f(x) dx over [lo, hi] (0 < lo < hi <= inf) in the variable
/// t = ln x, which keeps power-law tails well conditioned.
Result integrate_log_axis(const Integrand& f, double lo, double hi, Tolerance tol = {});

/// Same as integrate_log_axis but splits the range at the given interior
/// breakpoints (ignored when outside (lo, hi)).
Result integrate_log_axis(const Integrand& f, double lo, double hi,
                          std::span<const double> breakpoints, Tolerance tol = {});

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

/// Sum with a fixed pairwise tree so the result does not depend on how the
/// terms were produced.
double pairwise_sum(std::span<const double> terms);

}  // namespace doomsday::quad
