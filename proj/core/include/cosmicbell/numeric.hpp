#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosmicbell::numeric {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

template <typename F>
Interval gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[(j - 1) / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
/// Splits the interval with the largest local error estimate until the
/// summed error satisfies max(abs_tol, rel_tol * |integral|).
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-8,
                 double abs_tol = 1e-12, int max_subdivisions = 2000) {
  if (a == b) return 0.0;
  if (!(a < b)) return -integrate(f, b, a, rel_tol, abs_tol, max_subdivisions);

  std::priority_queue<detail::Interval> queue;
  detail::Interval whole = detail::gauss_kronrod_15(f, a, b);
  double total = whole.value;
  double total_error = whole.error;
  queue.push(whole);

  int subdivisions = 1;
  while (total_error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (subdivisions >= max_subdivisions) {
      throw IntegrationError(
          "adaptive quadrature failed to converge after " +
          std::to_string(subdivisions) + " subdivisions (error " +
          std::to_string(total_error) + ")");
    }
    detail::Interval worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Interval left = detail::gauss_kronrod_15(f, worst.a, mid);
    detail::Interval right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++subdivisions;
  }
  return total;
}

/// Bisection root finder for a continuous f with f(lo) and f(hi) of
/// opposite sign. Returns the midpoint of the final bracket of width <= xtol.
template <typename F>
double bisect(const F& f, double lo, double hi, double xtol,
              int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw RootFindingError("bisect: endpoints do not bracket a root");
  }
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cosmicbell::numeric
