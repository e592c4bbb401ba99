#include "chromainv/interpolation.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>

namespace chromainv {
namespace {

constexpr double kCubicTolerance = 1e-9;

void check_knots(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw ValidationError("interpolation knots and values differ in length");
  if (x.size() < 2)
    throw ValidationError("interpolation needs at least two knots");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw ValidationError("interpolation input is not finite");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw ValidationError("interpolation grid must be strictly increasing");
  }
}

// Derivative at x[k] of the Lagrange polynomial through x[lo..lo+m-1].
double lagrange_derivative(std::span<const double> x, std::span<const double> y, std::size_t lo, std::size_t m,
                           std::size_t k)
{
  double result = 0.0;
  for (std::size_t j = lo; j < lo + m; ++j) {
    // d/dx l_j(x) at x_k
    double denom = 1.0;
    for (std::size_t i = lo; i < lo + m; ++i)
      if (i != j)
        denom *= x[j] - x[i];
    double num = 0.0;
    if (j == k) {
      for (std::size_t i = lo; i < lo + m; ++i) {
        if (i == j)
          continue;
        double prod = 1.0;
        for (std::size_t l = lo; l < lo + m; ++l)
          if (l != j && l != i)
            prod *= x[k] - x[l];
        num += prod;
      }
    } else {
      num = 1.0;
      for (std::size_t l = lo; l < lo + m; ++l)
        if (l != j && l != k)
          num *= x[k] - x[l];
    }
    result += y[j] * num / denom;
  }
  return result;
}

// Fritsch-Carlson monotonicity region for alpha, beta >= 0.
bool in_monotone_region(double alpha, double beta)
{
  if (alpha < 0.0 || beta < 0.0)
    return false;
  if (alpha + beta - 2.0 <= 0.0)
    return true;
  const double a = 2.0 * alpha + beta - 3.0;
  const double b = alpha + 2.0 * beta - 3.0;
  if (a <= 0.0 || b <= 0.0)
    return true;
  return alpha - a * a / (3.0 * (alpha + beta - 2.0)) >= 0.0;
}

bool same_direction(double s, double t) { return (s >= 0.0 && t >= 0.0) || (s <= 0.0 && t <= 0.0); }

double hermite_segment(double x0, double x1, double y0, double y1, double d0, double d1, double t)
{
  const double h = x1 - x0;
  const double s = (t - x0) / h;
  const double one_minus = 1.0 - s;
  return (1.0 + 2.0 * s) * one_minus * one_minus * y0 + s * one_minus * one_minus * h * d0 +
         s * s * (3.0 - 2.0 * s) * y1 - s * s * one_minus * h * d1;
}

// First knot of the window whose Lagrange polynomial gives the slope at
// x[k]: interior knots use x[k-1..k+2].
std::size_t slope_window(std::size_t k, std::size_t n, std::size_t m)
{
  return std::min(k >= 1 ? k - 1 : 0, n - m);
}

// True when the segment on [x[k], x[k+1]] passes through every knot of
// the windows its slopes came from plus at least one knot outside them,
// i.e. the data is locally one cubic that the segment reproduces exactly.
// With only four knots the data is always one cubic.
bool locally_cubic(std::span<const double> x, std::span<const double> y, const std::vector<double>& d, std::size_t k)
{
  const std::size_t n = x.size();
  if (n < 4)
    return false;
  std::size_t lo = slope_window(k, n, 4);
  std::size_t hi = slope_window(k + 1, n, 4) + 3;
  if (hi - lo < 4) {
    if (lo > 0)
      --lo;
    else if (hi + 1 < n)
      ++hi;
  }
  double scale = 0.0;
  for (std::size_t i = lo; i <= hi; ++i)
    scale = std::max(scale, std::abs(y[i]));
  for (std::size_t i = lo; i <= hi; ++i) {
    if (i == k || i == k + 1)
      continue;
    const double at = hermite_segment(x[k], x[k + 1], y[k], y[k + 1], d[k], d[k + 1], x[i]);
    if (!(std::abs(at - y[i]) <= kCubicTolerance * scale))
      return false;
  }
  return true;
}

} // namespace

std::vector<double> hermite_slopes(std::span<const double> x, std::span<const double> y)
{
  check_knots(x, y);
  const std::size_t n = x.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    secant[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);

  std::vector<double> d(n);
  const std::size_t m = std::min<std::size_t>(4, n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = lagrange_derivative(x, y, slope_window(k, n, m), m, k);
  }

  // Intervals where the data is exactly cubic keep their derivatives so
  // cubics are reproduced; the limiter only acts elsewhere.
  std::vector<bool> exact(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    exact[k] = locally_cubic(x, y, d, k);

  auto locally_monotone = [&](std::size_t k) {
    if (exact[k])
      return false;
    const double s = secant[k];
    if (k > 0 && !same_direction(secant[k - 1], s))
      return false;
    if (k + 2 < n && !same_direction(secant[k + 1], s))
      return false;
    return true;
  };

  // Modifications only shrink |d| and pull intervals into the
  // downward-closed disc alpha^2 + beta^2 <= 9, so this settles.
  for (std::size_t pass = 0; pass < n + 1; ++pass) {
    bool changed = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (!locally_monotone(k))
        continue;
      const double s = secant[k];
      if (s == 0.0) {
        if (d[k] != 0.0 || d[k + 1] != 0.0) {
          d[k] = 0.0;
          d[k + 1] = 0.0;
          changed = true;
        }
        continue;
      }
      double alpha = d[k] / s;
      double beta = d[k + 1] / s;
      if (in_monotone_region(alpha, beta))
        continue;
      if (alpha < 0.0) {
        d[k] = 0.0;
        alpha = 0.0;
      }
      if (beta < 0.0) {
        d[k + 1] = 0.0;
        beta = 0.0;
      }
      const double r2 = alpha * alpha + beta * beta;
      if (!in_monotone_region(alpha, beta) || r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        d[k] = tau * alpha * s;
        d[k + 1] = tau * beta * s;
      }
      changed = true;
    }
    if (!changed)
      break;
  }
  return d;
}

std::vector<double> hermite_interpolate(std::span<const double> x, std::span<const double> y,
                                        std::span<const double> xq)
{
  const std::vector<double> d = hermite_slopes(x, y);
  std::vector<double> out(xq.size());
  for (std::size_t i = 0; i < xq.size(); ++i) {
    const double t = xq[i];
    if (!(t >= x.front() && t <= x.back())) {
      out[i] = 0.0;
      continue;
    }
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t k = static_cast<std::size_t>(it - x.begin());
    if (k > 0 && x[k - 1] == t) {
      out[i] = y[k - 1];
      continue;
    }
    k = std::min(k, x.size() - 1) - 1;
    out[i] = hermite_segment(x[k], x[k + 1], y[k], y[k + 1], d[k], d[k + 1], t);
  }
  return out;
}

Chromatogram regrid(const Chromatogram& series, std::span<const double> target_grid)
{
  for (std::size_t i = 1; i < target_grid.size(); ++i)
    if (!(target_grid[i] > target_grid[i - 1]))
      throw ValidationError("target grid must be strictly increasing");
  Chromatogram out;
  out.time.assign(target_grid.begin(), target_grid.end());
  out.response = hermite_interpolate(series.time, series.response, target_grid);
  for (auto& r : out.response)
    r = std::max(r, 0.0);
  return out;
}

} // namespace chromainv
