#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace chromainv {

/// Bi-Langmuir parameters for a two-component system.
///
/// Storage order is fixed and used by every file format in the project:
///
///   [a_I1, b_I1, a_II1, b_II1, a_I2, b_I2, a_II2, b_II2]
///
/// where a_{site,component} are dimensionless retention coefficients and
/// b_{site,component} association constants (1/mM by convention). All
/// entries are finite and >= 0.
class IsothermParams {
public:
  static constexpr std::size_t size = 8;

  IsothermParams() = default;
  /// Throws ValidationError on negative or non-finite entries.
  explicit IsothermParams(const std::array<double, size>& values);
  explicit IsothermParams(std::span<const double> values);

  /// site: 0 for I, 1 for II; component: 0 or 1.
  double a(int site, int component) const { return values_[index(site, component)]; }
  double b(int site, int component) const { return values_[index(site, component) + 1]; }

  const std::array<double, size>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Same physical system with the two components relabelled.
  IsothermParams swapped_components() const;

  friend bool operator==(const IsothermParams&, const IsothermParams&) = default;

private:
  static constexpr std::size_t index(int site, int component)
  {
    return static_cast<std::size_t>(4 * component + 2 * site);
  }

  std::array<double, size> values_{};
};

/// Mobile-phase concentrations (mM) of the two components.
struct Concentration2 {
  double c1 = 0.0;
  double c2 = 0.0;

  double operator[](int i) const { return i == 0 ? c1 : c2; }
  friend bool operator==(const Concentration2&, const Concentration2&) = default;
};

using Jacobian2 = std::array<std::array<double, 2>, 2>;

/// Concentrations above this (negative) threshold are treated as solver
/// undershoot and clamped to zero.
inline constexpr double kUndershootTolerance = 1e-12;

/// Stationary-phase amounts q(c):
///   q_mu = sum_site a_{site,mu} c_mu / (1 + b_{site,1} c_1 + b_{site,2} c_2)
Concentration2 isotherm_eval(const IsothermParams& params, Concentration2 c);

/// dq_mu/dc_j of isotherm_eval; row index mu, column index j.
Jacobian2 isotherm_jacobian(const IsothermParams& params, Concentration2 c);

namespace detail {
// Unchecked kernels for the solver's inner loop. Inputs must already be
// clamped to >= 0.
Concentration2 eval_unchecked(const IsothermParams& params, double c1, double c2);
Jacobian2 jacobian_unchecked(const IsothermParams& params, double c1, double c2);
} // namespace detail

} // namespace chromainv
