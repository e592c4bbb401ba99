#include "chromainv/isotherm.hpp"

#include "chromainv/error.hpp"

#include <cmath>
#include <string>

namespace chromainv {
namespace {

void check_params(const std::array<double, IsothermParams::size>& v)
{
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0)
      throw ValidationError("isotherm parameter " + std::to_string(i) + " must be finite and >= 0, got " +
                            std::to_string(v[i]));
  }
}

double clamp_concentration(double c, const char* name)
{
  if (!std::isfinite(c))
    throw ValidationError(std::string("concentration ") + name + " is not finite");
  if (c < -kUndershootTolerance)
    throw ValidationError(std::string("concentration ") + name + " is negative: " + std::to_string(c));
  return c < 0.0 ? 0.0 : c;
}

} // namespace

IsothermParams::IsothermParams(const std::array<double, size>& values) : values_(values)
{
  check_params(values_);
}

IsothermParams::IsothermParams(std::span<const double> values)
{
  if (values.size() != size)
    throw ValidationError("isotherm parameter vector must have 8 entries, got " + std::to_string(values.size()));
  for (std::size_t i = 0; i < size; ++i)
    values_[i] = values[i];
  check_params(values_);
}

IsothermParams IsothermParams::swapped_components() const
{
  IsothermParams out;
  for (std::size_t i = 0; i < 4; ++i) {
    out.values_[i] = values_[i + 4];
    out.values_[i + 4] = values_[i];
  }
  return out;
}

namespace detail {

// Sums are written as 1 + (x + y) so that relabelling the components
// reproduces bit-identical results (x + y == y + x in IEEE arithmetic).
Concentration2 eval_unchecked(const IsothermParams& p, double c1, double c2)
{
  const double d1 = 1.0 + (p.b(0, 0) * c1 + p.b(0, 1) * c2);
  const double d2 = 1.0 + (p.b(1, 0) * c1 + p.b(1, 1) * c2);
  return {p.a(0, 0) * c1 / d1 + p.a(1, 0) * c1 / d2, p.a(0, 1) * c2 / d1 + p.a(1, 1) * c2 / d2};
}

Jacobian2 jacobian_unchecked(const IsothermParams& p, double c1, double c2)
{
  Jacobian2 j{};
  const double c[2] = {c1, c2};
  for (int site = 0; site < 2; ++site) {
    const double d = 1.0 + (p.b(site, 0) * c1 + p.b(site, 1) * c2);
    const double inv_d2 = 1.0 / (d * d);
    for (int mu = 0; mu < 2; ++mu) {
      const double a = p.a(site, mu);
      for (int k = 0; k < 2; ++k) {
        const double num = (mu == k ? d : 0.0) - c[mu] * p.b(site, k);
        j[mu][k] += a * num * inv_d2;
      }
    }
  }
  return j;
}

} // namespace detail

Concentration2 isotherm_eval(const IsothermParams& params, Concentration2 c)
{
  return detail::eval_unchecked(params, clamp_concentration(c.c1, "c1"), clamp_concentration(c.c2, "c2"));
}

Jacobian2 isotherm_jacobian(const IsothermParams& params, Concentration2 c)
{
  return detail::jacobian_unchecked(params, clamp_concentration(c.c1, "c1"), clamp_concentration(c.c2, "c2"));
}

} // namespace chromainv
