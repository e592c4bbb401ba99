#include "chromainv/column.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chromainv {
namespace {

constexpr int kMaxNewtonIterations = 50;
constexpr double kWashoutFraction = 1e-4;
constexpr double kResidualMassFraction = 1e-3;
// Amounts below kFlushToZero are dropped to keep the state out of the
// denormal range; below kLinearRegime the isotherm is solved linearly.
constexpr double kFlushToZero = 1e-200;
constexpr double kLinearRegime = 1e-100;

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw ValidationError(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

struct CellSolver {
  const IsothermParams& params;
  double phase_ratio;

  // Finds C >= 0 with C + F q(C) = m, starting from guess (c1, c2).
  // Returns false when the iteration fails to converge.
  bool recover(double m1, double m2, double& c1, double& c2) const
  {
    if (m1 <= 0.0 && m2 <= 0.0) {
      c1 = 0.0;
      c2 = 0.0;
      return true;
    }
    m1 = std::max(m1, 0.0);
    m2 = std::max(m2, 0.0);
    const double scale = std::max(m1, m2);
    if (scale < kLinearRegime) {
      // q is linear to working precision here; J_q(0) is diagonal.
      c1 = m1 / (1.0 + phase_ratio * (params.a(0, 0) + params.a(1, 0)));
      c2 = m2 / (1.0 + phase_ratio * (params.a(0, 1) + params.a(1, 1)));
      return true;
    }
    const double tol = 1e-13 * scale;

    auto residual = [&](double x1, double x2, double& r1, double& r2) {
      const Concentration2 q = detail::eval_unchecked(params, x1, x2);
      r1 = x1 + phase_ratio * q.c1 - m1;
      r2 = x2 + phase_ratio * q.c2 - m2;
    };

    double r1 = 0.0;
    double r2 = 0.0;
    residual(c1, c2, r1, r2);
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      const double rnorm = std::max(std::abs(r1), std::abs(r2));
      if (rnorm <= tol)
        return true;

      const Jacobian2 jq = detail::jacobian_unchecked(params, c1, c2);
      const double j11 = 1.0 + phase_ratio * jq[0][0];
      const double j12 = phase_ratio * jq[0][1];
      const double j21 = phase_ratio * jq[1][0];
      const double j22 = 1.0 + phase_ratio * jq[1][1];
      const double det = j11 * j22 - j12 * j21;
      if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        return false;
      const double d1 = -(r1 * j22 - j12 * r2) / det;
      const double d2 = -(j11 * r2 - r1 * j21) / det;

      // Projected, backtracked Newton step keeping C >= 0.
      double step = 1.0;
      for (int ls = 0; ls < 30; ++ls) {
        const double x1 = std::max(c1 + step * d1, 0.0);
        const double x2 = std::max(c2 + step * d2, 0.0);
        double s1 = 0.0;
        double s2 = 0.0;
        residual(x1, x2, s1, s2);
        if (std::max(std::abs(s1), std::abs(s2)) < rnorm || ls == 29) {
          c1 = x1;
          c2 = x2;
          r1 = s1;
          r2 = s2;
          break;
        }
        step *= 0.5;
      }
    }
    return std::max(std::abs(r1), std::abs(r2)) <= std::max(tol, 1e-10 * scale);
  }
};

} // namespace

double ColumnConfig::effective_diffusion() const
{
  if (diffusion)
    return *diffusion;
  return length * velocity / (2.0 * plate_count);
}

double ColumnConfig::time_step() const
{
  const double dx = cell_width();
  const double d = effective_diffusion();
  return cfl_safety * std::min(dx / velocity, dx * dx / (2.0 * d));
}

void ColumnConfig::validate() const
{
  require(positive_finite(length), "column length must be > 0");
  require(positive_finite(velocity), "velocity must be > 0");
  require(positive_finite(phase_ratio), "phase ratio must be > 0");
  require(plate_count > 0, "plate count must be positive");
  require(!diffusion || positive_finite(*diffusion), "diffusion must be > 0");
  require(n_cells >= 10, "n_cells must be >= 10");
  require(n_time_points >= 2, "n_time_points must be >= 2");
  require(positive_finite(injection_duration), "injection duration must be > 0");
  require(positive_finite(cfl_safety), "cfl_safety must be > 0");
  if (horizon)
    require(std::isfinite(*horizon) && *horizon > dead_time(),
            "horizon T must exceed the dead time L/u = " + std::to_string(dead_time()));
}

void InjectionProfile::validate() const
{
  require(std::isfinite(hbar1) && hbar1 >= 0.0, "injection hbar1 must be finite and >= 0");
  require(std::isfinite(hbar2) && hbar2 >= 0.0, "injection hbar2 must be finite and >= 0");
  require(positive_finite(duration), "injection duration must be > 0");
}

Concentration2 boundary_value(const InjectionProfile& profile, double t)
{
  require(std::isfinite(t) && t >= 0.0, "boundary time must be >= 0");
  if (t < profile.duration)
    return {profile.hbar1, profile.hbar2};
  return {0.0, 0.0};
}

OutletSeries simulate(const ColumnConfig& config, const IsothermParams& params, const InjectionProfile& profile,
                      Concentration2 initial)
{
  config.validate();
  profile.validate();
  require(std::isfinite(initial.c1) && initial.c1 >= 0.0 && std::isfinite(initial.c2) && initial.c2 >= 0.0,
          "initial concentration must be finite and >= 0");

  const int n = config.n_cells;
  const double dx = config.cell_width();
  const double u = config.velocity;
  const double d = config.effective_diffusion();
  const double f = config.phase_ratio;

  // Align the step with the end of the injection so the inlet pulse is
  // integrated exactly.
  double dt = config.time_step();
  const int pulse_steps = static_cast<int>(std::ceil(profile.duration / dt - 1e-9));
  dt = profile.duration / pulse_steps;
  const double cfl = dt * (u / dx + 2.0 * d / (dx * dx));
  if (cfl > 1.0 + 1e-12)
    throw NumericalError("CFL violation: dt*(u/dx + 2D/dx^2) = " + std::to_string(cfl) + " > 1");

  const double t0 = config.dead_time();
  const double t_cap = config.horizon ? *config.horizon : ColumnConfig::kMaxHorizonDeadTimes * t0;

  const CellSolver solver{params, f};
  const Concentration2 q0 = detail::eval_unchecked(params, initial.c1, initial.c2);
  std::vector<double> c1(n, initial.c1), c2(n, initial.c2);
  std::vector<double> m1(n, initial.c1 + f * q0.c1), m2(n, initial.c2 + f * q0.c2);
  std::vector<double> flux1(n + 1), flux2(n + 1);

  std::vector<double> hist_t{0.0}, hist_c1{c1[n - 1]}, hist_c2{c2[n - 1]};
  const auto expected_steps = static_cast<std::size_t>(t_cap / dt) + 2;
  hist_t.reserve(expected_steps);
  hist_c1.reserve(expected_steps);
  hist_c2.reserve(expected_steps);

  OutletSeries out;
  const double initial_mass1 = m1[0] * dx * n;
  const double initial_mass2 = m2[0] * dx * n;
  double peak = std::max(c1[n - 1] + c2[n - 1], 0.0);
  double horizon = t_cap;
  int next_check = 2;
  const double d_over_dx = d / dx;

  long step = 0;
  for (;;) {
    const double t = step * dt;
    if (t >= t_cap - 1e-9 * dt)
      break;
    const double t_next = std::min((step + 1) * dt, t_cap);
    const double h = t_next - t;

    // Inlet face: the ghost value C_g = (u h + (D/dx) C_0) / (u + D/dx)
    // satisfies the discrete Robin condition, which makes the total face
    // flux u*C_g - D (C_0 - C_g)/dx equal to u*h(t) exactly.
    const Concentration2 inlet = step < pulse_steps ? Concentration2{profile.hbar1, profile.hbar2} : Concentration2{};
    flux1[0] = u * inlet.c1;
    flux2[0] = u * inlet.c2;
    for (int i = 1; i < n; ++i) {
      flux1[i] = u * c1[i - 1] - d_over_dx * (c1[i] - c1[i - 1]);
      flux2[i] = u * c2[i - 1] - d_over_dx * (c2[i] - c2[i - 1]);
    }
    // Outlet: zero-gradient ghost, purely convective.
    flux1[n] = u * c1[n - 1];
    flux2[n] = u * c2[n - 1];

    const double ratio = h / dx;
    for (int i = 0; i < n; ++i) {
      m1[i] += ratio * (flux1[i] - flux1[i + 1]);
      m2[i] += ratio * (flux2[i] - flux2[i + 1]);
      if (m1[i] < kFlushToZero && m1[i] > -1e-9)
        m1[i] = 0.0;
      if (m2[i] < kFlushToZero && m2[i] > -1e-9)
        m2[i] = 0.0;
      if (!solver.recover(m1[i], m2[i], c1[i], c2[i])) {
        throw NumericalError("per-cell nonlinear solve did not converge at t = " + std::to_string(t_next) +
                             ", cell " + std::to_string(i));
      }
    }
    out.injected[0] += h * flux1[0];
    out.injected[1] += h * flux2[0];
    out.eluted[0] += h * flux1[n];
    out.eluted[1] += h * flux2[n];
    ++step;

    const double o1 = c1[n - 1];
    const double o2 = c2[n - 1];
    if (!std::isfinite(o1) || !std::isfinite(o2) || o1 < -1e-9 || o2 < -1e-9)
      throw NumericalError("non-finite or negative outlet state at t = " + std::to_string(t_next));
    hist_t.push_back(t_next);
    hist_c1.push_back(o1);
    hist_c2.push_back(o2);
    peak = std::max(peak, o1 + o2);

    if (!config.horizon && t_next >= next_check * t0 - 1e-9 * dt) {
      double held = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!std::isfinite(m1[i]) || !std::isfinite(m2[i]))
          throw NumericalError("non-finite column state at t = " + std::to_string(t_next));
        held += (m1[i] + m2[i]) * dx;
      }
      const double fed = out.injected[0] + out.injected[1] + initial_mass1 + initial_mass2;
      const bool washed_out = (o1 + o2) <= kWashoutFraction * peak && held <= kResidualMassFraction * fed;
      if (t_next >= profile.duration && washed_out) {
        horizon = next_check * t0;
        break;
      }
      ++next_check;
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(m1[i]) || !std::isfinite(m2[i]))
      throw NumericalError("non-finite column state at the horizon");
    out.retained[0] += m1[i] * dx;
    out.retained[1] += m2[i] * dx;
  }
  out.steps = step;
  out.horizon = horizon;

  // Linear interpolation of the step history onto t_i = i*T/N_T.
  const int nt = config.n_time_points;
  out.time.resize(nt);
  out.c1.resize(nt);
  out.c2.resize(nt);
  std::size_t k = 0;
  for (int i = 0; i < nt; ++i) {
    const double ti = horizon * (i + 1) / nt;
    out.time[i] = ti;
    while (k + 1 < hist_t.size() && hist_t[k + 1] < ti)
      ++k;
    double v1 = hist_c1.back();
    double v2 = hist_c2.back();
    if (k + 1 < hist_t.size()) {
      const double w = (ti - hist_t[k]) / (hist_t[k + 1] - hist_t[k]);
      v1 = hist_c1[k] + w * (hist_c1[k + 1] - hist_c1[k]);
      v2 = hist_c2[k] + w * (hist_c2[k + 1] - hist_c2[k]);
    }
    out.c1[i] = std::max(v1, 0.0);
    out.c2[i] = std::max(v2, 0.0);
  }
  return out;
}

void DetectorSpec::validate() const
{
  require(positive_finite(gain[0]) && positive_finite(gain[1]), "detector gains must be > 0");
  require(!std::isnan(r_max) && r_max > 0.0, "detector r_max must be > 0");
}

void Chromatogram::validate() const
{
  require(time.size() == response.size(), "chromatogram time and response lengths differ");
  require(!time.empty(), "chromatogram is empty");
  for (std::size_t i = 0; i < time.size(); ++i) {
    require(std::isfinite(time[i]), "chromatogram time is not finite");
    require(i == 0 || time[i] > time[i - 1], "chromatogram time grid must be strictly increasing");
    require(std::isfinite(response[i]) && response[i] >= 0.0, "chromatogram response must be finite and >= 0");
  }
}

Chromatogram total_response(const OutletSeries& outlet, const DetectorSpec& detector)
{
  detector.validate();
  require(outlet.c1.size() == outlet.c2.size() && outlet.c1.size() == outlet.time.size(),
          "outlet series lengths differ");
  Chromatogram r;
  r.time = outlet.time;
  r.response.resize(outlet.c1.size());
  for (std::size_t i = 0; i < outlet.c1.size(); ++i) {
    const double sum = detector.gain[0] * outlet.c1[i] + detector.gain[1] * outlet.c2[i];
    r.response[i] = std::min(sum, detector.r_max);
  }
  return r;
}

} // namespace chromainv
