#include "chromainv/variational.hpp"

#include "chromainv/error.hpp"
#include "chromainv/interpolation.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chromainv {
namespace {

constexpr std::size_t kDim = IsothermParams::size;
using Point = std::array<double, kDim>;

// Reflection, expansion, contraction and shrink coefficients.
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

// Relative tolerance for recognizing a grid of the form t_i = i*T/N.
constexpr double kUniformGridTolerance = 1e-9;

bool is_native_grid(const std::vector<double>& t)
{
  const double horizon = t.back();
  const auto n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - horizon * static_cast<double>(i + 1) / n) > kUniformGridTolerance * horizon)
      return false;
  return true;
}

double sum_of_squares(const std::vector<double>& v)
{
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

class BoxedSimplexSearch {
public:
  BoxedSimplexSearch(std::span<const Observation> obs, const ColumnConfig& column, const DetectorSpec& detector,
                     const VariationalConfig& cfg)
      : obs_(obs), column_(column), detector_(detector), cfg_(cfg)
  {
  }

  FitResult run()
  {
    FitResult result;
    Point best = cfg_.initial.values();
    project(best);
    double best_f = evaluate(best);
    result.trace.push_back(best_f);

    for (int round = 0; round <= cfg_.restarts && iterations_ < cfg_.max_iterations; ++round) {
      const double round_start = best_f;
      const bool converged = descend(best, best_f, result.trace);
      result.converged = converged;
      if (!converged)
        break;
      // A restart that brings nothing beyond the tolerance ends the search.
      if (round > 0 && round_start - best_f <= cfg_.tolerance)
        break;
    }

    result.estimate = IsothermParams(best);
    result.terms = objective_terms(result.estimate, obs_, column_, detector_, cfg_.alpha);
    result.iterations = iterations_;
    result.evaluations = evaluations_;
    return result;
  }

private:
  void project(Point& x) const
  {
    for (std::size_t j = 0; j < kDim; ++j)
      x[j] = std::clamp(x[j], 0.0, cfg_.upper[j]);
  }

  double evaluate(const Point& x)
  {
    ++evaluations_;
    return objective(IsothermParams(x), obs_, column_, detector_, cfg_.alpha);
  }

  void evaluate_all(const std::vector<Point>& xs, std::vector<double>& fs, std::size_t first)
  {
    detail::parallel_for(xs.size() - first, cfg_.threads, [&](std::size_t k) {
      fs[first + k] = objective(IsothermParams(xs[first + k]), obs_, column_, detector_, cfg_.alpha);
    });
    evaluations_ += static_cast<int>(xs.size() - first);
  }

  Point along(const Point& from, const Point& to, double t) const
  {
    Point p{};
    for (std::size_t j = 0; j < kDim; ++j)
      p[j] = from[j] + t * (to[j] - from[j]);
    return p;
  }

  // Runs Nelder-Mead from a fresh simplex around `best`; returns whether
  // the tolerance was met before the iteration cap.
  bool descend(Point& best, double& best_f, std::vector<double>& trace)
  {
    std::vector<Point> x(kDim + 1, best);
    std::vector<double> f(kDim + 1, best_f);
    for (std::size_t j = 0; j < kDim; ++j) {
      const double width = cfg_.upper[j];
      const double step = cfg_.initial_step * std::max(std::abs(best[j]), 0.01 * width);
      Point& v = x[j + 1];
      v[j] = best[j] + step <= width ? best[j] + step : best[j] - step;
      project(v);
    }
    evaluate_all(x, f, 1);

    std::vector<std::size_t> order(kDim + 1);
    while (true) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      {
        std::vector<Point> xs(kDim + 1);
        std::vector<double> fs(kDim + 1);
        for (std::size_t i = 0; i <= kDim; ++i) {
          xs[i] = x[order[i]];
          fs[i] = f[order[i]];
        }
        x.swap(xs);
        f.swap(fs);
      }
      if (f[0] < best_f) {
        best_f = f[0];
        best = x[0];
      }
      if (f[kDim] - f[0] <= cfg_.tolerance)
        return true;
      if (iterations_ >= cfg_.max_iterations)
        return false;
      ++iterations_;

      Point centroid{};
      for (std::size_t i = 0; i < kDim; ++i)
        for (std::size_t j = 0; j < kDim; ++j)
          centroid[j] += x[i][j] / static_cast<double>(kDim);

      Point xr = along(centroid, x[kDim], -kReflect);
      project(xr);
      const double fr = evaluate(xr);
      if (fr < f[0]) {
        Point xe = along(centroid, x[kDim], -kExpand);
        project(xe);
        const double fe = evaluate(xe);
        if (fe < fr) {
          x[kDim] = xe;
          f[kDim] = fe;
        } else {
          x[kDim] = xr;
          f[kDim] = fr;
        }
      } else if (fr < f[kDim - 1]) {
        x[kDim] = xr;
        f[kDim] = fr;
      } else {
        const bool outside = fr < f[kDim];
        Point xc = outside ? along(centroid, xr, kContract) : along(centroid, x[kDim], kContract);
        project(xc);
        const double fc = evaluate(xc);
        if (fc < std::min(fr, f[kDim])) {
          x[kDim] = xc;
          f[kDim] = fc;
        } else {
          for (std::size_t i = 1; i <= kDim; ++i)
            x[i] = along(x[0], x[i], kShrink);
          evaluate_all(x, f, 1);
        }
      }
      trace.push_back(std::min(best_f, *std::min_element(f.begin(), f.end())));
    }
  }

  std::span<const Observation> obs_;
  const ColumnConfig& column_;
  const DetectorSpec& detector_;
  const VariationalConfig& cfg_;
  int iterations_ = 0;
  int evaluations_ = 0;
};

} // namespace

std::vector<double> weight_normalize(std::span<const Observation> observations)
{
  std::vector<double> w;
  w.reserve(observations.size());
  for (std::size_t s = 0; s < observations.size(); ++s) {
    const double ss = sum_of_squares(observations[s].chromatogram.response);
    if (!(ss > 0.0) || !std::isfinite(ss))
      throw ValidationError("observation " + std::to_string(s) + " has an all-zero chromatogram");
    w.push_back(1.0 / ss);
  }
  return w;
}

void assign_weights(std::span<Observation> observations)
{
  const auto w = weight_normalize(observations);
  for (std::size_t s = 0; s < observations.size(); ++s)
    observations[s].weight = w[s];
}

Chromatogram simulate_observation(const IsothermParams& y, const Observation& obs, const ColumnConfig& column,
                                  const DetectorSpec& detector)
{
  obs.chromatogram.validate();
  const auto& grid = obs.chromatogram.time;
  ColumnConfig c = column;
  c.injection_duration = obs.injection.duration;
  const bool native = grid.front() > 0.0 && is_native_grid(grid);
  if (native) {
    c.horizon = grid.back();
    c.n_time_points = static_cast<int>(grid.size());
  } else if (!c.horizon || *c.horizon < grid.back()) {
    c.horizon = grid.back();
  }
  const Chromatogram sim = total_response(simulate(c, y, obs.injection), detector);
  if (native)
    return Chromatogram{grid, sim.response};
  Chromatogram out = regrid(sim, grid);
  if (std::isfinite(detector.r_max))
    for (double& r : out.response)
      r = std::min(r, detector.r_max);
  return out;
}

ObjectiveTerms objective_terms(const IsothermParams& y, std::span<const Observation> observations,
                               const ColumnConfig& column, const DetectorSpec& detector, double alpha)
{
  if (observations.empty())
    throw ValidationError("the objective needs at least one observation");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("alpha must be finite and >= 0");
  ObjectiveTerms terms;
  for (const auto& obs : observations) {
    const Chromatogram sim = simulate_observation(y, obs, column, detector);
    const auto& t = obs.chromatogram.time;
    const auto& r = obs.chromatogram.response;
    double ss = 0.0;
    double first_moment = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double d = sim.response[i] - r[i];
      ss += d * d;
      first_moment += t[i] * d;
    }
    terms.data_per_observation.push_back(obs.weight * ss);
    terms.moment_per_observation.push_back(obs.weight * first_moment * first_moment);
    terms.data += terms.data_per_observation.back();
    terms.moment += terms.moment_per_observation.back();
  }
  terms.total = terms.data + alpha * terms.moment;
  return terms;
}

double objective(const IsothermParams& y, std::span<const Observation> observations, const ColumnConfig& column,
                 const DetectorSpec& detector, double alpha)
{
  return objective_terms(y, observations, column, detector, alpha).total;
}

void VariationalConfig::validate() const
{
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("alpha must be finite and >= 0");
  for (std::size_t j = 0; j < kDim; ++j) {
    if (!(upper[j] > 0.0) || !std::isfinite(upper[j]))
      throw ValidationError("upper bounds must be finite and > 0");
    if (initial[j] > upper[j])
      throw ValidationError("initial guess lies outside the box");
  }
  if (max_iterations < 1)
    throw ValidationError("max_iterations must be >= 1");
  if (!(tolerance >= 0.0))
    throw ValidationError("tolerance must be >= 0");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step))
    throw ValidationError("initial_step must be > 0");
  if (restarts < 0)
    throw ValidationError("restarts must be >= 0");
}

FitResult fit(std::vector<Observation> observations, const ColumnConfig& column, const DetectorSpec& detector,
              const VariationalConfig& cfg)
{
  cfg.validate();
  if (observations.empty())
    throw ValidationError("fitting needs at least one observation");
  for (auto& obs : observations) {
    obs.chromatogram.validate();
    obs.injection.validate();
  }
  assign_weights(observations);
  return BoxedSimplexSearch(observations, column, detector, cfg).run();
}

std::vector<AlphaSweepRow> alpha_sweep(const std::vector<Observation>& observations, const ColumnConfig& column,
                                       const DetectorSpec& detector, const VariationalConfig& cfg,
                                       std::span<const double> alphas)
{
  std::vector<AlphaSweepRow> rows;
  for (double a : alphas) {
    VariationalConfig c = cfg;
    c.alpha = a;
    rows.push_back(AlphaSweepRow{a, fit(observations, column, detector, c)});
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
  if (!(lo > 0.0) || !(hi >= lo) || n < 1)
    throw ValidationError("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> out;
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i)
    out.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
  out.back() = hi;
  return out;
}

} // namespace chromainv
