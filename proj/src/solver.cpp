#include "dfpp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dfpp {
namespace {

constexpr int kMaxSetAttempts = 30;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(seed ^ splitmix(a)) ^ b);
}

std::vector<Vector> history_of(const CountedObjective& f) {
  std::vector<Vector> out;
  const auto& trace = f.trace();
  out.reserve(trace.size());
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    if (std::isfinite(it->value)) out.push_back(it->point);
  }
  return out;
}

struct ModelSet {
  SampleSet Y;
  Vector fvals;
  QuadraticModel q;
  double delta = 0.0;
};

// Builds and evaluates the next sample set. A set with a poisoned point, or
// one that cannot be modelled, is rebuilt around the same centre at a
// smaller radius.
std::optional<ModelSet> next_model_set(CountedObjective& f, IterationOutcome outcome,
                                       const SampleSet& Yk, const Vector& centre, double delta,
                                       double gamma, std::size_t target,
                                       const GeometryConfig& geometry, std::uint64_t seed) {
  double nominal = outcome == IterationOutcome::NullType2 ? gamma * delta : delta;
  for (int attempt = 0; attempt < kMaxSetAttempts; ++attempt) {
    GeometryConfig cfg = geometry;
    cfg.seed = mix(seed, 0x5e7, static_cast<std::uint64_t>(attempt));
    try {
      const std::vector<Vector> history = history_of(f);
      SampleSet Y = attempt == 0
                        ? next_sample_set(outcome, Yk, centre, delta, gamma, target, history, cfg)
                        : next_sample_set(IterationOutcome::Serious, Yk, centre, nominal, gamma,
                                          target, history, cfg);
      Vector fvals(static_cast<Eigen::Index>(Y.size()));
      bool poisoned = false;
      for (std::size_t i = 0; i < Y.size(); ++i) {
        fvals(static_cast<Eigen::Index>(i)) = f.evaluate(Y[i]);
        if (!std::isfinite(fvals(static_cast<Eigen::Index>(i)))) poisoned = true;
      }
      if (!poisoned) {
        QuadraticModel q = build_model(Y, fvals);
        return ModelSet{std::move(Y), std::move(fvals), std::move(q), nominal};
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GeometryFailure && e.code() != ErrorCode::NonPoised) throw;
    }
    nominal *= gamma;
    if (!(nominal > 0.0)) break;
  }
  return std::nullopt;
}

}  // namespace

double SolverConfig::delta0_for(const Vector& x0) const {
  if (delta0 > 0.0) return delta0;
  const double scale = x0.size() > 0 ? x0.cwiseAbs().maxCoeff() : 0.0;
  return 0.1 * std::max(1.0, scale);
}

void SolverConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::BadInput, what); };
  if (!(r0 > 0.0)) fail("r0 must be positive");
  if (!(m > 0.0 && m < 1.0)) fail("m must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (!(rtol > 0.0)) fail("rtol must be positive");
  if (!(dtol >= 0.0)) fail("dtol must be non-negative");
  if (!(gtol_grad > 0.0) || !(gtol_delta > 0.0)) fail("gradient tolerances must be positive");
  if (budget_factor < 0) fail("budget factor must be non-negative");
  if (!(delta0 >= 0.0) || !std::isfinite(delta0)) fail("delta0 must be positive (or 0 for default)");
  if (max_expansions < 0) fail("max_expansions must be non-negative");
  if (!(serious_radius_factor > 0.0 && serious_radius_factor <= 1.0)) {
    fail("serious_radius_factor must lie in (0, 1]");
  }
  if (max_iterations < 0) fail("max_iterations must be non-negative");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientSuccess: return "gradient_success";
    case StopReason::RadiusStop: return "radius_stop";
    case StopReason::BudgetExhausted: return "budget_exhausted";
    case StopReason::GeometryFailure: return "geometry_failure";
  }
  return "unknown";
}

std::optional<StopReason> parse_stop_reason(std::string_view text) {
  for (StopReason r : {StopReason::GradientSuccess, StopReason::RadiusStop,
                       StopReason::BudgetExhausted, StopReason::GeometryFailure}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

double prox_feasibility_adjust(double r, const Matrix& H) {
  const double lambda = min_eigenvalue(H);
  return r <= -lambda ? -lambda + 1.0 : r;
}

ProxStep prox_trial_point(const QuadraticModel& q, const Vector& x, double r) {
  if (x.size() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "prox centre dimension");
  const Matrix A = q.hessian() + r * Matrix::Identity(x.size(), x.size());
  const Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "H + rI is not positive definite");
  }
  const Vector d = llt.solve(-q.gradient(x));
  // With (H + rI) d = -grad q(x), q(x) - q(x + d) = 1/2 d'(H + rI) d + r/2 |d|^2.
  const double delta = 0.5 * d.dot(A * d) + 0.5 * r * d.squaredNorm();
  return {x + d, std::max(delta, 0.0)};
}

IterationOutcome classify_step(double f_trial, double f_x, double m, double delta_pred,
                               const Vector& trial, const Vector& x, double radius) {
  if (f_trial <= f_x - m * delta_pred) return IterationOutcome::Serious;
  return (trial - x).norm() > radius ? IterationOutcome::NullType1 : IterationOutcome::NullType2;
}

LineSearchResult backtracking_line_search(CountedObjective& f, const Vector& x,
                                          const Vector& trial, double f_trial,
                                          std::size_t budget_left, int max_expansions) {
  LineSearchResult best{trial, f_trial, 0};
  const Vector d = trial - x;
  const std::size_t start = f.call_count();
  double t = 1.0;
  for (int e = 0; e < max_expansions; ++e) {
    t *= 2.0;
    const Vector p = x + t * d;
    if (!f.cached(p) && f.call_count() - start >= budget_left) break;
    const double fp = f.evaluate(p);
    if (!(fp < best.f)) break;
    best.x = p;
    best.f = fp;
  }
  best.evaluations = static_cast<int>(f.call_count() - start);
  return best;
}

RunResult solve(CountedObjective& f, const Vector& x0, const SolverConfig& config,
                const Strategy& strategy, const GeometryConfig& geometry, std::uint64_t seed) {
  config.validate();
  const Eigen::Index n = x0.size();
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "empty start point");
  if (f.dim() != n) throw Error(ErrorCode::DimensionMismatch, "objective and start point differ");
  if (!x0.allFinite()) throw Error(ErrorCode::BadInput, "start point is not finite");
  geometry.validate(n);

  const auto un = static_cast<std::size_t>(n);
  const std::size_t budget = static_cast<std::size_t>(config.budget_factor) * un;
  const std::size_t max_iterations = config.max_iterations > 0
                                         ? static_cast<std::size_t>(config.max_iterations)
                                         : 50 * budget + 1000;

  RunResult result;
  Vector x = x0;
  double fx = f.evaluate(x);
  double r = config.r0;
  double delta = config.delta0_for(x0);
  result.centre_values.push_back(fx);

  auto finish = [&](StopReason reason) {
    result.final_x = x;
    result.final_f = fx;
    result.stop_reason = reason;
    result.trace = f.trace();
    return result;
  };

  if (!std::isfinite(fx)) return finish(StopReason::GeometryFailure);

  std::optional<ModelSet> current =
      next_model_set(f, IterationOutcome::Serious, SampleSet({x}), x, delta, config.gamma,
                     next_size(strategy, IterationOutcome::Serious, un), geometry,
                     mix(seed, 0, 0));
  if (!current) return finish(StopReason::GeometryFailure);
  delta = current->delta;

  for (std::size_t k = 0;; ++k) {
    const QuadraticModel& q = current->q;
    const Vector grad = q.gradient(x);

    // Stopping tests.
    if (grad.norm() < config.gtol_grad && delta < config.gtol_delta) {
      return finish(StopReason::GradientSuccess);
    }
    if (delta < config.dtol) return finish(StopReason::RadiusStop);
    if (f.call_count() > budget || k >= max_iterations) {
      return finish(StopReason::BudgetExhausted);
    }

    // Prox step.
    r = prox_feasibility_adjust(r, q.hessian());
    ProxStep step;
    try {
      step = prox_trial_point(q, x, r);
    } catch (const Error&) {
      // Rounding can leave lambda_min(H) + r at zero for a huge indefinite H.
      r = 2.0 * std::max(r, 1.0) + std::abs(min_eigenvalue(q.hessian()));
      step = prox_trial_point(q, x, r);
    }
    const double f_trial = f.evaluate(step.trial);

    IterationLog log;
    log.k = static_cast<int>(k);
    log.set_size = current->Y.size();
    log.kind = model_kind_for(current->Y.size(), un);
    log.r = r;
    log.delta = delta;
    log.f_centre = fx;
    log.delta_pred = step.delta_pred;
    log.min_eig_shifted = min_eigenvalue(q.hessian()) + r;

    // Classify and update.
    const IterationOutcome outcome =
        classify_step(f_trial, fx, config.m, step.delta_pred, step.trial, x, delta);
    log.outcome = outcome;
    ++result.outcome_counts[static_cast<std::size_t>(outcome)];

    double next_delta = delta;
    IterationOutcome build_as = outcome;
    switch (outcome) {
      case IterationOutcome::Serious: {
        Vector x_next = step.trial;
        double f_next = f_trial;
        if (config.line_search) {
          const std::size_t left = budget > f.call_count() ? budget - f.call_count() : 0;
          const LineSearchResult ls = backtracking_line_search(f, x, step.trial, f_trial, left,
                                                               config.max_expansions);
          x_next = ls.x;
          f_next = ls.f;
        }
        next_delta = config.serious_radius_factor * delta;
        // Near-stationary model, or a step that did not move the centre:
        // tighten the sampling radius, otherwise the same set and model
        // come back and the run stalls.
        if (grad.norm() < config.gtol_grad || x_next == x) next_delta *= config.gamma;
        x = std::move(x_next);
        fx = f_next;
        break;
      }
      case IterationOutcome::NullType1:
        r *= 2.0;
        break;
      case IterationOutcome::NullType2:
        break;
    }

    const std::size_t target = next_size(strategy, outcome, un);
    std::optional<ModelSet> next =
        next_model_set(f, build_as, current->Y, x, next_delta, config.gamma, target, geometry,
                       mix(seed, k + 1, 0));
    result.centre_values.push_back(fx);
    log.calls = f.call_count();
    result.iterations.push_back(log);
    if (!next) return finish(StopReason::GeometryFailure);
    current = std::move(next);
    delta = current->delta;
  }
}

RunResult solve(const Objective& f, const Vector& x0, const SolverConfig& config,
                const Strategy& strategy, const GeometryConfig& geometry, std::uint64_t seed) {
  CountedObjective counted(f, x0.size());
  return solve(counted, x0, config, strategy, geometry, seed);
}

}  // namespace dfpp
