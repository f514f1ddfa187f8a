#pragma once

// Derivative-free proximal point solver.

#include <array>
#include <cstdint>
#include <string_view>
#include <optional>
#include <vector>

#include "dfpp/geometry.hpp"
#include "dfpp/model.hpp"
#include "dfpp/problems.hpp"
#include "dfpp/strategy.hpp"

namespace dfpp {

struct SolverConfig {
  double r0 = 1.0;
  double m = 0.1;
  double gamma = 0.5;
  /// Accepted for completeness; no stopping test uses it.
  double rtol = 1e-8;
  double dtol = 1e-10;
  double gtol_grad = 1e-6;
  double gtol_delta = 1e-6;
  int budget_factor = 100;
  /// Initial sampling radius; 0 means 0.1 max(1, ||x0||_inf).
  double delta0 = 0.0;
  bool line_search = false;
  int max_expansions = 10;
  double serious_radius_factor = 1.0;
  /// 0 means no cap beyond the call budget.
  int max_iterations = 0;

  double delta0_for(const Vector& x0) const;
  /// Throws BadInput.
  void validate() const;
};

enum class StopReason { GradientSuccess, RadiusStop, BudgetExhausted, GeometryFailure };

const char* to_string(StopReason reason);
std::optional<StopReason> parse_stop_reason(std::string_view text);

struct IterationLog {
  int k = 0;
  IterationOutcome outcome = IterationOutcome::Serious;
  std::size_t set_size = 0;
  ModelKind kind = ModelKind::Linear;
  double r = 0.0;  // after the prox-feasibility check
  double delta = 0.0;
  double f_centre = 0.0;
  double delta_pred = 0.0;
  double min_eig_shifted = 0.0;  // lambda_min(H) + r
  std::size_t calls = 0;         // evaluations so far, at the end of the iteration
};

struct RunResult {
  Vector final_x;
  double final_f = 0.0;
  StopReason stop_reason = StopReason::BudgetExhausted;
  std::vector<EvaluationRecord> trace;
  std::array<std::size_t, 3> outcome_counts{};
  /// f at the prox-centre before the first iteration and after each one.
  std::vector<double> centre_values;
  std::vector<IterationLog> iterations;

  std::size_t count(IterationOutcome outcome) const {
    return outcome_counts[static_cast<std::size_t>(outcome)];
  }
};

/// Returns -lambda_min(H) + 1 when r <= -lambda_min(H), else r.
double prox_feasibility_adjust(double r, const Matrix& H);

struct ProxStep {
  Vector trial;
  double delta_pred = 0.0;
};

/// Minimiser of q + r/2 ||. - x||^2 and the predicted decrease q(x) - q(trial).
/// Throws SingularSystem when H + rI is not positive definite.
ProxStep prox_trial_point(const QuadraticModel& q, const Vector& x, double r);

IterationOutcome classify_step(double f_trial, double f_x, double m, double delta_pred,
                               const Vector& trial, const Vector& x, double radius);

struct LineSearchResult {
  Vector x;
  double f = 0.0;
  int evaluations = 0;
};

/// Forward expansion along x + t (trial - x), t = 2, 4, ..., while f strictly
/// improves, at most `max_expansions` steps and `budget_left` new evaluations.
LineSearchResult backtracking_line_search(CountedObjective& f, const Vector& x,
                                          const Vector& trial, double f_trial,
                                          std::size_t budget_left, int max_expansions = 10);

/// Runs the method on `f` from x0. Evaluation goes through `f`, so its trace
/// and count are the run's. Geometry failures end the run; they are not thrown.
RunResult solve(CountedObjective& f, const Vector& x0, const SolverConfig& config,
                const Strategy& strategy, const GeometryConfig& geometry = {},
                std::uint64_t seed = 0);

RunResult solve(const Objective& f, const Vector& x0, const SolverConfig& config,
                const Strategy& strategy, const GeometryConfig& geometry = {},
                std::uint64_t seed = 0);

}  // namespace dfpp
