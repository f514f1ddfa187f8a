#pragma once

// Benchmark harness: strategy x problem x line-search grids, the
// improvement metric, ranked tables and data profiles.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dfpp/problems.hpp"
#include "dfpp/solver.hpp"
#include "dfpp/strategy.hpp"

namespace dfpp {

inline constexpr double kDigitCap = 16.0;

struct RunRecord {
  std::string problem;
  std::size_t dim = 0;
  Strategy strategy;
  bool line_search = false;
  StopReason stop_reason = StopReason::BudgetExhausted;
  double f0 = 0.0;
  double fbest = 0.0;
  /// Raw value of call i+1, in evaluation order.
  std::vector<double> f_values;
  /// Prox-centre values per iteration; empty when read back from CSV.
  std::vector<double> centre_values;

  std::string problem_key() const;
  /// Smallest finite value evaluated, f0 when there is none.
  double best_f() const;
};

/// min(-log10(|f - fbest| / |f0 - fbest|), 16); 16 when f == fbest.
/// Throws DegenerateProblem when f0 == fbest.
double improvement_digits(double f, double f0, double fbest);

struct BenchConfig {
  SolverConfig solver;
  GeometryConfig geometry;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Optional replacement for a problem's objective, called once per run
  /// with the run's index in the output.
  std::function<Objective(const Problem&, std::size_t run_index)> objective_for;
};

/// Seed of one run, fixed by (seed, problem, dim, strategy, line search).
std::uint64_t run_seed(std::uint64_t seed, const Problem& problem, const Strategy& strategy,
                       bool line_search);

/// One record per (problem, strategy, line-search mode), in that nesting
/// order. Output does not depend on the worker count.
std::vector<RunRecord> run_benchmark(const std::vector<Problem>& problems,
                                     const std::vector<Strategy>& strategies,
                                     const std::vector<bool>& line_search_modes,
                                     const BenchConfig& config);

std::vector<RunRecord> run_benchmark(const std::vector<Problem>& problems,
                                     const std::vector<Strategy>& strategies, bool line_search,
                                     const BenchConfig& config);

struct ImprovementRow {
  Strategy strategy;
  bool line_search = false;
  double imp = 0.0;
  std::map<std::string, double> per_problem;
};

/// One row per (strategy, line search), best-seen f per run, sorted by
/// descending imp (ties keep first-appearance order). Problems with
/// f0 == fbest are left out and named in `excluded`. Throws IncompleteGrid.
std::vector<ImprovementRow> aggregate_table(const std::vector<RunRecord>& records,
                                            std::vector<std::string>* excluded = nullptr);

struct ProfileCurve {
  Strategy strategy;
  bool line_search = false;
  double tau = 0.0;
  std::vector<int> alpha;
  std::vector<double> fraction;
};

/// Call index at which the run first reaches f <= fbest + tau (f0 - fbest),
/// 0 when it never does.
std::size_t solved_at(const RunRecord& record, double tau);

/// One curve per (strategy, line search) in first-appearance order, over
/// alpha = 1..max_alpha.
std::vector<ProfileCurve> data_profile(const std::vector<RunRecord>& records, double tau,
                                       int max_alpha = 100);

/// The eight-curve selection: lin/lin/lin, quad/quad/quad, lin/lin/2n and
/// lin/2n/lin, each with and without line search.
std::vector<Strategy> profile_strategies();

/// Strategies of the desk-scale grid (the profile four plus four more).
std::vector<Strategy> desk_strategies();

std::string runs_csv(const std::vector<RunRecord>& records);
std::string table_csv(const std::vector<ImprovementRow>& rows);
std::string profile_csv(const std::vector<ProfileCurve>& curves);

/// Parses runs.csv; f0 is the first value of each run and fbest comes from
/// `registry`. Throws BadInput on malformed text, UnknownProblem otherwise.
std::vector<RunRecord> parse_runs_csv(std::string_view text,
                                      const ProblemRegistry& registry = ProblemRegistry::standard());

struct TableRow {
  Strategy strategy;
  bool line_search = false;
  double imp = 0.0;
};
std::vector<TableRow> parse_table_csv(std::string_view text);

struct ProfilePoint {
  Strategy strategy;
  bool line_search = false;
  double tau = 0.0;
  int alpha = 0;
  double fraction = 0.0;
};
std::vector<ProfilePoint> parse_profile_csv(std::string_view text);

}  // namespace dfpp
