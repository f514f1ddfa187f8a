#pragma once

// Unconstrained test problems and the counting, caching evaluator used to
// enforce call budgets.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dfpp/model.hpp"

namespace dfpp {

using Objective = std::function<double(const Vector&)>;

enum class ProblemGroup { LowDim, HighDim };

const char* to_string(ProblemGroup group);
std::optional<ProblemGroup> parse_group(std::string_view text);

struct Problem {
  std::string name;   // lower-case key, e.g. "freudenstein_roth"
  std::string title;  // display name, e.g. "Freudenstein & Roth"
  std::size_t dim = 0;
  Objective objective;
  Vector x0;
  double fbest = 0.0;
  /// Known minimiser, when one is available in closed form.
  std::optional<Vector> xbest;
  ProblemGroup group = ProblemGroup::LowDim;
  std::string source;

  double f0() const { return objective(x0); }
};

class ProblemRegistry {
 public:
  /// Throws BadInput if (name, dim) is already registered or the entry is inconsistent.
  void add(Problem problem);

  /// Case-insensitive lookup; throws UnknownProblem.
  const Problem& get(std::string_view name, std::size_t dim) const;
  bool contains(std::string_view name, std::size_t dim) const;

  /// Registration order, optionally filtered by group.
  std::vector<Problem> list(std::optional<ProblemGroup> group = std::nullopt) const;

  /// The built-in collection.
  static const ProblemRegistry& standard();

 private:
  std::vector<Problem> problems_;
};

const Problem& get_problem(std::string_view name, std::size_t dim);
std::vector<Problem> list_problems(std::optional<ProblemGroup> group = std::nullopt);

/// "name,dim,group,f0,fbest" header plus one line per problem.
std::string registry_csv(const std::vector<Problem>& problems);

struct EvaluationRecord {
  std::size_t call_index = 0;  // 1-based
  Vector point;
  double value = 0.0;  // raw objective output
};

/// Wraps an objective with a point cache keyed on exact coordinate bits.
/// Only cache misses reach the objective, are counted and are traced.
class CountedObjective {
 public:
  CountedObjective(Objective objective, Eigen::Index dim);

  /// Non-finite objective values are traced as returned, cached as +inf and
  /// the point is marked poisoned.
  double evaluate(const Vector& x);

  std::optional<double> cached(const Vector& x) const;
  bool poisoned(const Vector& x) const;

  std::size_t call_count() const { return trace_.size(); }
  const std::vector<EvaluationRecord>& trace() const { return trace_; }
  Eigen::Index dim() const { return dim_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const noexcept;
  };
  using Key = std::vector<std::uint64_t>;
  static Key key_of(const Vector& x);

  Objective objective_;
  Eigen::Index dim_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
  std::vector<EvaluationRecord> trace_;
  std::vector<bool> poisoned_;
};

double evaluate_counted(CountedObjective& co, const Vector& x);

}  // namespace dfpp
