#pragma once

// Sample-set geometry: Lagrange polynomials, sampled Lambda-poisedness, and the
// construction / selection routines used between solver iterations.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dfpp/model.hpp"

namespace dfpp {

struct GeometryConfig {
  double lambda_threshold = 100.0;
  /// Ball samples used to estimate max |l_i|; 0 means 50 n.
  int candidate_count = 0;
  /// Greedy replacement rounds; 0 means 20 (n+1)(n+2)/2.
  int max_improvement_rounds = 0;
  std::uint64_t seed = 0;

  int candidates_for(Eigen::Index n) const;
  int rounds_for(Eigen::Index n) const;
  /// Throws BadInput when lambda_threshold <= 1 or candidate_count < 2n.
  void validate(Eigen::Index n) const;
};

/// Lagrange polynomials of a linear (n+1 points) or quadratic
/// ((n+1)(n+2)/2 points) sample set, in scaled monomial coordinates.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(const SampleSet& Y);

  bool quadratic() const { return quadratic_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.cols()); }

  /// Column i holds the monomial coefficients of l_i in the scaled frame.
  const Matrix& coefficients() const { return coeffs_; }

  /// (l_0(x), ..., l_p(x)).
  Vector values(const Vector& x) const;

  /// Column j holds values(points.col(j)).
  Matrix values_at(const Matrix& points) const;

 private:
  Vector centre_;
  double scale_ = 1.0;
  bool quadratic_ = false;
  Matrix coeffs_;
};

/// Deterministic sample of the unit ball (columns): half on the sphere, half inside.
Matrix unit_ball_candidates(Eigen::Index n, int count, std::uint64_t seed);

/// Sampled max_i max_{x in B_radius(y0)} |l_i(x)|, never below 1.
double poisedness_constant(const SampleSet& Y, double radius, const GeometryConfig& cfg = {});

/// Safety check used after subset selection. A full quadratic set must be
/// quadratically Lambda-poised; any smaller set must have a linearly
/// Lambda-poised prefix of n+1 points, and minimum-Frobenius sizes must
/// additionally have a well-conditioned KKT matrix.
bool passes_safety_check(const SampleSet& Y, double radius, const GeometryConfig& cfg);

/// Expands `seed` (centre first) to (n+1)(n+2)/2 points inside B_radius(centre).
/// Seed points are kept where they are well placed; the first n+1 points of
/// the result always form a linearly Lambda-poised set. Throws GeometryFailure.
SampleSet complete_well_poised_set(const SampleSet& seed, double radius, const GeometryConfig& cfg);

/// Overload for large candidate pools: `extra` may hold duplicates or points
/// outside the ball, which are skipped. Earlier points are preferred.
SampleSet complete_well_poised_set(const Vector& centre, std::span<const Vector> extra,
                                   double radius, const GeometryConfig& cfg);

/// First `count` points of `full`; falls back to a fresh well-poised set
/// around the same centre when the prefix fails the safety check.
SampleSet select_subset(const SampleSet& full, std::size_t count, double radius,
                        const GeometryConfig& cfg);

enum class IterationOutcome { Serious, NullType1, NullType2 };

const char* to_string(IterationOutcome outcome);

/// Read-only view of previously evaluated points, most recent first.
using PointHistory = std::span<const Vector>;

/// Builds Y^{k+1} after an iteration with sampling radius `delta` for Y^k.
///  - Serious: centred at x_next, reuses history inside B_delta(x_next).
///  - NullType1: first target_size points of Yk when it is large enough,
///    otherwise Yk completed at radius delta.
///  - NullType2: centred at x_next, reuses history inside B_{gamma delta}(x_next).
SampleSet next_sample_set(IterationOutcome outcome, const SampleSet& Yk, const Vector& x_next,
                          double delta, double gamma, std::size_t target_size,
                          PointHistory history, const GeometryConfig& cfg);

}  // namespace dfpp
