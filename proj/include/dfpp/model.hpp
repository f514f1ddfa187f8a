#pragma once

// Polynomial interpolation models built from a sample set: linear (n+1 points),
// fully quadratic ((n+1)(n+2)/2 points) and minimum Frobenius norm (anything in
// between). All systems are assembled in the shifted and scaled coordinates
// z = (y - y0) / radius(Y) and mapped back to the caller's frame.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dfpp/errors.hpp"

namespace dfpp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Reject systems whose estimated condition number exceeds this bound.
inline constexpr double kMaxConditionNumber = 1e8;

/// Number of monomials in the linear basis {1, x_1, ..., x_n}.
constexpr std::size_t linear_size(std::size_t n) { return n + 1; }

/// Number of monomials in the full quadratic basis.
constexpr std::size_t quadratic_size(std::size_t n) { return (n + 1) * (n + 2) / 2; }

/// Ordered interpolation points; point 0 is the centre y0.
class SampleSet {
 public:
  /// Validates cardinality, equal dimensions and absence of duplicates.
  explicit SampleSet(std::vector<Vector> points);

  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return points_.front().size(); }
  const Vector& centre() const { return points_.front(); }
  const Vector& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Vector>& points() const { return points_; }

  /// max_i ||y^i - y^0||, zero for a singleton.
  double radius() const { return radius_; }

  /// The first `count` points (count >= 1).
  SampleSet prefix(std::size_t count) const;

  /// Tolerance below which two points count as duplicates.
  static double duplicate_tolerance(double radius);

 private:
  std::vector<Vector> points_;
  double radius_ = 0.0;
};

/// q(x) = a + <g, x - c> + 1/2 <x - c, H (x - c)> around the expansion point c.
///
/// Builders expand around the sample-set centre. `at_origin()` re-expands
/// around c = 0, which gives the plain (a, g, H) triple.
struct QuadraticModel {
  Vector centre;
  double a = 0.0;
  Vector g;
  Matrix H;

  static QuadraticModel from_coefficients(double a, Vector g, Matrix H);

  Eigen::Index dim() const { return g.size(); }
  double evaluate(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  const Matrix& hessian() const { return H; }

  QuadraticModel expanded_at(const Vector& new_centre) const;
  QuadraticModel at_origin() const { return expanded_at(Vector::Zero(dim())); }
};

enum class ModelKind { Linear, Quadratic, MinFrobenius };

const char* to_string(ModelKind kind);

/// Linear for n+1 points, Quadratic for a full set, MinFrobenius otherwise.
/// Throws WrongCardinality outside [n+1, (n+1)(n+2)/2].
ModelKind model_kind_for(std::size_t points, std::size_t n);

/// Monomials {1, z_1..z_n} followed, when `quadratic`, by
/// {1/2 z_1^2, z_1 z_2, ..., z_1 z_n, 1/2 z_2^2, z_2 z_3, ..., 1/2 z_n^2}.
Vector monomial_basis(const Vector& z, bool quadratic);

/// Rows are monomial_basis(z_i) for each column z_i of `points`.
Matrix interpolation_matrix(const Matrix& points, bool quadratic);

/// Symmetric Hessian assembled from the quadratic coefficients (basis order above).
Matrix hessian_from_coefficients(std::span<const double> quadratic_coeffs, Eigen::Index n);

/// Inverse of hessian_from_coefficients.
Vector coefficients_from_hessian(const Matrix& H);

QuadraticModel build_linear_model(const SampleSet& Y, const Vector& fvals);
QuadraticModel build_quadratic_model(const SampleSet& Y, const Vector& fvals);
QuadraticModel build_mfn_model(const SampleSet& Y, const Vector& fvals);

/// Dispatches on model_kind_for(Y.size(), n).
QuadraticModel build_model(const SampleSet& Y, const Vector& fvals);

double evaluate_model(const QuadraticModel& q, const Vector& x);
Vector model_gradient(const QuadraticModel& q, const Vector& x);

/// Algebraically smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& H);

}  // namespace dfpp
