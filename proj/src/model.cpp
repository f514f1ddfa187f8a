#include "dfpp/model.hpp"

#include <cmath>
#include <string>

namespace dfpp {
namespace {

void check_values(const SampleSet& Y, const Vector& fvals) {
  if (static_cast<std::size_t>(fvals.size()) != Y.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(fvals.size()) + " values for " +
                                                  std::to_string(Y.size()) + " points");
  }
}

void check_cardinality(const SampleSet& Y, std::size_t expected, const char* what) {
  if (Y.size() != expected) {
    throw Error(ErrorCode::WrongCardinality, std::string(what) + " needs " +
                                                 std::to_string(expected) + " points, got " +
                                                 std::to_string(Y.size()));
  }
}

// Columns are (y^i - y^0) / radius(Y).
Matrix scaled_points(const SampleSet& Y) {
  const double scale = Y.radius() > 0.0 ? Y.radius() : 1.0;
  Matrix Z(Y.dim(), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < Y.size(); ++i) {
    Z.col(static_cast<Eigen::Index>(i)) = (Y[i] - Y.centre()) / scale;
  }
  return Z;
}

Vector solve_checked(const Matrix& A, const Vector& rhs, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond * kMaxConditionNumber >= 1.0)) {
    throw Error(ErrorCode::NonPoised, std::string(what) + " system is ill-conditioned (rcond " +
                                          std::to_string(rcond) + ")");
  }
  return lu.solve(rhs);
}

// Maps a model in scaled coordinates back to the frame of Y.
QuadraticModel unscale(const SampleSet& Y, double a, const Vector& g_scaled,
                       const Matrix& H_scaled) {
  const double scale = Y.radius() > 0.0 ? Y.radius() : 1.0;
  QuadraticModel q;
  q.centre = Y.centre();
  q.a = a;
  q.g = g_scaled / scale;
  q.H = H_scaled / (scale * scale);
  return q;
}

}  // namespace

QuadraticModel QuadraticModel::from_coefficients(double a, Vector g, Matrix H) {
  QuadraticModel q;
  q.centre = Vector::Zero(g.size());
  q.a = a;
  q.g = std::move(g);
  q.H = std::move(H);
  return q;
}

double QuadraticModel::evaluate(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "model evaluation");
  const Vector d = x - centre;
  return a + g.dot(d) + 0.5 * d.dot(H * d);
}

Vector QuadraticModel::gradient(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "model gradient");
  return g + H * (x - centre);
}

QuadraticModel QuadraticModel::expanded_at(const Vector& new_centre) const {
  QuadraticModel q;
  q.centre = new_centre;
  q.a = evaluate(new_centre);
  q.g = gradient(new_centre);
  q.H = H;
  return q;
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Quadratic: return "quadratic";
    case ModelKind::MinFrobenius: return "mfn";
  }
  return "unknown";
}

ModelKind model_kind_for(std::size_t points, std::size_t n) {
  if (points == linear_size(n)) return ModelKind::Linear;
  if (points == quadratic_size(n)) return ModelKind::Quadratic;
  if (points > linear_size(n) && points < quadratic_size(n)) return ModelKind::MinFrobenius;
  throw Error(ErrorCode::WrongCardinality,
              std::to_string(points) + " points in dimension " + std::to_string(n));
}

Vector monomial_basis(const Vector& z, bool quadratic) {
  const Eigen::Index n = z.size();
  const Eigen::Index size = static_cast<Eigen::Index>(
      quadratic ? quadratic_size(static_cast<std::size_t>(n)) : linear_size(static_cast<std::size_t>(n)));
  Vector phi(size);
  phi(0) = 1.0;
  phi.segment(1, n) = z;
  if (quadratic) {
    Eigen::Index k = n + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      phi(k++) = 0.5 * z(i) * z(i);
      for (Eigen::Index j = i + 1; j < n; ++j) phi(k++) = z(i) * z(j);
    }
  }
  return phi;
}

Matrix interpolation_matrix(const Matrix& points, bool quadratic) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto cols = static_cast<Eigen::Index>(quadratic ? quadratic_size(n) : linear_size(n));
  Matrix M(points.cols(), cols);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    M.row(i) = monomial_basis(points.col(i), quadratic).transpose();
  }
  return M;
}

Matrix hessian_from_coefficients(std::span<const double> quadratic_coeffs, Eigen::Index n) {
  Matrix H(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = quadratic_coeffs[k++];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      H(i, j) = quadratic_coeffs[k];
      H(j, i) = quadratic_coeffs[k];
      ++k;
    }
  }
  return H;
}

Vector coefficients_from_hessian(const Matrix& H) {
  const Eigen::Index n = H.rows();
  Vector c(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    c(k++) = H(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) c(k++) = 0.5 * (H(i, j) + H(j, i));
  }
  return c;
}

QuadraticModel build_linear_model(const SampleSet& Y, const Vector& fvals) {
  check_values(Y, fvals);
  const auto n = static_cast<std::size_t>(Y.dim());
  check_cardinality(Y, linear_size(n), "linear model");
  const Matrix M = interpolation_matrix(scaled_points(Y), false);
  const Vector alpha = solve_checked(M, fvals, "linear interpolation");
  return unscale(Y, alpha(0), alpha.tail(Y.dim()), Matrix::Zero(Y.dim(), Y.dim()));
}

QuadraticModel build_quadratic_model(const SampleSet& Y, const Vector& fvals) {
  check_values(Y, fvals);
  const Eigen::Index n = Y.dim();
  check_cardinality(Y, quadratic_size(static_cast<std::size_t>(n)), "quadratic model");
  const Matrix M = interpolation_matrix(scaled_points(Y), true);
  const Vector alpha = solve_checked(M, fvals, "quadratic interpolation");
  const Vector quad = alpha.tail(alpha.size() - n - 1);
  return unscale(Y, alpha(0), alpha.segment(1, n),
                 hessian_from_coefficients({quad.data(), static_cast<std::size_t>(quad.size())}, n));
}

// Solves min 1/2 ||alpha_Q||^2 s.t. M_L alpha_L + M_Q alpha_Q = f through
//   [ M_Q M_Q^T  M_L ] [lambda ]   [f]
//   [ M_L^T      0   ] [alpha_L] = [0],   alpha_Q = M_Q^T lambda.
QuadraticModel build_mfn_model(const SampleSet& Y, const Vector& fvals) {
  check_values(Y, fvals);
  const Eigen::Index n = Y.dim();
  const auto un = static_cast<std::size_t>(n);
  if (Y.size() < linear_size(un) || Y.size() > quadratic_size(un)) {
    throw Error(ErrorCode::WrongCardinality, "minimum Frobenius norm model needs between " +
                                                 std::to_string(linear_size(un)) + " and " +
                                                 std::to_string(quadratic_size(un)) + " points");
  }
  const Matrix M = interpolation_matrix(scaled_points(Y), true);
  const Eigen::Index rows = M.rows();
  const Eigen::Index lin = n + 1;
  const auto ML = M.leftCols(lin);
  const auto MQ = M.rightCols(M.cols() - lin);

  Matrix F = Matrix::Zero(rows + lin, rows + lin);
  F.topLeftCorner(rows, rows) = MQ * MQ.transpose();
  F.topRightCorner(rows, lin) = ML;
  F.bottomLeftCorner(lin, rows) = ML.transpose();
  Vector rhs = Vector::Zero(rows + lin);
  rhs.head(rows) = fvals;

  const Vector sol = solve_checked(F, rhs, "minimum Frobenius norm");
  const Vector alpha_L = sol.tail(lin);
  const Vector alpha_Q = MQ.transpose() * sol.head(rows);
  return unscale(Y, alpha_L(0), alpha_L.tail(n),
                 hessian_from_coefficients(
                     {alpha_Q.data(), static_cast<std::size_t>(alpha_Q.size())}, n));
}

QuadraticModel build_model(const SampleSet& Y, const Vector& fvals) {
  switch (model_kind_for(Y.size(), static_cast<std::size_t>(Y.dim()))) {
    case ModelKind::Linear: return build_linear_model(Y, fvals);
    case ModelKind::Quadratic: return build_quadratic_model(Y, fvals);
    case ModelKind::MinFrobenius: return build_mfn_model(Y, fvals);
  }
  throw Error(ErrorCode::WrongCardinality, "unreachable");
}

double evaluate_model(const QuadraticModel& q, const Vector& x) { return q.evaluate(x); }

Vector model_gradient(const QuadraticModel& q, const Vector& x) { return q.gradient(x); }

double min_eigenvalue(const Matrix& H) {
  if (H.rows() != H.cols()) throw Error(ErrorCode::DimensionMismatch, "Hessian must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace dfpp
