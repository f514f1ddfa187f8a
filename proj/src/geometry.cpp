#include "dfpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace dfpp {
namespace {

// Minimum pivot (scaled units) for keeping a previously sampled point.
constexpr double kSeedPivot = 0.1;
// Minimum pivot for a template point in the quadratic stage.
constexpr double kTemplatePivot = 1e-3;

bool inside_ball(const Vector& z) { return z.norm() <= 1.0 + 1e-12; }

// Working representation: points relative to the centre, divided by the radius.
Matrix basis_rows(const std::vector<Vector>& z, bool quadratic) {
  const Eigen::Index n = z.front().size();
  Matrix pts(n, static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = z[i];
  return interpolation_matrix(pts, quadratic);
}

double max_abs_from(const Matrix& L, Eigen::Index first_row, Eigen::Index& row, Eigen::Index& col) {
  double best = -1.0;
  row = col = 0;
  for (Eigen::Index j = 0; j < L.cols(); ++j) {
    for (Eigen::Index i = first_row; i < L.rows(); ++i) {
      const double v = std::abs(L(i, j));
      if (v > best) {
        best = v;
        row = i;
        col = j;
      }
    }
  }
  return best;
}

// Greedy Lagrange-maximum replacement over a fixed candidate sample. Only
// points with index >= first_free may be replaced; success is judged on all
// Lagrange polynomials. Returns the remaining sampled maximum.
double improve_poisedness(std::vector<Vector>& z, bool quadratic, std::size_t first_free,
                          const Matrix& candidates, double threshold, int& rounds_left) {
  const Matrix M = basis_rows(z, quadratic);
  Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() * kMaxConditionNumber >= 1.0)) {
    throw Error(ErrorCode::GeometryFailure, "interpolation set lost poisedness");
  }
  Matrix C = lu.inverse();
  Matrix L = C.transpose() * interpolation_matrix(candidates, quadratic).transpose();

  Eigen::Index row = 0, col = 0;
  double worst = max_abs_from(L, 0, row, col);
  while (worst > threshold && rounds_left > 0) {
    Eigen::Index free_row = 0, free_col = 0;
    const double free_max =
        max_abs_from(L, static_cast<Eigen::Index>(first_free), free_row, free_col);
    if (free_max <= 1.0) break;  // no admissible replacement increases |det M|
    --rounds_left;

    z[static_cast<std::size_t>(free_row)] = candidates.col(free_col);
    const Vector at_new = L.col(free_col);
    const double pivot = at_new(free_row);
    C.col(free_row) /= pivot;
    L.row(free_row) /= pivot;
    for (Eigen::Index k = 0; k < L.rows(); ++k) {
      if (k == free_row) continue;
      C.col(k) -= at_new(k) * C.col(free_row);
      L.row(k) -= at_new(k) * L.row(free_row);
    }
    worst = max_abs_from(L, 0, row, col);
  }
  return worst;
}

// Picks n directions for the linear prefix: well-placed seeds first, then
// unit vectors orthogonal to what is already there.
std::vector<Vector> linear_stage(const std::vector<Vector>& seeds, Eigen::Index n,
                                 std::vector<bool>& used) {
  std::vector<Vector> z{Vector::Zero(n)};
  Matrix Q(n, 0);
  auto residual = [&](const Vector& v) -> Vector { return v - Q * (Q.transpose() * v); };
  auto push = [&](const Vector& point, const Vector& r) {
    z.push_back(point);
    Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
    Q.col(Q.cols() - 1) = r.normalized();
  };

  for (std::size_t s = 0; s < seeds.size() && Q.cols() < n; ++s) {
    const Vector r = residual(seeds[s]);
    if (r.norm() >= kSeedPivot) {
      push(seeds[s], r);
      used[s] = true;
    }
  }
  while (Q.cols() < n) {
    Vector best_r;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector r = residual(Vector::Unit(n, i));
      if (r.norm() > best + 1e-12) {
        best = r.norm();
        best_r = r;
      }
    }
    push(best_r.normalized(), best_r);
  }
  return z;
}

// Null-space tracker for polynomials vanishing on the accepted points.
class VanishingSpace {
 public:
  explicit VanishingSpace(const std::vector<Vector>& accepted) {
    const Matrix Mt = basis_rows(accepted, true).transpose();  // q x k
    Eigen::HouseholderQR<Matrix> qr(Mt);
    const Matrix Qfull = qr.householderQ();
    U_ = Qfull.rightCols(Mt.rows() - Mt.cols());
  }

  Eigen::Index dimension() const { return U_.cols(); }

  double pivot(const Vector& z) const { return (U_.transpose() * monomial_basis(z, true)).norm(); }

  void accept(const Vector& z) {
    const Vector v = U_.transpose() * monomial_basis(z, true);
    const double sigma = v(0) >= 0.0 ? v.norm() : -v.norm();
    Vector w = v;
    w(0) += sigma;
    const double ww = w.squaredNorm();
    if (ww > 0.0) U_ -= (2.0 / ww) * (U_ * w) * w.transpose();
    U_ = U_.rightCols(U_.cols() - 1).eval();
  }

 private:
  Matrix U_;
};

std::vector<Vector> quadratic_templates(Eigen::Index n) {
  std::vector<Vector> t;
  for (Eigen::Index i = 0; i < n; ++i) t.push_back(-Vector::Unit(n, i));
  for (Eigen::Index i = 0; i < n; ++i) t.push_back(Vector::Unit(n, i));
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      t.push_back(s * (Vector::Unit(n, i) + Vector::Unit(n, j)));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      t.push_back(s * (Vector::Unit(n, i) - Vector::Unit(n, j)));
    }
  }
  return t;
}

void quadratic_stage(std::vector<Vector>& z, const std::vector<Vector>& seeds,
                     const std::vector<bool>& used, const Matrix& candidates) {
  const Eigen::Index n = z.front().size();
  const std::size_t q = quadratic_size(static_cast<std::size_t>(n));
  VanishingSpace space(z);
  auto offer = [&](const Vector& p, double min_pivot) {
    if (z.size() < q && space.pivot(p) >= min_pivot) {
      space.accept(p);
      z.push_back(p);
    }
  };
  for (std::size_t s = 0; s < seeds.size() && z.size() < q; ++s) {
    if (!used[s]) offer(seeds[s], kSeedPivot);
  }
  for (const Vector& t : quadratic_templates(n)) offer(t, kTemplatePivot);
  while (z.size() < q) {
    Eigen::Index best_j = -1;
    double best = kTemplatePivot;
    for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
      const double p = space.pivot(candidates.col(j));
      if (p > best) {
        best = p;
        best_j = j;
      }
    }
    if (best_j < 0) throw Error(ErrorCode::GeometryFailure, "cannot complete quadratic set");
    space.accept(candidates.col(best_j));
    z.push_back(candidates.col(best_j));
  }
}

// Moves a well-conditioned simplex among z[1..] to positions 1..n.
void reorder_linear_prefix(std::vector<Vector>& z) {
  const Eigen::Index n = z.front().size();
  Matrix Q(n, 0);
  for (std::size_t slot = 1; slot <= static_cast<std::size_t>(n); ++slot) {
    std::size_t best_i = slot;
    double best = -1.0;
    for (std::size_t i = slot; i < z.size(); ++i) {
      const double r = (z[i] - Q * (Q.transpose() * z[i])).norm();
      if (r > best) {
        best = r;
        best_i = i;
      }
    }
    std::swap(z[slot], z[best_i]);
    const Vector r = z[slot] - Q * (Q.transpose() * z[slot]);
    Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
    Q.col(Q.cols() - 1) = r.normalized();
  }
}

double linear_prefix_lambda(const std::vector<Vector>& z, const Matrix& candidates) {
  std::vector<Vector> prefix(z.begin(), z.begin() + z.front().size() + 1);
  int no_rounds = 0;
  return improve_poisedness(prefix, false, prefix.size(), candidates,
                            std::numeric_limits<double>::infinity(), no_rounds);
}

SampleSet to_sample_set(const Vector& centre, double radius, const std::vector<Vector>& z) {
  std::vector<Vector> pts;
  pts.reserve(z.size());
  pts.push_back(centre);
  for (std::size_t i = 1; i < z.size(); ++i) pts.push_back(centre + radius * z[i]);
  return SampleSet(std::move(pts));
}

bool is_conforming_full_set(const SampleSet& Y, double radius, const GeometryConfig& cfg) {
  const auto n = static_cast<std::size_t>(Y.dim());
  if (Y.size() != quadratic_size(n)) return false;
  if (Y.radius() > radius * (1.0 + 1e-12)) return false;
  try {
    return poisedness_constant(Y, radius, cfg) <= cfg.lambda_threshold &&
           poisedness_constant(Y.prefix(n + 1), radius, cfg) <= cfg.lambda_threshold;
  } catch (const Error&) {
    return false;
  }
}

std::vector<Vector> in_ball(const Vector& centre, std::span<const Vector> pool, double radius) {
  std::vector<Vector> out;
  for (const Vector& y : pool) {
    if ((y - centre).norm() <= radius * (1.0 + 1e-12)) out.push_back(y);
  }
  return out;
}

SampleSet complete_points(const Vector& centre, std::span<const Vector> extra, double radius,
                          const GeometryConfig& cfg, bool full);

}  // namespace

int GeometryConfig::candidates_for(Eigen::Index n) const {
  return candidate_count > 0 ? candidate_count : static_cast<int>(50 * n);
}

int GeometryConfig::rounds_for(Eigen::Index n) const {
  return max_improvement_rounds > 0
             ? max_improvement_rounds
             : static_cast<int>(20 * quadratic_size(static_cast<std::size_t>(n)));
}

void GeometryConfig::validate(Eigen::Index n) const {
  if (!(lambda_threshold > 1.0)) {
    throw Error(ErrorCode::BadInput, "lambda_threshold must exceed 1");
  }
  if (candidates_for(n) < 2 * n) throw Error(ErrorCode::BadInput, "candidate_count must be >= 2n");
}

LagrangeBasis::LagrangeBasis(const SampleSet& Y)
    : centre_(Y.centre()), scale_(Y.radius() > 0.0 ? Y.radius() : 1.0) {
  const auto n = static_cast<std::size_t>(Y.dim());
  if (Y.size() == linear_size(n)) {
    quadratic_ = false;
  } else if (Y.size() == quadratic_size(n)) {
    quadratic_ = true;
  } else {
    throw Error(ErrorCode::WrongCardinality,
                "Lagrange basis needs n+1 or (n+1)(n+2)/2 points, got " + std::to_string(Y.size()));
  }
  Matrix Z(Y.dim(), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < Y.size(); ++i) {
    Z.col(static_cast<Eigen::Index>(i)) = (Y[i] - centre_) / scale_;
  }
  Eigen::PartialPivLU<Matrix> lu(interpolation_matrix(Z, quadratic_));
  if (!(lu.rcond() * kMaxConditionNumber >= 1.0)) {
    throw Error(ErrorCode::NonPoised, "sample set is not poised");
  }
  coeffs_ = lu.inverse();
}

Vector LagrangeBasis::values(const Vector& x) const {
  if (x.size() != centre_.size()) throw Error(ErrorCode::DimensionMismatch, "Lagrange evaluation");
  return coeffs_.transpose() * monomial_basis((x - centre_) / scale_, quadratic_);
}

Matrix LagrangeBasis::values_at(const Matrix& points) const {
  if (points.rows() != centre_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Lagrange evaluation");
  }
  const Matrix Z = (points.colwise() - centre_) / scale_;
  return coeffs_.transpose() * interpolation_matrix(Z, quadratic_).transpose();
}

Matrix unit_ball_candidates(Eigen::Index n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  Matrix out(n, count);
  for (int j = 0; j < count; ++j) {
    Vector v(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    } while (v.norm() == 0.0);
    v.normalize();
    if (j >= count / 2) v *= std::pow(uniform(rng), 1.0 / static_cast<double>(n));
    out.col(j) = v;
  }
  return out;
}

double poisedness_constant(const SampleSet& Y, double radius, const GeometryConfig& cfg) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadInput, "radius must be positive");
  const LagrangeBasis basis(Y);
  const Matrix Z = unit_ball_candidates(Y.dim(), cfg.candidates_for(Y.dim()), cfg.seed);
  const Matrix X = (radius * Z).colwise() + Y.centre();
  return std::max(1.0, basis.values_at(X).cwiseAbs().maxCoeff());
}

bool passes_safety_check(const SampleSet& Y, double radius, const GeometryConfig& cfg) {
  const auto n = static_cast<std::size_t>(Y.dim());
  if (Y.size() < linear_size(n) || Y.size() > quadratic_size(n)) return false;
  try {
    if (Y.size() == quadratic_size(n)) {
      return poisedness_constant(Y, radius, cfg) <= cfg.lambda_threshold;
    }
    if (poisedness_constant(Y.prefix(n + 1), radius, cfg) > cfg.lambda_threshold) return false;
    if (Y.size() > linear_size(n)) {
      build_mfn_model(Y, Vector::Zero(static_cast<Eigen::Index>(Y.size())));
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

SampleSet complete_well_poised_set(const SampleSet& seed, double radius,
                                   const GeometryConfig& cfg) {
  if (is_conforming_full_set(seed, radius, cfg)) return seed;
  const std::span<const Vector> extra(seed.points().data() + 1, seed.size() - 1);
  return complete_well_poised_set(seed.centre(), extra, radius, cfg);
}

SampleSet complete_well_poised_set(const Vector& centre, std::span<const Vector> extra,
                                   double radius, const GeometryConfig& cfg) {
  return complete_points(centre, extra, radius, cfg, true);
}

namespace {

// With full == false only the linear stage runs; the n+1 points returned are
// the prefix the full completion would produce whenever its quadratic
// improvement leaves the prefix alone.
SampleSet complete_points(const Vector& centre, std::span<const Vector> extra, double radius,
                          const GeometryConfig& cfg, bool full) {
  const Eigen::Index n = centre.size();
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "empty centre");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::GeometryFailure, "sampling radius must be positive and finite");
  }
  cfg.validate(n);

  std::vector<Vector> seeds;
  const double dup = SampleSet::duplicate_tolerance(radius) / radius;
  for (const Vector& y : extra) {
    if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "seed point dimension");
    Vector zs = (y - centre) / radius;
    if (zs.norm() > dup && inside_ball(zs)) seeds.push_back(std::move(zs));
  }

  const Matrix candidates = unit_ball_candidates(n, cfg.candidates_for(n), cfg.seed);
  const double threshold = cfg.lambda_threshold;
  int rounds = cfg.rounds_for(n);

  std::vector<bool> used(seeds.size(), false);
  std::vector<Vector> z = linear_stage(seeds, n, used);
  if (improve_poisedness(z, false, 1, candidates, threshold, rounds) > threshold) {
    throw Error(ErrorCode::GeometryFailure, "linear prefix did not reach the poisedness target");
  }
  if (!full) return to_sample_set(centre, radius, z);

  quadratic_stage(z, seeds, used, candidates);
  const auto lin = static_cast<std::size_t>(n) + 1;
  if (improve_poisedness(z, true, lin, candidates, threshold, rounds) > threshold) {
    if (improve_poisedness(z, true, 1, candidates, threshold, rounds) > threshold) {
      throw Error(ErrorCode::GeometryFailure, "quadratic set did not reach the poisedness target");
    }
    if (linear_prefix_lambda(z, candidates) > threshold) {
      reorder_linear_prefix(z);
      if (linear_prefix_lambda(z, candidates) > threshold) {
        throw Error(ErrorCode::GeometryFailure, "no linearly poised prefix in completed set");
      }
    }
  }
  return to_sample_set(centre, radius, z);
}

SampleSet completion_for(const Vector& centre, std::span<const Vector> extra, double radius,
                         std::size_t target, const GeometryConfig& cfg) {
  const bool full = target > static_cast<std::size_t>(centre.size()) + 1;
  return complete_points(centre, extra, radius, cfg, full);
}

}  // namespace

SampleSet select_subset(const SampleSet& full, std::size_t count, double radius,
                        const GeometryConfig& cfg) {
  const auto n = static_cast<std::size_t>(full.dim());
  if (count < linear_size(n) || count > full.size() || count > quadratic_size(n)) {
    throw Error(ErrorCode::WrongCardinality, "cannot select " + std::to_string(count) + " of " +
                                                 std::to_string(full.size()) + " points");
  }
  SampleSet subset = full.prefix(count);
  if (passes_safety_check(subset, radius, cfg)) return subset;

  const SampleSet fresh =
      complete_well_poised_set(full.centre(), std::span<const Vector>{}, radius, cfg);
  subset = fresh.prefix(count);
  if (!passes_safety_check(subset, radius, cfg)) {
    throw Error(ErrorCode::GeometryFailure, "regenerated subset failed the safety check");
  }
  return subset;
}

const char* to_string(IterationOutcome outcome) {
  switch (outcome) {
    case IterationOutcome::Serious: return "serious";
    case IterationOutcome::NullType1: return "null1";
    case IterationOutcome::NullType2: return "null2";
  }
  return "unknown";
}

SampleSet next_sample_set(IterationOutcome outcome, const SampleSet& Yk, const Vector& x_next,
                          double delta, double gamma, std::size_t target_size,
                          PointHistory history, const GeometryConfig& cfg) {
  const auto n = static_cast<std::size_t>(x_next.size());
  if (target_size < linear_size(n) || target_size > quadratic_size(n)) {
    throw Error(ErrorCode::WrongCardinality, "target size " + std::to_string(target_size));
  }
  if (!x_next.allFinite()) throw Error(ErrorCode::GeometryFailure, "non-finite centre");

  switch (outcome) {
    case IterationOutcome::Serious:
    case IterationOutcome::NullType2: {
      const double radius = outcome == IterationOutcome::Serious ? delta : gamma * delta;
      const std::vector<Vector> reuse = in_ball(x_next, history, radius);
      const SampleSet full = completion_for(x_next, reuse, radius, target_size, cfg);
      return select_subset(full, target_size, radius, cfg);
    }
    case IterationOutcome::NullType1: {
      if (Yk.size() >= target_size) return select_subset(Yk, target_size, delta, cfg);
      std::vector<Vector> pool(Yk.points().begin() + 1, Yk.points().end());
      for (Vector& y : in_ball(Yk.centre(), history, delta)) pool.push_back(std::move(y));
      const SampleSet full = completion_for(Yk.centre(), pool, delta, target_size, cfg);
      return select_subset(full, target_size, delta, cfg);
    }
  }
  throw Error(ErrorCode::GeometryFailure, "unknown outcome");
}

}  // namespace dfpp
