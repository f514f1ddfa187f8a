#include <algorithm>
#include <string>

#include "dfpp/model.hpp"

namespace dfpp {

SampleSet::SampleSet(std::vector<Vector> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw Error(ErrorCode::WrongCardinality, "sample set needs at least one point");
  }
  const Eigen::Index n = points_.front().size();
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "points must have dimension >= 1");
  for (const Vector& y : points_) {
    if (y.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "point of dimension " + std::to_string(y.size()) + " in a set of dimension " +
                      std::to_string(n));
    }
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    radius_ = std::max(radius_, (points_[i] - points_[0]).norm());
  }
  const double tol = duplicate_tolerance(radius_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      if ((points_[i] - points_[j]).norm() <= tol) {
        throw Error(ErrorCode::NonPoised,
                    "duplicate points " + std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

double SampleSet::duplicate_tolerance(double radius) { return 1e-12 * std::max(1.0, radius); }

SampleSet SampleSet::prefix(std::size_t count) const {
  if (count < 1 || count > points_.size()) {
    throw Error(ErrorCode::WrongCardinality, "prefix of " + std::to_string(count) + " from " +
                                                 std::to_string(points_.size()) + " points");
  }
  return SampleSet(std::vector<Vector>(points_.begin(), points_.begin() + count));
}

}  // namespace dfpp
