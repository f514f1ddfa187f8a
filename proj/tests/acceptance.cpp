// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exits non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dfpp/bench.hpp"
#include "dfpp/model.hpp"
#include "dfpp/solver.hpp"
#include "dfpp/strategy.hpp"

using namespace dfpp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, bool ok, double secs, const std::string& detail) {
  fmt::print("{} criterion {}: {} ({}; {:.2f} s)\n", ok ? "PASS" : "FAIL", id, title, detail, secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::vector<Vector> random_ball_points(std::mt19937_64& rng, Eigen::Index n, std::size_t count,
                                       const Vector& centre, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<Vector> pts{centre};
  while (pts.size() < count) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    v *= radius * std::pow(unit(rng), 1.0 / static_cast<double>(n)) / v.norm();
    pts.push_back(centre + v);
  }
  return pts;
}

// Poisedness checked directly on the scaled interpolation matrix, with the
// least-squares rank taken from an SVD rather than the builders.
bool poised(const std::vector<Vector>& pts, bool quadratic) {
  const Eigen::Index n = pts.front().size();
  double radius = 0.0;
  for (const Vector& p : pts) radius = std::max(radius, (p - pts.front()).norm());
  Matrix P(n, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    P.col(static_cast<Eigen::Index>(i)) = (pts[i] - pts.front()) / radius;
  }
  const Eigen::JacobiSVD<Matrix> svd(interpolation_matrix(P, quadratic));
  const Vector s = svd.singularValues();
  return s(s.size() - 1) > 1e-6 * s(0);
}

// The minimum Frobenius norm builder solves a KKT system whose conditioning
// is roughly the square of the linear block's, so sets are screened on that
// matrix too (2-norm condition number from an SVD, well inside 1e8).
bool mfn_poised(const std::vector<Vector>& pts) {
  const Eigen::Index n = pts.front().size();
  double radius = 0.0;
  for (const Vector& p : pts) radius = std::max(radius, (p - pts.front()).norm());
  Matrix P(n, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    P.col(static_cast<Eigen::Index>(i)) = (pts[i] - pts.front()) / radius;
  }
  const Matrix M = interpolation_matrix(P, true);
  const Eigen::Index rows = M.rows(), lin = n + 1;
  Matrix F = Matrix::Zero(rows + lin, rows + lin);
  F.topLeftCorner(rows, rows) = M.rightCols(M.cols() - lin) * M.rightCols(M.cols() - lin).transpose();
  F.topRightCorner(rows, lin) = M.leftCols(lin);
  F.bottomLeftCorner(lin, rows) = M.leftCols(lin).transpose();
  const Eigen::JacobiSVD<Matrix> svd(F);
  const Vector s = svd.singularValues();
  return s(s.size() - 1) > 1e-6 * s(0);
}

Vector values(const std::vector<Vector>& pts, const std::function<double(const Vector&)>& f) {
  Vector out(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out(static_cast<Eigen::Index>(i)) = f(pts[i]);
  return out;
}

double relative_residual(const QuadraticModel& q, const std::vector<Vector>& pts, const Vector& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double fi = f(static_cast<Eigen::Index>(i));
    worst = std::max(worst, std::abs(q.evaluate(pts[i]) - fi) / std::max(1.0, std::abs(fi)));
  }
  return worst;
}

struct RandomQuadratic {
  double a;
  Vector g;
  Matrix H;
  double operator()(const Vector& x) const { return a + g.dot(x) + 0.5 * x.dot(H * x); }
};

RandomQuadratic random_quadratic(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RandomQuadratic q{u(rng), Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) q.g(i) = u(rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) q.H(i, j) = q.H(j, i) = u(rng);
  }
  return q;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const double k = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log10(h[i]), y = std::log10(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

void criterion_model_reproduction() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const Eigen::Index dims[] = {1, 2, 3, 5};
  double worst_residual = 0.0, worst_coeff = 0.0;
  int sets = 0;
  bool ok = true;
  std::string error;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = dims[trial % 4];
    const auto un = static_cast<std::size_t>(n);
    const Vector centre = Vector::Constant(n, 0.25 * (trial % 7) - 0.5);
    const double radius = std::pow(10.0, -(trial % 3));
    const RandomQuadratic quad = random_quadratic(rng, n);
    const auto smooth = [](const Vector& x) { return std::exp(0.3 * x.sum()) + std::sin(x(0)); };
    try {
      // Linear, quadratic and an underdetermined (MFN) set.
      const std::size_t sizes[] = {linear_size(un), quadratic_size(un),
                                   std::max(linear_size(un) + 1, quadratic_size(un) - 1)};
      for (int b = 0; b < 3; ++b) {
        if (b == 2 && sizes[2] >= quadratic_size(un)) continue;  // n = 1 has no MFN range
        std::vector<Vector> pts;
        do {
          pts = random_ball_points(rng, n, sizes[b], centre, radius);
        } while (!poised(pts, b != 0) || (b == 2 && !mfn_poised(pts)));
        const SampleSet Y(pts);
        ++sets;
        const Vector fv = values(pts, smooth);
        const QuadraticModel q = b == 0   ? build_linear_model(Y, fv)
                                 : b == 1 ? build_quadratic_model(Y, fv)
                                          : build_mfn_model(Y, fv);
        worst_residual = std::max(worst_residual, relative_residual(q, pts, fv));
        if (b == 1) {
          const QuadraticModel r = build_quadratic_model(Y, values(pts, quad)).at_origin();
          worst_coeff = std::max({worst_coeff, std::abs(r.a - quad.a),
                                  (r.g - quad.g).cwiseAbs().maxCoeff(),
                                  (r.H - quad.H).cwiseAbs().maxCoeff()});
        }
      }
    } catch (const Error& e) {
      ok = false;
      error = e.what();
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && worst_residual <= 1e-8 && worst_coeff <= 1e-6 && secs < 10.0;
  report(1, "model reproduction", ok, secs,
         error.empty() ? fmt::format("{} sets, max residual {:.2e}, max coefficient error {:.2e}",
                                     sets, worst_residual, worst_coeff)
                       : "error: " + error);
}

void criterion_error_slopes() {
  const auto t0 = Clock::now();
  const auto f = [](const Vector& x) { return std::sin(x(0)) + std::cos(x(1)); };
  const auto grad = [](const Vector& x) {
    Vector g(2);
    g << std::cos(x(0)), -std::sin(x(1));
    return g;
  };
  Vector base(2);
  base << 0.4, -0.3;
  std::vector<Vector> lin_shape(3, Vector::Zero(2)), quad_shape(6, Vector::Zero(2));
  lin_shape[1] << 1, 0;
  lin_shape[2] << 0, 1;
  quad_shape[1] << 1, 0;
  quad_shape[2] << 0, 1;
  quad_shape[3] << -1, 0;
  quad_shape[4] << 0, -1;
  quad_shape[5] << 0.6, 0.6;
  std::mt19937_64 rng(2);
  const auto probes = random_ball_points(rng, 2, 40, Vector::Zero(2), 1.0);

  std::vector<double> h{1e-1, 1e-2, 1e-3, 1e-4}, lin_err, quad_err;
  for (double d : h) {
    for (const auto* shape : {&lin_shape, &quad_shape}) {
      std::vector<Vector> pts;
      for (const Vector& s : *shape) pts.push_back(base + d * s);
      const QuadraticModel q = build_model(SampleSet(pts), values(pts, f));
      double err = 0.0;
      for (const Vector& z : probes) err = std::max(err, (q.gradient(base + d * z) - grad(base + d * z)).norm());
      (shape == &lin_shape ? lin_err : quad_err).push_back(err);
    }
  }
  const double ls = loglog_slope(h, lin_err), qs = loglog_slope(h, quad_err);
  const double secs = seconds_since(t0);
  report(2, "gradient error slopes", ls >= 0.7 && qs >= 1.7 && secs < 5.0, secs,
         fmt::format("linear slope {:.3f} (>= 0.7), quadratic slope {:.3f} (>= 1.7)", ls, qs));
}

void criterion_mfn_degeneracies() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  double worst_alpha = 0.0, worst_lin = 0.0, worst_quad = 0.0;
  bool ok = true;
  std::string error;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const auto un = static_cast<std::size_t>(n);
    const Vector centre = Vector::Constant(n, 0.1 * trial - 2.0);
    const auto f = [](const Vector& x) {
      return std::cos(x(0)) + x(0) * x(1) * x(1) + std::exp(0.1 * x.sum());
    };
    try {
      std::vector<Vector> pts;
      do {
        pts = random_ball_points(rng, n, linear_size(un), centre, 0.5);
      } while (!poised(pts, false) || !mfn_poised(pts));
      const SampleSet L(pts);
      const QuadraticModel m = build_mfn_model(L, values(pts, f)).at_origin();
      const QuadraticModel l = build_linear_model(L, values(pts, f)).at_origin();
      worst_alpha = std::max(worst_alpha, coefficients_from_hessian(m.H).norm());
      worst_lin = std::max({worst_lin, std::abs(m.a - l.a), (m.g - l.g).cwiseAbs().maxCoeff()});

      do {
        pts = random_ball_points(rng, n, quadratic_size(un), centre, 0.5);
      } while (!poised(pts, true) || !mfn_poised(pts));
      const SampleSet Q(pts);
      const QuadraticModel mq = build_mfn_model(Q, values(pts, f)).at_origin();
      const QuadraticModel qq = build_quadratic_model(Q, values(pts, f)).at_origin();
      worst_quad = std::max({worst_quad, std::abs(mq.a - qq.a), (mq.g - qq.g).cwiseAbs().maxCoeff(),
                             (mq.H - qq.H).cwiseAbs().maxCoeff()});
    } catch (const Error& e) {
      ok = false;
      error = e.what();
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && worst_alpha <= 1e-8 && worst_lin <= 1e-8 && worst_quad <= 1e-6 && secs < 10.0;
  report(3, "MFN degeneracies", ok, secs,
         error.empty() ? fmt::format("||alpha_Q|| {:.2e}, linear gap {:.2e}, quadratic gap {:.2e}",
                                     worst_alpha, worst_lin, worst_quad)
                       : "error: " + error);
}

// Per-run call counter that does not rely on the solver's own cache.
struct RunCounter {
  std::map<std::vector<double>, int> seen;
  std::size_t calls = 0;
  std::size_t repeats = 0;
};

struct Grid {
  std::vector<RunRecord> records;
  std::vector<RunCounter> counters;
  double seconds = 0.0;
};

Grid run_grid(int workers, bool counted) {
  const std::vector<Problem> problems = list_problems();
  const std::vector<Strategy> strategies = desk_strategies();
  Grid grid;
  const std::size_t runs = problems.size() * strategies.size() * 2;
  BenchConfig cfg;
  cfg.seed = 20240601;
  cfg.workers = workers;
  if (counted) {
    grid.counters.resize(runs);
    cfg.objective_for = [&grid](const Problem& p, std::size_t index) -> Objective {
      RunCounter* c = &grid.counters.at(index);
      return [c, f = p.objective](const Vector& x) {
        const std::vector<double> key(x.data(), x.data() + x.size());
        if (++c->seen[key] > 1) ++c->repeats;
        ++c->calls;
        return f(x);
      };
    };
  }
  const auto t0 = Clock::now();
  grid.records = run_benchmark(problems, strategies, {false, true}, cfg);
  grid.seconds = seconds_since(t0);
  return grid;
}

std::vector<RunRecord> profiled_subset(const std::vector<RunRecord>& records) {
  const std::vector<Strategy> keep = profile_strategies();
  std::vector<RunRecord> out;
  for (const RunRecord& r : records) {
    if (std::find(keep.begin(), keep.end(), r.strategy) != keep.end()) out.push_back(r);
  }
  return out;
}

std::string profile_text(const std::vector<RunRecord>& records) {
  std::vector<ProfileCurve> all;
  for (double tau : {1e-3, 1e-6}) {
    const auto curves = data_profile(profiled_subset(records), tau);
    all.insert(all.end(), curves.begin(), curves.end());
  }
  return profile_csv(all);
}

void criterion_solver_sanity(const Grid& grid) {
  const auto t0 = Clock::now();
  CountedObjective f([](const Vector& x) { return 0.5 * x.squaredNorm(); }, 2);
  Vector x0(2);
  x0 << 10, 10;
  const RunResult r = solve(f, x0, SolverConfig{}, *Strategy::parse("lin/lin/lin"));
  std::size_t reached = 0;
  for (const EvaluationRecord& e : r.trace) {
    if (e.value <= 1e-6) {
      reached = e.call_index;
      break;
    }
  }
  std::size_t non_monotone = 0;
  for (const RunRecord& rec : grid.records) {
    for (std::size_t k = 1; k < rec.centre_values.size(); ++k) {
      if (rec.centre_values[k] > rec.centre_values[k - 1]) {
        ++non_monotone;
        break;
      }
    }
  }
  for (std::size_t k = 1; k < r.centre_values.size(); ++k) {
    if (r.centre_values[k] > r.centre_values[k - 1]) ++non_monotone;
  }
  const bool ok = reached > 0 && reached <= 200 && non_monotone == 0;
  report(4, "solver sanity", ok, seconds_since(t0),
         fmt::format("f <= 1e-6 at call {}, {} of {} suite runs non-monotone",
                     reached ? std::to_string(reached) : "never", non_monotone,
                     grid.records.size() + 1));
}

void criterion_budget(const Grid& grid) {
  std::size_t over = 0, repeats = 0, mismatched = 0, problems = 0;
  std::set<std::string> names;
  for (std::size_t i = 0; i < grid.records.size(); ++i) {
    const RunRecord& r = grid.records[i];
    names.insert(r.problem_key());
    const std::size_t n = r.dim;
    if (r.f_values.size() > 100 * n + (n + 1) * (n + 2) / 2 + 10) ++over;
    repeats += grid.counters[i].repeats;
    if (grid.counters[i].calls != r.f_values.size()) ++mismatched;
  }
  problems = names.size();
  const bool ok = problems >= 20 && grid.records.size() == problems * 8 * 2 && over == 0 &&
                  repeats == 0 && mismatched == 0 && grid.seconds < 600.0;
  report(5, "budget and accounting", ok, grid.seconds,
         fmt::format("{} runs over {} problems; {} over budget, {} repeated points, {} count mismatches",
                     grid.records.size(), problems, over, repeats, mismatched));
}

void criterion_directional(const Grid& grid) {
  const auto t0 = Clock::now();
  const auto rows = aggregate_table(grid.records);
  const Strategy lin = *Strategy::parse("lin/lin/lin");
  double with = -1, without = -1;
  for (const ImprovementRow& r : rows) {
    if (r.strategy == lin) (r.line_search ? with : without) = r.imp;
  }
  const auto profiled = aggregate_table(profiled_subset(grid.records));
  const ImprovementRow& top = profiled.front();
  const bool a = with >= without;
  const bool b = top.strategy.serious == SizeRule::Lin;
  report(6, "directional reproduction", a && b, seconds_since(t0),
         fmt::format("(a) lin/lin/lin imp {:.3f} with line search vs {:.3f} without: {}; "
                     "(b) top profiled {}{} imp {:.3f}: {}",
                     with, without, a ? "ok" : "violated", top.strategy.code(),
                     top.line_search ? " + ls" : "", top.imp, b ? "ok" : "violated"));
}

void criterion_profiles(const Grid& grid) {
  const auto t0 = Clock::now();
  const auto recs = profiled_subset(grid.records);
  const std::vector<double> taus{1e-1, 1e-3, 1e-5, 1e-7};
  std::vector<std::vector<ProfileCurve>> by_tau;
  for (double t : taus) by_tau.push_back(data_profile(recs, t));
  std::size_t violations = 0;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    for (std::size_t c = 0; c < by_tau[ti].size(); ++c) {
      const auto& fr = by_tau[ti][c].fraction;
      for (std::size_t a = 0; a < fr.size(); ++a) {
        if (fr[a] < 0.0 || fr[a] > 1.0) ++violations;
        if (a > 0 && fr[a] < fr[a - 1]) ++violations;
        // Larger tau is easier: fractions must not drop as tau grows.
        if (ti > 0 && by_tau[ti - 1][c].fraction[a] < fr[a]) ++violations;
      }
    }
  }
  double ls_total = 0, plain_total = 0;
  for (const ProfileCurve& c : by_tau[1]) (c.line_search ? ls_total : plain_total) += c.fraction.back();
  const bool ok = violations == 0 && by_tau[1].size() == 8 && ls_total >= plain_total;
  report(7, "data-profile properties", ok, seconds_since(t0),
         fmt::format("{} curves, {} property violations; terminal fractions at tau=1e-3: "
                     "{:.3f} with line search vs {:.3f} without",
                     by_tau[1].size() * taus.size(), violations, ls_total, plain_total));
}

void criterion_strategy_algebra() {
  const auto t0 = Clock::now();
  const auto all = enumerate_strategies();
  std::set<std::string> codes;
  for (const Strategy& s : all) codes.insert(s.code());
  // Hand arithmetic: n+1, 2n+1, floor((n+1 + (n+1)(n+2)/2) / 2), (n+1)(n+2)/2.
  const std::map<std::size_t, std::array<std::size_t, 4>> expected{
      {2, {3, 5, 4, 6}}, {3, {4, 7, 7, 10}}, {10, {11, 21, 38, 66}}, {20, {21, 41, 126, 231}}};
  std::size_t mismatches = 0;
  for (const auto& [n, sizes] : expected) {
    const SizeRule rules[] = {SizeRule::Lin, SizeRule::BiLin, SizeRule::Mean, SizeRule::Qua};
    for (int i = 0; i < 4; ++i) {
      if (sample_size_for(rules[i], n) != sizes[static_cast<std::size_t>(i)]) ++mismatches;
    }
  }
  const bool coincide = sample_size_for(SizeRule::Mean, 3) == sample_size_for(SizeRule::BiLin, 3);
  const bool ok = all.size() == 64 && codes.size() == 64 && mismatches == 0 && coincide;
  report(8, "strategy algebra", ok, seconds_since(t0),
         fmt::format("{} strategies ({} distinct), {} size mismatches, Mean = BiLin at n=3: {}",
                     all.size(), codes.size(), mismatches, coincide ? "yes" : "no"));
}

void criterion_determinism(const Grid& first) {
  const auto t0 = Clock::now();
  const Grid again = run_grid(1, false);
  const Grid parallel = run_grid(4, false);
  const std::string table = table_csv(aggregate_table(first.records));
  const std::string profile = profile_text(first.records);
  const bool same_seed = table == table_csv(aggregate_table(again.records)) &&
                         profile == profile_text(again.records);
  const bool same_workers = table == table_csv(aggregate_table(parallel.records)) &&
                            profile == profile_text(parallel.records);
  report(9, "determinism", same_seed && same_workers, seconds_since(t0),
         fmt::format("repeat run identical: {}, 1 vs 4 workers identical: {}",
                     same_seed ? "yes" : "no", same_workers ? "yes" : "no"));
}

}  // namespace

int main() {
  try {
    criterion_model_reproduction();
    criterion_error_slopes();
    criterion_mfn_degeneracies();
    const Grid grid = run_grid(1, true);
    criterion_solver_sanity(grid);
    criterion_budget(grid);
    criterion_directional(grid);
    criterion_profiles(grid);
    criterion_strategy_algebra();
    criterion_determinism(grid);
  } catch (const std::exception& e) {
    fmt::print("FAIL acceptance aborted: {}\n", e.what());
    return 1;
  }
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
