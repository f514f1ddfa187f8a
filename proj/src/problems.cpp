#include "dfpp/problems.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <numbers>

#include <fmt/format.h>

namespace dfpp {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Vector filled(std::size_t n, double v) { return Vector::Constant(static_cast<Eigen::Index>(n), v); }

Vector make(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Moré, Garbow & Hillstrom (1981), "Testing unconstrained optimization software".
constexpr const char* kMGH = "More-Garbow-Hillstrom 1981";
// Ali, Khompatraporn & Zabinsky (2005), global optimization test collection.
constexpr const char* kAKZ = "Ali-Khompatraporn-Zabinsky 2005";

double rosenbrock(const Vector& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
  }
  return f;
}

double freudenstein_roth(const Vector& x) {
  const double f1 = -13.0 + x(0) + ((5.0 - x(1)) * x(1) - 2.0) * x(1);
  const double f2 = -29.0 + x(0) + ((x(1) + 1.0) * x(1) - 14.0) * x(1);
  return f1 * f1 + f2 * f2;
}

double powell_badly_scaled(const Vector& x) {
  const double f1 = 1e4 * x(0) * x(1) - 1.0;
  const double f2 = std::exp(-x(0)) + std::exp(-x(1)) - 1.0001;
  return f1 * f1 + f2 * f2;
}

double brown_badly_scaled(const Vector& x) {
  const double f1 = x(0) - 1e6;
  const double f2 = x(1) - 2e-6;
  const double f3 = x(0) * x(1) - 2.0;
  return f1 * f1 + f2 * f2 + f3 * f3;
}

double beale(const Vector& x) {
  constexpr std::array<double, 3> y{1.5, 2.25, 2.625};
  double f = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double r = y[i] - x(0) * (1.0 - std::pow(x(1), i + 1));
    f += r * r;
  }
  return f;
}

double jennrich_sampson(const Vector& x) {
  double f = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double r = 2.0 + 2.0 * i - (std::exp(i * x(0)) + std::exp(i * x(1)));
    f += r * r;
  }
  return f;
}

double helical_valley(const Vector& x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double theta;
  if (x(0) > 0.0) {
    theta = std::atan(x(1) / x(0)) / two_pi;
  } else if (x(0) < 0.0) {
    theta = std::atan(x(1) / x(0)) / two_pi + 0.5;
  } else {
    theta = x(1) >= 0.0 ? 0.25 : -0.25;
  }
  const double f1 = 10.0 * (x(2) - 10.0 * theta);
  const double f2 = 10.0 * (std::hypot(x(0), x(1)) - 1.0);
  const double f3 = x(2);
  return f1 * f1 + f2 * f2 + f3 * f3;
}

double bard(const Vector& x) {
  constexpr std::array<double, 15> y{0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
                                     0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39};
  double f = 0.0;
  for (int i = 1; i <= 15; ++i) {
    const double u = i;
    const double v = 16 - i;
    const double w = std::min(u, v);
    const double r = y[i - 1] - (x(0) + u / (v * x(1) + w * x(2)));
    f += r * r;
  }
  return f;
}

double gaussian(const Vector& x) {
  constexpr std::array<double, 15> y{0.0009, 0.0044, 0.0175, 0.0540, 0.1295,
                                     0.2420, 0.3521, 0.3989, 0.3521, 0.2420,
                                     0.1295, 0.0540, 0.0175, 0.0044, 0.0009};
  double f = 0.0;
  for (int i = 1; i <= 15; ++i) {
    const double t = (8.0 - i) / 2.0;
    const double d = t - x(2);
    const double r = x(0) * std::exp(-x(1) * d * d / 2.0) - y[i - 1];
    f += r * r;
  }
  return f;
}

double meyer(const Vector& x) {
  constexpr std::array<double, 16> y{34780, 28610, 23650, 19630, 16370, 13720, 11540, 9744,
                                     8261,  7030,  6005,  5147,  4427,  3820,  3307,  2872};
  double f = 0.0;
  for (int i = 1; i <= 16; ++i) {
    const double t = 45.0 + 5.0 * i;
    const double r = x(0) * std::exp(x(1) / (t + x(2))) - y[i - 1];
    f += r * r;
  }
  return f;
}

double box3d(const Vector& x) {
  double f = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.1 * i;
    const double r = std::exp(-t * x(0)) - std::exp(-t * x(1)) -
                     x(2) * (std::exp(-t) - std::exp(-10.0 * t));
    f += r * r;
  }
  return f;
}

double brown_almost_linear(const Vector& x) {
  const Eigen::Index n = x.size();
  const double sum = x.sum();
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double r = x(i) + sum - static_cast<double>(n + 1);
    f += r * r;
  }
  const double last = x.prod() - 1.0;
  return f + last * last;
}

// Blocks of four, the n = 4 case is the classical function.
double powell_singular(const Vector& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 3 < x.size(); i += 4) {
    const double f1 = x(i) + 10.0 * x(i + 1);
    const double f2 = x(i + 2) - x(i + 3);
    const double f3 = x(i + 1) - 2.0 * x(i + 2);
    const double f4 = x(i) - x(i + 3);
    f += f1 * f1 + 5.0 * f2 * f2 + f3 * f3 * f3 * f3 + 10.0 * f4 * f4 * f4 * f4;
  }
  return f;
}

// Chained Wood; with n = 4 it reduces exactly to the classical Wood function
// since 10(a+b)^2 + 0.1(a-b)^2 = 10.1(a^2+b^2) + 19.8ab.
double wood(const Vector& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 3 < x.size(); i += 2) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    const double c = x(i + 3) - x(i + 2) * x(i + 2);
    const double d = 1.0 - x(i + 2);
    const double e = x(i + 1) + x(i + 3) - 2.0;
    const double g = x(i + 1) - x(i + 3);
    f += 100.0 * a * a + b * b + 90.0 * c * c + d * d + 10.0 * e * e + 0.1 * g * g;
  }
  return f;
}

double kowalik_osborne(const Vector& x) {
  constexpr std::array<double, 11> y{0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                                     0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
  constexpr std::array<double, 11> u{4.0,    2.0,   1.0, 0.5,    0.25,  0.167,
                                     0.125,  0.1,   0.0833, 0.0714, 0.0625};
  double f = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double r =
        y[i] - x(0) * (u[i] * u[i] + u[i] * x(1)) / (u[i] * u[i] + u[i] * x(2) + x(3));
    f += r * r;
  }
  return f;
}

double brown_dennis(const Vector& x) {
  double f = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = i / 5.0;
    const double a = x(0) + t * x(1) - std::exp(t);
    const double b = x(2) + x(3) * std::sin(t) - std::cos(t);
    const double r = a * a + b * b;
    f += r * r;
  }
  return f;
}

double osborne1(const Vector& x) {
  constexpr std::array<double, 33> y{0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881,
                                     0.850, 0.818, 0.784, 0.751, 0.718, 0.685, 0.658,
                                     0.628, 0.603, 0.580, 0.558, 0.538, 0.522, 0.506,
                                     0.490, 0.478, 0.467, 0.457, 0.448, 0.438, 0.431,
                                     0.424, 0.420, 0.414, 0.411, 0.406};
  double f = 0.0;
  for (int i = 0; i < 33; ++i) {
    const double t = 10.0 * i;
    const double r = y[i] - (x(0) + x(1) * std::exp(-t * x(3)) + x(2) * std::exp(-t * x(4)));
    f += r * r;
  }
  return f;
}

double biggs_exp6(const Vector& x) {
  double f = 0.0;
  for (int i = 1; i <= 13; ++i) {
    const double t = 0.1 * i;
    const double y = std::exp(-t) - 5.0 * std::exp(-10.0 * t) + 3.0 * std::exp(-4.0 * t);
    const double r = x(2) * std::exp(-t * x(0)) - x(3) * std::exp(-t * x(1)) +
                     x(5) * std::exp(-t * x(4)) - y;
    f += r * r;
  }
  return f;
}

double watson(const Vector& x) {
  const Eigen::Index n = x.size();
  double f = 0.0;
  for (int i = 1; i <= 29; ++i) {
    const double t = i / 29.0;
    double s1 = 0.0;
    double tp = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) {
      s1 += static_cast<double>(j) * x(j) * tp;
      tp *= t;
    }
    double s2 = 0.0;
    tp = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s2 += x(j) * tp;
      tp *= t;
    }
    const double r = s1 - s2 * s2 - 1.0;
    f += r * r;
  }
  const double r30 = x(1) - x(0) * x(0) - 1.0;
  return f + x(0) * x(0) + r30 * r30;
}

double penalty1(const Vector& x) {
  constexpr double a = 1e-5;
  double f = a * (x.array() - 1.0).square().sum();
  const double last = x.squaredNorm() - 0.25;
  return f + last * last;
}

double variably_dimensioned(const Vector& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) s += static_cast<double>(j + 1) * (x(j) - 1.0);
  return (x.array() - 1.0).square().sum() + s * s + s * s * s * s;
}

double zakharov(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += 0.5 * static_cast<double>(i + 1) * x(i);
  return x.squaredNorm() + s * s + s * s * s * s;
}

double exponential(const Vector& x) { return -std::exp(-0.5 * x.squaredNorm()); }

double ackley(const Vector& x) {
  const double n = static_cast<double>(x.size());
  const double cos_mean = (2.0 * std::numbers::pi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(x.squaredNorm() / n)) - std::exp(cos_mean) + 20.0 +
         std::numbers::e;
}

Vector alternating(std::size_t n, double even, double odd) {
  Vector x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = i % 2 == 0 ? even : odd;
  return x;
}

Vector powell_start(std::size_t n) {
  Vector x(static_cast<Eigen::Index>(n));
  constexpr std::array<double, 4> block{3.0, -1.0, 0.0, 1.0};
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = block[static_cast<std::size_t>(i % 4)];
  return x;
}

Vector variably_dimensioned_start(std::size_t n) {
  Vector x(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    x(j) = 1.0 - static_cast<double>(j + 1) / static_cast<double>(n);
  }
  return x;
}

Problem entry(std::string name, std::string title, std::size_t dim, Objective f, Vector x0,
              double fbest, std::optional<Vector> xbest, ProblemGroup group, std::string source) {
  return Problem{std::move(name), std::move(title), dim,   std::move(f),     std::move(x0),
                 fbest,           std::move(xbest), group, std::move(source)};
}

ProblemRegistry build_standard() {
  using G = ProblemGroup;
  ProblemRegistry r;
  const auto ones = [](std::size_t n) { return std::optional<Vector>(filled(n, 1.0)); };
  const auto zeros = [](std::size_t n) { return std::optional<Vector>(filled(n, 0.0)); };
  const std::string mgh = kMGH;
  const std::string akz = kAKZ;

  // Low dimension. Where no closed-form minimiser exists, fbest is the
  // literature value refined by a tight least-squares solve from x0.
  r.add(entry("rosenbrock", "Rosenbrock", 2, rosenbrock, make({-1.2, 1.0}), 0.0, ones(2), G::LowDim,
              mgh + " #1"));
  r.add(entry("freudenstein_roth", "Freudenstein & Roth", 2, freudenstein_roth, make({0.5, -2.0}),
              0.0, make({5.0, 4.0}), G::LowDim, mgh + " #2"));
  r.add(entry("powell_badly_scaled", "Powell badly scaled", 2, powell_badly_scaled,
              make({0.0, 1.0}), 0.0, std::nullopt, G::LowDim,
              mgh + " #3; minimiser (1.098e-5, 9.106) only known approximately"));
  r.add(entry("brown_badly_scaled", "Brown badly scaled", 2, brown_badly_scaled, make({1.0, 1.0}),
              0.0, make({1e6, 2e-6}), G::LowDim, mgh + " #4"));
  r.add(entry("beale", "Beale", 2, beale, make({1.0, 1.0}), 0.0, make({3.0, 0.5}), G::LowDim,
              mgh + " #5"));
  r.add(entry("jennrich_sampson", "Jennrich & Sampson", 2, jennrich_sampson, make({0.3, 0.4}),
              124.36218235561488, std::nullopt, G::LowDim,
              mgh + " #6, m = 10; reported 124.362"));
  r.add(entry("helical_valley", "Helical valley", 3, helical_valley, make({-1.0, 0.0, 0.0}), 0.0,
              make({1.0, 0.0, 0.0}), G::LowDim, mgh + " #7"));
  r.add(entry("bard", "Bard", 3, bard, make({1.0, 1.0, 1.0}), 8.214877306578973e-3, std::nullopt,
              G::LowDim, mgh + " #8; reported 8.21487e-3"));
  r.add(entry("gaussian", "Gaussian", 3, gaussian, make({0.4, 1.0, 0.0}), 1.1279327696188775e-8,
              std::nullopt, G::LowDim, mgh + " #9; reported 1.12793e-8"));
  r.add(entry("meyer", "Meyer", 3, meyer, make({0.02, 4000.0, 250.0}), 87.94585517055127,
              std::nullopt, G::LowDim, mgh + " #10; reported 87.9458"));
  r.add(entry("box3d", "Box 3D", 3, box3d, make({0.0, 10.0, 20.0}), 0.0, make({1.0, 10.0, 1.0}),
              G::LowDim, mgh + " #12, m = 10"));
  r.add(entry("brown_almost_linear", "Brown almost-linear", 3, brown_almost_linear, filled(3, 0.5),
              0.0, ones(3), G::LowDim, mgh + " #27"));
  r.add(entry("variably_dimensioned", "Variably dimensional", 3, variably_dimensioned,
              variably_dimensioned_start(3), 0.0, ones(3), G::LowDim, mgh + " #25"));
  r.add(entry("wood", "Wood", 4, wood, make({-3.0, -1.0, -3.0, -1.0}), 0.0, ones(4), G::LowDim,
              mgh + " #14"));
  r.add(entry("kowalik_osborne", "Kowalik & Osborne", 4, kowalik_osborne,
              make({0.25, 0.39, 0.415, 0.39}), 3.075056038492384e-4, std::nullopt, G::LowDim,
              mgh + " #15; reported 3.07505e-4"));
  r.add(entry("brown_dennis", "Brown & Dennis", 4, brown_dennis, make({25.0, 5.0, -5.0, -1.0}),
              85822.20162635627, std::nullopt, G::LowDim,
              mgh + " #16, m = 20; reported 85822.2"));
  r.add(entry("penalty1", "Penalty I", 4, penalty1, make({1.0, 2.0, 3.0, 4.0}),
              2.2499775008999372e-5, std::nullopt, G::LowDim, mgh + " #23; reported 2.24997e-5"));
  r.add(entry("osborne1", "Osborne I", 5, osborne1, make({0.5, 1.5, -1.0, 0.01, 0.02}),
              5.464894697482604e-5, std::nullopt, G::LowDim, mgh + " #17; reported 5.46489e-5"));
  r.add(entry("biggs_exp6", "Biggs EXP6", 6, biggs_exp6, make({1.0, 2.0, 1.0, 1.0, 1.0, 1.0}), 0.0,
              make({1.0, 10.0, 1.0, 5.0, 4.0, 3.0}), G::LowDim, mgh + " #18, m = 13"));
  r.add(entry("watson", "Watson", 6, watson, filled(6, 0.0), 2.287670053552382e-3, std::nullopt,
              G::LowDim, mgh + " #20; reported 2.28767e-3"));

  // High dimension.
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("rosenbrock", "Rosenbrock", n, rosenbrock, alternating(n, -1.2, 1.0), 0.0, ones(n),
                G::HighDim, "chained form of " + mgh + " #1"));
  }
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("wood", "Wood", n, wood, alternating(n, -3.0, -1.0), 0.0, ones(n), G::HighDim,
                "chained form of " + mgh + " #14"));
  }
  for (std::size_t n : {12u, 20u}) {
    r.add(entry("powell_singular", "Powell singular", n, powell_singular, powell_start(n), 0.0,
                zeros(n), G::HighDim, mgh + " #22 (extended)"));
  }
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("variably_dimensioned", "Variably dimensional", n, variably_dimensioned,
                variably_dimensioned_start(n), 0.0, ones(n), G::HighDim, mgh + " #25"));
  }
  // The global-optimisation collection ships no start points; all of these
  // start from 0.5 in every coordinate.
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("zakharov", "Zakharov", n, zakharov, filled(n, 0.5), 0.0, zeros(n), G::HighDim,
                akz + "; x0 = 0.5"));
  }
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("exponential", "Exponential", n, exponential, filled(n, 0.5), -1.0, zeros(n),
                G::HighDim, akz + "; x0 = 0.5"));
  }
  for (std::size_t n : {10u, 20u}) {
    r.add(entry("ackley", "Ackley", n, ackley, filled(n, 0.5), 0.0, zeros(n), G::HighDim,
                akz + " (b = 0.2); x0 = 0.5"));
  }
  return r;
}

}  // namespace

const char* to_string(ProblemGroup group) {
  return group == ProblemGroup::LowDim ? "low" : "high";
}

std::optional<ProblemGroup> parse_group(std::string_view text) {
  if (text == "low") return ProblemGroup::LowDim;
  if (text == "high") return ProblemGroup::HighDim;
  return std::nullopt;
}

void ProblemRegistry::add(Problem problem) {
  problem.name = lower(problem.name);
  if (contains(problem.name, problem.dim)) {
    throw Error(ErrorCode::BadInput,
                fmt::format("problem {} (n={}) registered twice", problem.name, problem.dim));
  }
  if (problem.dim == 0 || static_cast<std::size_t>(problem.x0.size()) != problem.dim ||
      !problem.objective) {
    throw Error(ErrorCode::BadInput, fmt::format("problem {} is inconsistent", problem.name));
  }
  problems_.push_back(std::move(problem));
}

bool ProblemRegistry::contains(std::string_view name, std::size_t dim) const {
  const std::string key = lower(name);
  return std::any_of(problems_.begin(), problems_.end(),
                     [&](const Problem& p) { return p.name == key && p.dim == dim; });
}

const Problem& ProblemRegistry::get(std::string_view name, std::size_t dim) const {
  const std::string key = lower(name);
  for (const Problem& p : problems_) {
    if (p.name == key && p.dim == dim) return p;
  }
  throw Error(ErrorCode::UnknownProblem, fmt::format("no problem '{}' with dimension {}", name, dim));
}

std::vector<Problem> ProblemRegistry::list(std::optional<ProblemGroup> group) const {
  std::vector<Problem> out;
  for (const Problem& p : problems_) {
    if (!group || p.group == *group) out.push_back(p);
  }
  return out;
}

const ProblemRegistry& ProblemRegistry::standard() {
  static const ProblemRegistry registry = build_standard();
  return registry;
}

const Problem& get_problem(std::string_view name, std::size_t dim) {
  return ProblemRegistry::standard().get(name, dim);
}

std::vector<Problem> list_problems(std::optional<ProblemGroup> group) {
  return ProblemRegistry::standard().list(group);
}

std::string registry_csv(const std::vector<Problem>& problems) {
  std::string out = "name,dim,group,f0,fbest\n";
  for (const Problem& p : problems) {
    out += fmt::format("{},{},{},{:.17g},{:.17g}\n", p.name, p.dim, to_string(p.group), p.f0(),
                       p.fbest);
  }
  return out;
}

CountedObjective::CountedObjective(Objective objective, Eigen::Index dim)
    : objective_(std::move(objective)), dim_(dim) {}

CountedObjective::Key CountedObjective::key_of(const Vector& x) {
  Key key(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::memcpy(&key[static_cast<std::size_t>(i)], &x(i), sizeof(double));
  }
  return key;
}

std::size_t CountedObjective::KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint64_t w : key) {
    h ^= w;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

double CountedObjective::evaluate(const Vector& x) {
  if (x.size() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("point of dimension {} for objective of dimension {}", x.size(), dim_));
  }
  Key key = key_of(x);
  if (auto it = index_.find(key); it != index_.end()) {
    return poisoned_[it->second] ? std::numeric_limits<double>::infinity()
                                 : trace_[it->second].value;
  }
  const double value = objective_(x);
  const bool bad = !std::isfinite(value);
  index_.emplace(std::move(key), trace_.size());
  trace_.push_back({trace_.size() + 1, x, value});
  poisoned_.push_back(bad);
  return bad ? std::numeric_limits<double>::infinity() : value;
}

std::optional<double> CountedObjective::cached(const Vector& x) const {
  if (x.size() != dim_) return std::nullopt;
  const auto it = index_.find(key_of(x));
  if (it == index_.end()) return std::nullopt;
  return poisoned_[it->second] ? std::numeric_limits<double>::infinity()
                               : trace_[it->second].value;
}

bool CountedObjective::poisoned(const Vector& x) const {
  if (x.size() != dim_) return false;
  const auto it = index_.find(key_of(x));
  return it != index_.end() && poisoned_[it->second];
}

double evaluate_counted(CountedObjective& co, const Vector& x) { return co.evaluate(x); }

}  // namespace dfpp
