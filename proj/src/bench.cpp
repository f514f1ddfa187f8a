#include "dfpp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

namespace dfpp {
namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

[[noreturn]] void bad_csv(std::size_t line_no, std::string_view what) {
  throw Error(ErrorCode::BadInput, fmt::format("line {}: {}", line_no, what));
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_csv(line_no, "bad number");
  return v;
}

long long parse_int(std::string_view s, std::size_t line_no) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_csv(line_no, "bad integer");
  return v;
}

bool parse_flag(std::string_view s, std::size_t line_no) {
  if (s == "1") return true;
  if (s == "0") return false;
  bad_csv(line_no, "line_search must be 0 or 1");
}

Strategy parse_strategy_field(std::string_view s, std::size_t line_no) {
  const auto st = Strategy::parse(s);
  if (!st) bad_csv(line_no, "bad strategy");
  return *st;
}

SizeRule parse_rule_field(std::string_view s, std::size_t line_no) {
  const auto r = parse_rule(s);
  if (!r) bad_csv(line_no, "bad size rule");
  return *r;
}

void expect_header(const std::vector<std::string_view>& lines, std::string_view header) {
  if (lines.empty() || lines.front() != header) {
    throw Error(ErrorCode::BadInput, fmt::format("expected header '{}'", header));
  }
}

struct GroupKey {
  Strategy strategy;
  bool line_search;
  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

// Groups in first-appearance order.
std::vector<std::pair<GroupKey, std::vector<const RunRecord*>>> group_runs(
    const std::vector<RunRecord>& records) {
  std::vector<std::pair<GroupKey, std::vector<const RunRecord*>>> groups;
  for (const RunRecord& r : records) {
    const GroupKey key{r.strategy, r.line_search};
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(&r);
  }
  return groups;
}

bool degenerate(const RunRecord& r) { return r.f0 == r.fbest; }

}  // namespace

std::string RunRecord::problem_key() const { return fmt::format("{}/{}", problem, dim); }

double RunRecord::best_f() const {
  double best = std::numeric_limits<double>::infinity();
  for (double v : f_values) {
    if (std::isfinite(v)) best = std::min(best, v);
  }
  return std::isfinite(best) ? best : f0;
}

double improvement_digits(double f, double f0, double fbest) {
  if (f0 == fbest) {
    throw Error(ErrorCode::DegenerateProblem, "start point already attains fbest");
  }
  if (f == fbest) return kDigitCap;
  const double digits = -std::log10(std::abs(f - fbest) / std::abs(f0 - fbest));
  return std::min(digits, kDigitCap);
}

std::uint64_t run_seed(std::uint64_t seed, const Problem& problem, const Strategy& strategy,
                       bool line_search) {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, fmt::format("{}|{}|{}|{}|{}", seed, problem.name, problem.dim, strategy.code(),
                           line_search ? 1 : 0));
  return h;
}

std::vector<RunRecord> run_benchmark(const std::vector<Problem>& problems,
                                     const std::vector<Strategy>& strategies,
                                     const std::vector<bool>& line_search_modes,
                                     const BenchConfig& config) {
  if (problems.empty() || strategies.empty() || line_search_modes.empty()) {
    throw Error(ErrorCode::BadInput, "benchmark grid is empty");
  }
  config.solver.validate();

  struct Job {
    const Problem* problem;
    Strategy strategy;
    bool line_search;
  };
  std::vector<Job> jobs;
  for (const Problem& p : problems) {
    for (const Strategy& s : strategies) {
      for (bool ls : line_search_modes) jobs.push_back({&p, s, ls});
    }
  }

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const Problem& p = *job.problem;
      try {
        RunRecord rec;
        rec.problem = p.name;
        rec.dim = p.dim;
        rec.strategy = job.strategy;
        rec.line_search = job.line_search;
        rec.fbest = p.fbest;

        const Objective objective = config.objective_for ? config.objective_for(p, i) : p.objective;
        CountedObjective counted(objective, static_cast<Eigen::Index>(p.dim));
        SolverConfig solver = config.solver;
        solver.line_search = job.line_search;
        try {
          const RunResult res = solve(counted, p.x0, solver, job.strategy, config.geometry,
                                      run_seed(config.seed, p, job.strategy, job.line_search));
          rec.stop_reason = res.stop_reason;
          rec.centre_values = res.centre_values;
        } catch (const Error&) {
          rec.stop_reason = StopReason::GeometryFailure;
        }
        for (const EvaluationRecord& e : counted.trace()) rec.f_values.push_back(e.value);
        rec.f0 = rec.f_values.empty() ? p.f0() : rec.f_values.front();
        records[i] = std::move(rec);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<RunRecord> run_benchmark(const std::vector<Problem>& problems,
                                     const std::vector<Strategy>& strategies, bool line_search,
                                     const BenchConfig& config) {
  return run_benchmark(problems, strategies, std::vector<bool>{line_search}, config);
}

std::vector<ImprovementRow> aggregate_table(const std::vector<RunRecord>& records,
                                            std::vector<std::string>* excluded) {
  const auto groups = group_runs(records);
  std::set<std::string> skipped;
  std::vector<ImprovementRow> rows;
  std::set<std::string> reference;
  bool first = true;
  for (const auto& [key, runs] : groups) {
    ImprovementRow row{key.strategy, key.line_search, 0.0, {}};
    std::set<std::string> seen;
    for (const RunRecord* r : runs) {
      seen.insert(r->problem_key());
      if (degenerate(*r)) {
        skipped.insert(r->problem_key());
        continue;
      }
      const double d = improvement_digits(r->best_f(), r->f0, r->fbest);
      row.per_problem[r->problem_key()] = d;
    }
    if (seen.size() != runs.size()) {
      throw Error(ErrorCode::IncompleteGrid,
                  fmt::format("strategy {} has repeated problems", key.strategy.code()));
    }
    if (first) {
      reference = seen;
      first = false;
    } else if (seen != reference) {
      throw Error(ErrorCode::IncompleteGrid,
                  fmt::format("strategy {} covers a different problem set", key.strategy.code()));
    }
    for (const auto& [name, d] : row.per_problem) row.imp += d;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ImprovementRow& a, const ImprovementRow& b) { return a.imp > b.imp; });
  if (excluded) excluded->assign(skipped.begin(), skipped.end());
  return rows;
}

std::size_t solved_at(const RunRecord& record, double tau) {
  const double target = record.fbest + tau * (record.f0 - record.fbest);
  for (std::size_t i = 0; i < record.f_values.size(); ++i) {
    if (record.f_values[i] <= target) return i + 1;
  }
  return 0;
}

std::vector<ProfileCurve> data_profile(const std::vector<RunRecord>& records, double tau,
                                       int max_alpha) {
  if (!(tau > 0.0)) throw Error(ErrorCode::BadInput, "tau must be positive");
  if (max_alpha < 1) throw Error(ErrorCode::BadInput, "max_alpha must be at least 1");
  std::vector<ProfileCurve> curves;
  for (const auto& [key, runs] : group_runs(records)) {
    ProfileCurve curve{key.strategy, key.line_search, tau, {}, {}};
    std::vector<std::pair<std::size_t, std::size_t>> solved;  // (call, n+1)
    std::size_t total = 0;
    for (const RunRecord* r : runs) {
      if (degenerate(*r)) continue;
      ++total;
      solved.emplace_back(solved_at(*r, tau), r->dim + 1);
    }
    for (int a = 1; a <= max_alpha; ++a) {
      std::size_t count = 0;
      for (const auto& [c, np1] : solved) {
        if (c != 0 && c <= static_cast<std::size_t>(a) * np1) ++count;
      }
      curve.alpha.push_back(a);
      curve.fraction.push_back(total ? static_cast<double>(count) / static_cast<double>(total)
                                     : 0.0);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<Strategy> profile_strategies() {
  return {*Strategy::parse("lin/lin/lin"), *Strategy::parse("quad/quad/quad"),
          *Strategy::parse("lin/lin/2n"), *Strategy::parse("lin/2n/lin")};
}

std::vector<Strategy> desk_strategies() {
  std::vector<Strategy> out = profile_strategies();
  for (const char* code : {"2n/2n/2n", "mean/mean/mean", "lin/2n/2n", "quad/lin/2n"}) {
    out.push_back(*Strategy::parse(code));
  }
  return out;
}

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::string out = "problem,dim,strategy,line_search,call_index,f_value,stop_reason\n";
  for (const RunRecord& r : records) {
    const std::string prefix = fmt::format("{},{},{},{},", r.problem, r.dim, r.strategy.code(),
                                           r.line_search ? 1 : 0);
    for (std::size_t i = 0; i < r.f_values.size(); ++i) {
      out += prefix;
      out += fmt::format("{},{:.17g},{}\n", i + 1, r.f_values[i], to_string(r.stop_reason));
    }
  }
  return out;
}

std::string table_csv(const std::vector<ImprovementRow>& rows) {
  std::string out = "n_s,n_n1,n_n2,line_search,imp\n";
  for (const ImprovementRow& r : rows) {
    out += fmt::format("{},{},{},{},{:.6f}\n", rule_code(r.strategy.serious),
                       rule_code(r.strategy.null1), rule_code(r.strategy.null2),
                       r.line_search ? 1 : 0, r.imp);
  }
  return out;
}

std::string profile_csv(const std::vector<ProfileCurve>& curves) {
  std::string out = "strategy,line_search,tau,alpha,fraction\n";
  for (const ProfileCurve& c : curves) {
    for (std::size_t i = 0; i < c.alpha.size(); ++i) {
      out += fmt::format("{},{},{:g},{},{:.6f}\n", c.strategy.code(), c.line_search ? 1 : 0,
                         c.tau, c.alpha[i], c.fraction[i]);
    }
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(std::string_view text, const ProblemRegistry& registry) {
  const auto lines = lines_of(text);
  expect_header(lines, "problem,dim,strategy,line_search,call_index,f_value,stop_reason");
  std::vector<RunRecord> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != 7) bad_csv(li + 1, "expected 7 fields");
    const std::string problem(f[0]);
    const long long dim = parse_int(f[1], li + 1);
    if (dim < 1) bad_csv(li + 1, "dimension must be positive");
    const Strategy strategy = parse_strategy_field(f[2], li + 1);
    const bool ls = parse_flag(f[3], li + 1);
    const long long call = parse_int(f[4], li + 1);
    const double value = parse_double(f[5], li + 1);
    const auto stop = parse_stop_reason(f[6]);
    if (!stop) bad_csv(li + 1, "bad stop reason");

    const bool same_run = !records.empty() && records.back().problem == problem &&
                          records.back().dim == static_cast<std::size_t>(dim) &&
                          records.back().strategy == strategy && records.back().line_search == ls &&
                          call != 1;
    if (!same_run) {
      if (call != 1) bad_csv(li + 1, "run does not start at call 1");
      RunRecord rec;
      rec.problem = problem;
      rec.dim = static_cast<std::size_t>(dim);
      rec.strategy = strategy;
      rec.line_search = ls;
      rec.stop_reason = *stop;
      rec.f0 = value;
      rec.fbest = registry.get(problem, rec.dim).fbest;
      records.push_back(std::move(rec));
    } else if (static_cast<std::size_t>(call) != records.back().f_values.size() + 1) {
      bad_csv(li + 1, "call indices must increase by one");
    }
    records.back().f_values.push_back(value);
  }
  return records;
}

std::vector<TableRow> parse_table_csv(std::string_view text) {
  const auto lines = lines_of(text);
  expect_header(lines, "n_s,n_n1,n_n2,line_search,imp");
  std::vector<TableRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != 5) bad_csv(li + 1, "expected 5 fields");
    TableRow row;
    row.strategy = {parse_rule_field(f[0], li + 1), parse_rule_field(f[1], li + 1),
                    parse_rule_field(f[2], li + 1)};
    row.line_search = parse_flag(f[3], li + 1);
    row.imp = parse_double(f[4], li + 1);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ProfilePoint> parse_profile_csv(std::string_view text) {
  const auto lines = lines_of(text);
  expect_header(lines, "strategy,line_search,tau,alpha,fraction");
  std::vector<ProfilePoint> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != 5) bad_csv(li + 1, "expected 5 fields");
    ProfilePoint p;
    p.strategy = parse_strategy_field(f[0], li + 1);
    p.line_search = parse_flag(f[1], li + 1);
    p.tau = parse_double(f[2], li + 1);
    p.alpha = static_cast<int>(parse_int(f[3], li + 1));
    p.fraction = parse_double(f[4], li + 1);
    out.push_back(p);
  }
  return out;
}

}  // namespace dfpp
