#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dfpp/bench.hpp"
#include "dfpp/problems.hpp"
#include "dfpp/solver.hpp"
#include "dfpp/strategy.hpp"
#include "svg.hpp"

namespace dfpp::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Strategy strategy_arg(const std::string& text) {
  const auto s = Strategy::parse(text);
  if (!s) throw UsageError("bad strategy '" + text + "', expected rule/rule/rule with rules lin, 2n, mean, quad");
  return *s;
}

// "all" (64), "desk" (the 8-strategy grid), "profile" (the 4 profiled) or a
// comma-separated list.
std::vector<Strategy> strategy_list(const std::string& text) {
  if (text == "all") return enumerate_strategies();
  if (text == "desk") return desk_strategies();
  if (text == "profile") return profile_strategies();
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(strategy_arg(item));
  }
  if (out.empty()) throw UsageError("empty strategy list");
  return out;
}

std::vector<bool> line_search_modes(const std::string& text) {
  if (text == "both") return {false, true};
  if (text == "on") return {true};
  if (text == "off") return {false};
  throw UsageError("--line-search must be both, on or off");
}

std::vector<Problem> problem_selection(const std::string& group, const std::string& names) {
  std::optional<ProblemGroup> g;
  if (group != "all") {
    g = parse_group(group);
    if (!g) throw UsageError("--group must be low, high or all");
  }
  if (names.empty()) return list_problems(g);
  std::vector<Problem> out;
  std::stringstream ss(names);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--problems entries must be name:dim");
    std::size_t dim = 0;
    try {
      dim = std::stoul(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("bad dimension in '" + item + "'");
    }
    out.push_back(get_problem(item.substr(0, colon), dim));
  }
  return out;
}

std::string format_digits(const RunRecord& r) {
  try {
    return fmt::format("{:.4f}", improvement_digits(r.best_f(), r.f0, r.fbest));
  } catch (const Error&) {
    return "n/a (f0 equals fbest)";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derivative-free proximal point solver and benchmark tools", "dfpp_cli"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one problem with one strategy");
  std::string problem_name;
  std::size_t dim = 0;
  std::string strategy_text;
  bool solve_ls = false;
  int budget_factor = 100;
  std::uint64_t seed = 0;
  SolverConfig defaults;
  double m = defaults.m, gamma = defaults.gamma, r0 = defaults.r0, delta0 = 0.0;
  solve_cmd->add_option("--problem", problem_name, "Problem name")->required();
  solve_cmd->add_option("--dim", dim, "Problem dimension")->required();
  solve_cmd->add_option("--strategy", strategy_text, "N_s/N_n1/N_n2, e.g. lin/2n/quad")->required();
  solve_cmd->add_flag("--line-search", solve_ls, "Search along the step after a serious step");
  solve_cmd->add_option("--budget-factor", budget_factor, "Budget is this many calls per dimension");
  solve_cmd->add_option("--seed", seed, "Geometry seed");
  solve_cmd->add_option("--m", m, "Descent parameter");
  solve_cmd->add_option("--gamma", gamma, "Radius decrease factor");
  solve_cmd->add_option("--r0", r0, "Initial prox-parameter");
  solve_cmd->add_option("--delta0", delta0, "Initial sampling radius (0: automatic)");
  solve_cmd->add_option("--out", out_dir, "Output directory");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a strategy x problem grid");
  std::string group = "all";
  std::string bench_problems;
  std::string bench_strategies = "desk";
  std::string bench_ls = "both";
  int workers = 1;
  std::uint64_t bench_seed = 0;
  int bench_budget = 100;
  bench_cmd->add_option("--group", group, "low, high or all");
  bench_cmd->add_option("--problems", bench_problems, "Comma-separated name:dim list");
  bench_cmd->add_option("--strategies", bench_strategies, "all, desk, profile or a comma-separated list");
  bench_cmd->add_option("--line-search", bench_ls, "both, on or off");
  bench_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_seed, "Base seed");
  bench_cmd->add_option("--budget-factor", bench_budget, "Budget is this many calls per dimension");
  bench_cmd->add_option("--out", out_dir, "Output directory");

  // table
  auto* table_cmd = app.add_subcommand("table", "Rank strategies from runs.csv");
  std::string table_input;
  table_cmd->add_option("--input", table_input, "runs.csv")->required();
  table_cmd->add_option("--out", out_dir, "Output directory");

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "Data profiles from runs.csv");
  std::vector<double> taus{1e-3, 1e-6};
  std::string profile_input;
  std::string profile_strategies_text = "profile";
  bool svg = false;
  profile_cmd->add_option("--tau", taus, "Solving tolerances")->delimiter(',');
  profile_cmd->add_option("--strategies", profile_strategies_text,
                          "all, desk, profile or a comma-separated list");
  profile_cmd->add_option("--input", profile_input, "runs.csv")->required();
  profile_cmd->add_flag("--svg", svg, "Also write profile_<tau>.svg");
  profile_cmd->add_option("--out", out_dir, "Output directory");

  // list
  auto* list_cmd = app.add_subcommand("list", "Print the problem registry as CSV");
  std::string list_group = "all";
  list_cmd->add_option("--group", list_group, "low, high or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const fs::path dir(out_dir);
    if (list_cmd->parsed()) {
      out << registry_csv(problem_selection(list_group, ""));
      return kOk;
    }
    fs::create_directories(dir);

    if (solve_cmd->parsed()) {
      const Strategy strategy = strategy_arg(strategy_text);
      const Problem& p = get_problem(problem_name, dim);
      BenchConfig cfg;
      cfg.solver.budget_factor = budget_factor;
      cfg.solver.m = m;
      cfg.solver.gamma = gamma;
      cfg.solver.r0 = r0;
      cfg.solver.delta0 = delta0;
      cfg.seed = seed;
      try {
        cfg.solver.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const auto records = run_benchmark({p}, {strategy}, solve_ls, cfg);
      const RunRecord& r = records.front();
      write_file(dir / "runs.csv", runs_csv(records));
      out << fmt::format("problem      {} (n={})\n", p.title, p.dim);
      out << fmt::format("strategy     {}{}\n", strategy.code(), solve_ls ? " + line search" : "");
      out << fmt::format("final f      {:.10g}\n", r.best_f());
      out << fmt::format("f0 / fbest   {:.10g} / {:.10g}\n", r.f0, r.fbest);
      out << fmt::format("imp digits   {}\n", format_digits(r));
      out << fmt::format("stop reason  {}\n", to_string(r.stop_reason));
      out << fmt::format("calls        {}\n", r.f_values.size());
      return kOk;
    }

    if (bench_cmd->parsed()) {
      const std::vector<Strategy> strategies = strategy_list(bench_strategies);
      const std::vector<bool> modes = line_search_modes(bench_ls);
      const std::vector<Problem> problems = problem_selection(group, bench_problems);
      BenchConfig cfg;
      cfg.seed = bench_seed;
      cfg.workers = workers;
      cfg.solver.budget_factor = bench_budget;
      if (bench_budget < 0) throw UsageError("--budget-factor must be non-negative");
      const auto records = run_benchmark(problems, strategies, modes, cfg);
      std::vector<std::string> excluded;
      const auto rows = aggregate_table(records, &excluded);
      for (const std::string& name : excluded) {
        err << "warning: " << name << " starts at fbest and is left out of the table\n";
      }
      write_file(dir / "runs.csv", runs_csv(records));
      write_file(dir / "table.csv", table_csv(rows));
      out << fmt::format("{} runs over {} problems; best: {}{} imp {:.4f}\n", records.size(),
                         problems.size(), rows.front().strategy.code(),
                         rows.front().line_search ? " + line search" : "", rows.front().imp);
      return kOk;
    }

    if (table_cmd->parsed()) {
      std::vector<RunRecord> records;
      try {
        records = parse_runs_csv(read_file(table_input));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BadInput) throw DataError(e.what());
        throw;
      }
      std::vector<ImprovementRow> rows;
      try {
        rows = aggregate_table(records);
      } catch (const Error& e) {
        throw DataError(e.what());
      }
      write_file(dir / "table.csv", table_csv(rows));
      out << fmt::format("{} rows written\n", rows.size());
      return kOk;
    }

    if (profile_cmd->parsed()) {
      if (taus.empty()) throw UsageError("--tau needs at least one value");
      for (double t : taus) {
        if (!(t > 0.0)) throw UsageError("--tau values must be positive");
      }
      std::vector<RunRecord> records;
      try {
        records = parse_runs_csv(read_file(profile_input));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BadInput) throw DataError(e.what());
        throw;
      }
      if (profile_strategies_text != "all") {
        const std::vector<Strategy> keep = strategy_list(profile_strategies_text);
        std::erase_if(records, [&](const RunRecord& r) {
          return std::find(keep.begin(), keep.end(), r.strategy) == keep.end();
        });
      }
      if (records.empty()) throw DataError("no runs match the selected strategies");
      std::vector<ProfileCurve> all;
      for (double t : taus) {
        const auto curves = data_profile(records, t);
        if (svg) {
          write_file(dir / fmt::format("profile_{:g}.svg", t),
                     render_profile_svg(curves, fmt::format("Data profile, tau = {:g}", t)));
        }
        all.insert(all.end(), curves.begin(), curves.end());
      }
      write_file(dir / "profile.csv", profile_csv(all));
      out << fmt::format("{} curves written\n", all.size());
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kBadData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::UnknownProblem ? kUnknown : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace dfpp::cli
