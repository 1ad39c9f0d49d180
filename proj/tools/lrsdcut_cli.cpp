// Command-line front end: gen, solve, bench, compare.

#include <lrsdcut/lrsdcut.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitBadInstance = 2;
constexpr int kExitSolver = 3;

struct ProblemDeleter {
  void operator()(lrsdcut_problem* p) const { lrsdcut_problem_free(p); }
};
struct ReportDeleter {
  void operator()(lrsdcut_report* r) const { lrsdcut_report_free(r); }
};
using ProblemPtr = std::unique_ptr<lrsdcut_problem, ProblemDeleter>;
using ReportPtr = std::unique_ptr<lrsdcut_report, ReportDeleter>;

struct Failure {
  int exit_code;
  std::string message;
};

std::string take_string(char* s) {
  std::string out(s ? s : "");
  lrsdcut_string_free(s);
  return out;
}

void check(lrsdcut_status st, int exit_code, const std::string& context) {
  if (st != LRSDCUT_OK)
    throw Failure{exit_code, context + ": " + lrsdcut_status_string(st) + ": " + lrsdcut_last_error()};
}

ProblemPtr load(const std::string& path) {
  lrsdcut_problem* p = nullptr;
  check(lrsdcut_problem_load(path.c_str(), &p), kExitBadInstance, "loading " + path);
  return ProblemPtr(p);
}

ProblemPtr parse(const std::string& json) {
  lrsdcut_problem* p = nullptr;
  check(lrsdcut_problem_parse(json.c_str(), nullptr, &p), kExitBadInstance, "parsing generated instance");
  return ProblemPtr(p);
}

ReportPtr solve(const lrsdcut_problem* p, lrsdcut_method m, const lrsdcut_params& params) {
  lrsdcut_report* r = nullptr;
  check(lrsdcut_solve(p, m, &params, &r), kExitSolver, "solve");
  return ReportPtr(r);
}

nlohmann::json report_json(const lrsdcut_report* r) {
  char* s = nullptr;
  check(lrsdcut_report_json(r, &s), kExitSolver, "report");
  return nlohmann::json::parse(take_string(s));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kExitUsage, "cannot write " + path};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

const std::map<std::string, lrsdcut_method> kMethods{
    {"lrsdcut", LRSDCUT_METHOD_LRSDCUT}, {"meanfield", LRSDCUT_METHOD_MEANFIELD}, {"brute", LRSDCUT_METHOD_BRUTE}};

void add_solver_flags(CLI::App* cmd, lrsdcut_params& p) {
  cmd->add_option("--gamma", p.gamma, "penalty parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--kmax", p.kmax, "ascent iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rank-init", p.rank_init, "rank r for the spectral shift")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", p.tau, "relative dual-improvement stop")->check(CLI::NonNegativeNumber);
  cmd->add_option("--memory", p.memory, "L-BFGS memory")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", p.samples, "rounding samples per iterate")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", p.seed, "random seed");
  cmd->add_option("--restarts", p.restarts, "mean-field restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--mf-iters", p.mf_iters, "mean-field iteration limit")->check(CLI::PositiveNumber);
}

void add_gen_flags(CLI::App* cmd, lrsdcut_gen_params& g, std::string& kind, bool seed_required) {
  cmd->add_option("--kind", kind, "clusters | random | grid")
      ->check(CLI::IsMember({"clusters", "random", "grid"}));
  cmd->add_option("--n", g.n, "variables (clusters, random)")->check(CLI::PositiveNumber);
  cmd->add_option("--width", g.width, "grid width")->check(CLI::PositiveNumber);
  cmd->add_option("--height", g.height, "grid height")->check(CLI::PositiveNumber);
  cmd->add_option("--labels", g.labels, "labels")->check(CLI::Range(2, 1 << 20));
  auto* seed = cmd->add_option("--seed", g.seed, "generator seed");
  if (seed_required) seed->required();
  cmd->add_option("--noise", g.noise, "unary corruption level")->check(CLI::NonNegativeNumber);
  cmd->add_option("--theta-pos", g.theta_pos, "position bandwidth")->check(CLI::PositiveNumber);
  cmd->add_option("--theta-col", g.theta_col, "color bandwidth")->check(CLI::PositiveNumber);
  cmd->add_option("--weight", g.weight, "kernel weight (negative: default)");
  cmd->add_option("--landmarks", g.landmarks, "Nystrom landmarks")->check(CLI::PositiveNumber);
  cmd->add_option("--rank", g.rank, "Nystrom or factor rank")->check(CLI::PositiveNumber);
  cmd->add_flag("--general-mu", g.general_mu, "random general compatibility (random kind)");
}

int cmd_gen(lrsdcut_gen_params g, const std::string& kind, const std::string& out) {
  g.kind = kind.c_str();
  if (out.empty() || out == "-") {
    char* s = nullptr;
    check(lrsdcut_generate(&g, &s), kExitUsage, "gen");
    std::cout << take_string(s);
  } else {
    check(lrsdcut_generate_file(&g, out.c_str()), kExitUsage, "gen");
  }
  return 0;
}

int cmd_solve(const std::string& path, const std::string& method, const lrsdcut_params& params,
              const std::string& out) {
  ProblemPtr p = load(path);
  ReportPtr r = solve(p.get(), kMethods.at(method), params);
  const nlohmann::json j = report_json(r.get());
  if (!out.empty()) write_file(out, j.dump(2) + "\n");
  std::printf("method       %s\n", method.c_str());
  std::printf("instance     %s\n", lrsdcut_problem_hash(p.get()));
  std::printf("energy       %.10g\n", lrsdcut_report_best_energy(r.get()));
  double lb = 0.0;
  if (lrsdcut_report_lower_bound(r.get(), &lb)) std::printf("lower_bound  %.10g\n", lb);
  std::printf("wall_ms      %.3f\n", lrsdcut_report_wall_ms(r.get()));
  for (std::size_t k = 0; k < lrsdcut_report_warning_count(r.get()); ++k)
    std::fprintf(stderr, "warning: %s\n", lrsdcut_report_warning(r.get(), k));
  return 0;
}

// Median per-iteration time; iteration 0 (shift + first evaluation) excluded
// for lrsdcut.
double per_iteration_ms(const nlohmann::json& rep, lrsdcut_method m, std::size_t& iterations) {
  std::vector<double> ms;
  if (m == LRSDCUT_METHOD_LRSDCUT) {
    for (const auto& t : rep["trajectory"])
      if (t["iter"].get<int>() > 0) ms.push_back(t["ms"].get<double>());
    iterations = ms.size();
    return median(ms);
  }
  iterations = rep["trajectory"].size() > 0 ? rep["trajectory"].size() - 1 : 0;
  return iterations > 0 ? rep["wall_ms"].get<double>() / static_cast<double>(iterations)
                        : rep["wall_ms"].get<double>();
}

int cmd_bench(const std::vector<std::string>& paths, const std::string& method, const lrsdcut_params& params,
              const std::string& out) {
  struct Row {
    std::string path;
    std::size_t n;
    std::size_t iterations;
    double ms;
  };
  std::vector<Row> rows;
  const lrsdcut_method m = kMethods.at(method);
  for (const auto& path : paths) {
    ProblemPtr p = load(path);
    ReportPtr r = solve(p.get(), m, params);
    Row row{path, lrsdcut_problem_n_vars(p.get()), 0, 0.0};
    row.ms = per_iteration_ms(report_json(r.get()), m, row.iterations);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.n < b.n; });
  std::string csv = "instance,n_vars,method,iterations,median_iter_ms,n_ratio,time_ratio\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    char line[512];
    if (k == 0) {
      std::snprintf(line, sizeof line, "%s,%zu,%s,%zu,%.4f,,\n", rows[k].path.c_str(), rows[k].n, method.c_str(),
                    rows[k].iterations, rows[k].ms);
    } else {
      std::snprintf(line, sizeof line, "%s,%zu,%s,%zu,%.4f,%.4f,%.4f\n", rows[k].path.c_str(), rows[k].n,
                    method.c_str(), rows[k].iterations, rows[k].ms,
                    static_cast<double>(rows[k].n) / static_cast<double>(rows[k - 1].n),
                    rows[k - 1].ms > 0.0 ? rows[k].ms / rows[k - 1].ms : 0.0);
    }
    csv += line;
  }
  if (out.empty()) std::cout << csv;
  else write_file(out, csv);
  return 0;
}

int cmd_compare(std::vector<std::string> paths, lrsdcut_gen_params g, const std::string& kind, int count,
                const lrsdcut_params& params, const std::string& out) {
  struct Source {
    std::string name;
    ProblemPtr problem;
  };
  std::vector<Source> sources;
  for (const auto& path : paths) sources.push_back({path, load(path)});
  if (paths.empty()) {
    if (count < 1) throw Failure{kExitUsage, "compare needs instance files or --count >= 1"};
    g.kind = kind.c_str();
    const std::uint64_t base = g.seed;
    for (int k = 0; k < count; ++k) {
      g.seed = base + static_cast<std::uint64_t>(k);
      char* s = nullptr;
      check(lrsdcut_generate(&g, &s), kExitUsage, "gen");
      sources.push_back({kind + ":seed=" + std::to_string(g.seed), parse(take_string(s))});
    }
  }
  std::string table = "instance,hash,lrsdcut_energy,lower_bound,meanfield_energy,difference\n";
  std::vector<double> e_sdp, e_mf;
  int wins = 0;
  for (auto& src : sources) {
    ReportPtr a = solve(src.problem.get(), LRSDCUT_METHOD_LRSDCUT, params);
    ReportPtr b = solve(src.problem.get(), LRSDCUT_METHOD_MEANFIELD, params);
    const double ea = lrsdcut_report_best_energy(a.get());
    const double eb = lrsdcut_report_best_energy(b.get());
    double lb = 0.0;
    const bool has_lb = lrsdcut_report_lower_bound(a.get(), &lb);
    e_sdp.push_back(ea);
    e_mf.push_back(eb);
    if (ea <= eb + 1e-6) ++wins;
    char line[512];
    std::snprintf(line, sizeof line, "%s,%s,%.10g,%s,%.10g,%.10g\n", src.name.c_str(),
                  lrsdcut_problem_hash(src.problem.get()), ea, has_lb ? std::to_string(lb).c_str() : "",
                  eb, ea - eb);
    table += line;
  }
  char summary[256];
  std::snprintf(summary, sizeof summary, "# median lrsdcut %.10g, median meanfield %.10g, lrsdcut <= meanfield on %d/%zu\n",
                median(e_sdp), median(e_mf), wins, sources.size());
  table += summary;
  if (out.empty()) std::cout << table;
  else write_file(out, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP inference for fully connected CRFs (LR-SDCut, mean field, brute force)"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "thread cap (0 = LRSDCUT_THREADS or auto)");

  lrsdcut_params params;
  lrsdcut_params_default(&params);
  lrsdcut_gen_params gen;
  lrsdcut_gen_params_default(&gen);
  std::string kind = "random", method = "lrsdcut", out;
  std::vector<std::string> inputs;
  int count = 0;

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic instance");
  add_gen_flags(gen_cmd, gen, kind, true);
  gen_cmd->add_option("--out,-o", out, "output file (default stdout)");

  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  solve_cmd->add_option("instance", inputs, "instance JSON")->required()->expected(1);
  solve_cmd->add_option("--method", method, "lrsdcut | meanfield | brute")
      ->check(CLI::IsMember({"lrsdcut", "meanfield", "brute"}));
  add_solver_flags(solve_cmd, params);
  solve_cmd->add_option("--out,-o", out, "report JSON file");

  auto* bench_cmd = app.add_subcommand("bench", "per-iteration timing CSV over instances");
  bench_cmd->add_option("instances", inputs, "instance JSON files")->required();
  bench_cmd->add_option("--method", method, "lrsdcut | meanfield")->check(CLI::IsMember({"lrsdcut", "meanfield"}));
  add_solver_flags(bench_cmd, params);
  bench_cmd->add_option("--out,-o", out, "CSV file (default stdout)");

  auto* cmp_cmd = app.add_subcommand("compare", "lrsdcut vs meanfield energies");
  cmp_cmd->add_option("instances", inputs, "instance JSON files");
  cmp_cmd->add_option("--count", count, "generate this many instances instead (seeds seed, seed+1, ...)");
  add_gen_flags(cmp_cmd, gen, kind, false);
  cmp_cmd->add_option("--solve-seed", params.seed, "solver seed");
  cmp_cmd->add_option("--kmax", params.kmax, "ascent iterations");
  cmp_cmd->add_option("--restarts", params.restarts, "mean-field restarts");
  cmp_cmd->add_option("--out,-o", out, "table file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  lrsdcut_set_threads(threads);
  try {
    if (*gen_cmd) return cmd_gen(gen, kind, out);
    if (*solve_cmd) return cmd_solve(inputs.front(), method, params, out);
    if (*bench_cmd) return cmd_bench(inputs, method, params, out);
    if (*cmp_cmd) return cmd_compare(inputs, gen, kind, count, params, out);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return kExitUsage;
}
