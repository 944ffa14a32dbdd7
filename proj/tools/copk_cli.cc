// Command-line front end: build problem files, solve them (internally or via
// an external SDPA-format solver), run the benchmark protocol, and verify
// copositivity of a given matrix.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "copk/assemble.hpp"
#include "copk/bench.hpp"
#include "copk/model.hpp"
#include "copk/oracle.hpp"
#include "copk/sdpa.hpp"
#include "copk/solver.hpp"
#include "json.hpp"

using namespace copk;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitStall = 3;
constexpr int kExitBudget = 4;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(9);
  out << v;
  return out.str();
}

// Defaults loaded from --config; command-line flags still win.
struct Defaults {
  json data = json::object();

  void load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    f >> data;
    if (!data.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }
  template <class T>
  void apply(const char* key, T& slot) const {
    if (auto it = data.find(key); it != data.end()) slot = it->get<T>();
  }
};

Eigen::MatrixXd load_matrix(const std::string& path, int n) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matrix file: " + path);
  std::vector<double> vals;
  double v;
  while (f >> v) vals.push_back(v);
  if (!f.eof()) throw std::runtime_error("non-numeric token in matrix file: " + path);
  if ((long)vals.size() == (long)n * n + 1 && vals[0] == n)
    vals.erase(vals.begin());  // optional leading dimension
  if ((long)vals.size() != (long)n * n)
    throw std::runtime_error("matrix file holds " + std::to_string(vals.size()) +
                             " numbers, expected " + std::to_string(n * n));
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = vals[size_t(i) * n + j];
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    std::cerr << "note: input matrix is not symmetric; using (A + A')/2\n";
  return 0.5 * (A + A.transpose());
}

std::string resolve_bridge(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("COPK_BRIDGE_SCRIPT"); env && *env) return env;
#ifdef COPK_BRIDGE_SCRIPT
  return COPK_BRIDGE_SCRIPT;
#else
  return "sdpa_solve.py";
#endif
}

struct BridgeResult {
  double primal = 0.0;
  double dual = 0.0;
};

BridgeResult run_bridge(const std::string& script, const std::string& datfile) {
  namespace fs = std::filesystem;
  const fs::path out =
      fs::temp_directory_path() / ("copk_bridge_" + std::to_string(::getpid()) + ".result");
  const std::string cmd =
      "python3 \"" + script + "\" \"" + datfile + "\" \"" + out.string() + "\"";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw std::runtime_error("bridge command failed (" + cmd + ")");
  std::ifstream rf(out);
  if (!rf) throw std::runtime_error("bridge produced no result file");
  BridgeResult res;
  bool have_p = false, have_d = false;
  std::string line;
  while (std::getline(rf, line)) {
    auto grab = [&](const char* key, double& slot, bool& have) {
      auto pos = line.find(key);
      if (pos == std::string::npos) return;
      auto eq = line.find('=', pos);
      if (eq == std::string::npos) return;
      slot = std::stod(line.substr(eq + 1));
      have = true;
    };
    grab("objValPrimal", res.primal, have_p);
    grab("objValDual", res.dual, have_d);
  }
  fs::remove(out);
  if (!have_p || !have_d) throw std::runtime_error("bridge result file lacks objective values");
  return res;
}

void print_solution(const Solution& s, double build_time) {
  std::cout << "status: " << to_string(s.status) << "\n";
  std::cout << "objective: " << fmt(s.objective) << "\n";
  std::cout << "dual objective: " << fmt(s.dual_objective) << "\n";
  std::cout << "primal residual: " << fmt(s.primal_residual) << "\n";
  std::cout << "dual residual: " << fmt(s.dual_residual) << "\n";
  std::cout << "relative gap: " << fmt(s.rel_gap) << "\n";
  std::cout << "iterations: " << s.iterations << "\n";
  if (!s.message.empty()) std::cout << "note: " << s.message << "\n";
  std::cout << "build_time_s: " << fmt(build_time) << "\n";
  std::cout << "solve_time_s: " << fmt(s.solve_seconds) << "\n";
}

// ---------------------------------------------------------------- build ----

struct BuildArgs {
  std::string hierarchy;
  int r = 0, n1 = 0, n2 = 0;
  uint64_t seed = 1;
  bool full = false;
  bool normalized_moments = false;
  std::string out = "copk_problem";
};

int cmd_build(const BuildArgs& a) {
  Hierarchy h;
  if (!parse_hierarchy(a.hierarchy, h)) {
    std::cerr << "unknown hierarchy '" << a.hierarchy
              << "' (expected dp|yildirim|zvp|nn|lasserre)\n";
    return kExitInvalid;
  }
  ConeShape shape{a.n1, a.n2};
  shape.validate();
  if (!hierarchy_supports(h, shape)) {
    std::cerr << to_string(h) << " is not available at shape (" << a.n1 << ", " << a.n2 << ")\n";
    return kExitInvalid;
  }
  if (a.r < 0) {
    std::cerr << "level must be nonnegative\n";
    return kExitInvalid;
  }
  AssembleOptions opts;
  opts.concise = !a.full;
  opts.normalized_moments = a.normalized_moments;

  const double t0 = now_seconds();
  Eigen::MatrixXd C = random_pd_matrix(shape.n(), a.seed);
  AssembledProblem ap = assemble_bound_problem(C, h, a.r, shape, opts);
  const double build_time = now_seconds() - t0;

  write_problem(ap.problem, a.out + ".json");
  SdpaMapping mapping = export_sdpa(ap.problem, a.out + ".dat-s");
  {
    std::ofstream mf(a.out + ".C.txt");
    mf << shape.n() << "\n";
    mf.precision(17);
    for (int i = 0; i < C.rows(); ++i) {
      for (int j = 0; j < C.cols(); ++j) mf << (j ? " " : "") << C(i, j);
      mf << "\n";
    }
  }

  std::cout << "hierarchy: " << to_string(h) << "\n";
  std::cout << "level: " << a.r << "\n";
  std::cout << "shape: (" << a.n1 << ", " << a.n2 << ")\n";
  std::cout << "variables: " << ap.problem.num_vars() << "\n";
  std::cout << "matrix variables: " << ap.problem.mat_vars.size() << "\n";
  std::cout << "equalities: " << ap.problem.equalities.size() << "\n";
  std::cout << "constraints: " << ap.problem.memberships.size() << "\n";
  if (ap.moment_underflow) std::cout << "warning: moment table flagged underflow\n";
  std::cout << "objective mapping: " << (mapping.use_dual_value ? "dual" : "-primal")
            << " + " << fmt(mapping.offset) << "\n";
  std::cout << "build_time_s: " << fmt(build_time) << "\n";
  std::cout << "wrote: " << a.out << ".json " << a.out << ".dat-s " << a.out << ".C.txt\n";
  return kExitOk;
}

// ---------------------------------------------------------------- solve ----

struct SolveArgs {
  std::string file;
  std::string solver = "internal";
  std::string bridge;
  double tol = 1e-8;
  int max_iterations = 200;
  double budget_seconds = 0.0;  // 0 = unlimited
  bool verbose = false;
};

int cmd_solve(const SolveArgs& a) {
  const bool is_sdpa = a.file.size() > 4 && (a.file.rfind(".dat-s") == a.file.size() - 6 ||
                                             a.file.rfind(".dat") == a.file.size() - 4);
  const double t0 = now_seconds();
  ConicProblem p = is_sdpa ? import_sdpa(a.file) : read_problem(a.file);
  const double build_time = now_seconds() - t0;

  if (a.solver == "external") {
    std::string datfile = a.file;
    SdpaMapping mapping;  // identity for a file already in SDPA form
    namespace fs = std::filesystem;
    fs::path tmp;
    if (!is_sdpa) {
      tmp = fs::temp_directory_path() / ("copk_solve_" + std::to_string(::getpid()) + ".dat-s");
      mapping = export_sdpa(p, tmp.string());
      datfile = tmp.string();
    }
    const double s0 = now_seconds();
    BridgeResult res = run_bridge(resolve_bridge(a.bridge), datfile);
    const double solve_time = now_seconds() - s0;
    if (!tmp.empty()) fs::remove(tmp);
    std::cout << "solver: external\n";
    std::cout << "file primal: " << fmt(res.primal) << "\n";
    std::cout << "file dual: " << fmt(res.dual) << "\n";
    std::cout << "objective: " << fmt(mapping.objective_from(res.primal, res.dual)) << "\n";
    std::cout << "build_time_s: " << fmt(build_time) << "\n";
    std::cout << "solve_time_s: " << fmt(solve_time) << "\n";
    if (a.budget_seconds > 0.0 && build_time + solve_time > a.budget_seconds) {
      std::cout << "budget exceeded (" << fmt(a.budget_seconds) << " s)\n";
      return kExitBudget;
    }
    return kExitOk;
  }
  if (a.solver != "internal") {
    std::cerr << "unknown solver '" << a.solver << "' (expected internal|external)\n";
    return kExitInvalid;
  }

  SolverConfig cfg;
  cfg.eps_feas = cfg.eps_gap = a.tol;
  cfg.max_iterations = a.max_iterations;
  cfg.verbose = a.verbose;
  Solution s = solve(p, cfg);
  print_solution(s, build_time);
  if (a.budget_seconds > 0.0 && build_time + s.solve_seconds > a.budget_seconds) {
    std::cout << "budget exceeded (" << fmt(a.budget_seconds) << " s)\n";
    return kExitBudget;
  }
  return s.status == SolveStatus::Stalled ? kExitStall : kExitOk;
}

// ------------------------------------------------------------ reproduce ----

struct ReproduceArgs {
  int n1 = 0, n2 = 0, r_max = 0;
  int trials = 1;
  uint64_t seed = 1;
  double budget_seconds = 0.0;  // per hierarchy, 0 = unlimited
  double tol = 1e-8;
  bool normalized_moments = false;
  std::string csv;
};

struct Cell {
  bool done = false;       // computed (vs budget-stopped)
  double optv = 0.0;       // mean optimal value over trials
  double solt = 0.0;       // mean solver seconds
  double tott = 0.0;       // mean build+solve seconds
  bool underflow = false;
  bool stalled = false;
};

int cmd_reproduce(const ReproduceArgs& a) {
  ConeShape shape{a.n1, a.n2};
  shape.validate();
  if (a.r_max < 0 || a.trials < 1) {
    std::cerr << "r_max must be >= 0 and trials >= 1\n";
    return kExitInvalid;
  }
  std::vector<Eigen::MatrixXd> cs;
  for (int t = 0; t < a.trials; ++t) cs.push_back(random_pd_matrix(shape.n(), a.seed + t));

  const Hierarchy order[] = {Hierarchy::Dp, Hierarchy::Yildirim, Hierarchy::Zvp, Hierarchy::Nn,
                             Hierarchy::Lasserre};
  std::vector<Hierarchy> hs;
  for (Hierarchy h : order)
    if (hierarchy_supports(h, shape)) hs.push_back(h);

  AssembleOptions opts;
  opts.normalized_moments = a.normalized_moments;
  SolverConfig cfg;
  cfg.eps_feas = cfg.eps_gap = a.tol;

  // cells[h][r]; a hierarchy stops producing cells once its own total time
  // crosses the budget
  std::vector<std::vector<Cell>> cells(hs.size(), std::vector<Cell>(a.r_max + 1));
  for (size_t hi = 0; hi < hs.size(); ++hi) {
    double spent = 0.0;
    for (int r = 0; r <= a.r_max; ++r) {
      if (a.budget_seconds > 0.0 && spent > a.budget_seconds) break;
      Cell& c = cells[hi][r];
      for (int t = 0; t < a.trials; ++t) {
        const double b0 = now_seconds();
        AssembledProblem ap = assemble_bound_problem(cs[t], hs[hi], r, shape, opts);
        const double b1 = now_seconds();
        Solution s = solve(ap.problem, cfg);
        c.optv += s.objective;
        c.solt += s.solve_seconds;
        c.tott += (b1 - b0) + s.solve_seconds;
        c.underflow = c.underflow || ap.moment_underflow;
        c.stalled = c.stalled || s.status == SolveStatus::Stalled;
      }
      c.optv /= a.trials;
      c.solt /= a.trials;
      c.tott /= a.trials;
      c.done = true;
      spent += c.tott * a.trials;
    }
  }

  auto cell_text = [&](const Cell& c, int field) {  // 0 optv, 1 solt, 2 tott
    if (!c.done) return std::string("*");
    std::ostringstream out;
    out.precision(6);
    out << (field == 0 ? c.optv : field == 1 ? c.solt : c.tott);
    std::string s = out.str();
    if (field == 0 && c.underflow) s += "!";
    if (field == 0 && c.stalled) s += "?";
    return s;
  };

  // markdown to stdout
  std::cout << "| r |";
  for (Hierarchy h : hs)
    std::cout << " " << to_string(h) << ".optv | " << to_string(h) << ".solt | " << to_string(h)
              << ".tott |";
  std::cout << "\n|---|";
  for (size_t i = 0; i < hs.size(); ++i) std::cout << "---|---|---|";
  std::cout << "\n";
  for (int r = 0; r <= a.r_max; ++r) {
    std::cout << "| " << r << " |";
    for (size_t hi = 0; hi < hs.size(); ++hi)
      for (int f = 0; f < 3; ++f) std::cout << " " << cell_text(cells[hi][r], f) << " |";
    std::cout << "\n";
  }
  std::cout << "('*' = level skipped after the per-hierarchy time budget, '!' = moment "
               "underflow flagged, '?' = solver stalled)\n";

  if (!a.csv.empty()) {
    std::ofstream cf(a.csv);
    if (!cf) {
      std::cerr << "cannot write " << a.csv << "\n";
      return kExitInvalid;
    }
    cf << "hierarchy,r,optv,solt,tott,underflow,stalled\n";
    for (size_t hi = 0; hi < hs.size(); ++hi)
      for (int r = 0; r <= a.r_max; ++r) {
        const Cell& c = cells[hi][r];
        cf << to_string(hs[hi]) << "," << r << ",";
        if (c.done)
          cf << fmt(c.optv) << "," << fmt(c.solt) << "," << fmt(c.tott) << ","
             << (c.underflow ? 1 : 0) << "," << (c.stalled ? 1 : 0) << "\n";
        else
          cf << "*,*,*,0,0\n";
      }
    std::cout << "wrote: " << a.csv << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------- verify ----

struct VerifyArgs {
  std::string file;
  int n1 = 0, n2 = 0;
  int depth = 3;
  uint64_t seed = 1;
  double tol = 1e-8;
  double budget_seconds = 0.0;
};

int cmd_verify(const VerifyArgs& a) {
  ConeShape shape{a.n1, a.n2};
  shape.validate();
  if (a.depth < 0) {
    std::cerr << "depth must be >= 0\n";
    return kExitInvalid;
  }
  Eigen::MatrixXd A = load_matrix(a.file, shape.n());
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double t0 = now_seconds();
  auto out_of_budget = [&] {
    return a.budget_seconds > 0.0 && now_seconds() - t0 > a.budget_seconds;
  };

  // cheap sampling screen: any sampled cone point with a negative value is
  // already a sound witness
  SampleResult screen = sample_cone_min(A, shape, 50000, a.seed);
  const bool sampled_negative = screen.min_value < -1e-7 * scale;

  std::vector<Hierarchy> inner;
  for (Hierarchy h : {Hierarchy::Nn, Hierarchy::Dp, Hierarchy::Zvp})
    if (hierarchy_supports(h, shape)) inner.push_back(h);

  SolverConfig cfg;
  cfg.eps_feas = cfg.eps_gap = a.tol;

  for (int r = 0; r <= a.depth; ++r) {
    if (out_of_budget()) {
      std::cout << "verdict: undecided (budget exceeded at level " << r << ")\n";
      return kExitBudget;
    }
    Refutation ref = find_refutation(A, shape, r);
    if (ref.found) {
      std::cout << "verdict: refuted\n";
      std::cout << "value: " << fmt(ref.value) << (ref.exact ? " (exact sign)\n" : "\n");
      std::cout << "witness:";
      for (int i = 0; i < ref.witness.size(); ++i) std::cout << " " << fmt(ref.witness(i));
      std::cout << "\n";
      return kExitOk;
    }
    if (sampled_negative) continue;  // a certificate cannot exist; skip the solves
    for (Hierarchy h : inner) {
      if (out_of_budget()) break;
      AssembledProblem ap = assemble_membership_problem(A, h, r, shape);
      MembershipResult res = test_membership(ap, cfg);
      if (res.feasible) {
        std::cout << "verdict: certified-copositive(r=" << r << ")\n";
        std::cout << "family: " << to_string(h) << "\n";
        return kExitOk;
      }
    }
  }
  if (sampled_negative) {
    // no grid witness up to the requested depth, but the sampler found one
    std::cout << "verdict: refuted\n";
    std::cout << "value: " << fmt(screen.min_value) << " (sampled)\n";
    std::cout << "witness:";
    for (int i = 0; i < screen.argmin.size(); ++i) std::cout << " " << fmt(screen.argmin(i));
    std::cout << "\n";
    return kExitOk;
  }
  std::cout << "verdict: undecided (depth " << a.depth << " exhausted)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximation hierarchies for copositive programs over R+^n1 x L^n2"};
  app.require_subcommand(1);

  Defaults defs;
  std::string config_path;
  // pre-scan so config values can seed option defaults before parsing
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  try {
    if (!config_path.empty()) defs.load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  app.add_option("--config", config_path, "JSON file with default option values");

  BuildArgs b;
  defs.apply("seed", b.seed);
  defs.apply("full", b.full);
  defs.apply("normalized_moments", b.normalized_moments);
  defs.apply("out", b.out);
  auto* build = app.add_subcommand("build", "generate a random instance and write problem files");
  build->add_option("hierarchy", b.hierarchy, "dp|yildirim|zvp|nn|lasserre")->required();
  build->add_option("r", b.r, "hierarchy level")->required();
  build->add_option("n1", b.n1, "orthant dimension")->required();
  build->add_option("n2", b.n2, "second-order cone dimension")->required();
  build->add_flag("--full", b.full, "emit full blocks (skip case-split reductions)");
  build->add_flag("--normalized-moments", b.normalized_moments,
                  "scale the moment table by its zero moment");
  build->add_option("--seed", b.seed, "random seed for the objective matrix");
  build->add_option("--out", b.out, "output file prefix");

  SolveArgs s;
  defs.apply("solver", s.solver);
  defs.apply("bridge", s.bridge);
  defs.apply("tol", s.tol);
  defs.apply("max_iterations", s.max_iterations);
  defs.apply("budget_seconds", s.budget_seconds);
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file (.json or .dat-s)");
  solve_cmd->add_option("file", s.file, "problem file")->required();
  solve_cmd->add_option("--solver", s.solver, "internal|external");
  solve_cmd->add_option("--bridge", s.bridge, "external solver script (SDPA in, result out)");
  solve_cmd->add_option("--tol", s.tol, "feasibility/gap tolerance");
  solve_cmd->add_option("--max-iterations", s.max_iterations, "iteration cap");
  solve_cmd->add_option("--budget-seconds", s.budget_seconds, "wall-time budget (0 = none)");
  solve_cmd->add_flag("--verbose", s.verbose, "per-iteration solver trace");

  ReproduceArgs rp;
  defs.apply("seed", rp.seed);
  defs.apply("trials", rp.trials);
  defs.apply("budget_seconds", rp.budget_seconds);
  defs.apply("tol", rp.tol);
  defs.apply("normalized_moments", rp.normalized_moments);
  defs.apply("csv", rp.csv);
  auto* rep = app.add_subcommand(
      "reproduce", "run all hierarchies at increasing level and tabulate value/time");
  rep->add_option("n1", rp.n1, "orthant dimension")->required();
  rep->add_option("n2", rp.n2, "second-order cone dimension")->required();
  rep->add_option("r_max", rp.r_max, "largest level")->required();
  rep->add_option("--trials", rp.trials, "instances per cell (values averaged)");
  rep->add_option("--seed", rp.seed, "seed of the first instance");
  rep->add_option("--budget-seconds", rp.budget_seconds, "per-hierarchy time budget (0 = none)");
  rep->add_option("--tol", rp.tol, "solver tolerance");
  rep->add_flag("--normalized-moments", rp.normalized_moments,
                "scale the moment table by its zero moment");
  rep->add_option("--csv", rp.csv, "also write the table as CSV");

  VerifyArgs vf;
  defs.apply("seed", vf.seed);
  defs.apply("depth", vf.depth);
  defs.apply("tol", vf.tol);
  defs.apply("budget_seconds", vf.budget_seconds);
  auto* ver = app.add_subcommand("verify", "decide copositivity of a matrix from a file");
  ver->add_option("file", vf.file, "whitespace-separated symmetric matrix")->required();
  ver->add_option("n1", vf.n1, "orthant dimension")->required();
  ver->add_option("n2", vf.n2, "second-order cone dimension")->required();
  ver->add_option("--depth", vf.depth, "largest hierarchy level to try");
  ver->add_option("--seed", vf.seed, "seed for the sampling screen");
  ver->add_option("--tol", vf.tol, "solver tolerance");
  ver->add_option("--budget-seconds", vf.budget_seconds, "wall-time budget (0 = none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (build->parsed()) return cmd_build(b);
    if (solve_cmd->parsed()) return cmd_solve(s);
    if (rep->parsed()) return cmd_reproduce(rp);
    if (ver->parsed()) return cmd_verify(vf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
