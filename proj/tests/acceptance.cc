// Acceptance gate.  Usage: copk_acceptance <criterion 1-10>.
//
// Each criterion prints exactly one line
//   CRITERION N: PASS — detail
//   CRITERION N: FAIL — detail
// and exits 0 on pass, 1 on fail.  Seeds are fixed so reruns are identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "copk/assemble.hpp"
#include "copk/bench.hpp"
#include "copk/combinat.hpp"
#include "copk/frames.hpp"
#include "copk/gram.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"
#include "copk/moments.hpp"
#include "copk/oracle.hpp"
#include "copk/sdpa.hpp"
#include "copk/solver.hpp"

using namespace copk;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_alpha(const MultiIndex& a) {
  std::string s = "(";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

// Solve a bound problem; nullopt (with a note in *err) when the solver did
// not reach Optimal.
std::optional<double> bound_value(const Eigen::MatrixXd& C, Hierarchy h, int r,
                                  const ConeShape& shape, bool concise, std::string* err) {
  AssembleOptions opts;
  opts.concise = concise;
  AssembledProblem ap = assemble_bound_problem(C, h, r, shape, opts);
  Solution sol = solve(ap.problem, SolverConfig{});
  if (sol.status != SolveStatus::Optimal) {
    if (err) {
      std::ostringstream os;
      os << to_string(h) << " r=" << r << " status=" << to_string(sol.status) << " ("
         << sol.message << ")";
      *err = os.str();
    }
    return std::nullopt;
  }
  return sol.objective;
}

Eigen::MatrixXd random_symmetric(int n, Rng& rng) {
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) A(i, j) = A(j, i) = rng.gaussian();
  return A;
}

// ---------------------------------------------------------------- criterion 1

bool crit_sandwich(std::string& detail) {
  const ConeShape shape{2, 4};
  double worst_margin = 1e300;   // min over instances of min(outer) - max(inner)
  double worst_inner_step = 1e300, worst_outer_step = 1e300;
  for (int i = 0; i < 10; ++i) {
    Eigen::MatrixXd C = random_pd_matrix(6, 2100 + i);
    std::vector<double> dp, yi;
    for (int r = 0; r <= 4; ++r) {
      std::string err;
      auto a = bound_value(C, Hierarchy::Dp, r, shape, true, &err);
      if (!a) { detail = "instance " + std::to_string(i) + ": " + err; return false; }
      auto b = bound_value(C, Hierarchy::Yildirim, r, shape, true, &err);
      if (!b) { detail = "instance " + std::to_string(i) + ": " + err; return false; }
      dp.push_back(*a);
      yi.push_back(*b);
    }
    for (int r = 1; r <= 4; ++r) {
      worst_inner_step = std::min(worst_inner_step, dp[r] - dp[r - 1]);
      worst_outer_step = std::min(worst_outer_step, yi[r - 1] - yi[r]);
    }
    const double margin = *std::min_element(yi.begin(), yi.end()) -
                          *std::max_element(dp.begin(), dp.end());
    worst_margin = std::min(worst_margin, margin);
  }
  std::ostringstream os;
  os << "10 instances at (2,4), r<=4: min dp step " << fmt(worst_inner_step)
     << ", min yildirim drop " << fmt(worst_outer_step) << ", min outer-inner margin "
     << fmt(worst_margin);
  detail = os.str();
  return worst_inner_step >= -1e-6 && worst_outer_step >= -1e-6 && worst_margin >= -1e-6;
}

// ---------------------------------------------------------------- criterion 2

bool crit_stabilize(std::string& detail) {
  const ConeShape shape{1, 3};
  int agree = 0;
  double worst_rel = 0.0;
  for (int i = 0; i < 10; ++i) {
    Eigen::MatrixXd C = random_pd_matrix(4, 2200 + i);
    std::string err;
    auto yi8 = bound_value(C, Hierarchy::Yildirim, 8, shape, true, &err);
    if (!yi8) { detail = "instance " + std::to_string(i) + ": " + err; return false; }
    auto zvp0 = bound_value(C, Hierarchy::Zvp, 0, shape, true, &err);
    if (!zvp0) { detail = "instance " + std::to_string(i) + ": " + err; return false; }
    const double rel = std::fabs(*yi8 - *zvp0) / std::max(1e-12, std::fabs(*yi8));
    worst_rel = std::max(worst_rel, rel);
    if (rel <= 0.05) ++agree;
  }
  std::ostringstream os;
  os << agree << "/10 instances at (1,3) have |yildirim(8) - zvp(0)| <= 5% of |yildirim(8)|"
     << " (largest rel gap " << fmt(worst_rel) << ")";
  detail = os.str();
  return agree >= 8;
}

// ---------------------------------------------------------------- criterion 3

bool crit_concise(std::string& detail) {
  const ConeShape shape{1, 3};
  double worst_diff = 0.0;
  for (int i = 0; i < 10; ++i) {
    Eigen::MatrixXd C = random_pd_matrix(4, 2300 + i);
    for (int r = 0; r <= 3; ++r)
      for (Hierarchy h : {Hierarchy::Dp, Hierarchy::Yildirim}) {
        std::string err;
        auto vc = bound_value(C, h, r, shape, true, &err);
        if (!vc) { detail = "instance " + std::to_string(i) + ": " + err; return false; }
        auto vf = bound_value(C, h, r, shape, false, &err);
        if (!vf) { detail = "instance " + std::to_string(i) + " full: " + err; return false; }
        const double diff = std::fabs(*vc - *vf) / std::max(1.0, std::fabs(*vf));
        worst_diff = std::max(worst_diff, diff);
        if (diff > 1e-6) {
          std::ostringstream os;
          os << "instance " << i << " " << to_string(h) << " r=" << r << ": concise " << *vc
             << " vs full " << *vf;
          detail = os.str();
          return false;
        }
      }
  }
  // Census: the concise plan must be strictly smaller on every supported cell.
  const ConeShape census[] = {{0, 2}, {1, 2}, {1, 3}, {2, 4}};
  for (const ConeShape& s : census)
    for (int r = 0; r <= 3; ++r) {
      const size_t dc = dp_constraint_plan(r, s, true).size();
      const size_t df = dp_constraint_plan(r, s, false).size();
      const size_t yc = yildirim_constraint_plan(r, s, true).size();
      const size_t yf = yildirim_constraint_plan(r, s, false).size();
      if (dc >= df || yc >= yf) {
        std::ostringstream os;
        os << "census (" << s.n1 << "," << s.n2 << ") r=" << r << ": dp " << dc << "/" << df
           << ", yildirim " << yc << "/" << yf << " not strictly smaller";
        detail = os.str();
        return false;
      }
    }
  std::ostringstream os;
  os << "10 instances at (1,3), r<=3, dp+yildirim: concise==full within " << fmt(worst_diff)
     << "; concise plans strictly smaller on 16 census cells";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool crit_moment_mc(std::string& detail) {
  const ConeShape shapes[] = {{0, 2}, {1, 3}, {2, 3}};
  double worst_rel = 0.0;
  MultiIndex worst_alpha;
  ConeShape worst_shape{0, 0};
  for (int si = 0; si < 3; ++si) {
    const ConeShape shape = shapes[si];
    const int n = shape.n1 + shape.n2;
    // Even SOC-tail exponents only; odd tails integrate to zero.
    std::vector<MultiIndex> alphas;
    for (const MultiIndex& a : enumerate_le(n, 4)) {
      bool even_tail = true;
      for (int j = shape.n1 + 1; j < n; ++j)
        if (a[j] % 2) even_tail = false;
      if (even_tail && !moment_is_zero(a, shape)) alphas.push_back(a);
    }
    // One shared rejection stream: box = [0,1]^{n1} x [0,1] x [-1,1]^{n2-1},
    // accept when the point lies in the solid body.
    Rng rng(2400 + si);
    std::vector<double> sums(alphas.size(), 0.0);
    std::vector<double> pw((size_t)n * 5);
    long accepted = 0, draws = 0;
    std::vector<double> x(n);
    while (accepted < 1000000) {
      ++draws;
      double head_budget = 0.0;
      for (int i = 0; i < shape.n1; ++i) {
        x[i] = rng.uniform();
        head_budget += x[i];
      }
      const double head = rng.uniform();
      x[shape.n1] = head;
      double tail2 = 0.0;
      for (int j = shape.n1 + 1; j < n; ++j) {
        x[j] = 2.0 * rng.uniform() - 1.0;
        tail2 += x[j] * x[j];
      }
      if (head_budget + head > 1.0 || head * head < tail2) continue;
      ++accepted;
      for (int i = 0; i < n; ++i) {
        pw[(size_t)i * 5] = 1.0;
        for (int e = 1; e <= 4; ++e) pw[(size_t)i * 5 + e] = pw[(size_t)i * 5 + e - 1] * x[i];
      }
      for (size_t k = 0; k < alphas.size(); ++k) {
        double m = 1.0;
        for (int i = 0; i < n; ++i) m *= pw[(size_t)i * 5 + alphas[k][i]];
        sums[k] += m;
      }
    }
    const double boxvol = std::pow(2.0, shape.n2 - 1);
    for (size_t k = 0; k < alphas.size(); ++k) {
      const double est = boxvol * sums[k] / double(draws);
      const double ref = moment(alphas[k], shape);
      const double rel = std::fabs(est - ref) / ref;
      if (rel > worst_rel) {
        worst_rel = rel;
        worst_alpha = alphas[k];
        worst_shape = shape;
      }
    }
  }
  std::ostringstream os;
  os << "moment() vs 1e6-point rejection MC over (0,2),(1,3),(2,3), |alpha|<=4 even tail: "
     << "largest rel dev " << fmt(worst_rel) << " at alpha=" << fmt_alpha(worst_alpha) << " shape ("
     << worst_shape.n1 << "," << worst_shape.n2 << ")";
  detail = os.str();
  return worst_rel <= 0.02;
}

// ---------------------------------------------------------------- criterion 5

bool crit_moment_spot(std::string& detail) {
  const ConeShape shape{0, 2};
  const double y0 = moment({0, 0}, shape);
  const double y10 = moment({1, 0}, shape);
  std::ostringstream os;
  os << "at (0,2): y_(0,0) = " << std::setprecision(17) << y0 << " (want 1), y_(1,0) = " << y10
     << " (want 2/3)";
  detail = os.str();
  return std::fabs(y0 - 1.0) <= 1e-12 && std::fabs(y10 - 2.0 / 3.0) <= 1e-12;
}

// ---------------------------------------------------------------- criterion 6

long long lcm_upto(int k) {
  long long l = 1;
  for (int v = 2; v <= k; ++v) l = std::lcm(l, (long long)v);
  return l;
}

// Count simplex grid points independently: x = beta/L with sum beta = L lies
// in the level-r family iff (k+2) x is integral for some k <= r.
long long grid_count_by_enumeration(int r, int rk) {
  const long long L = lcm_upto(r + 2);
  long long count = 0;
  MultiIndex beta(rk, 0);
  // Enumerate compositions of L into rk parts.
  std::function<void(int, long long)> rec = [&](int pos, long long left) {
    if (pos == rk - 1) {
      beta[pos] = (int)left;
      for (int k = 0; k <= r; ++k) {
        bool all = true;
        for (int i = 0; i < rk; ++i)
          if (((long long)(k + 2) * beta[i]) % L != 0) { all = false; break; }
        if (all) { ++count; break; }
      }
      return;
    }
    for (long long v = 0; v <= left; ++v) {
      beta[pos] = (int)v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, L);
  return count;
}

bool crit_counts(std::string& detail) {
  // dp block count, full encoding: one block per multi-index of degree r+2
  // plus the slack budget rows folded in -> C(rk+r+1, rk-1).
  for (int rk = 2; rk <= 6; ++rk) {
    const ConeShape shape{rk - 2, 2};
    for (int r = 0; r <= 5; ++r) {
      const long long want = binomial(rk + r + 1, rk - 1);
      const long long got = (long long)dp_constraint_plan(r, shape, false).size();
      if (got != want) {
        detail = "dp plan (" + std::to_string(shape.n1) + ",2) r=" + std::to_string(r) + ": " +
                 std::to_string(got) + " blocks, formula says " + std::to_string(want);
        return false;
      }
    }
  }
  // Grid cardinality: matches brute-force enumeration and stays under the
  // geometric-series bound rk^2 (rk^{r+1} - 1) / (rk - 1).
  for (int rk = 2; rk <= 5; ++rk)
    for (int r = 0; r <= 4; ++r) {
      const long long got = (long long)yildirim_points(r, rk).size();
      const long long brute = grid_count_by_enumeration(r, rk);
      long long p = 1;
      for (int t = 0; t <= r; ++t) p *= rk;  // rk^{r+1}
      const long long bound = (long long)rk * rk * ((p - 1) / (rk - 1));
      if (got != brute) {
        detail = "grid rk=" + std::to_string(rk) + " r=" + std::to_string(r) + ": library " +
                 std::to_string(got) + " points, enumeration " + std::to_string(brute);
        return false;
      }
      if (got > bound) {
        detail = "grid rk=" + std::to_string(rk) + " r=" + std::to_string(r) + ": " +
                 std::to_string(got) + " points exceeds bound " + std::to_string(bound);
        return false;
      }
    }
  // Gram schedule: zvp_count matches the two-term recurrence and its closed
  // form.
  for (int rk = 2; rk <= 6; ++rk) {
    long long a[8] = {1, rk};
    for (int m = 2; m <= 7; ++m) a[m] = rk * a[m - 1] + a[m - 2];
    for (int m = 0; m <= 6; ++m) {
      const long long want = a[m];
      const long long got = zvp_count(rk, m);
      if (got != want) {
        detail = "zvp_count(" + std::to_string(rk) + "," + std::to_string(m) + ") = " +
                 std::to_string(got) + ", recurrence says " + std::to_string(want);
        return false;
      }
      const double cf = zvp_count_closed_form(rk, m);
      if (std::fabs(cf - (double)got) > 1e-6 * std::max(1.0, (double)got)) {
        detail = "zvp closed form (" + std::to_string(rk) + "," + std::to_string(m) +
                 ") = " + fmt(cf) + " vs " + std::to_string(got);
        return false;
      }
    }
  }
  detail = "dp full plan = C(rk+r+1, rk-1) for rk<=6, r<=5; grid sizes match enumeration and "
           "bound for rk<=5, r<=4; zvp schedule matches recurrence and closed form for m<=6";
  return true;
}

// ---------------------------------------------------------------- criterion 7

bool crit_soundness(std::string& detail) {
  const ConeShape shapes[] = {{0, 2}, {1, 2}, {1, 3}};
  // Part 1: anything an inner level accepts must survive the sampling oracle.
  int accepted_count = 0;
  double worst_sample = 1e300;
  const std::pair<Hierarchy, int> ladder[] = {
      {Hierarchy::Nn, 0}, {Hierarchy::Dp, 0}, {Hierarchy::Zvp, 0},
      {Hierarchy::Nn, 1}, {Hierarchy::Dp, 1}};
  for (int i = 0; i < 100; ++i) {
    const ConeShape shape = shapes[i % 3];
    const int n = shape.n1 + shape.n2;
    Rng rng(2700 + i);
    Eigen::MatrixXd A = random_symmetric(n, rng);
    // Shift a portion of the draws toward copositivity so acceptance happens.
    A += double(i % 4) * 0.6 * (A.norm() / std::sqrt(double(n))) *
         Eigen::MatrixXd::Identity(n, n);
    bool accepted = false;
    for (const auto& [h, r] : ladder) {
      if (!hierarchy_supports(h, shape)) continue;
      MembershipResult mr = test_membership(assemble_membership_problem(A, h, r, shape));
      if (mr.status == SolveStatus::Optimal && mr.feasible) { accepted = true; break; }
    }
    if (!accepted) continue;
    ++accepted_count;
    SampleResult s = sample_cone_min(A, shape, 20000, 7200 + i);
    const double floor = -1e-6 * A.norm();
    worst_sample = std::min(worst_sample, s.min_value - floor);
    if (s.min_value < floor) {
      std::ostringstream os;
      os << "instance " << i << " accepted by an inner level but sampled min " << s.min_value
         << " < " << floor;
      detail = os.str();
      return false;
    }
  }
  if (accepted_count < 10) {
    detail = "only " + std::to_string(accepted_count) +
             "/100 random matrices were accepted by inner levels; check too weak";
    return false;
  }
  // Part 2: planted negative directions get refuted with an exact witness.
  int refuted = 0, max_r = -1;
  for (int i = 0; i < 20; ++i) {
    const ConeShape shape = shapes[i % 3];
    const int n = shape.n1 + shape.n2;
    Rng rng(7300 + i);
    Eigen::MatrixXd G = random_symmetric(n, rng);
    G /= G.norm();
    Eigen::VectorXd u = sample_body_point(shape, rng);
    const double uu = u.squaredNorm();
    const double uGu = u.dot(G * u);
    const double beta = (std::max(uGu, 0.0) + 2.0) / (uu * uu);
    Eigen::MatrixXd A = G - beta * u * u.transpose();
    bool found = false;
    for (int r = 0; r <= 6 && !found; ++r) {
      Refutation ref = find_refutation(A, shape, r);
      if (ref.found) {
        if (!ref.exact || ref.value >= 0.0) {
          std::ostringstream os;
          os << "planted instance " << i << ": witness not exact (value " << ref.value << ")";
          detail = os.str();
          return false;
        }
        found = true;
        max_r = std::max(max_r, r);
      }
    }
    if (!found) {
      detail = "planted instance " + std::to_string(i) + " not refuted by r<=6";
      return false;
    }
    ++refuted;
  }
  std::ostringstream os;
  os << accepted_count << "/100 random matrices accepted by inner levels, all pass the sampling "
     << "oracle (min slack " << fmt(worst_sample) << "); " << refuted
     << "/20 planted instances refuted exactly (deepest level " << max_r << ")";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------- criterion 8

bool crit_horn(std::string& detail) {
  const int n = 5;
  Eigen::MatrixXd H(n, n);
  const double row[] = {1, -1, 1, 1, -1};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = row[(j - i + n) % n];
  const ConeShape shape{5, 0};
  MembershipResult m0 = test_membership(assemble_membership_problem(H, Hierarchy::Nn, 0, shape));
  MembershipResult m1 = test_membership(assemble_membership_problem(H, Hierarchy::Nn, 1, shape));
  SampleResult s = sample_cone_min(H, shape, 100000, 2800);
  std::ostringstream os;
  os << "Horn matrix: nn level 0 " << (m0.feasible ? "feasible" : "infeasible") << " (status "
     << to_string(m0.status) << "), level 1 " << (m1.feasible ? "feasible" : "infeasible")
     << " (status " << to_string(m1.status) << "), sampled min " << fmt(s.min_value);
  detail = os.str();
  return !m0.feasible && m0.status == SolveStatus::Infeasible && m1.feasible &&
         s.min_value >= -1e-6;
}

// ---------------------------------------------------------------- criterion 9

struct BridgeValues {
  bool ok = false;
  double primal = 0.0, dual = 0.0;
  std::string err;
};

BridgeValues run_bridge_once(const std::string& script, const ConicProblem& p, int tag) {
  BridgeValues out;
  SdpaMapping mapping;
  const std::string text = export_sdpa_string(p, &mapping);
  std::ostringstream base;
  base << "/tmp/copk_acc9_" << ::getpid() << "_" << tag;
  const std::string in = base.str() + ".dat-s", res = base.str() + ".result";
  {
    std::ofstream f(in);
    f << text;
  }
  const std::string cmd = "python3 \"" + script + "\" \"" + in + "\" \"" + res + "\"";
  const int rc = std::system(cmd.c_str());
  bool have_p = false, have_d = false;
  if (rc == 0) {
    std::ifstream f(res);
    std::string line;
    while (std::getline(f, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(0, line.find(' '));
      const double v = std::atof(line.c_str() + eq + 1);
      if (key == "objValPrimal") { out.primal = v; have_p = true; }
      if (key == "objValDual") { out.dual = v; have_d = true; }
    }
  }
  std::remove(in.c_str());
  std::remove(res.c_str());
  if (rc != 0) {
    out.err = "bridge exited with " + std::to_string(rc);
    return out;
  }
  if (!have_p || !have_d) {
    out.err = "bridge result missing objective lines";
    return out;
  }
  out.ok = true;
  return out;
}

bool crit_solver(std::string& detail) {
  // Part 1: the random feasible corpus solves to tight residuals.
  double max_res = 0.0;
  for (int i = 0; i < 100; ++i) {
    ConicProblem p = random_feasible_problem(9000 + i);
    Solution sol = solve(p, SolverConfig{});
    max_res = std::max({max_res, sol.primal_residual, sol.dual_residual});
    if (sol.status != SolveStatus::Optimal || sol.primal_residual > 1e-7 ||
        sol.dual_residual > 1e-7) {
      std::ostringstream os;
      os << "seed " << 9000 + i << ": status " << to_string(sol.status) << ", residuals "
         << sol.primal_residual << "/" << sol.dual_residual << " (" << sol.message << ")";
      detail = os.str();
      return false;
    }
  }
  // Part 2: internal objective matches the external bridge on 20 exports.
  const char* env = std::getenv("COPK_BRIDGE_SCRIPT");
  const std::string script = env && *env ? env : COPK_BRIDGE_SCRIPT;
  double worst_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    ConicProblem p =
        k < feasible_corpus_size() ? feasible_corpus_problem(k) : random_feasible_problem(9500 + k);
    Solution sol = solve(p, SolverConfig{});
    if (sol.status != SolveStatus::Optimal) {
      detail = "bridge case " + std::to_string(k) + ": internal status " + to_string(sol.status);
      return false;
    }
    SdpaMapping mapping;
    export_sdpa_string(p, &mapping);  // same mapping the bridge file uses
    BridgeValues bv = run_bridge_once(script, p, k);
    if (!bv.ok) {
      detail = "bridge case " + std::to_string(k) + ": " + bv.err;
      return false;
    }
    const double mapped = mapping.objective_from(bv.primal, bv.dual);
    const double gap = std::fabs(mapped - sol.objective) / std::max(1.0, std::fabs(sol.objective));
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) {
      std::ostringstream os;
      os << "bridge case " << k << ": internal " << sol.objective << " vs external " << mapped;
      detail = os.str();
      return false;
    }
  }
  std::ostringstream os;
  os << "100 random problems solved to residuals <= " << fmt(max_res)
     << "; 20 exports agree with the cvxopt bridge within " << fmt(worst_gap) << " rel";
  detail = os.str();
  return true;
}

// --------------------------------------------------------------- criterion 10

bool crit_underflow(std::string& detail) {
  const ConeShape shape{5, 25};
  MomentTable raw = MomentTable::build(shape, 4);
  MomentOptions opts;
  opts.normalized = true;
  MomentTable norm = MomentTable::build(shape, 4, opts);
  int low_degree_flags = 0;
  for (const MultiIndex& a : raw.underflow)
    if (mi_degree(a) <= 4) ++low_degree_flags;
  std::ostringstream os;
  os << "at (5,25) depth 4: raw table flags " << raw.underflow.size() << " moments ("
     << low_degree_flags << " with |alpha|<=4), normalized table flags " << norm.underflow.size();
  detail = os.str();
  return raw.any_underflow() && low_degree_flags > 0 && !norm.any_underflow();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1-10>\n", argv[0]);
    return 2;
  }
  const int crit = std::atoi(argv[1]);
  bool (*fn)(std::string&) = nullptr;
  switch (crit) {
    case 1: fn = crit_sandwich; break;
    case 2: fn = crit_stabilize; break;
    case 3: fn = crit_concise; break;
    case 4: fn = crit_moment_mc; break;
    case 5: fn = crit_moment_spot; break;
    case 6: fn = crit_counts; break;
    case 7: fn = crit_soundness; break;
    case 8: fn = crit_horn; break;
    case 9: fn = crit_solver; break;
    case 10: fn = crit_underflow; break;
    default:
      std::fprintf(stderr, "criterion must be 1-10\n");
      return 2;
  }
  std::string detail;
  bool pass = false;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  std::printf("CRITERION %d: %s — %s\n", crit, pass ? "PASS" : "FAIL", detail.c_str());
  return pass ? 0 : 1;
}
