#include <cmath>

#include "copk/bench.hpp"
#include "copk/model.hpp"
#include "copk/solver.hpp"
#include "doctest.h"

using namespace copk;

namespace {

Membership nonneg(std::vector<LinExpr> entries, const char* label = "") {
  Membership m;
  m.kind = ConeKind::Nonneg;
  m.dim = int(entries.size());
  m.entries = std::move(entries);
  m.label = label;
  return m;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("scalar bound") {
    ConicProblem p;
    int x = p.add_var("x");
    p.objective = LinExpr::variable(x);
    LinExpr slack = LinExpr::constant(1.0);
    slack.add(x, -1.0);
    p.memberships.push_back(nonneg({slack}));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_kkt(p, s).max_violation() < 1e-6);
  }

  TEST_CASE("simplex linear program with duals") {
    // max x0 + 2 x1 subject to x0 + x1 = 1, x >= 0.
    ConicProblem p;
    int x0 = p.add_var("x0");
    int x1 = p.add_var("x1");
    p.objective = LinExpr::variable(x0);
    p.objective.add(x1, 2.0);
    LinExpr eq = LinExpr::variable(x0);
    eq.add(x1, 1.0);
    eq.add_const(-1.0);
    p.equalities.push_back(eq);
    p.memberships.push_back(nonneg({LinExpr::variable(x0), LinExpr::variable(x1)}));

    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(s.dual_objective == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s.x[x1] == doctest::Approx(1.0).epsilon(1e-6));
    REQUIRE(s.eq_duals.size() == 1);
    CHECK(s.eq_duals[0] == doctest::Approx(-2.0).epsilon(1e-5));
    REQUIRE(s.cone_duals.size() == 1);
    CHECK(s.cone_duals[0][0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(s.cone_duals[0][1]) < 1e-5);
    CHECK(check_kkt(p, s).max_violation() < 1e-6);
  }

  TEST_CASE("second-order cone") {
    // max x0 + x1 with (2, x0, x1) in the cone: optimum 2 sqrt(2).
    ConicProblem p;
    int x0 = p.add_var("x0");
    int x1 = p.add_var("x1");
    p.objective = LinExpr::variable(x0);
    p.objective.add(x1, 1.0);
    Membership m;
    m.kind = ConeKind::Soc;
    m.dim = 3;
    m.entries = {LinExpr::constant(2.0), LinExpr::variable(x0), LinExpr::variable(x1)};
    p.memberships.push_back(m);
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
    CHECK(s.x[x0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
    CHECK(check_kkt(p, s).max_violation() < 1e-6);
  }

  TEST_CASE("semidefinite membership") {
    // max t with [[1, t], [t, 1]] psd: optimum 1.
    ConicProblem p;
    int t = p.add_var("t");
    p.objective = LinExpr::variable(t);
    Membership m;
    m.kind = ConeKind::Psd;
    m.dim = 2;
    m.entries = {LinExpr::constant(1.0), LinExpr::variable(t), LinExpr::constant(1.0)};
    p.memberships.push_back(m);
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_kkt(p, s).max_violation() < 1e-5);
  }

  TEST_CASE("largest eigenvalue") {
    // min t with t I - A psd for A = [[2,1],[1,3]]: t* = (5 + sqrt(5)) / 2.
    ConicProblem p;
    int t = p.add_var("t");
    p.objective = LinExpr::variable(t, -1.0);
    Membership m;
    m.kind = ConeKind::Psd;
    m.dim = 2;
    LinExpr d0 = LinExpr::variable(t);
    d0.add_const(-2.0);
    LinExpr off = LinExpr::constant(-1.0);
    LinExpr d1 = LinExpr::variable(t);
    d1.add_const(-3.0);
    m.entries = {d0, off, d1};
    p.memberships.push_back(m);
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(-s.objective == doctest::Approx((5.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-7));
  }

  TEST_CASE("matrix variable with equalities") {
    // max X01 with X psd, X00 = X11 = 1: optimum 1.
    ConicProblem p;
    int X = p.add_mat_var("X", 2);
    const MatVar& mv = p.mat_vars[X];
    p.objective = LinExpr::variable(mv.entry_var(0, 1));
    LinExpr e0 = LinExpr::variable(mv.entry_var(0, 0));
    e0.add_const(-1.0);
    LinExpr e1 = LinExpr::variable(mv.entry_var(1, 1));
    e1.add_const(-1.0);
    p.equalities = {e0, e1};
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.x[mv.entry_var(0, 1)] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(check_kkt(p, s).max_violation() < 1e-5);
  }

  TEST_CASE("infeasibility is certified") {
    // y >= 0 and -1 - y >= 0 cannot hold together.
    ConicProblem p;
    int y = p.add_var("y");
    p.objective = LinExpr::variable(y);
    LinExpr neg = LinExpr::constant(-1.0);
    neg.add(y, -1.0);
    p.memberships.push_back(nonneg({LinExpr::variable(y), neg}));
    Solution s = solve(p);
    CHECK(s.status == SolveStatus::Infeasible);
  }

  TEST_CASE("unboundedness is certified") {
    ConicProblem p;
    int y = p.add_var("y");
    p.objective = LinExpr::variable(y);
    p.memberships.push_back(nonneg({LinExpr::variable(y)}));
    Solution s = solve(p);
    CHECK(s.status == SolveStatus::Unbounded);
  }

  TEST_CASE("objective offsets pass through") {
    ConicProblem p;
    int x = p.add_var("x");
    p.objective = LinExpr::variable(x, 3.0);
    p.objective.add_const(-10.0);
    LinExpr slack = LinExpr::constant(2.0);
    slack.add(x, -1.0);
    p.memberships.push_back(nonneg({slack, LinExpr::variable(x)}));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-4.0).epsilon(1e-7));
    CHECK(s.dual_objective == doctest::Approx(-4.0).epsilon(1e-6));
  }

  TEST_CASE("mixed-cone corpus solves to optimality") {
    for (int i = 0; i < feasible_corpus_size(); ++i) {
      CAPTURE(i);
      ConicProblem p = feasible_corpus_problem(i);
      Solution s = solve(p);
      REQUIRE(s.status == SolveStatus::Optimal);
      KktReport k = check_kkt(p, s);
      CHECK(k.max_violation() < 1e-5);
      CHECK(std::abs(s.objective - s.dual_objective) <
            1e-6 * (1.0 + std::abs(s.objective)));
    }
  }

  TEST_CASE("deterministic replay") {
    ConicProblem p = feasible_corpus_problem(3);
    Solution a = solve(p);
    Solution b = solve(p);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
    CHECK(a.x == b.x);
  }
}
