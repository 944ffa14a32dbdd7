#include <cmath>
#include <stdexcept>

#include "copk/gram.hpp"
#include "copk/jordan.hpp"
#include "copk/oracle.hpp"
#include "copk/solver.hpp"
#include "doctest.h"

using namespace copk;

namespace {

std::vector<double> random_point(int n, Rng& rng, double lo = -1.0) {
  std::vector<double> x(n);
  for (auto& c : x) c = lo + (1.0 - lo) * rng.uniform();
  return x;
}

double sparse_eval(const SparsePoly& p, const std::vector<double>& x) { return p.eval(x); }

}  // namespace

TEST_SUITE("gram") {
  TEST_CASE("membership cone generators") {
    ConeShape shape{1, 3};
    auto g = semialgebraic_generators(shape);
    REQUIRE(g.size() == 4);
    CHECK(g[0].at({1, 0, 0, 0}) == 1.0);  // orthant coordinate
    CHECK(g[1].at({0, 1, 0, 0}) == 1.0);  // cone head
    CHECK(g[2].at({1, 0, 0, 0}) == 1.0);  // all-ones over orthant + head
    CHECK(g[2].at({0, 1, 0, 0}) == 1.0);
    CHECK(g[2].coef.size() == 2);
    CHECK(g[3].at({0, 2, 0, 0}) == 1.0);  // head^2 - |tail|^2
    CHECK(g[3].at({0, 0, 2, 0}) == -1.0);
    CHECK(g[3].at({0, 0, 0, 2}) == -1.0);

    // every generator is nonnegative on the cone
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd x = sample_body_point(shape, rng);
      std::vector<double> xv(x.data(), x.data() + x.size());
      for (const auto& gen : g) CHECK(gen.eval(xv) >= -1e-12);
    }
    CHECK_THROWS_AS(semialgebraic_generators(ConeShape{2, 0}), std::invalid_argument);
  }

  TEST_CASE("squared coordinates match the algebra square") {
    for (auto shape : {ConeShape{2, 0}, ConeShape{1, 2}, ConeShape{1, 3}}) {
      auto q = squared_coordinates(shape);
      REQUIRE((int)q.size() == shape.n());
      Rng rng(33);
      for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(shape.n());
        for (int i = 0; i < shape.n(); ++i) x(i) = 2.0 * rng.uniform() - 1.0;
        AlgebraElement e = AlgebraElement::from_full(shape, x);
        Eigen::VectorXd sq = jordan_product(e, e).full();
        std::vector<double> xv(x.data(), x.data() + x.size());
        for (int i = 0; i < shape.n(); ++i)
          CHECK(q[i].eval(xv) == doctest::Approx(sq(i)).epsilon(1e-12));
      }
    }
    auto q2 = squared_coordinates(ConeShape{1, 2});
    CHECK(q2[0].at({2, 0, 0}) == 1.0);
    CHECK(q2[1].at({0, 2, 0}) == 1.0);
    CHECK(q2[1].at({0, 0, 2}) == 1.0);
    CHECK(q2[2].at({0, 1, 1}) == 2.0);
  }

  TEST_CASE("affine polynomial arithmetic") {
    // S = [[3, v0], [v0, -1]] as an affine symmetric matrix in one variable
    AffineSym S(2);
    S.at(0, 0) = LinExpr::constant(3.0);
    S.at(1, 0) = LinExpr::variable(0);
    S.at(1, 1) = LinExpr::constant(-1.0);
    AffinePoly q = quadratic_form_poly(S);
    CHECK(q.at({2, 0}).c0 == 3.0);
    CHECK(q.at({1, 1}).coef(0) == 2.0);
    CHECK(q.at({0, 2}).c0 == -1.0);

    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> coef{2.0 * rng.uniform() - 1.0};
      std::vector<double> x = random_point(2, rng);
      Eigen::MatrixXd M(2, 2);
      M << 3, coef[0], coef[0], -1;
      Eigen::Vector2d xe(x[0], x[1]);
      CHECK(affine_poly_eval(q, coef, x) == doctest::Approx(xe.dot(M * xe)).epsilon(1e-12));

      SparsePoly lin = poly_linear(2, {1.0, 2.0}, 0.5);
      AffinePoly prod = affine_poly_mul(q, lin);
      CHECK(affine_poly_eval(prod, coef, x) ==
            doctest::Approx(xe.dot(M * xe) * (x[0] + 2 * x[1] + 0.5)).epsilon(1e-12));
    }
  }

  TEST_CASE("sum-of-squares reduction to a psd matrix") {
    // max t with x^2 + 2 t x y + y^2 a sum of squares: the Gram matrix is
    // [[1, t], [t, 1]], so the answer is exactly 1.
    ConicProblem p;
    int t = p.add_var("t");
    AffinePoly target;
    target[{2, 0}] = LinExpr::constant(1.0);
    target[{1, 1}] = LinExpr::variable(t, 2.0);
    target[{0, 2}] = LinExpr::constant(1.0);
    int mv = sos_to_psd(p, target, 2, 2, "g");
    CHECK(p.mat_vars[mv].dim == 2);
    CHECK(p.equalities.size() == 3);
    p.objective = LinExpr::variable(t);
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));

    // x^2 - y^2 is not a sum of squares
    ConicProblem bad;
    AffinePoly nt;
    nt[{2, 0}] = LinExpr::constant(1.0);
    nt[{0, 2}] = LinExpr::constant(-1.0);
    sos_to_psd(bad, nt, 2, 2, "g");
    Solution sb = solve(bad);
    CHECK(sb.status == SolveStatus::Infeasible);

    CHECK_THROWS_AS(sos_to_psd(p, target, 2, 3, "g"), std::invalid_argument);
    AffinePoly inhom;
    inhom[{1, 0}] = LinExpr::constant(1.0);
    CHECK_THROWS_AS(sos_to_psd(p, inhom, 2, 2, "g"), std::invalid_argument);
  }

  TEST_CASE("lifted quadratic target") {
    ConeShape shape{1, 2};
    AffineSym S = AffineSym::constant((Eigen::MatrixXd(3, 3) << 1, 0.5, 0, 0.5, 2, -1, 0, -1, 3)
                                          .finished());
    AffinePoly t0 = lifted_quadratic_target(S, 0, shape);
    AffinePoly q = quadratic_form_poly(S);
    CHECK(t0.size() == q.size());
    Rng rng(77);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x = random_point(3, rng);
      AffinePoly t2 = lifted_quadratic_target(S, 2, shape);
      double mult = x[0] + x[1];  // orthant + head
      CHECK(affine_poly_eval(t2, {}, x) ==
            doctest::Approx(mult * mult * affine_poly_eval(q, {}, x)).epsilon(1e-12));
    }
  }

  TEST_CASE("recursive cone structure counts") {
    // leaf count per emitted tree is the two-term recurrence a_{m+2} = rk a_{m+1} + a_m
    for (auto shape : {ConeShape{1, 2}, ConeShape{0, 2}}) {
      for (int deg = 2; deg <= 4; ++deg) {
        ConicProblem p;
        AffineSym S = AffineSym::constant(Eigen::MatrixXd::Identity(shape.n(), shape.n()));
        AffinePoly target = lifted_quadratic_target(S, deg - 2, shape);
        ZvpEmit z = zvp_membership_constraints(p, target, deg, shape, "z");
        CHECK((long long)z.leaf_vars.size() == zvp_count(shape.rk(), deg));
        CHECK(z.nonneg_membership >= 0);
        CHECK(p.memberships[z.nonneg_membership].dim == (int)z.leaf_vars.size());
        CHECK(z.equations_end > z.equations_begin);
      }
    }
    // degree-2 tree: one Gram block over the n coordinates
    ConicProblem p;
    ConeShape shape{1, 2};
    AffineSym S = AffineSym::constant(Eigen::MatrixXd::Identity(3, 3));
    ZvpEmit z = zvp_membership_constraints(p, quadratic_form_poly(S), 2, shape, "z");
    REQUIRE(z.gram_mat_vars.size() == 1);
    CHECK(p.mat_vars[z.gram_mat_vars[0]].dim == 3);
    CHECK(z.leaf_vars.size() == 10);  // rk^2 + 1 with rk = 3
  }

  TEST_CASE("recursive cone feasibility") {
    ConeShape shape{1, 2};
    // identity: sum of coordinate squares, certified by the pure Gram block
    {
      ConicProblem p;
      AffineSym S = AffineSym::constant(Eigen::MatrixXd::Identity(3, 3));
      zvp_membership_constraints(p, quadratic_form_poly(S), 2, shape, "z");
      Solution s = solve(p);
      CHECK(s.status == SolveStatus::Optimal);
    }
    // -2 x0 x1 is negative on the cone interior: never representable
    {
      ConicProblem p;
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
      A(0, 1) = A(1, 0) = -1.0;
      AffineSym S = AffineSym::constant(A);
      zvp_membership_constraints(p, quadratic_form_poly(S), 2, shape, "z");
      Solution s = solve(p);
      CHECK(s.status == SolveStatus::Infeasible);
    }
    ConicProblem scratch;
    CHECK_THROWS_AS(zvp_membership_constraints(scratch, AffinePoly{}, 0, shape, "z"),
                    std::invalid_argument);
  }

  TEST_CASE("substituted squared-coordinate polynomial") {
    ConeShape flat{2, 0};
    SparsePoly p0 = nn_substituted_poly(Eigen::MatrixXd::Identity(2, 2), 0, flat);
    CHECK(p0.at({4, 0}) == 1.0);
    CHECK(p0.at({0, 4}) == 1.0);
    CHECK(p0.coef.size() == 2);
    SparsePoly pj = nn_substituted_poly(Eigen::MatrixXd::Ones(2, 2), 0, flat);
    CHECK(pj.at({2, 2}) == 2.0);

    // evaluation identity: |x|^{2r} (x*x)' A (x*x)
    for (auto shape : {ConeShape{2, 0}, ConeShape{1, 2}}) {
      Rng rng(11);
      Eigen::MatrixXd A(shape.n(), shape.n());
      for (int i = 0; i < shape.n(); ++i)
        for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = rng.gaussian();
      for (int r = 0; r <= 2; ++r) {
        SparsePoly q = nn_substituted_poly(A, r, shape);
        CHECK(q.degree() == 2 * r + 4);
        for (int t = 0; t < 10; ++t) {
          Eigen::VectorXd x(shape.n());
          for (int i = 0; i < shape.n(); ++i) x(i) = 2.0 * rng.uniform() - 1.0;
          AlgebraElement e = AlgebraElement::from_full(shape, x);
          Eigen::VectorXd sq = jordan_product(e, e).full();
          const double expect = std::pow(x.squaredNorm(), r) * sq.dot(A * sq);
          std::vector<double> xv(x.data(), x.data() + x.size());
          CHECK(sparse_eval(q, xv) == doctest::Approx(expect).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("substituted membership as a single Gram block") {
    ConeShape flat{2, 0};
    // (x0^2 - x1^2)^2 is a perfect square: certified at the base level
    {
      ConicProblem p;
      Eigen::MatrixXd A(2, 2);
      A << 1, -1, -1, 1;
      int mv = nn_membership_constraints(p, AffineSym::constant(A), 0, flat, "n");
      CHECK(p.mat_vars[mv].dim == 3);  // monomials of degree 2 in 2 variables
      Solution s = solve(p);
      CHECK(s.status == SolveStatus::Optimal);
    }
    // not copositive (goes to -4 at x0 = x1 = 1): no level can certify it
    {
      Eigen::MatrixXd A(2, 2);
      A << 1, -3, -3, 1;
      for (int r = 0; r <= 1; ++r) {
        ConicProblem p;
        nn_membership_constraints(p, AffineSym::constant(A), r, flat, "n");
        Solution s = solve(p);
        CHECK(s.status == SolveStatus::Infeasible);
      }
    }
  }
}
