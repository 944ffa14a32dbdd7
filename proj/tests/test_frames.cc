#include <cmath>
#include <stdexcept>

#include "copk/combinat.hpp"
#include "copk/frames.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"
#include "copk/oracle.hpp"
#include "doctest.h"

using namespace copk;

namespace {

Eigen::MatrixXd random_sym(int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = rng.gaussian();
  return A;
}

Eigen::VectorXd random_unit(int d, Rng& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.gaussian();
  return v / v.norm();
}

double block_eval(const BlockM& b, const Eigen::VectorXd& v) {
  const int d = (int)b.m21.size();
  double s = b.m11;
  for (int i = 0; i < d; ++i) {
    s += 2.0 * b.m21[i] * v(i);
    for (int j = 0; j < d; ++j) s += v(i) * b.m22[i][j] * v(j);
  }
  return s;
}

}  // namespace

TEST_SUITE("frames") {
  TEST_CASE("affine symmetric storage") {
    AffineSym s(3);
    s.at(2, 0) = LinExpr::variable(5, 2.0);
    CHECK(s.at(0, 2).coef(5) == 2.0);
    Eigen::MatrixXd A(2, 2);
    A << 1, 7, 7, -3;
    AffineSym c = AffineSym::constant(A);
    CHECK(c.at(0, 1).c0 == 7.0);
    CHECK(c.at(1, 1).c0 == -3.0);
    CHECK(c.at(0, 0).is_constant());
    CHECK_THROWS_AS(AffineSym::constant(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
  }

  TEST_CASE("point block matches the doubled quadratic for every direction") {
    // (1, v)' N(A, x) (1, v) == u' A u with u = (2 x_orth; x21+x22; (x21-x22) v),
    // exactly and for arbitrary (not just unit) v.
    for (auto shape : {ConeShape{1, 3}, ConeShape{0, 4}, ConeShape{2, 2}}) {
      Rng rng(42 + shape.n1);
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd A = random_sym(shape.n(), 100 + trial);
        std::vector<double> x(shape.rk());
        for (auto& c : x) c = rng.uniform();
        Eigen::VectorXd v(shape.n2 - 1);
        for (int i = 0; i < v.size(); ++i) v(i) = 2.0 * rng.uniform() - 1.0;
        BlockM b = build_N(A, x, shape);
        Eigen::VectorXd vu = v.norm() > 0 ? Eigen::VectorXd(v / v.norm())
                                          : Eigen::VectorXd::Unit(shape.n2 - 1, 0);
        CHECK(block_eval(b, vu) ==
              doctest::Approx(dp_quadratic_value(A, shape, x, vu)).epsilon(1e-12));
        // non-unit directions agree too (the identity is algebraic in v)
        Eigen::VectorXd u(shape.n());
        for (int i = 0; i < shape.n1; ++i) u(i) = 2.0 * x[i];
        u(shape.n1) = x[shape.n1] + x[shape.n1 + 1];
        u.tail(shape.n2 - 1) = (x[shape.n1] - x[shape.n1 + 1]) * v;
        CHECK(block_eval(b, v) == doctest::Approx(u.dot(A * u)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("index blocks expand the lifted power") {
    // (sum_i y_i)^r * u(y)' A u(y) == sum_{|alpha| = r+2} (r!/alpha!) y^alpha
    //                                  * (1,v)' M(A,alpha) (1,v)   for unit v.
    for (auto shape : {ConeShape{1, 3}, ConeShape{0, 2}, ConeShape{2, 2}}) {
      Rng rng(7 + shape.n2);
      Eigen::MatrixXd A = random_sym(shape.n(), 500 + shape.n1);
      for (int r = 0; r <= 2; ++r) {
        std::vector<double> y(shape.rk());
        double ysum = 0.0;
        for (auto& c : y) {
          c = rng.uniform() + 0.1;
          ysum += c;
        }
        Eigen::VectorXd v = random_unit(shape.n2 - 1, rng);
        const double lhs =
            std::pow(ysum, r) * dp_quadratic_value(A, shape, y, v);
        double rhs = 0.0;
        for (const auto& alpha : enumerate_eq(shape.rk(), r + 2)) {
          double w = (double)factorial(r);
          double mono = 1.0;
          for (int i = 0; i < shape.rk(); ++i) {
            w /= (double)factorial(alpha[i]);
            for (int t = 0; t < alpha[i]; ++t) mono *= y[i];
          }
          rhs += w * mono * block_eval(build_M(A, alpha, shape), v);
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("index constraint plan") {
    ConeShape shape{1, 3};
    auto plan = dp_constraint_plan(0, shape, true);
    REQUIRE(plan.size() == 4);
    CHECK(plan[0].alpha == MultiIndex{2, 0, 0});
    CHECK(plan[0].kind == ReducedKind::Nonneg);
    CHECK(plan[1].alpha == MultiIndex{1, 0, 1});
    CHECK(plan[1].kind == ReducedKind::Soc);
    CHECK(plan[2].alpha == MultiIndex{0, 1, 1});
    CHECK(plan[2].kind == ReducedKind::PsdSmall);
    CHECK(plan[3].alpha == MultiIndex{0, 0, 2});
    CHECK(plan[3].kind == ReducedKind::PsdSlack);

    auto full = dp_constraint_plan(0, shape, false);
    CHECK(full.size() == 6);  // every |alpha| = 2 index over rk = 3
    for (const auto& item : full) CHECK(item.kind == ReducedKind::PsdSlack);

    CHECK(dp_constraint_plan(0, ConeShape{2, 2}, true).size() == 7);
    CHECK(dp_constraint_plan(0, ConeShape{2, 2}, false).size() == 10);
    CHECK_THROWS_AS(dp_constraint_plan(-1, shape, true), std::invalid_argument);
    CHECK_THROWS_AS(dp_constraint_plan(0, ConeShape{3, 0}, true), std::invalid_argument);
  }

  TEST_CASE("concise plans are strictly smaller and preserve every kept index") {
    for (auto shape : {ConeShape{1, 3}, ConeShape{0, 2}, ConeShape{2, 4}}) {
      for (int r = 0; r <= 2; ++r) {
        auto concise = dp_constraint_plan(r, shape, true);
        auto full = dp_constraint_plan(r, shape, false);
        CHECK(concise.size() < full.size());
        // every kept index has a21 <= a22, every dropped one is a mirror
        size_t mirrors = 0;
        for (const auto& item : full) {
          if (item.alpha[shape.n1] > item.alpha[shape.n1 + 1]) ++mirrors;
        }
        CHECK(concise.size() + mirrors == full.size());
      }
    }
  }

  TEST_CASE("grid points") {
    auto pts = yildirim_points(1, 2);
    REQUIRE(pts.size() == 5);
    CHECK(pts[0] == std::vector<Rational>{1, 0});
    CHECK(pts[1] == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(pts[2] == std::vector<Rational>{0, 1});
    CHECK(pts[3] == std::vector<Rational>{Rational(2, 3), Rational(1, 3)});
    CHECK(pts[4] == std::vector<Rational>{Rational(1, 3), Rational(2, 3)});
    CHECK(yildirim_points(2, 2).size() == 7);

    for (int rk : {2, 3, 4}) {
      for (int r = 0; r <= 2; ++r) {
        auto p = yildirim_points(r, rk);
        CHECK((long long)p.size() <= yildirim_point_bound(r, rk));
        for (const auto& x : p) {
          Rational s = 0;
          for (const auto& c : x) {
            CHECK(c >= 0);
            s += c;
          }
          CHECK(s == 1);
        }
      }
    }
    CHECK_THROWS_AS(yildirim_points(-1, 2), std::invalid_argument);
  }

  TEST_CASE("grid constraint plan") {
    ConeShape shape{1, 3};
    auto plan = yildirim_constraint_plan(0, shape, true);
    REQUIRE(plan.size() == 4);
    CHECK(plan[0].x == std::vector<Rational>{1, 0, 0});
    CHECK(plan[0].kind == ReducedKind::Nonneg);  // x21 == x22 == 0
    CHECK(plan[1].x == std::vector<Rational>{Rational(1, 2), 0, Rational(1, 2)});
    CHECK(plan[1].kind == ReducedKind::PsdSlack);
    CHECK(plan[2].x == std::vector<Rational>{0, Rational(1, 2), Rational(1, 2)});
    CHECK(plan[2].kind == ReducedKind::Nonneg);
    CHECK(plan[3].x == std::vector<Rational>{0, 0, 1});
    CHECK(plan[3].kind == ReducedKind::PsdSlack);
    CHECK(yildirim_constraint_plan(0, shape, false).size() == 6);
  }

  TEST_CASE("frame combinations live in the cone") {
    ConeShape shape{1, 3};
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> x(shape.rk());
      double s = 0.0;
      for (auto& c : x) {
        c = rng.uniform();
        s += c;
      }
      for (auto& c : x) c /= s;
      Eigen::VectorXd v = random_unit(shape.n2 - 1, rng);
      AlgebraElement u = frame_combination(shape, x, v);
      CHECK(cone_membership(shape, u, 1e-12));
      // the doubled evaluation vector is exactly twice the cone point
      Eigen::MatrixXd A = random_sym(shape.n(), 700 + trial);
      Eigen::VectorXd w = u.full();
      CHECK(dp_quadratic_value(A, shape, x, v) ==
            doctest::Approx(4.0 * w.dot(A * w)).epsilon(1e-12));
    }
  }

  TEST_CASE("emitted blocks") {
    // shape with n2 == 2 exercises the degenerate lowerings
    ConeShape shape{1, 2};
    ConicProblem p;
    int y = p.add_var("y");
    AffineSym S(3);
    Eigen::MatrixXd C(3, 3);
    C << 2, 0, 0, 0, 1, 0, 0, 0, 1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) S.at(i, j) = LinExpr::constant(C(i, j));
    S.at(0, 0).add(y, -1.0);

    auto recs = emit_dp(p, S, 0, shape, true);
    REQUIRE(recs.size() == 4);
    CHECK(p.memberships[recs[0].membership].kind == ConeKind::Nonneg);  // (2,0,0)
    CHECK(p.memberships[recs[0].membership].dim == 1);
    CHECK(p.memberships[recs[1].membership].kind == ConeKind::Nonneg);  // soc lowered
    CHECK(p.memberships[recs[1].membership].dim == 2);
    CHECK(p.memberships[recs[2].membership].kind == ConeKind::Nonneg);  // psd-small lowered
    CHECK(p.memberships[recs[2].membership].dim == 1);
    CHECK(p.memberships[recs[3].membership].kind == ConeKind::Psd);
    CHECK(p.memberships[recs[3].membership].dim == 2);
    for (int i = 0; i < 3; ++i) {
      CHECK(recs[i].slack_var == -1);
      CHECK(p.memberships[recs[i].membership].label.rfind("lift[", 0) == 0);
    }
    CHECK(recs[3].slack_var == 1);  // one slack after the bound variable
    CHECK(p.num_vars() == 2);

    // entry values against the direct block build at a test assignment
    std::vector<double> at{0.25, -0.7};
    Eigen::MatrixXd Ceval = C;
    Ceval(0, 0) -= at[0];  // only S(0,0) carries the y term above
    BlockM b = build_M(Ceval, recs[3].alpha, shape);
    const auto& m = p.memberships[recs[3].membership];
    CHECK(m.entries[0].eval(at) == doctest::Approx(b.m11 - at[1]).epsilon(1e-12));
    CHECK(m.entries[1].eval(at) == doctest::Approx(b.m21[0]).epsilon(1e-12));
    CHECK(m.entries[2].eval(at) == doctest::Approx(b.m22[0][0] + at[1]).epsilon(1e-12));

    ConicProblem q;
    auto yrecs = emit_yildirim(q, S, 1, shape, true);
    for (const auto& rec : yrecs) {
      CHECK(!rec.point.empty());
      CHECK(q.memberships[rec.membership].label.rfind("grid[", 0) == 0);
    }
  }

  TEST_CASE("size and argument validation") {
    ConeShape shape{1, 3};
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);  // wrong size, n = 4
    CHECK_THROWS_AS(build_M(A, MultiIndex{1, 1, 0}, shape), std::invalid_argument);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(build_M(B, MultiIndex{1, 1}, shape), std::invalid_argument);
    CHECK_THROWS_AS(build_N(B, {1.0, 0.0}, shape), std::invalid_argument);
    CHECK_THROWS_AS(dp_quadratic_value(B, shape, {1, 0, 0}, Eigen::VectorXd::Zero(1)),
                    std::invalid_argument);
  }
}
