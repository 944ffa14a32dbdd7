#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "copk/combinat.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"

namespace copk {

using Rational = boost::multiprecision::cpp_rational;

// Symmetric matrix with affine-expression entries (lower triangle stored).
struct AffineSym {
  int n = 0;
  std::vector<LinExpr> tri;

  AffineSym() = default;
  explicit AffineSym(int n_) : n(n_), tri(size_t(n_) * (n_ + 1) / 2) {}
  LinExpr& at(int i, int j);
  const LinExpr& at(int i, int j) const;
  static AffineSym constant(const Eigen::MatrixXd& A);
};

// Small symmetric block [[m11, m21'], [m21, m22]] of order n2 with entries of
// type T; m22 has order n2-1.
template <class T>
struct SmallBlock {
  T m11{};
  std::vector<T> m21;
  std::vector<std::vector<T>> m22;
};

using BlockM = SmallBlock<double>;

// Block attached to a degree multi-index over the rk frame coordinates
// (orthant exponents, then the two cone-block exponents).
BlockM build_M(const Eigen::MatrixXd& A, const MultiIndex& alpha, const ConeShape& shape);
SmallBlock<LinExpr> build_M_affine(const AffineSym& S, const MultiIndex& alpha,
                                   const ConeShape& shape);

// Block attached to a simplex point in frame coordinates (length rk).
BlockM build_N(const Eigen::MatrixXd& A, const std::vector<double>& x, const ConeShape& shape);
SmallBlock<LinExpr> build_N_affine(const AffineSym& S, const std::vector<double>& x,
                                   const ConeShape& shape);

// How a single block constraint "exists t with B - t J psd" is represented
// after case analysis (J = diag(1, -I)).
enum class ReducedKind {
  PsdSlack,  // full block with a free slack variable
  PsdSmall,  // m21 = 0: m11 I + m22 psd, order n2-1
  Soc,       // m22 = 0: (m11, 2 m21) in the second-order cone
  Nonneg,    // m21 = 0, m22 = 0: m11 >= 0
};
const char* to_string(ReducedKind k);

struct DpPlanItem {
  MultiIndex alpha;  // length rk, degree r+2
  ReducedKind kind;
};
std::vector<DpPlanItem> dp_constraint_plan(int r, const ConeShape& shape, bool concise);

// Simplex grid: union over k = 0..r of points x with (k+2) x integral,
// deduplicated exactly, in first-seen enumeration order.  Coordinates are
// exact rationals over the rk frame coordinates.
std::vector<std::vector<Rational>> yildirim_points(int r, int rk);
long long yildirim_point_bound(int r, int rk);

struct GridPlanItem {
  std::vector<Rational> x;
  ReducedKind kind;
};
std::vector<GridPlanItem> yildirim_constraint_plan(int r, const ConeShape& shape, bool concise);

// Quadratic value u' A u of the doubled evaluation vector
// u = (2 x_orthant; x+ + x-; (x+ - x-) v) at frame coordinates x and unit v.
double dp_quadratic_value(const Eigen::MatrixXd& A, const ConeShape& shape,
                          const std::vector<double>& x, const Eigen::VectorXd& v);

// Cone point sum_i x_i c_i(v) for frame coordinates x on the simplex.
AlgebraElement frame_combination(const ConeShape& shape, const std::vector<double>& x,
                                 const Eigen::VectorXd& v);

// Record of one emitted block constraint.
struct EmitRecord {
  MultiIndex alpha;             // set for the multi-index family
  std::vector<Rational> point;  // set for the grid family
  ReducedKind kind = ReducedKind::PsdSlack;
  int membership = -1;  // index into problem.memberships
  int slack_var = -1;   // free slack variable id for PsdSlack
};

// Emit the block constraints for an affine symmetric S into the problem.
// Degenerate dimensions (n2 == 2) lower PsdSmall to a scalar row and Soc to a
// pair of scalar rows.
std::vector<EmitRecord> emit_dp(ConicProblem& p, const AffineSym& S, int r,
                                const ConeShape& shape, bool concise);
std::vector<EmitRecord> emit_yildirim(ConicProblem& p, const AffineSym& S, int r,
                                      const ConeShape& shape, bool concise);

}  // namespace copk
