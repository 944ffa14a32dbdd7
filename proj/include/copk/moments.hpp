#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "copk/combinat.hpp"
#include "copk/frames.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"

namespace copk {

// Monomial moments of the uniform measure on the solid truncated body
// {x in K : e.x <= 1}.  Multi-indices run over the n coordinates (orthant
// first, then cone head, then cone tail).  Moments with any odd tail exponent
// vanish by symmetry.

bool moment_is_zero(const MultiIndex& alpha, const ConeShape& shape);
double log_moment(const MultiIndex& alpha, const ConeShape& shape);  // -inf when zero
double moment(const MultiIndex& alpha, const ConeShape& shape);

// Exact value of moment(alpha) / moment(0); transcendental factors cancel.
Rational moment_ratio_exact(const MultiIndex& alpha, const ConeShape& shape);

struct MomentOptions {
  bool normalized = false;       // store moment / moment(0)
  double rel_threshold = 1e-300; // flag when y_alpha < rel_threshold * y_0
  double abs_threshold = 1e-10;  // flag when the stored value is below this
};

struct MomentTable {
  ConeShape shape;
  int max_degree = 0;
  bool normalized = false;
  std::map<MultiIndex, double, MiLess> value;  // values as fed downstream
  std::vector<MultiIndex> underflow;           // flagged nonzero moments

  bool any_underflow() const { return !underflow.empty(); }
  double at(const MultiIndex& alpha) const;

  static MomentTable build(const ConeShape& shape, int max_degree,
                           const MomentOptions& opts = {});
};

// Localized moment matrix of A over the monomial basis of degree <= r:
// entry (a, b) = sum_ij A_ij y_{beta_a + beta_b + e_i + e_j}.
Eigen::MatrixXd lasserre_matrix(const Eigen::MatrixXd& A, int r, const ConeShape& shape,
                                const MomentTable& table);

// Same matrix for an affine S, emitted as one psd membership; returns its
// index in problem.memberships.
int emit_lasserre(ConicProblem& p, const AffineSym& S, int r, const ConeShape& shape,
                  const MomentTable& table, const std::string& label);

}  // namespace copk
