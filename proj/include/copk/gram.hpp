#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "copk/frames.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"
#include "copk/poly.hpp"

namespace copk {

// Polynomial whose coefficients are affine expressions in problem variables.
using AffinePoly = std::map<MultiIndex, LinExpr, MiLess>;

// Generators of the membership cone over n = n1 + n2 coordinates: the n1
// orthant coordinates, the cone-block head, the all-ones functional over
// orthant + head, and the quadratic head^2 - |tail|^2.  Linear ones first.
std::vector<SparsePoly> semialgebraic_generators(const ConeShape& shape);

// Coordinates of x * x (the squared element), one polynomial per coordinate.
// Supports n2 == 0 (plain squares).
std::vector<SparsePoly> squared_coordinates(const ConeShape& shape);

// x' S x as an affine-coefficient polynomial in n variables.
AffinePoly quadratic_form_poly(const AffineSym& S);
AffinePoly affine_poly_mul(const AffinePoly& p, const SparsePoly& q);
AffinePoly affine_from_sparse(const SparsePoly& p);
double affine_poly_eval(const AffinePoly& p, const std::vector<double>& coef_point,
                        const std::vector<double>& x);

// Adds a Gram matrix variable Q and the coefficient-matching equalities
// forcing target (homogeneous of the given even degree) to equal the
// sum-of-squares form with that Gram matrix.  Returns the matrix var index.
int sos_to_psd(ConicProblem& p, const AffinePoly& target, int nvars, int degree,
               const std::string& name);

// (head + orthant sum)^r * (x' S x), degree r+2.
AffinePoly lifted_quadratic_target(const AffineSym& S, int r, const ConeShape& shape);

struct ZvpEmit {
  std::vector<int> gram_mat_vars;  // indices into problem.mat_vars
  std::vector<int> leaf_vars;     // scalar variables constrained nonnegative
  int nonneg_membership = -1;
  int equations_begin = 0, equations_end = 0;
};

// Emits membership of target (homogeneous, given degree) in the recursively
// generated cone: sum-of-squares blocks at even degrees, generator-weighted
// children one and two degrees down, nonnegative scalars at the leaves.
ZvpEmit zvp_membership_constraints(ConicProblem& p, const AffinePoly& target, int degree,
                                   const ConeShape& shape, const std::string& name);

// |x|^{2r} * (x*x)' A (x*x) with the squared-element coordinates substituted.
SparsePoly nn_substituted_poly(const Eigen::MatrixXd& A, int r, const ConeShape& shape);
AffinePoly nn_substituted_affine(const AffineSym& S, int r, const ConeShape& shape);

// Single Gram block for the substituted polynomial; returns the mat var index.
int nn_membership_constraints(ConicProblem& p, const AffineSym& S, int r,
                              const ConeShape& shape, const std::string& name);

}  // namespace copk
