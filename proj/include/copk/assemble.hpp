#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "copk/frames.hpp"
#include "copk/gram.hpp"
#include "copk/jordan.hpp"
#include "copk/model.hpp"
#include "copk/moments.hpp"
#include "copk/solver.hpp"

namespace copk {

// The five approximation families, by the construction they use.
enum class Hierarchy {
  Dp,        // multi-index block lifts of the shifted power
  Yildirim,  // simplex-grid block constraints
  Zvp,       // recursive generator products with Gram blocks
  Nn,        // squared-coordinate substitution with one Gram block
  Lasserre,  // localized moment matrix of the reference measure
};

const char* to_string(Hierarchy h);
bool parse_hierarchy(const std::string& s, Hierarchy& out);

// Inner families certify membership (feasible values of the bound problem are
// lower bounds); outer families certify exclusion (upper bounds).
bool hierarchy_is_inner(Hierarchy h);

// Whether the family is implemented for this shape.  Nn also covers pure
// orthants (n2 == 0); the others need a cone block.
bool hierarchy_supports(Hierarchy h, const ConeShape& shape);

struct AssembleOptions {
  bool concise = true;              // case-split block reductions where valid
  bool normalized_moments = false;  // scale the moment table by its zero moment
  double moment_rel_threshold = 1e-300;
  double moment_abs_threshold = 1e-10;
};

struct AssembledProblem {
  ConicProblem problem;
  Hierarchy hierarchy = Hierarchy::Dp;
  int level = 0;
  ConeShape shape;
  int objective_var = -1;           // id of the bound variable, -1 for membership
  std::vector<EmitRecord> records;  // block bookkeeping for the block families
  bool moment_underflow = false;    // moment table raised an underflow flag
};

// max y such that C - y * (e e') stays in the family's approximation at the
// given level, where e is the unit element.  C is symmetrized.
AssembledProblem assemble_bound_problem(const Eigen::MatrixXd& C, Hierarchy h, int level,
                                        const ConeShape& shape,
                                        const AssembleOptions& opts = {});

// Feasibility problem: is A inside the family's approximation at the level?
AssembledProblem assemble_membership_problem(const Eigen::MatrixXd& A, Hierarchy h, int level,
                                             const ConeShape& shape,
                                             const AssembleOptions& opts = {});

struct MembershipResult {
  SolveStatus status = SolveStatus::Stalled;
  bool feasible = false;
  Solution solution;  // populated when the solver actually ran
};

// Decides an assembled feasibility problem.  Problems with no variables have
// constant constraints and are checked directly.
MembershipResult test_membership(const AssembledProblem& ap, const SolverConfig& cfg = {});

// Structured positive definite matrix with unit total entry sum; a strictly
// interior dual-side point for the bound problem.
Eigen::MatrixXd slater_point(const ConeShape& shape);

}  // namespace copk
