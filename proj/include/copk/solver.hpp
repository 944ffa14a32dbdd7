#pragma once

#include "copk/model.hpp"

namespace copk {

struct SolverConfig {
  int max_iterations = 200;
  double eps_feas = 1e-8;   // primal/dual feasibility target
  double eps_gap = 1e-8;    // relative gap target
  bool verbose = false;
};

// Primal-dual interior-point solve of the problem in its homogeneous
// self-dual embedding.  Handles free scalars, equalities, and memberships in
// nonnegative / second-order / semidefinite cones, plus implicit psd
// constraints on matrix variables.  Deterministic for identical inputs.
Solution solve(const ConicProblem& p, const SolverConfig& cfg = {});

// Post-hoc optimality audit computed directly on the problem structure
// (no shared code with the solver's internal formulation).
struct KktReport {
  double eq_residual = 0.0;          // max |equality value|
  double cone_violation = 0.0;       // max distance of memberships to their cones
  double stationarity = 0.0;         // inf-norm of the dual stationarity residual
  double dual_cone_violation = 0.0;  // max distance of cone duals to the dual cones
  double duality_gap = 0.0;          // |dual bound - primal value| (relative)

  double max_violation() const;
};

KktReport check_kkt(const ConicProblem& p, const Solution& sol);

}  // namespace copk
