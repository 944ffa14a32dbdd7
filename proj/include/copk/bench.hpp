#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "copk/model.hpp"

namespace copk {

// Seeded positive definite objective C = B' B + I with standard normal B,
// symmetrized exactly.  Deterministic for a given seed.
Eigen::MatrixXd random_pd_matrix(int n, uint64_t seed);

// The classic 5x5 extreme copositive matrix over the pure orthant: entrywise
// nonnegative decompositions do not exist, yet x' H x >= 0 on the orthant.
Eigen::MatrixXd horn_matrix();

// Corpus of small conic problems with strictly feasible primal and dual sides
// by construction (the objective is reverse-engineered from interior dual
// multipliers), so any convergent solver reports the same optimal value.
int feasible_corpus_size();
ConicProblem feasible_corpus_problem(int index);

// Same construction with seed-driven dimensions, equality count, and block
// mix (nonnegative / second-order / semidefinite, sometimes a matrix
// variable).  Deterministic for a given seed.
ConicProblem random_feasible_problem(uint64_t seed);

}  // namespace copk
