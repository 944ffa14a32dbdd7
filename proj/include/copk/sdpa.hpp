#pragma once

#include <string>

#include "copk/model.hpp"

namespace copk {

// How solver outputs for an exported .dat-s file map back to the problem's
// objective: objective = (use_dual_value ? dual : -primal) + offset.
struct SdpaMapping {
  bool use_dual_value = false;
  double offset = 0.0;

  double objective_from(double file_primal, double file_dual) const {
    return (use_dual_value ? file_dual : -file_primal) + offset;
  }
};

// Serializes the problem in SDPA sparse format (.dat-s).  Problems without
// matrix variables or equalities map directly onto the file's
// linear-matrix-inequality side (file variables = scalar variables); anything
// else is written against the file's dual side with split scalars and slack
// blocks.  Output is deterministic; second-order memberships are lowered to
// arrow matrices.
SdpaMapping export_sdpa(const ConicProblem& p, const std::string& path);
std::string export_sdpa_string(const ConicProblem& p, SdpaMapping* mapping = nullptr);

// Reads any .dat-s file into the IR, interpreting it on the
// linear-matrix-inequality side: one free scalar per file variable, one
// membership per block, objective = maximize the negated cost vector.
// Malformed input raises std::runtime_error with a line reference.
ConicProblem import_sdpa(const std::string& path);
ConicProblem import_sdpa_string(const std::string& text);

}  // namespace copk
