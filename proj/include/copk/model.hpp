#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace copk {

// Affine expression c0 + sum coef_i * var_i over scalar variable ids.
// Terms are kept sorted by variable id with no duplicates or zero coefficients.
struct LinExpr {
  double c0 = 0.0;
  std::vector<std::pair<int, double>> terms;

  void add(int var, double coef);
  void add_const(double v) { c0 += v; }
  double coef(int var) const;
  double eval(const std::vector<double>& x) const;
  bool is_constant() const { return terms.empty(); }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr scaled(double s) const;

  static LinExpr constant(double v);
  static LinExpr variable(int var, double coef = 1.0);
};

enum class ConeKind { Nonneg, Soc, Psd };

// One conic membership: an affine vector (or symmetric matrix) constrained to
// a cone.  For Psd of dimension k the entries are the k(k+1)/2 lower-triangle
// matrix entries in row-major order, unscaled.
struct Membership {
  ConeKind kind = ConeKind::Nonneg;
  int dim = 0;
  std::vector<LinExpr> entries;
  std::string label;

  int entry_count() const;
};

// Symmetric matrix variable: its lower-triangle entries (row-major) occupy
// scalar variable ids first_var .. first_var + dim(dim+1)/2 - 1, and the
// matrix is implicitly constrained positive semidefinite.
struct MatVar {
  std::string name;
  int dim = 0;
  int first_var = 0;

  int entry_count() const { return dim * (dim + 1) / 2; }
  int entry_var(int i, int j) const;  // var id of entry (i, j), any order
};

struct ConicProblem {
  std::vector<std::string> var_names;
  std::vector<MatVar> mat_vars;
  LinExpr objective;  // maximized
  std::vector<LinExpr> equalities;  // each expression == 0
  std::vector<Membership> memberships;

  int add_var(const std::string& name);
  int add_mat_var(const std::string& name, int dim);  // index into mat_vars
  int num_vars() const { return (int)var_names.size(); }
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Stalled };

const char* to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Stalled;
  double objective = 0.0;       // primal objective (maximized) when meaningful
  double dual_objective = 0.0;  // bound from the dual side
  std::vector<double> x;        // scalar variable values
  std::vector<double> eq_duals; // one per equality
  // One dual vector per explicit membership in problem order, then one per
  // matrix variable.  Psd duals are lower-triangle matrix entries, unscaled.
  std::vector<std::vector<double>> cone_duals;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rel_gap = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
  std::string message;
};

// JSON round-trip for problems (schema documented in the serializer).
std::string problem_to_json(const ConicProblem& p);
ConicProblem problem_from_json(const std::string& text);
void write_problem(const ConicProblem& p, const std::string& path);
ConicProblem read_problem(const std::string& path);

std::string solution_to_json(const Solution& s);

}  // namespace copk
