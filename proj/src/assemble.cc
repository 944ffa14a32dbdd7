#include "copk/assemble.hpp"

#include <cmath>
#include <stdexcept>

namespace copk {

const char* to_string(Hierarchy h) {
  switch (h) {
    case Hierarchy::Dp:
      return "dp";
    case Hierarchy::Yildirim:
      return "yildirim";
    case Hierarchy::Zvp:
      return "zvp";
    case Hierarchy::Nn:
      return "nn";
    case Hierarchy::Lasserre:
      return "lasserre";
  }
  return "?";
}

bool parse_hierarchy(const std::string& s, Hierarchy& out) {
  for (Hierarchy h : {Hierarchy::Dp, Hierarchy::Yildirim, Hierarchy::Zvp, Hierarchy::Nn,
                      Hierarchy::Lasserre}) {
    if (s == to_string(h)) {
      out = h;
      return true;
    }
  }
  return false;
}

bool hierarchy_is_inner(Hierarchy h) {
  return h == Hierarchy::Dp || h == Hierarchy::Zvp || h == Hierarchy::Nn;
}

bool hierarchy_supports(Hierarchy h, const ConeShape& shape) {
  return h == Hierarchy::Nn || shape.n2 >= 2;
}

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A, int n, const char* who) {
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument(std::string(who) + ": matrix size does not match the shape");
  return 0.5 * (A + A.transpose());
}

// S = C - y * (e e'); without a bound variable this is just the constant C.
AffineSym shifted_matrix(const Eigen::MatrixXd& C, int yvar, const ConeShape& shape) {
  const int n = shape.n();
  const Eigen::VectorXd e = identity_element(shape).full();
  AffineSym S(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      LinExpr ex = LinExpr::constant(C(i, j));
      if (yvar >= 0) {
        double w = e(i) * e(j);
        if (w != 0.0) ex.add(yvar, -w);
      }
      S.at(i, j) = ex;
    }
  }
  return S;
}

void emit_family(AssembledProblem& ap, const AffineSym& S, const AssembleOptions& opts) {
  ConicProblem& p = ap.problem;
  const ConeShape& shape = ap.shape;
  const int r = ap.level;
  switch (ap.hierarchy) {
    case Hierarchy::Dp:
      ap.records = emit_dp(p, S, r, shape, opts.concise);
      break;
    case Hierarchy::Yildirim:
      ap.records = emit_yildirim(p, S, r, shape, opts.concise);
      break;
    case Hierarchy::Zvp: {
      AffinePoly target = lifted_quadratic_target(S, r, shape);
      zvp_membership_constraints(p, target, r + 2, shape, "zvp");
      break;
    }
    case Hierarchy::Nn:
      nn_membership_constraints(p, S, r, shape, "nn");
      break;
    case Hierarchy::Lasserre: {
      MomentOptions mo;
      mo.normalized = opts.normalized_moments;
      mo.rel_threshold = opts.moment_rel_threshold;
      mo.abs_threshold = opts.moment_abs_threshold;
      MomentTable table = MomentTable::build(shape, 2 * r + 2, mo);
      ap.moment_underflow = table.any_underflow();
      emit_lasserre(p, S, r, shape, table, "moment");
      break;
    }
  }
}

AssembledProblem assemble_common(const Eigen::MatrixXd& A, Hierarchy h, int level,
                                 const ConeShape& shape, const AssembleOptions& opts,
                                 bool with_bound_var) {
  shape.validate();
  if (level < 0) throw std::invalid_argument("assemble: level must be >= 0");
  if (!hierarchy_supports(h, shape))
    throw std::invalid_argument(std::string("assemble: ") + to_string(h) +
                                " needs a cone block (n2 >= 2)");
  AssembledProblem ap;
  ap.hierarchy = h;
  ap.level = level;
  ap.shape = shape;
  Eigen::MatrixXd C = symmetrized(A, shape.n(), "assemble");
  if (with_bound_var) {
    ap.objective_var = ap.problem.add_var("y");
    ap.problem.objective = LinExpr::variable(ap.objective_var);
  }
  AffineSym S = shifted_matrix(C, ap.objective_var, shape);
  emit_family(ap, S, opts);
  ap.problem.validate();
  return ap;
}

}  // namespace

AssembledProblem assemble_bound_problem(const Eigen::MatrixXd& C, Hierarchy h, int level,
                                        const ConeShape& shape, const AssembleOptions& opts) {
  return assemble_common(C, h, level, shape, opts, true);
}

AssembledProblem assemble_membership_problem(const Eigen::MatrixXd& A, Hierarchy h, int level,
                                             const ConeShape& shape,
                                             const AssembleOptions& opts) {
  return assemble_common(A, h, level, shape, opts, false);
}

MembershipResult test_membership(const AssembledProblem& ap, const SolverConfig& cfg) {
  MembershipResult out;
  const ConicProblem& p = ap.problem;
  if (p.num_vars() > 0) {
    out.solution = solve(p, cfg);
    out.status = out.solution.status;
    out.feasible = out.status == SolveStatus::Optimal;
    if (out.status == SolveStatus::Stalled) {
      // Memberships sitting on the cone boundary admit no strictly feasible
      // point, so the interior-point run can stall while its iterate already
      // verifies.  Judge the returned point directly in that case.
      const KktReport rep = check_kkt(p, out.solution);
      double scale = 1.0;
      for (const LinExpr& e : p.equalities) scale = std::max(scale, std::abs(e.c0));
      for (const Membership& m : p.memberships)
        for (const LinExpr& e : m.entries) scale = std::max(scale, std::abs(e.c0));
      if (std::max(rep.eq_residual, rep.cone_violation) <= 1e-6 * scale) out.feasible = true;
    }
    return out;
  }

  // No variables: every entry is constant, so decide by direct evaluation.
  out.status = SolveStatus::Optimal;
  out.feasible = true;
  const std::vector<double> none;
  for (const Membership& m : p.memberships) {
    std::vector<double> vals(m.entries.size());
    double scale = 1.0;
    for (size_t i = 0; i < m.entries.size(); ++i) {
      vals[i] = m.entries[i].eval(none);
      scale = std::max(scale, std::abs(vals[i]));
    }
    const double tol = 1e-9 * scale;
    bool ok = true;
    switch (m.kind) {
      case ConeKind::Nonneg: {
        for (double v : vals) ok = ok && v >= -tol;
        break;
      }
      case ConeKind::Soc: {
        double tail = 0.0;
        for (size_t i = 1; i < vals.size(); ++i) tail += vals[i] * vals[i];
        ok = vals[0] >= std::sqrt(tail) - tol;
        break;
      }
      case ConeKind::Psd: {
        Eigen::MatrixXd M(m.dim, m.dim);
        size_t k = 0;
        for (int i = 0; i < m.dim; ++i)
          for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = vals[k++];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        ok = es.eigenvalues()(0) >= -tol;
        break;
      }
    }
    if (!ok) out.feasible = false;
  }
  return out;
}

Eigen::MatrixXd slater_point(const ConeShape& shape) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("slater_point: needs a cone block");
  const int n1 = shape.n1, n2 = shape.n2, n = shape.n();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  X.topLeftCorner(n1, n1) = Eigen::MatrixXd::Ones(n1, n1) + Eigen::MatrixXd::Identity(n1, n1);
  X.block(0, n1, n1, 1).setOnes();
  X.block(n1, 0, 1, n1).setOnes();
  X(n1, n1) = 2.0 * n2 + 1.0;
  X.bottomRightCorner(n2 - 1, n2 - 1) = 2.0 * Eigen::MatrixXd::Identity(n2 - 1, n2 - 1);
  X /= double(n1 * n1 + 3 * n1 + 4 * n2 - 1);
  return X;
}

}  // namespace copk
