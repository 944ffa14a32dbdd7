#include "copk/bench.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "copk/oracle.hpp"

namespace copk {

Eigen::MatrixXd random_pd_matrix(int n, uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("random_pd_matrix: n must be positive");
  Rng rng(seed);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = rng.gaussian();
  Eigen::MatrixXd C = B.transpose() * B + Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (C + C.transpose());
}

Eigen::MatrixXd horn_matrix() {
  Eigen::MatrixXd H(5, 5);
  // clang-format off
  H <<  1, -1,  1,  1, -1,
       -1,  1, -1,  1,  1,
        1, -1,  1, -1,  1,
        1,  1, -1,  1, -1,
       -1,  1,  1, -1,  1;
  // clang-format on
  return H;
}

namespace {

struct BlockSpec {
  ConeKind kind;
  int dim;
};

Eigen::MatrixXd random_spd(int dim, Rng& rng) {
  Eigen::MatrixXd G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = rng.gaussian();
  Eigen::MatrixXd M = G.transpose() * G / dim + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
  return 0.5 * (M + M.transpose());
}

// Entry targets and weights for an interior point of the given cone; Psd
// entries are the lower triangle row-major, with stationarity weight 2 off
// the diagonal.
void interior_point(ConeKind kind, int dim, Rng& rng, std::vector<double>& vals,
                    std::vector<double>& wt) {
  vals.clear();
  wt.clear();
  switch (kind) {
    case ConeKind::Nonneg: {
      for (int i = 0; i < dim; ++i) {
        vals.push_back(0.5 + rng.uniform());
        wt.push_back(1.0);
      }
      break;
    }
    case ConeKind::Soc: {
      std::vector<double> tail(size_t(dim - 1));
      double norm2 = 0.0;
      for (double& t : tail) {
        t = rng.uniform() - 0.5;
        norm2 += t * t;
      }
      vals.push_back(1.5 + std::sqrt(norm2));
      wt.push_back(1.0);
      for (double t : tail) {
        vals.push_back(t);
        wt.push_back(1.0);
      }
      break;
    }
    case ConeKind::Psd: {
      Eigen::MatrixXd M = random_spd(dim, rng);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          vals.push_back(M(i, j));
          wt.push_back(i == j ? 1.0 : 2.0);
        }
      }
      break;
    }
  }
}

// Random problem with a strictly interior primal point x0 and strictly
// interior dual multipliers (y, Z); the objective is then chosen so the dual
// stationarity condition holds exactly, which pins the optimal value for any
// convergent solver.
ConicProblem build_feasible(int nscalar, int neq, const std::vector<BlockSpec>& blocks,
                            int matdim, uint64_t seed) {
  Rng rng(seed);
  ConicProblem p;
  for (int i = 0; i < nscalar; ++i) p.add_var("v" + std::to_string(i));
  int mv = -1;
  if (matdim > 0) mv = p.add_mat_var("X", matdim);
  const int nv = p.num_vars();

  std::vector<double> x0(size_t(nv), 0.0);
  for (int i = 0; i < nscalar; ++i) x0[size_t(i)] = 2.0 * rng.uniform() - 1.0;
  if (mv >= 0) {
    const MatVar& M = p.mat_vars[size_t(mv)];
    Eigen::MatrixXd X0 = random_spd(matdim, rng) + 0.5 * Eigen::MatrixXd::Identity(matdim, matdim);
    for (int i = 0; i < matdim; ++i)
      for (int j = 0; j <= i; ++j) x0[size_t(M.entry_var(i, j))] = X0(i, j);
  }

  std::vector<double> acc(size_t(nv), 0.0);  // contributions to stationarity

  for (int e = 0; e < neq; ++e) {
    LinExpr ex;
    for (int v = 0; v < nv; ++v)
      if (nv <= 4 || rng.uniform() < 0.6) ex.add(v, 0.7 * rng.gaussian());
    if (ex.terms.empty()) ex.add(0, 1.0);
    double lhs = 0.0;
    for (const auto& [v, c] : ex.terms) lhs += c * x0[size_t(v)];
    ex.c0 = -lhs;
    const double ye = 2.0 * rng.uniform() - 1.0;
    for (const auto& [v, c] : ex.terms) acc[size_t(v)] += ye * c;
    p.equalities.push_back(ex);
  }

  int label = 0;
  for (const BlockSpec& b : blocks) {
    Membership m;
    m.kind = b.kind;
    m.dim = b.dim;
    m.label = "b" + std::to_string(label++);
    std::vector<double> target, wt, dual;
    interior_point(b.kind, b.dim, rng, target, wt);
    interior_point(b.kind, b.dim, rng, dual, wt);
    for (size_t k = 0; k < target.size(); ++k) {
      LinExpr ex;
      for (int v = 0; v < nv; ++v)
        if (rng.uniform() < 0.7) ex.add(v, 0.7 * rng.gaussian());
      double lhs = 0.0;
      for (const auto& [v, c] : ex.terms) lhs += c * x0[size_t(v)];
      ex.c0 = target[k] - lhs;
      for (const auto& [v, c] : ex.terms) acc[size_t(v)] += wt[k] * dual[k] * c;
      m.entries.push_back(ex);
    }
    p.memberships.push_back(m);
  }

  if (mv >= 0) {
    const MatVar& M = p.mat_vars[size_t(mv)];
    Eigen::MatrixXd Zm = random_spd(matdim, rng);
    for (int i = 0; i < matdim; ++i)
      for (int j = 0; j <= i; ++j)
        acc[size_t(M.entry_var(i, j))] += (i == j ? 1.0 : 2.0) * Zm(i, j);
  }

  LinExpr obj = LinExpr::constant(2.0 * rng.uniform() - 1.0);
  for (int v = 0; v < nv; ++v)
    if (acc[size_t(v)] != 0.0) obj.add(v, -acc[size_t(v)]);
  p.objective = obj;
  p.validate();
  return p;
}

}  // namespace

ConicProblem random_feasible_problem(uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  const int nscalar = 1 + int(rng.uniform() * 4.0);
  int neq = int(rng.uniform() * 3.0);
  const int nblocks = 1 + int(rng.uniform() * 3.0);
  std::vector<BlockSpec> blocks;
  for (int b = 0; b < nblocks; ++b) {
    const double u = rng.uniform();
    if (u < 0.4)
      blocks.push_back({ConeKind::Nonneg, 2 + int(rng.uniform() * 3.0)});
    else if (u < 0.7)
      blocks.push_back({ConeKind::Soc, 3 + int(rng.uniform() * 3.0)});
    else
      blocks.push_back({ConeKind::Psd, 2 + int(rng.uniform() * 2.0)});
  }
  const int matdim = rng.uniform() < 0.3 ? 2 + int(rng.uniform() * 2.0) : 0;
  // more equalities than variables would make the rows linearly dependent;
  // external solvers reject rank-deficient systems even when consistent
  const int nv = nscalar + (matdim > 0 ? matdim * (matdim + 1) / 2 : 0);
  neq = std::min(neq, nv - 1);
  return build_feasible(nscalar, neq, blocks, matdim, seed * 2 + 1);
}

int feasible_corpus_size() { return 6; }

ConicProblem feasible_corpus_problem(int index) {
  switch (index) {
    case 0:
      return build_feasible(3, 0, {{ConeKind::Nonneg, 4}}, 0, 901);
    case 1:
      return build_feasible(2, 0, {{ConeKind::Soc, 3}, {ConeKind::Nonneg, 2}}, 0, 902);
    case 2:
      return build_feasible(3, 0, {{ConeKind::Psd, 3}, {ConeKind::Nonneg, 3}}, 0, 903);
    case 3:
      return build_feasible(3, 1, {{ConeKind::Psd, 3}, {ConeKind::Soc, 3}, {ConeKind::Nonneg, 2}},
                            0, 904);
    case 4:
      return build_feasible(2, 1, {{ConeKind::Nonneg, 3}}, 3, 905);
    case 5:
      return build_feasible(4, 2, {{ConeKind::Soc, 4}, {ConeKind::Soc, 3}, {ConeKind::Psd, 2}}, 0,
                            906);
  }
  throw std::out_of_range("feasible_corpus_problem: index out of range");
}

}  // namespace copk
