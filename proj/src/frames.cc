#include "copk/frames.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace copk {

LinExpr& AffineSym::at(int i, int j) {
  if (i < j) std::swap(i, j);
  return tri[size_t(i) * (i + 1) / 2 + j];
}

const LinExpr& AffineSym::at(int i, int j) const {
  if (i < j) std::swap(i, j);
  return tri[size_t(i) * (i + 1) / 2 + j];
}

AffineSym AffineSym::constant(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("AffineSym: matrix not square");
  AffineSym s((int)A.rows());
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j <= i; ++j) s.at(i, j) = LinExpr::constant(A(i, j));
  return s;
}

namespace {

// accumulate acc += v * w for the two entry types
inline void axpy(double& acc, double v, double w) { acc += v * w; }
inline void axpy(LinExpr& acc, const LinExpr& v, double w) { acc += v.scaled(w); }

template <class T, class At>
SmallBlock<T> build_M_impl(const At& at, const MultiIndex& alpha, const ConeShape& shape) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("block build requires a cone part (n2 >= 2)");
  if ((int)alpha.size() != shape.rk())
    throw std::invalid_argument("block build: multi-index length must be rk");
  const int n1 = shape.n1, n2 = shape.n2;
  const double a21 = alpha[n1], a22 = alpha[n1 + 1];
  const double sp = a21 + a22, sm = a21 - a22;

  SmallBlock<T> b;
  b.m21.assign(n2 - 1, T{});
  b.m22.assign(n2 - 1, std::vector<T>(n2 - 1, T{}));

  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double w = (i == j) ? 4.0 * alpha[i] * (alpha[i] - 1.0) : 4.0 * alpha[i] * alpha[j];
      if (w != 0.0) axpy(b.m11, at(i, j), w);
    }
    if (sp != 0.0 && alpha[i] != 0) axpy(b.m11, at(n1, i), 4.0 * sp * alpha[i]);
  }
  if (sp * (sp - 1.0) != 0.0) axpy(b.m11, at(n1, n1), sp * (sp - 1.0));

  for (int k = 0; k < n2 - 1; ++k) {
    if (sm != 0.0)
      for (int i = 0; i < n1; ++i)
        if (alpha[i] != 0) axpy(b.m21[k], at(n1 + 1 + k, i), 2.0 * sm * alpha[i]);
    const double w = sm * (sp - 1.0);
    if (w != 0.0) axpy(b.m21[k], at(n1 + 1 + k, n1), w);
  }

  const double w22 = sm * sm - sp;
  if (w22 != 0.0)
    for (int k = 0; k < n2 - 1; ++k)
      for (int l = 0; l < n2 - 1; ++l) axpy(b.m22[k][l], at(n1 + 1 + k, n1 + 1 + l), w22);
  return b;
}

template <class T, class At>
SmallBlock<T> build_N_impl(const At& at, const std::vector<double>& x, const ConeShape& shape) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("block build requires a cone part (n2 >= 2)");
  if ((int)x.size() != shape.rk())
    throw std::invalid_argument("block build: point length must be rk");
  const int n1 = shape.n1, n2 = shape.n2;
  const double x21 = x[n1], x22 = x[n1 + 1];
  const double sp = x21 + x22, sm = x21 - x22;

  SmallBlock<T> b;
  b.m21.assign(n2 - 1, T{});
  b.m22.assign(n2 - 1, std::vector<T>(n2 - 1, T{}));

  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double w = 4.0 * x[i] * x[j];
      if (w != 0.0) axpy(b.m11, at(i, j), w);
    }
    if (sp != 0.0 && x[i] != 0.0) axpy(b.m11, at(n1, i), 4.0 * sp * x[i]);
  }
  if (sp != 0.0) axpy(b.m11, at(n1, n1), sp * sp);

  for (int k = 0; k < n2 - 1; ++k) {
    if (sm != 0.0)
      for (int i = 0; i < n1; ++i)
        if (x[i] != 0.0) axpy(b.m21[k], at(n1 + 1 + k, i), 2.0 * sm * x[i]);
    if (sm * sp != 0.0) axpy(b.m21[k], at(n1 + 1 + k, n1), sm * sp);
  }

  if (sm != 0.0)
    for (int k = 0; k < n2 - 1; ++k)
      for (int l = 0; l < n2 - 1; ++l) axpy(b.m22[k][l], at(n1 + 1 + k, n1 + 1 + l), sm * sm);
  return b;
}

}  // namespace

BlockM build_M(const Eigen::MatrixXd& A, const MultiIndex& alpha, const ConeShape& shape) {
  if (A.rows() != shape.n() || A.cols() != shape.n())
    throw std::invalid_argument("build_M: matrix size mismatch");
  auto at = [&](int i, int j) { return A(i, j); };
  return build_M_impl<double>(at, alpha, shape);
}

SmallBlock<LinExpr> build_M_affine(const AffineSym& S, const MultiIndex& alpha,
                                   const ConeShape& shape) {
  if (S.n != shape.n()) throw std::invalid_argument("build_M_affine: matrix size mismatch");
  auto at = [&](int i, int j) -> const LinExpr& { return S.at(i, j); };
  return build_M_impl<LinExpr>(at, alpha, shape);
}

BlockM build_N(const Eigen::MatrixXd& A, const std::vector<double>& x, const ConeShape& shape) {
  if (A.rows() != shape.n() || A.cols() != shape.n())
    throw std::invalid_argument("build_N: matrix size mismatch");
  auto at = [&](int i, int j) { return A(i, j); };
  return build_N_impl<double>(at, x, shape);
}

SmallBlock<LinExpr> build_N_affine(const AffineSym& S, const std::vector<double>& x,
                                   const ConeShape& shape) {
  if (S.n != shape.n()) throw std::invalid_argument("build_N_affine: matrix size mismatch");
  auto at = [&](int i, int j) -> const LinExpr& { return S.at(i, j); };
  return build_N_impl<LinExpr>(at, x, shape);
}

const char* to_string(ReducedKind k) {
  switch (k) {
    case ReducedKind::PsdSlack: return "psd+slack";
    case ReducedKind::PsdSmall: return "psd-small";
    case ReducedKind::Soc: return "soc";
    case ReducedKind::Nonneg: return "nonneg";
  }
  return "?";
}

std::vector<DpPlanItem> dp_constraint_plan(int r, const ConeShape& shape, bool concise) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("dp_constraint_plan: needs n2 >= 2");
  if (r < 0) throw std::invalid_argument("dp_constraint_plan: r >= 0");
  std::vector<DpPlanItem> plan;
  for (const auto& alpha : enumerate_eq(shape.rk(), r + 2)) {
    const int a21 = alpha[shape.n1], a22 = alpha[shape.n1 + 1];
    if (!concise) {
      plan.push_back({alpha, ReducedKind::PsdSlack});
      continue;
    }
    if (a21 > a22) continue;  // mirror of a kept index
    const int d = a22 - a21, sp = a21 + a22;
    ReducedKind kind;
    if (d * d == sp)
      kind = (sp == 0) ? ReducedKind::Nonneg : ReducedKind::Soc;
    else if (a21 == a22)
      kind = ReducedKind::PsdSmall;
    else
      kind = ReducedKind::PsdSlack;
    plan.push_back({alpha, kind});
  }
  return plan;
}

std::vector<std::vector<Rational>> yildirim_points(int r, int rk) {
  if (r < 0 || rk < 2) throw std::invalid_argument("yildirim_points: need r >= 0, rk >= 2");
  std::vector<std::vector<Rational>> pts;
  std::set<std::vector<Rational>> seen;
  for (int k = 0; k <= r; ++k) {
    const int denom = k + 2;
    for (const auto& alpha : enumerate_eq(rk, denom)) {
      std::vector<Rational> x(rk);
      for (int i = 0; i < rk; ++i) x[i] = Rational(alpha[i], denom);
      if (seen.insert(x).second) pts.push_back(std::move(x));
    }
  }
  return pts;
}

long long yildirim_point_bound(int r, int rk) {
  long long pw = 1;
  for (int i = 0; i <= r; ++i) pw *= rk;  // rk^{r+1}
  return (long long)rk * rk * (pw - 1) / (rk - 1);
}

std::vector<GridPlanItem> yildirim_constraint_plan(int r, const ConeShape& shape, bool concise) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("yildirim_constraint_plan: needs n2 >= 2");
  std::vector<GridPlanItem> plan;
  for (auto& x : yildirim_points(r, shape.rk())) {
    const Rational& x21 = x[shape.n1];
    const Rational& x22 = x[shape.n1 + 1];
    if (!concise) {
      plan.push_back({std::move(x), ReducedKind::PsdSlack});
      continue;
    }
    if (x21 > x22) continue;  // mirror of a kept point
    const ReducedKind kind = (x21 == x22) ? ReducedKind::Nonneg : ReducedKind::PsdSlack;
    plan.push_back({std::move(x), kind});
  }
  return plan;
}

double dp_quadratic_value(const Eigen::MatrixXd& A, const ConeShape& shape,
                          const std::vector<double>& x, const Eigen::VectorXd& v) {
  shape.validate();
  if ((int)x.size() != shape.rk() || v.size() != shape.n2 - 1)
    throw std::invalid_argument("dp_quadratic_value: size mismatch");
  Eigen::VectorXd u(shape.n());
  for (int i = 0; i < shape.n1; ++i) u(i) = 2.0 * x[i];
  u(shape.n1) = x[shape.n1] + x[shape.n1 + 1];
  u.tail(shape.n2 - 1) = (x[shape.n1] - x[shape.n1 + 1]) * v;
  return u.dot(A * u);
}

AlgebraElement frame_combination(const ConeShape& shape, const std::vector<double>& x,
                                 const Eigen::VectorXd& v) {
  shape.validate();
  if ((int)x.size() != shape.rk() || v.size() != shape.n2 - 1)
    throw std::invalid_argument("frame_combination: size mismatch");
  AlgebraElement u = AlgebraElement::zero(shape);
  for (int i = 0; i < shape.n1; ++i) u.orthant(i) = x[i];
  u.soc(0) = (x[shape.n1] + x[shape.n1 + 1]) / 2.0;
  u.soc.tail(shape.n2 - 1) = ((x[shape.n1] - x[shape.n1 + 1]) / 2.0) * v;
  return u;
}

namespace {

std::string rat_str(const Rational& q) {
  std::ostringstream ss;
  ss << q;
  return ss.str();
}

// One block constraint "exists t: [[m11 - t, m21'], [m21, m22 + t I]] psd",
// reduced according to kind; returns (membership index, slack var or -1).
std::pair<int, int> emit_block(ConicProblem& p, SmallBlock<LinExpr>&& b, ReducedKind kind,
                               const ConeShape& shape, const std::string& label) {
  const int n2 = shape.n2;
  Membership m;
  m.label = label;
  int slack = -1;
  switch (kind) {
    case ReducedKind::Nonneg:
      m.kind = ConeKind::Nonneg;
      m.dim = 1;
      m.entries.push_back(std::move(b.m11));
      break;
    case ReducedKind::Soc:
      if (n2 == 2) {
        m.kind = ConeKind::Nonneg;
        m.dim = 2;
        LinExpr lo = b.m11, hi = b.m11;
        lo += b.m21[0].scaled(-2.0);
        hi += b.m21[0].scaled(2.0);
        m.entries.push_back(std::move(lo));
        m.entries.push_back(std::move(hi));
      } else {
        m.kind = ConeKind::Soc;
        m.dim = n2;
        m.entries.push_back(std::move(b.m11));
        for (int k = 0; k < n2 - 1; ++k) m.entries.push_back(b.m21[k].scaled(2.0));
      }
      break;
    case ReducedKind::PsdSmall:
      if (n2 == 2) {
        m.kind = ConeKind::Nonneg;
        m.dim = 1;
        LinExpr e = b.m11;
        e += b.m22[0][0];
        m.entries.push_back(std::move(e));
      } else {
        m.kind = ConeKind::Psd;
        m.dim = n2 - 1;
        for (int i = 0; i < n2 - 1; ++i)
          for (int j = 0; j <= i; ++j) {
            LinExpr e = b.m22[i][j];
            if (i == j) e += b.m11;
            m.entries.push_back(std::move(e));
          }
      }
      break;
    case ReducedKind::PsdSlack: {
      slack = p.add_var(label + ".t");
      m.kind = ConeKind::Psd;
      m.dim = n2;
      LinExpr top = std::move(b.m11);
      top.add(slack, -1.0);
      m.entries.push_back(std::move(top));
      for (int i = 1; i < n2; ++i) {
        m.entries.push_back(std::move(b.m21[i - 1]));
        for (int j = 1; j <= i; ++j) {
          LinExpr e = std::move(b.m22[i - 1][j - 1]);
          if (i == j) e.add(slack, 1.0);
          m.entries.push_back(std::move(e));
        }
      }
      break;
    }
  }
  p.memberships.push_back(std::move(m));
  return {(int)p.memberships.size() - 1, slack};
}

}  // namespace

std::vector<EmitRecord> emit_dp(ConicProblem& p, const AffineSym& S, int r,
                                const ConeShape& shape, bool concise) {
  std::vector<EmitRecord> out;
  for (const auto& item : dp_constraint_plan(r, shape, concise)) {
    std::string label = "lift[";
    for (size_t i = 0; i < item.alpha.size(); ++i)
      label += (i ? "," : "") + std::to_string(item.alpha[i]);
    label += "]";
    auto [mi, slack] =
        emit_block(p, build_M_affine(S, item.alpha, shape), item.kind, shape, label);
    EmitRecord rec;
    rec.alpha = item.alpha;
    rec.kind = item.kind;
    rec.membership = mi;
    rec.slack_var = slack;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EmitRecord> emit_yildirim(ConicProblem& p, const AffineSym& S, int r,
                                      const ConeShape& shape, bool concise) {
  std::vector<EmitRecord> out;
  for (const auto& item : yildirim_constraint_plan(r, shape, concise)) {
    std::vector<double> xd(item.x.size());
    for (size_t i = 0; i < item.x.size(); ++i) xd[i] = item.x[i].convert_to<double>();
    std::string label = "grid[";
    for (size_t i = 0; i < item.x.size(); ++i) label += (i ? "," : "") + rat_str(item.x[i]);
    label += "]";
    auto [mi, slack] = emit_block(p, build_N_affine(S, xd, shape), item.kind, shape, label);
    EmitRecord rec;
    rec.point = item.x;
    rec.kind = item.kind;
    rec.membership = mi;
    rec.slack_var = slack;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace copk
