#include "copk/moments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace copk {

namespace {

void check_alpha(const MultiIndex& alpha, const ConeShape& shape) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("moments: need a cone part (n2 >= 2)");
  if ((int)alpha.size() != shape.n())
    throw std::invalid_argument("moments: multi-index length must be n");
  for (int a : alpha)
    if (a < 0) throw std::invalid_argument("moments: negative exponent");
}

}  // namespace

bool moment_is_zero(const MultiIndex& alpha, const ConeShape& shape) {
  check_alpha(alpha, shape);
  for (int i = shape.n1 + 1; i < shape.n(); ++i)
    if (alpha[i] % 2 != 0) return true;
  return false;
}

double log_moment(const MultiIndex& alpha, const ConeShape& shape) {
  if (moment_is_zero(alpha, shape)) return -std::numeric_limits<double>::infinity();
  const int n1 = shape.n1, n2 = shape.n2, n = shape.n();
  const int deg = mi_degree(alpha);
  int a_head_tail = 0;  // sum of all cone-block exponents
  for (int i = n1; i < n; ++i) a_head_tail += alpha[i];
  const int a_tail = a_head_tail - alpha[n1];

  double lg = std::log(2.0);
  for (int i = 0; i < n1; ++i) lg += std::lgamma(alpha[i] + 1.0);
  lg += std::lgamma(a_head_tail + n2);  // (sum + n2 - 1)!
  for (int i = n1 + 1; i < n; ++i) lg += std::lgamma((alpha[i] + 1.0) / 2.0);
  lg -= std::log(double(a_tail + n2 - 1));
  lg -= std::lgamma(n + deg + 1.0);
  lg -= std::lgamma((a_tail + n2 - 1.0) / 2.0);
  return lg;
}

double moment(const MultiIndex& alpha, const ConeShape& shape) {
  if (moment_is_zero(alpha, shape)) return 0.0;
  return std::exp(log_moment(alpha, shape));
}

Rational moment_ratio_exact(const MultiIndex& alpha, const ConeShape& shape) {
  if (moment_is_zero(alpha, shape)) return Rational(0);
  using Int = boost::multiprecision::cpp_int;
  const int n1 = shape.n1, n2 = shape.n2, n = shape.n();
  const int deg = mi_degree(alpha);
  int a_head_tail = 0;
  for (int i = n1; i < n; ++i) a_head_tail += alpha[i];
  const int a_tail = a_head_tail - alpha[n1];

  Rational r(1);
  for (int i = 0; i < n1; ++i)
    for (int t = 2; t <= alpha[i]; ++t) r *= t;
  // (a_head_tail + n2 - 1)! / (n2 - 1)!
  for (int t = n2; t <= a_head_tail + n2 - 1; ++t) r *= t;
  // prod over tail i of Gamma(k_i + 1/2) / Gamma(1/2) = prod_{t=1..k} (2t-1)/2
  for (int i = n1 + 1; i < n; ++i) {
    const int k = alpha[i] / 2;
    for (int t = 1; t <= k; ++t) r *= Rational(2 * t - 1, 2);
  }
  r *= Rational(n2 - 1, a_tail + n2 - 1);
  // n! / (n + deg)!
  {
    Int den = 1;
    for (int t = n + 1; t <= n + deg; ++t) den *= t;
    r /= Rational(den);
  }
  // Gamma((n2-1)/2) / Gamma((a_tail + n2 - 1)/2) = prod_{t=0..a_tail/2-1} 2/(n2-1+2t)
  for (int t = 0; t < a_tail / 2; ++t) r *= Rational(2, n2 - 1 + 2 * t);
  return r;
}

double MomentTable::at(const MultiIndex& alpha) const {
  auto it = value.find(alpha);
  if (it == value.end()) throw std::out_of_range("MomentTable: index beyond table degree");
  return it->second;
}

MomentTable MomentTable::build(const ConeShape& shape, int max_degree,
                               const MomentOptions& opts) {
  shape.validate();
  if (shape.n2 < 2) throw std::invalid_argument("MomentTable: need a cone part (n2 >= 2)");
  if (max_degree < 0) throw std::invalid_argument("MomentTable: max_degree >= 0");
  MomentTable t;
  t.shape = shape;
  t.max_degree = max_degree;
  t.normalized = opts.normalized;
  const double lg0 = log_moment(MultiIndex(shape.n(), 0), shape);
  const double log_rel = std::log(opts.rel_threshold);
  const double log_abs = std::log(opts.abs_threshold);
  for (const auto& alpha : enumerate_le(shape.n(), max_degree)) {
    if (moment_is_zero(alpha, shape)) {
      t.value.emplace(alpha, 0.0);
      continue;
    }
    const double lg = log_moment(alpha, shape);
    const double stored_log = opts.normalized ? lg - lg0 : lg;
    t.value.emplace(alpha, std::exp(stored_log));
    const bool rel_flag = lg < lg0 + log_rel;
    const bool abs_flag = stored_log < log_abs;
    if (rel_flag || abs_flag) t.underflow.push_back(alpha);
  }
  return t;
}

namespace {

void require_depth(const MomentTable& table, const ConeShape& shape, int r) {
  if (table.shape.n1 != shape.n1 || table.shape.n2 != shape.n2)
    throw std::invalid_argument("moment table shape mismatch");
  if (table.max_degree < 2 * r + 2)
    throw std::invalid_argument("moment table too shallow for this level");
}

}  // namespace

Eigen::MatrixXd lasserre_matrix(const Eigen::MatrixXd& A, int r, const ConeShape& shape,
                                const MomentTable& table) {
  shape.validate();
  if (A.rows() != shape.n() || A.cols() != shape.n())
    throw std::invalid_argument("lasserre_matrix: size mismatch");
  require_depth(table, shape, r);
  const int n = shape.n();
  const auto basis = enumerate_le(n, r);
  Eigen::MatrixXd M((int)basis.size(), (int)basis.size());
  MultiIndex g(n);
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          const double w = (i == j ? 1.0 : 2.0) * A(i, j);
          if (w == 0.0) continue;
          for (int k = 0; k < n; ++k) g[k] = basis[a][k] + basis[b][k];
          g[i] += 1;
          g[j] += 1;
          s += w * table.at(g);
        }
      M((int)a, (int)b) = s;
      M((int)b, (int)a) = s;
    }
  return M;
}

int emit_lasserre(ConicProblem& p, const AffineSym& S, int r, const ConeShape& shape,
                  const MomentTable& table, const std::string& label) {
  shape.validate();
  if (S.n != shape.n()) throw std::invalid_argument("emit_lasserre: size mismatch");
  require_depth(table, shape, r);
  const int n = shape.n();
  const auto basis = enumerate_le(n, r);
  Membership m;
  m.kind = ConeKind::Psd;
  m.dim = (int)basis.size();
  m.label = label;
  MultiIndex g(n);
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = 0; b <= a; ++b) {
      LinExpr e;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          for (int k = 0; k < n; ++k) g[k] = basis[a][k] + basis[b][k];
          g[i] += 1;
          g[j] += 1;
          const double y = table.at(g);
          if (y == 0.0) continue;
          e += S.at(i, j).scaled((i == j ? 1.0 : 2.0) * y);
        }
      m.entries.push_back(std::move(e));
    }
  p.memberships.push_back(std::move(m));
  return (int)p.memberships.size() - 1;
}

}  // namespace copk
