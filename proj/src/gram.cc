#include "copk/gram.hpp"

#include <functional>
#include <stdexcept>

namespace copk {

std::vector<SparsePoly> semialgebraic_generators(const ConeShape& shape) {
  shape.validate();
  if (shape.n2 < 2)
    throw std::invalid_argument("semialgebraic_generators: needs a cone part (n2 >= 2)");
  const int n = shape.n(), n1 = shape.n1;
  std::vector<SparsePoly> gens;
  MultiIndex a(n, 0);
  for (int i = 0; i < n1; ++i) {
    a[i] = 1;
    gens.push_back(poly_monomial(n, a));
    a[i] = 0;
  }
  a[n1] = 1;
  gens.push_back(poly_monomial(n, a));
  a[n1] = 0;
  std::vector<double> ones(n1 + 1, 1.0);
  gens.push_back(poly_linear(n, ones));
  SparsePoly quad(n);
  a[n1] = 2;
  quad.add_term(a, 1.0);
  a[n1] = 0;
  for (int j = n1 + 1; j < n; ++j) {
    a[j] = 2;
    quad.add_term(a, -1.0);
    a[j] = 0;
  }
  gens.push_back(std::move(quad));
  return gens;
}

std::vector<SparsePoly> squared_coordinates(const ConeShape& shape) {
  shape.validate();
  const int n = shape.n(), n1 = shape.n1;
  std::vector<SparsePoly> out;
  MultiIndex a(n, 0);
  for (int i = 0; i < n1; ++i) {
    a[i] = 2;
    out.push_back(poly_monomial(n, a));
    a[i] = 0;
  }
  if (shape.n2 > 0) {
    SparsePoly head(n);
    for (int j = n1; j < n; ++j) {
      a[j] = 2;
      head.add_term(a, 1.0);
      a[j] = 0;
    }
    out.push_back(std::move(head));
    for (int j = n1 + 1; j < n; ++j) {
      a[n1] = 1;
      a[j] = 1;
      out.push_back(poly_monomial(n, a, 2.0));
      a[n1] = 0;
      a[j] = 0;
    }
  }
  return out;
}

AffinePoly quadratic_form_poly(const AffineSym& S) {
  AffinePoly out;
  MultiIndex a(S.n, 0);
  for (int i = 0; i < S.n; ++i)
    for (int j = 0; j <= i; ++j) {
      a[i] += 1;
      a[j] += 1;
      LinExpr& e = out[a];
      e += S.at(i, j).scaled(i == j ? 1.0 : 2.0);
      a[i] -= 1;
      a[j] -= 1;
    }
  return out;
}

AffinePoly affine_poly_mul(const AffinePoly& p, const SparsePoly& q) {
  AffinePoly out;
  for (const auto& [a, ea] : p)
    for (const auto& [b, wb] : q.coef) {
      MultiIndex s(a.size());
      for (size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
      out[s] += ea.scaled(wb);
    }
  return out;
}

AffinePoly affine_from_sparse(const SparsePoly& p) {
  AffinePoly out;
  for (const auto& [a, w] : p.coef) out[a] = LinExpr::constant(w);
  return out;
}

double affine_poly_eval(const AffinePoly& p, const std::vector<double>& coef_point,
                        const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& [a, e] : p) {
    double t = e.eval(coef_point);
    for (size_t i = 0; i < a.size(); ++i)
      for (int k = 0; k < a[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

int sos_to_psd(ConicProblem& p, const AffinePoly& target, int nvars, int degree,
               const std::string& name) {
  if (degree < 0 || degree % 2 != 0)
    throw std::invalid_argument("sos_to_psd: degree must be even and nonnegative");
  const auto basis = enumerate_eq(nvars, degree / 2);
  const int mvi = p.add_mat_var(name, (int)basis.size());
  const MatVar mv = p.mat_vars[mvi];

  AffinePoly acc;
  MultiIndex g(nvars);
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = 0; b <= a; ++b) {
      for (int i = 0; i < nvars; ++i) g[i] = basis[a][i] + basis[b][i];
      acc[g].add(mv.entry_var((int)a, (int)b), a == b ? 1.0 : 2.0);
    }
  for (const auto& [gm, te] : target) {
    if ((int)gm.size() != nvars || mi_degree(gm) != degree)
      throw std::invalid_argument("sos_to_psd: target not homogeneous of the given degree");
    acc[gm] += te.scaled(-1.0);  // ensures every target monomial gets an equation
  }
  for (auto& [gm, e] : acc) {
    (void)gm;
    p.equalities.push_back(std::move(e));
  }
  return mvi;
}

AffinePoly lifted_quadratic_target(const AffineSym& S, int r, const ConeShape& shape) {
  if (S.n != shape.n()) throw std::invalid_argument("lifted_quadratic_target: size mismatch");
  if (r < 0) throw std::invalid_argument("lifted_quadratic_target: r >= 0");
  AffinePoly t = quadratic_form_poly(S);
  std::vector<double> ones(shape.n1 + 1, 1.0);
  const SparsePoly lin = poly_linear(shape.n(), ones);
  for (int i = 0; i < r; ++i) t = affine_poly_mul(t, lin);
  return t;
}

ZvpEmit zvp_membership_constraints(ConicProblem& p, const AffinePoly& target, int degree,
                                   const ConeShape& shape, const std::string& name) {
  shape.validate();
  if (shape.n2 < 2)
    throw std::invalid_argument("zvp_membership_constraints: needs a cone part");
  if (degree < 1) throw std::invalid_argument("zvp_membership_constraints: degree >= 1");
  const int n = shape.n();

  // structural size guard: leaves grow like rk^degree
  {
    double leaves = 1.0;
    for (int j = 2; j <= degree; ++j) leaves = leaves * shape.rk() + 1.0;
    leaves *= shape.rk();
    if (leaves > 5e5)
      throw std::invalid_argument("zvp_membership_constraints: structure too large");
  }

  const auto gens = semialgebraic_generators(shape);
  const int n_linear = (int)gens.size() - 1;
  const SparsePoly& quad_gen = gens.back();

  ZvpEmit out;
  out.equations_begin = (int)p.equalities.size();
  AffinePoly acc;
  int gram_counter = 0;

  // contribution of a nonnegative leaf scalar with the given path product
  auto add_leaf = [&](const SparsePoly& path) {
    const int v = p.add_var(name + ".c" + std::to_string(out.leaf_vars.size()));
    out.leaf_vars.push_back(v);
    for (const auto& [mu, w] : path.coef) acc[mu].add(v, w);
  };

  // depth-first over generator choices; path holds the product so far
  std::function<void(int, const SparsePoly&)> visit = [&](int d, const SparsePoly& path) {
    if (d == 0) {
      add_leaf(path);
      return;
    }
    if (d == 1) {
      for (int i = 0; i < n_linear; ++i) add_leaf(poly_mul(path, gens[i]));
      return;
    }
    if (d % 2 == 0) {
      const auto basis = enumerate_eq(n, d / 2);
      const int mvi =
          p.add_mat_var(name + ".Q" + std::to_string(gram_counter++), (int)basis.size());
      const MatVar mv = p.mat_vars[mvi];
      out.gram_mat_vars.push_back(mvi);
      MultiIndex g(n);
      for (size_t a = 0; a < basis.size(); ++a)
        for (size_t b = 0; b <= a; ++b) {
          const double w2 = (a == b) ? 1.0 : 2.0;
          const int qv = mv.entry_var((int)a, (int)b);
          for (const auto& [mu, w] : path.coef) {
            for (int i = 0; i < n; ++i) g[i] = mu[i] + basis[a][i] + basis[b][i];
            acc[g].add(qv, w * w2);
          }
        }
    }
    for (int i = 0; i < n_linear; ++i) visit(d - 1, poly_mul(path, gens[i]));
    visit(d - 2, poly_mul(path, quad_gen));
  };

  SparsePoly one(n);
  one.add_term(MultiIndex(n, 0), 1.0);
  visit(degree, one);

  for (const auto& [gm, te] : target) {
    if ((int)gm.size() != n || mi_degree(gm) != degree)
      throw std::invalid_argument("zvp_membership_constraints: bad target degree");
    acc[gm] += te.scaled(-1.0);
  }
  for (auto& [gm, e] : acc) {
    (void)gm;
    p.equalities.push_back(std::move(e));
  }
  out.equations_end = (int)p.equalities.size();

  if (!out.leaf_vars.empty()) {
    Membership m;
    m.kind = ConeKind::Nonneg;
    m.dim = (int)out.leaf_vars.size();
    m.label = name + ".cones";
    for (int v : out.leaf_vars) m.entries.push_back(LinExpr::variable(v));
    out.nonneg_membership = (int)p.memberships.size();
    p.memberships.push_back(std::move(m));
  }
  return out;
}

namespace {

SparsePoly norm_power(const ConeShape& shape, int r) {
  const int n = shape.n();
  SparsePoly nrm(n);
  MultiIndex a(n, 0);
  for (int i = 0; i < n; ++i) {
    a[i] = 2;
    nrm.add_term(a, 1.0);
    a[i] = 0;
  }
  return poly_pow(nrm, r);
}

}  // namespace

SparsePoly nn_substituted_poly(const Eigen::MatrixXd& A, int r, const ConeShape& shape) {
  shape.validate();
  if (A.rows() != shape.n() || A.cols() != shape.n())
    throw std::invalid_argument("nn_substituted_poly: size mismatch");
  const auto q = squared_coordinates(shape);
  SparsePoly out(shape.n());
  const SparsePoly base = norm_power(shape, r);
  for (int i = 0; i < shape.n(); ++i)
    for (int j = 0; j <= i; ++j) {
      const double w = (i == j ? 1.0 : 2.0) * A(i, j);
      if (w == 0.0) continue;
      SparsePoly t = poly_mul(q[i], q[j]);
      t *= w;
      out += poly_mul(t, base);
    }
  return out;
}

AffinePoly nn_substituted_affine(const AffineSym& S, int r, const ConeShape& shape) {
  shape.validate();
  if (S.n != shape.n()) throw std::invalid_argument("nn_substituted_affine: size mismatch");
  const auto q = squared_coordinates(shape);
  const SparsePoly base = norm_power(shape, r);
  AffinePoly out;
  for (int i = 0; i < shape.n(); ++i)
    for (int j = 0; j <= i; ++j) {
      const LinExpr& sij = S.at(i, j);
      if (sij.is_constant() && sij.c0 == 0.0) continue;
      const SparsePoly prod = poly_mul(poly_mul(q[i], q[j]), base);
      const double w2 = (i == j) ? 1.0 : 2.0;
      for (const auto& [mu, w] : prod.coef) out[mu] += sij.scaled(w * w2);
    }
  return out;
}

int nn_membership_constraints(ConicProblem& p, const AffineSym& S, int r,
                              const ConeShape& shape, const std::string& name) {
  const AffinePoly target = nn_substituted_affine(S, r, shape);
  return sos_to_psd(p, target, shape.n(), 2 * (r + 2), name);
}

}  // namespace copk
