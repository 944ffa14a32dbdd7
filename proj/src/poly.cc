#include "copk/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace copk {

void SparsePoly::add_term(const MultiIndex& a, double v) {
  if ((int)a.size() != nvars)
    throw std::invalid_argument("SparsePoly::add_term: wrong index length");
  if (v == 0.0) return;
  auto it = coef.find(a);
  if (it == coef.end()) {
    coef.emplace(a, v);
  } else {
    it->second += v;
    if (it->second == 0.0) coef.erase(it);
  }
}

double SparsePoly::at(const MultiIndex& a) const {
  auto it = coef.find(a);
  return it == coef.end() ? 0.0 : it->second;
}

double SparsePoly::eval(const std::vector<double>& x) const {
  if ((int)x.size() != nvars)
    throw std::invalid_argument("SparsePoly::eval: wrong point length");
  double s = 0.0;
  for (const auto& [a, v] : coef) {
    double t = v;
    for (int i = 0; i < nvars; ++i)
      for (int k = 0; k < a[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

int SparsePoly::degree() const {
  if (coef.empty()) return -1;
  // canonical order is graded, so the last term has maximal degree
  return mi_degree(coef.rbegin()->first);
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& o) {
  if (nvars != o.nvars)
    throw std::invalid_argument("SparsePoly::+=: variable count mismatch");
  for (const auto& [a, v] : o.coef) add_term(a, v);
  return *this;
}

SparsePoly& SparsePoly::operator*=(double s) {
  if (s == 0.0) {
    coef.clear();
    return *this;
  }
  for (auto& [a, v] : coef) v *= s;
  return *this;
}

SparsePoly poly_mul(const SparsePoly& p, const SparsePoly& q) {
  if (p.nvars != q.nvars)
    throw std::invalid_argument("poly_mul: variable count mismatch");
  SparsePoly r(p.nvars);
  MultiIndex sum(p.nvars);
  for (const auto& [a, va] : p.coef)
    for (const auto& [b, vb] : q.coef) {
      for (int i = 0; i < p.nvars; ++i) sum[i] = a[i] + b[i];
      r.add_term(sum, va * vb);
    }
  return r;
}

SparsePoly poly_pow(const SparsePoly& p, int k) {
  if (k < 0) throw std::invalid_argument("poly_pow: negative exponent");
  SparsePoly r(p.nvars);
  r.add_term(MultiIndex(p.nvars, 0), 1.0);
  for (int i = 0; i < k; ++i) r = poly_mul(r, p);
  return r;
}

SparsePoly poly_linear(int d, const std::vector<double>& c, double c0) {
  if ((int)c.size() > d)
    throw std::invalid_argument("poly_linear: more coefficients than variables");
  SparsePoly r(d);
  MultiIndex a(d, 0);
  if (c0 != 0.0) r.add_term(a, c0);
  for (size_t i = 0; i < c.size(); ++i) {
    a[i] = 1;
    r.add_term(a, c[i]);
    a[i] = 0;
  }
  return r;
}

SparsePoly poly_monomial(int d, const MultiIndex& a, double v) {
  SparsePoly r(d);
  r.add_term(a, v);
  return r;
}

}  // namespace copk
