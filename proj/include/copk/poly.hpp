#pragma once

#include <map>
#include <vector>

#include "copk/combinat.hpp"

namespace copk {

// Sparse multivariate polynomial with double coefficients.  Terms are kept in
// the canonical multi-index order; exact-zero coefficients are never stored.
struct SparsePoly {
  int nvars = 0;
  std::map<MultiIndex, double, MiLess> coef;

  SparsePoly() = default;
  explicit SparsePoly(int d) : nvars(d) {}

  void add_term(const MultiIndex& a, double v);
  double at(const MultiIndex& a) const;
  double eval(const std::vector<double>& x) const;
  int degree() const;  // max term degree, -1 for the zero polynomial
  bool is_zero() const { return coef.empty(); }

  SparsePoly& operator+=(const SparsePoly& o);
  SparsePoly& operator*=(double s);
};

SparsePoly poly_mul(const SparsePoly& p, const SparsePoly& q);
SparsePoly poly_pow(const SparsePoly& p, int k);

// c0 + sum_i c_i x_i as a polynomial in d variables (c may be shorter than d).
SparsePoly poly_linear(int d, const std::vector<double>& c, double c0 = 0.0);
SparsePoly poly_monomial(int d, const MultiIndex& a, double v = 1.0);

}  // namespace copk
