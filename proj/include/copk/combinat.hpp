#pragma once

#include <cstdint>
#include <vector>

namespace copk {

// Exponent vector alpha in N^d. Degree |alpha| is the entry sum.
using MultiIndex = std::vector<int>;

int mi_degree(const MultiIndex& a);

// Canonical term order used everywhere: by total degree, then descending
// lexicographic within a degree, so e.g. (2,0,0) < (1,1,0) < (1,0,1) < (0,2,0).
bool mi_less(const MultiIndex& a, const MultiIndex& b);

struct MiLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return mi_less(a, b); }
};

// All alpha in N^d with |alpha| = m, in canonical order.
std::vector<MultiIndex> enumerate_eq(int d, int m);

// All alpha in N^d with |alpha| <= m, in canonical order.
std::vector<MultiIndex> enumerate_le(int d, int m);

long long binomial(int n, int k);
long long factorial(int n);

// m!/alpha! with alpha! = prod_i alpha_i!.  Requires |alpha| == m.
long long multinomial(int m, const MultiIndex& alpha);

// Block-count sequence a_m: a_0 = 1, a_1 = rk, a_{m+2} = rk*a_{m+1} + a_m.
long long zvp_count(int rk, int m);

// Same sequence through its closed form ((phi+^{m+1} - phi-^{m+1})/sqrt(rk^2+4)).
double zvp_count_closed_form(int rk, int m);

}  // namespace copk
