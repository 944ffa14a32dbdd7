#include "copk/combinat.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace copk {

int mi_degree(const MultiIndex& a) {
  return std::accumulate(a.begin(), a.end(), 0);
}

bool mi_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("mi_less: dimension mismatch");
  const int da = mi_degree(a), db = mi_degree(b);
  if (da != db) return da < db;
  // descending lex within a degree
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

namespace {

void enum_rec(int d, int m, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (d == 1) {
    cur.push_back(m);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int first = m; first >= 0; --first) {
    cur.push_back(first);
    enum_rec(d - 1, m - first, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_eq(int d, int m) {
  if (d < 1 || m < 0) throw std::invalid_argument("enumerate_eq: need d >= 1, m >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  cur.reserve(d);
  enum_rec(d, m, cur, out);
  return out;
}

std::vector<MultiIndex> enumerate_le(int d, int m) {
  if (d < 1 || m < 0) throw std::invalid_argument("enumerate_le: need d >= 1, m >= 0");
  std::vector<MultiIndex> out;
  for (int k = 0; k <= m; ++k) {
    auto part = enumerate_eq(d, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    // exact at every step: r * (n-k+i) is divisible by i
    r = r * (n - k + i) / i;
  }
  return r;
}

long long factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  if (n > 20) throw std::overflow_error("factorial: exceeds 64-bit range");
  long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

long long multinomial(int m, const MultiIndex& alpha) {
  if (mi_degree(alpha) != m)
    throw std::invalid_argument("multinomial: |alpha| != m");
  long long r = 1;
  int rem = m;
  for (int ai : alpha) {
    r *= binomial(rem, ai);
    rem -= ai;
  }
  return r;
}

long long zvp_count(int rk, int m) {
  if (rk < 1 || m < 0) throw std::invalid_argument("zvp_count: need rk >= 1, m >= 0");
  long long prev = 1;  // a_0
  if (m == 0) return prev;
  long long cur = rk;  // a_1
  for (int j = 2; j <= m; ++j) {
    long long next = rk * cur + prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double zvp_count_closed_form(int rk, int m) {
  const double disc = std::sqrt(double(rk) * rk + 4.0);
  const double phip = (rk + disc) / 2.0;
  const double phim = (rk - disc) / 2.0;
  return (std::pow(phip, m + 1) - std::pow(phim, m + 1)) / disc;
}

}  // namespace copk
