#include "copk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace copk {

double Rng::uniform() {
  // 53-bit mantissa from the top bits of the engine word.
  return double(eng_() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

namespace {

double exp1(Rng& rng) { return -std::log(1.0 - rng.uniform()); }

double quad_value(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) { return x.dot(A * x); }

void require_square(const Eigen::MatrixXd& A, int n, const char* who) {
  if (A.rows() != n || A.cols() != n) throw std::invalid_argument(std::string(who) + ": matrix size mismatch");
}

}  // namespace

Eigen::VectorXd sample_body_point(const ConeShape& shape, Rng& rng) {
  const int n1 = shape.n1, n2 = shape.n2;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(shape.n());
  // Simplex weights (orthant entries, cone head, slack) are Dirichlet with
  // parameters (1, ..., 1, n2, 1): the head weight carries the ball volume
  // factor radius^(n2-1).
  double total = exp1(rng);  // slack
  for (int i = 0; i < n1; ++i) {
    x(i) = exp1(rng);
    total += x(i);
  }
  double head = 0.0;
  for (int j = 0; j < n2; ++j) head += exp1(rng);
  total += head;
  x.head(n1) /= total;
  if (n2 > 0) {
    head /= total;
    x(n1) = head;
    const int d = n2 - 1;
    Eigen::VectorXd dir(d);
    for (int j = 0; j < d; ++j) dir(j) = rng.gaussian();
    double nd = dir.norm();
    if (nd == 0.0) {
      dir.setZero();
      dir(0) = 1.0;
    } else {
      dir /= nd;
    }
    double radius = head * std::pow(rng.uniform(), 1.0 / d);
    x.tail(d) = radius * dir;
  }
  return x;
}

SampleResult sample_cone_min(const Eigen::MatrixXd& A, const ConeShape& shape, long samples,
                             uint64_t seed) {
  shape.validate();
  require_square(A, shape.n(), "sample_cone_min");
  if (samples <= 0) throw std::invalid_argument("sample_cone_min: samples must be positive");
  Rng rng(seed);
  SampleResult out;
  out.min_value = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    Eigen::VectorXd x = sample_body_point(shape, rng);
    double val = quad_value(A, x);
    if (val < out.min_value) {
      out.min_value = val;
      out.argmin = x;
    }
  }
  return out;
}

GridResult grid_cone_min(const Eigen::MatrixXd& A, const ConeShape& shape, int k, int directions) {
  shape.validate();
  require_square(A, shape.n(), "grid_cone_min");
  if (k < 1) throw std::invalid_argument("grid_cone_min: k must be >= 1");
  const int rk = shape.rk();
  GridResult out;
  out.min_value = std::numeric_limits<double>::infinity();
  const auto grid = enumerate_eq(rk, k);

  if (shape.n2 == 0) {
    // Frames are the coordinate axes; the projected matrix is A itself.
    out.max_abs_frame = A.cwiseAbs().maxCoeff();
    for (const auto& a : grid) {
      Eigen::VectorXd x(rk);
      for (int i = 0; i < rk; ++i) x(i) = double(a[i]) / k;
      double val = quad_value(A, x);
      if (val < out.min_value) {
        out.min_value = val;
        out.argmin = x;
        out.argmin_x.assign(a.begin(), a.end());
        for (auto& c : out.argmin_x) c /= k;
      }
    }
    out.argmin_axis_direction = true;
    return out;
  }

  const int d = shape.n2 - 1;
  std::vector<Eigen::VectorXd> dirs;
  std::vector<bool> axis_flag;
  for (int j = 0; j < d; ++j) {
    for (int s : {+1, -1}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      v(j) = s;
      dirs.push_back(v);
      axis_flag.push_back(true);
    }
  }
  if (d > 1) {
    Rng rng(0x9e3779b97f4a7c15ULL);
    while (int(dirs.size()) < directions) {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v(j) = rng.gaussian();
      double nv = v.norm();
      if (nv == 0.0) continue;
      dirs.push_back(v / nv);
      axis_flag.push_back(false);
    }
  }

  MultiIndex best_alpha;
  Eigen::VectorXd best_v;
  bool best_axis = false;
  for (size_t di = 0; di < dirs.size(); ++di) {
    JordanFrame frame = frame_at(shape, dirs[di]);
    Eigen::MatrixXd B = project_to_frame(A, frame);
    out.max_abs_frame = std::max(out.max_abs_frame, B.cwiseAbs().maxCoeff());
    for (const auto& a : grid) {
      double val = 0.0;
      for (int i = 0; i < rk; ++i) {
        if (a[i] == 0) continue;
        double xi = double(a[i]) / k;
        for (int j = 0; j < rk; ++j) {
          if (a[j] == 0) continue;
          val += xi * (double(a[j]) / k) * B(i, j);
        }
      }
      if (val < out.min_value) {
        out.min_value = val;
        best_alpha = a;
        best_v = dirs[di];
        best_axis = axis_flag[di];
      }
    }
  }
  out.argmin_x.assign(best_alpha.begin(), best_alpha.end());
  for (auto& c : out.argmin_x) c /= k;
  out.argmin_v = best_v;
  out.argmin_axis_direction = best_axis;
  std::vector<double> xd(best_alpha.size());
  for (size_t i = 0; i < best_alpha.size(); ++i) xd[i] = double(best_alpha[i]) / k;
  out.argmin = frame_combination(shape, xd, best_v).full();
  return out;
}

Rational exact_quadratic_value(const Eigen::MatrixXd& A, const std::vector<Rational>& u) {
  const int n = int(u.size());
  require_square(A, n, "exact_quadratic_value");
  Rational total = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (A(i, j) == 0.0) continue;
      total += u[size_t(i)] * u[size_t(j)] * Rational(A(i, j));
    }
  }
  return total;
}

double sphere_quadratic_min(double m11, const Eigen::VectorXd& m21, const Eigen::MatrixXd& m22,
                            Eigen::VectorXd* argmin) {
  const int d = int(m21.size());
  if (m22.rows() != d || m22.cols() != d)
    throw std::invalid_argument("sphere_quadratic_min: size mismatch");
  if (d == 0) {
    if (argmin) *argmin = Eigen::VectorXd();
    return m11;
  }
  auto value = [&](const Eigen::VectorXd& v) { return m11 + 2.0 * m21.dot(v) + v.dot(m22 * v); };
  if (d == 1) {
    double a = value(Eigen::VectorXd::Constant(1, 1.0));
    double b = value(Eigen::VectorXd::Constant(1, -1.0));
    if (argmin) *argmin = Eigen::VectorXd::Constant(1, a <= b ? 1.0 : -1.0);
    return std::min(a, b);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m22);
  const Eigen::VectorXd lam = es.eigenvalues();  // ascending
  const Eigen::MatrixXd Q = es.eigenvectors();
  const Eigen::VectorXd g = Q.transpose() * m21;
  const double lmin = lam(0);
  const double scale = std::max({1.0, std::abs(lam(d - 1)), std::abs(lmin), g.norm()});

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_v;
  auto consider = [&](const Eigen::VectorXd& v0) {
    if (!v0.allFinite()) return;
    double nv = v0.norm();
    if (!(nv > 0.0)) return;
    Eigen::VectorXd v = v0 / nv;
    double q = value(v);
    if (q < best) {
      best = q;
      best_v = v;
    }
  };

  auto phi2 = [&](double nu) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      double den = lam(i) + nu;
      s += g(i) * g(i) / (den * den);
    }
    return s;
  };

  // Global minimizer on the sphere solves (m22 + nu I) v = -m21 with
  // nu >= -lmin.  The norm of v(nu) decreases on (-lmin, inf); if the
  // gradient has no component on the bottom eigenspace the boundary value
  // nu = -lmin may already give |v| <= 1 (completed by an eigenvector).
  double gmin2 = 0.0;
  for (int i = 0; i < d; ++i)
    if (lam(i) - lmin <= 1e-12 * scale) gmin2 += g(i) * g(i);
  bool solved = false;
  if (std::sqrt(gmin2) <= 1e-13 * scale) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
      double den = lam(i) - lmin;
      if (den > 1e-12 * scale) c(i) = -g(i) / den;
    }
    double np2 = c.squaredNorm();
    if (np2 <= 1.0) {
      c(0) += std::sqrt(std::max(0.0, 1.0 - np2));
      consider(Q * c);
      solved = true;
    }
  }
  if (!solved) {
    double lo = -lmin + 1e-14 * scale;
    for (int it = 0; it < 200 && phi2(lo) <= 1.0; ++it) lo = -lmin + (lo + lmin) * 0.5;
    double hi = -lmin + scale;
    for (int it = 0; it < 200 && phi2(hi) > 1.0; ++it) hi = -lmin + (hi + lmin) * 2.0;
    for (int it = 0; it < 300; ++it) {
      double mid = 0.5 * (lo + hi);
      (phi2(mid) > 1.0 ? lo : hi) = mid;
    }
    double nu = 0.5 * (lo + hi);
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i) c(i) = -g(i) / (lam(i) + nu);
    consider(Q * c);
  }
  // Cheap safety candidates; the secular solution should already win.
  consider(Q.col(0));
  consider(-Q.col(0));
  if (m21.norm() > 0.0) consider(-m21);
  if (argmin) *argmin = best_v;
  return best;
}

double lifted_block_min(const BlockM& b, Eigen::VectorXd* argmin) {
  const int d = int(b.m21.size());
  Eigen::VectorXd m21(d);
  Eigen::MatrixXd m22(d, d);
  for (int i = 0; i < d; ++i) {
    m21(i) = b.m21[size_t(i)];
    for (int j = 0; j < d; ++j) m22(i, j) = b.m22[size_t(i)][size_t(j)];
  }
  return sphere_quadratic_min(b.m11, m21, m22, argmin);
}

MomentCheck dual_moment_check(const std::map<MultiIndex, double, MiLess>& X, int n, int m,
                              double tol) {
  const auto basis = enumerate_le(n, m);
  const int N = int(basis.size());
  Eigen::MatrixXd M(N, N);
  MultiIndex s(n, 0);
  for (int a = 0; a < N; ++a) {
    for (int b = a; b < N; ++b) {
      for (int t = 0; t < n; ++t) s[size_t(t)] = basis[size_t(a)][size_t(t)] + basis[size_t(b)][size_t(t)];
      auto it = X.find(s);
      if (it == X.end()) throw std::out_of_range("dual_moment_check: table misses an index");
      M(a, b) = M(b, a) = it->second;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  MomentCheck out;
  out.min_eigenvalue = es.eigenvalues()(0);
  out.psd = out.min_eigenvalue >= -tol;
  out.witness = es.eigenvectors().col(0);
  return out;
}

double mc_moment_box(const MultiIndex& alpha, const ConeShape& shape, long accepted_target,
                     uint64_t seed) {
  shape.validate();
  if (int(alpha.size()) != shape.n()) throw std::invalid_argument("mc_moment_box: index length");
  if (accepted_target <= 0) throw std::invalid_argument("mc_moment_box: target must be positive");
  const int n1 = shape.n1, n2 = shape.n2;
  const int d = n2 > 0 ? n2 - 1 : 0;
  const double boxvol = std::pow(2.0, d);
  Rng rng(seed);
  std::vector<double> x(size_t(shape.n()));
  long accepted = 0;
  long long total = 0;
  double acc = 0.0;
  while (accepted < accepted_target) {
    if (++total > 400000000LL) throw std::runtime_error("mc_moment_box: acceptance rate too low");
    double sum = 0.0;
    for (int i = 0; i < n1; ++i) {
      x[size_t(i)] = rng.uniform();
      sum += x[size_t(i)];
    }
    double head = 0.0;
    if (n2 > 0) {
      head = rng.uniform();
      x[size_t(n1)] = head;
      sum += head;
    }
    double tail2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double w = 2.0 * rng.uniform() - 1.0;
      x[size_t(n1 + 1 + j)] = w;
      tail2 += w * w;
    }
    if (sum > 1.0) continue;
    if (n2 > 0 && tail2 > head * head) continue;
    ++accepted;
    double term = 1.0;
    for (int i = 0; i < shape.n(); ++i)
      for (int e = 0; e < alpha[size_t(i)]; ++e) term *= x[size_t(i)];
    acc += term;
  }
  return boxvol * acc / double(total);
}

Refutation find_refutation(const Eigen::MatrixXd& A, const ConeShape& shape, int r, double tol) {
  shape.validate();
  require_square(A, shape.n(), "find_refutation");
  if (r < 0) throw std::invalid_argument("find_refutation: r must be >= 0");
  Refutation out;
  const int rk = shape.rk();
  const auto pts = yildirim_points(r, rk);

  if (shape.n2 == 0) {
    Rational best = 0;
    for (const auto& pt : pts) {
      Rational q = exact_quadratic_value(A, pt);
      if (q < best) {
        best = q;
        out.point = pt;
      }
    }
    double bd = best.convert_to<double>();
    if (bd < -tol) {
      out.found = true;
      out.exact = true;
      out.value = bd;
      out.witness = Eigen::VectorXd(shape.n());
      for (int i = 0; i < shape.n(); ++i) out.witness(i) = out.point[size_t(i)].convert_to<double>();
    }
    return out;
  }

  double best = 0.0;
  std::vector<Rational> best_pt;
  Eigen::VectorXd best_v;
  for (const auto& pt : pts) {
    std::vector<double> xd(pt.size());
    for (size_t i = 0; i < pt.size(); ++i) xd[i] = pt[i].convert_to<double>();
    BlockM blk = build_N(A, xd, shape);
    Eigen::VectorXd v;
    double q = lifted_block_min(blk, &v);  // equals 4 u'Au at the best direction
    if (q < best) {
      best = q;
      best_pt = pt;
      best_v = v;
    }
  }
  if (best >= -tol) return out;

  out.found = true;
  out.point = best_pt;
  out.direction = best_v;
  std::vector<double> xd(best_pt.size());
  for (size_t i = 0; i < best_pt.size(); ++i) xd[i] = best_pt[i].convert_to<double>();
  out.witness = frame_combination(shape, xd, best_v).full();
  out.value = quad_value(A, out.witness);

  // Prefer an exactly certifiable witness: re-evaluate every axis direction in
  // rational arithmetic, keep the most negative if one refutes.
  const int d = shape.n2 - 1;
  const Rational half(1, 2);
  Rational best_exact = 0;
  std::vector<Rational> best_u;
  Eigen::VectorXd best_axis;
  for (int j = 0; j < d; ++j) {
    for (int s : {+1, -1}) {
      std::vector<Rational> u(size_t(shape.n()), Rational(0));
      for (int i = 0; i < shape.n1; ++i) u[size_t(i)] = best_pt[size_t(i)];
      u[size_t(shape.n1)] = (best_pt[size_t(shape.n1)] + best_pt[size_t(shape.n1 + 1)]) * half;
      u[size_t(shape.n1 + 1 + j)] =
          Rational(s) * (best_pt[size_t(shape.n1)] - best_pt[size_t(shape.n1 + 1)]) * half;
      Rational q = exact_quadratic_value(A, u);
      if (q < best_exact) {
        best_exact = q;
        best_u = u;
        best_axis = Eigen::VectorXd::Zero(d);
        best_axis(j) = s;
      }
    }
  }
  if (best_exact < 0) {
    out.exact = true;
    out.direction = best_axis;
    out.value = best_exact.convert_to<double>();
    for (int i = 0; i < shape.n(); ++i) out.witness(i) = best_u[size_t(i)].convert_to<double>();
  }
  return out;
}

}  // namespace copk
