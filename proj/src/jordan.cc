#include "copk/jordan.hpp"

#include <stdexcept>

namespace copk {

void ConeShape::validate() const {
  if (n1 < 0) throw std::invalid_argument("ConeShape: n1 must be >= 0");
  if (n2 != 0 && n2 < 2)
    throw std::invalid_argument("ConeShape: n2 must be 0 or >= 2");
  if (n() < 1) throw std::invalid_argument("ConeShape: empty cone");
}

Eigen::VectorXd AlgebraElement::full() const {
  Eigen::VectorXd x(n());
  x.head(orthant.size()) = orthant;
  x.tail(soc.size()) = soc;
  return x;
}

AlgebraElement AlgebraElement::from_full(const ConeShape& shape, const Eigen::VectorXd& x) {
  shape.validate();
  if (x.size() != shape.n())
    throw std::invalid_argument("AlgebraElement::from_full: wrong length");
  AlgebraElement e;
  e.orthant = x.head(shape.n1);
  e.soc = x.tail(shape.n2);
  return e;
}

AlgebraElement AlgebraElement::zero(const ConeShape& shape) {
  shape.validate();
  AlgebraElement e;
  e.orthant = Eigen::VectorXd::Zero(shape.n1);
  e.soc = Eigen::VectorXd::Zero(shape.n2);
  return e;
}

AlgebraElement jordan_product(const AlgebraElement& x, const AlgebraElement& y) {
  if (x.orthant.size() != y.orthant.size() || x.soc.size() != y.soc.size())
    throw std::invalid_argument("jordan_product: shape mismatch");
  AlgebraElement r;
  r.orthant = x.orthant.cwiseProduct(y.orthant);
  const auto m = x.soc.size();
  r.soc.resize(m);
  if (m > 0) {
    r.soc(0) = x.soc.dot(y.soc);
    r.soc.tail(m - 1) = x.soc(0) * y.soc.tail(m - 1) + y.soc(0) * x.soc.tail(m - 1);
  }
  return r;
}

double inner(const AlgebraElement& x, const AlgebraElement& y) {
  return x.orthant.dot(y.orthant) + x.soc.dot(y.soc);
}

AlgebraElement identity_element(const ConeShape& shape) {
  shape.validate();
  AlgebraElement e;
  e.orthant = Eigen::VectorXd::Ones(shape.n1);
  e.soc = Eigen::VectorXd::Zero(shape.n2);
  if (shape.n2 > 0) e.soc(0) = 1.0;
  return e;
}

bool cone_membership(const ConeShape& shape, const AlgebraElement& x, double tol) {
  shape.validate();
  if (x.orthant.size() != shape.n1 || x.soc.size() != shape.n2)
    throw std::invalid_argument("cone_membership: shape mismatch");
  if (shape.n1 > 0 && x.orthant.minCoeff() < -tol) return false;
  if (shape.n2 > 0) {
    const double t = x.soc(0);
    const double w = x.soc.tail(shape.n2 - 1).norm();
    if (t < w - tol) return false;
  }
  return true;
}

JordanFrame frame_at(const ConeShape& shape, const Eigen::VectorXd& v) {
  shape.validate();
  if (shape.n2 == 0)
    throw std::invalid_argument("frame_at: requires a cone block (n2 >= 2)");
  if (v.size() != shape.n2 - 1)
    throw std::invalid_argument("frame_at: direction must have length n2-1");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("frame_at: direction must be a unit vector");

  JordanFrame f;
  f.shape = shape;
  f.v = v;
  f.c.reserve(shape.rk());
  for (int i = 0; i < shape.n1; ++i) {
    AlgebraElement e = AlgebraElement::zero(shape);
    e.orthant(i) = 1.0;
    f.c.push_back(std::move(e));
  }
  for (int sgn : {+1, -1}) {
    AlgebraElement e = AlgebraElement::zero(shape);
    e.soc(0) = 0.5;
    e.soc.tail(shape.n2 - 1) = 0.5 * sgn * v;
    f.c.push_back(std::move(e));
  }
  return f;
}

SpectralDecomposition spectral_decompose(const ConeShape& shape, const AlgebraElement& x,
                                         const Eigen::VectorXd& tie_break_v) {
  shape.validate();
  if (shape.n2 == 0)
    throw std::invalid_argument("spectral_decompose: requires a cone block (n2 >= 2)");
  if (x.orthant.size() != shape.n1 || x.soc.size() != shape.n2)
    throw std::invalid_argument("spectral_decompose: shape mismatch");

  const double t = x.soc(0);
  const Eigen::VectorXd w = x.soc.tail(shape.n2 - 1);
  const double wn = w.norm();

  Eigen::VectorXd v;
  if (wn > 0.0) {
    v = w / wn;
  } else if (tie_break_v.size() > 0) {
    if (tie_break_v.size() != shape.n2 - 1 || std::abs(tie_break_v.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("spectral_decompose: bad tie-break direction");
    v = tie_break_v;
  } else {
    v = Eigen::VectorXd::Zero(shape.n2 - 1);
    v(0) = 1.0;
  }

  SpectralDecomposition d;
  d.frame = frame_at(shape, v);
  d.eigenvalues.resize(shape.rk());
  d.eigenvalues.head(shape.n1) = x.orthant;
  d.eigenvalues(shape.n1) = t + wn;
  d.eigenvalues(shape.n1 + 1) = t - wn;
  return d;
}

Eigen::MatrixXd project_to_frame(const Eigen::MatrixXd& A, const JordanFrame& frame) {
  const int n = frame.shape.n();
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument("project_to_frame: matrix size mismatch");
  const int rk = frame.shape.rk();
  Eigen::MatrixXd B(rk, rk);
  std::vector<Eigen::VectorXd> cs;
  cs.reserve(rk);
  for (const auto& c : frame.c) cs.push_back(c.full());
  for (int i = 0; i < rk; ++i)
    for (int j = 0; j < rk; ++j) B(i, j) = cs[i].dot(A * cs[j]);
  return B;
}

StructureConstants structure_constants(const ConeShape& shape) {
  shape.validate();
  const int n = shape.n();
  StructureConstants sc;
  sc.n = n;
  sc.t.assign(size_t(n) * n * n, 0.0);
  auto set = [&](int i, int j, int k, double v) {
    sc.t[size_t(i * n + j) * n + k] = v;
  };
  // orthant: e_i * e_i = e_i
  for (int i = 0; i < shape.n1; ++i) set(i, i, i, 1.0);
  // cone block: with leading index p = n1, (e_p * e_q) = e_q and
  // (e_q * e_q') = delta e_p for trailing q, q'.
  if (shape.n2 > 0) {
    const int p = shape.n1;
    set(p, p, p, 1.0);
    for (int q = p + 1; q < n; ++q) {
      set(q, p, q, 1.0);
      set(q, q, p, 1.0);
      set(p, q, q, 1.0);
    }
  }
  return sc;
}

}  // namespace copk
