#pragma once

#include <Eigen/Dense>
#include <vector>

namespace copk {

// Direct product of a nonnegative orthant of dimension n1 and a second-order
// cone of dimension n2.  n2 == 0 degenerates to a pure orthant; otherwise
// n2 >= 2.  Coordinates are ordered orthant first, then the cone block with
// its leading entry first.
struct ConeShape {
  int n1 = 0;
  int n2 = 0;

  int n() const { return n1 + n2; }
  int rk() const { return n2 == 0 ? n1 : n1 + 2; }
  void validate() const;
};

// Element of the associated algebra, split by block.
struct AlgebraElement {
  Eigen::VectorXd orthant;  // length n1
  Eigen::VectorXd soc;      // length n2 (empty when n2 == 0)

  int n() const { return int(orthant.size() + soc.size()); }
  Eigen::VectorXd full() const;
  static AlgebraElement from_full(const ConeShape& shape, const Eigen::VectorXd& x);
  static AlgebraElement zero(const ConeShape& shape);
};

// Blockwise product: elementwise on the orthant; on the cone block,
// (s, w) * (t, u) = (s t + w.u, s u + t w).
AlgebraElement jordan_product(const AlgebraElement& x, const AlgebraElement& y);

// Standard dot product of the stacked coordinate vectors.
double inner(const AlgebraElement& x, const AlgebraElement& y);

// Unit element: all-ones orthant part, (1, 0, ..., 0) cone part.
AlgebraElement identity_element(const ConeShape& shape);

// True when x lies in the cone up to tol: orthant entries >= -tol and
// leading cone entry >= |tail| - tol.
bool cone_membership(const ConeShape& shape, const AlgebraElement& x, double tol = 0.0);

// Complete system of rk primitive idempotents: the orthant unit vectors
// followed by (1, v)/2 and (1, -v)/2 for a unit direction v in R^{n2-1}.
struct JordanFrame {
  ConeShape shape;
  Eigen::VectorXd v;                // unit direction, length n2-1 (empty if n2 == 0)
  std::vector<AlgebraElement> c;    // rk elements in the order above
};

JordanFrame frame_at(const ConeShape& shape, const Eigen::VectorXd& v);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // length rk, ordered like the frame
  JordanFrame frame;
};

// Eigenvalues are the orthant entries followed by t + |w| and t - |w| for the
// cone block (t, w).  When w == 0 the frame direction falls back to tie_break_v
// (default first unit vector).
SpectralDecomposition spectral_decompose(const ConeShape& shape, const AlgebraElement& x,
                                         const Eigen::VectorXd& tie_break_v = Eigen::VectorXd());

// B_ij = c_i^T A c_j for the frame elements (stacked coordinates).
Eigen::MatrixXd project_to_frame(const Eigen::MatrixXd& A, const JordanFrame& frame);

// Dense structure tensor: entry(i, j, k) = (e_j * e_k) . e_i for the
// coordinate basis.  Symmetric in (j, k).
struct StructureConstants {
  int n = 0;
  std::vector<double> t;  // n^3 entries, index (i*n + j)*n + k

  double at(int i, int j, int k) const { return t[size_t(i * n + j) * n + k]; }
};

StructureConstants structure_constants(const ConeShape& shape);

}  // namespace copk
