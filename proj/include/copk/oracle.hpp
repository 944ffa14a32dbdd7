#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "copk/combinat.hpp"
#include "copk/frames.hpp"
#include "copk/jordan.hpp"

namespace copk {

// Deterministic random source: fixed engine and fixed mappings to doubles, so
// results are reproducible across platforms for a given seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform();   // [0, 1)
  double gaussian();  // standard normal

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform sample from the solid body {x in K : e.x <= 1} (positive weights on
// the orthant and cone-head coordinates, ball-radius tail).
Eigen::VectorXd sample_body_point(const ConeShape& shape, Rng& rng);

struct SampleResult {
  double min_value = 0.0;
  Eigen::VectorXd argmin;
};

// Minimum of x' A x over random body points.
SampleResult sample_cone_min(const Eigen::MatrixXd& A, const ConeShape& shape, long samples,
                             uint64_t seed);

struct GridResult {
  double min_value = 0.0;              // min u' A u over the net
  double max_abs_frame = 0.0;          // max |c_i' A c_j| over the net frames
  Eigen::VectorXd argmin;              // minimizing cone point (length n)
  std::vector<Rational> argmin_x;      // its frame coordinates, exact
  Eigen::VectorXd argmin_v;            // its direction (length n2-1)
  bool argmin_axis_direction = false;  // direction is +-(coordinate axis)
};

// Deterministic screen over the frame-coordinate grid {alpha/k} and a fixed
// direction net (coordinate axes plus seeded extras).
GridResult grid_cone_min(const Eigen::MatrixXd& A, const ConeShape& shape, int k,
                         int directions = 64);

// Exact value of u' A u for a rational point (doubles in A convert exactly).
Rational exact_quadratic_value(const Eigen::MatrixXd& A, const std::vector<Rational>& u);

// Global minimum of m11 + 2 m21.v + v' m22 v over unit vectors v, via the
// boundary trust-region characterization.  Optionally returns a minimizer.
double sphere_quadratic_min(double m11, const Eigen::VectorXd& m21, const Eigen::MatrixXd& m22,
                            Eigen::VectorXd* argmin = nullptr);

// Sphere minimum for a lifted block; the block constraint
// "exists t: [[m11 - t, m21'], [m21, m22 + t I]] psd" holds iff this is >= 0.
double lifted_block_min(const BlockM& b, Eigen::VectorXd* argmin = nullptr);

struct MomentCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
  Eigen::VectorXd witness;  // eigenvector attaining the minimal eigenvalue
};

// Audit of a candidate moment table: forms the matrix X_{alpha+beta} over
// all |alpha|, |beta| <= m and eigen-checks it.
MomentCheck dual_moment_check(const std::map<MultiIndex, double, MiLess>& X, int n, int m,
                              double tol = 1e-9);

// Monte Carlo moment of x^alpha over {x in K : e.x <= 1} by rejection from the
// bounding box; runs until `accepted_target` points are accepted.
double mc_moment_box(const MultiIndex& alpha, const ConeShape& shape, long accepted_target,
                     uint64_t seed);

// Search for an explicit cone point u with u' A u < -tol using the grid
// family: scan grid points, minimize over directions per point.
struct Refutation {
  bool found = false;
  std::vector<Rational> point;  // frame coordinates
  Eigen::VectorXd direction;
  Eigen::VectorXd witness;  // cone point (length n)
  double value = 0.0;       // witness' A witness (numeric)
  bool exact = false;       // sign certified in exact rational arithmetic
};
Refutation find_refutation(const Eigen::MatrixXd& A, const ConeShape& shape, int r,
                           double tol = 1e-9);

}  // namespace copk
