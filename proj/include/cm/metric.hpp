#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cm/core.hpp"
#include "cm/affine.hpp"
#include "cm/quadratic.hpp"

// Metric structure on a referential, encoded by the hollow symmetric matrix D
// of pairwise squared pseudodistances: D(i,j) = d^2(R_i, R_j). No sign or
// rank assumption is made, so Euclidean, Lorentzian and degenerate cases are
// all legal.

namespace cm {

struct InertiaIndex {
  Index positivity = 0;
  Index negativity = 0;
  Index nullity = 0;

  friend bool operator==(const InertiaIndex& a, const InertiaIndex& b) {
    return a.positivity == b.positivity && a.negativity == b.negativity &&
           a.nullity == b.nullity;
  }
  friend bool operator!=(const InertiaIndex& a, const InertiaIndex& b) {
    return !(a == b);
  }
};

template <typename Scalar = double>
class Metric {
 public:
  explicit Metric(Mat<Scalar> d, const Tolerances<Scalar>& tol = {})
      : d_(std::move(d)) {
    if (d_.rows() != d_.cols() || d_.rows() < 1)
      throw DimensionMismatch("distance matrix must be square");
    Scalar t = tol.sym(detail::max_abs(d_));
    Scalar asym = detail::max_abs(d_ - d_.transpose());
    if (asym > t)
      throw InvariantViolation("distance matrix asymmetric by " +
                               std::to_string(asym));
    Scalar diag = detail::max_abs(d_.diagonal());
    if (diag > t)
      throw InvariantViolation("distance matrix diagonal reaches " +
                               std::to_string(diag) + ", expected 0");
    d_ = ((d_ + d_.transpose()) / Scalar(2)).eval();
    d_.diagonal().setZero();
  }

  const Mat<Scalar>& d_matrix() const { return d_; }
  Index dim() const { return d_.rows() - 1; }

 private:
  Mat<Scalar> d_;
};

// Distance data of the metric structure a quadratic function induces: its
// hollow reduction carries -1/4 of the squared-distance matrix.
template <typename Scalar>
Metric<Scalar> metric_of(const QuadFn<Scalar>& f,
                         const Tolerances<Scalar>& tol = {}) {
  return Metric<Scalar>(Scalar(-4) * reduce_at_referential(f, tol).coeffs(),
                        tol);
}

template <typename Scalar>
Scalar sq_pseudodistance(const Metric<Scalar>& m, const Weight<Scalar>& p,
                         const Weight<Scalar>& q) {
  if (m.dim() != p.dim() || m.dim() != q.dim())
    throw DimensionMismatch("metric and point sizes disagree");
  Vec<Scalar> x = q.entries() - p.entries();
  return Scalar(-0.5) * x.dot(m.d_matrix() * x);
}

// Half squared distance to p, as a quadratic function of the other argument.
template <typename Scalar>
QuadFn<Scalar> half_sq_fn_at(const Metric<Scalar>& m, const Weight<Scalar>& p,
                             const Tolerances<Scalar>& tol = {}) {
  if (m.dim() != p.dim())
    throw DimensionMismatch("metric and point sizes disagree");
  QuadFn<Scalar> quarter(Scalar(-0.25) * m.d_matrix(), tol);
  return homogenize_at(quarter, p, tol);
}

// Gram matrix of the displacements R_0 -> R_i in the induced inner product.
template <typename Scalar>
Mat<Scalar> hessian_restriction(const Metric<Scalar>& m) {
  Index n = m.dim();
  const Mat<Scalar>& d = m.d_matrix();
  Mat<Scalar> g(n, n);
  for (Index i = 1; i <= n; ++i)
    for (Index j = 1; j <= n; ++j)
      g(i - 1, j - 1) = (d(0, i) + d(0, j) - d(i, j)) / Scalar(2);
  return g;
}

template <typename Scalar>
InertiaIndex spectral_inertia(const Mat<Scalar>& sym, Scalar eig_tol) {
  InertiaIndex idx;
  if (sym.rows() == 0) return idx;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(sym,
                                                Eigen::EigenvaluesOnly);
  for (Index k = 0; k < sym.rows(); ++k) {
    Scalar lambda = es.eigenvalues()[k];
    if (std::abs(lambda) <= eig_tol)
      ++idx.nullity;
    else if (lambda > Scalar(0))
      ++idx.positivity;
    else
      ++idx.negativity;
  }
  return idx;
}

template <typename Scalar>
InertiaIndex inertia(const Metric<Scalar>& m,
                     const Tolerances<Scalar>& tol = {}) {
  Mat<Scalar> g = hessian_restriction(m);
  Scalar scale(0);
  if (g.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g, Eigen::EigenvaluesOnly);
    scale = detail::max_abs(es.eigenvalues());
  }
  return spectral_inertia(g, tol.eig(m.dim(), scale));
}

template <typename Scalar>
bool is_nondegenerate(const Metric<Scalar>& m,
                      const Tolerances<Scalar>& tol = {}) {
  return inertia(m, tol).nullity == 0;
}

// D bordered by the all-ones row and column; invertibility of this matrix is
// the determinant counterpart of non-degeneracy.
template <typename Scalar>
Mat<Scalar> bordered_matrix(const Metric<Scalar>& m) {
  Index k = m.dim() + 1;
  Mat<Scalar> b = Mat<Scalar>::Zero(k + 1, k + 1);
  b.topLeftCorner(k, k) = m.d_matrix();
  b.topRightCorner(k, 1).setOnes();
  b.bottomLeftCorner(1, k).setOnes();
  return b;
}

// Displacements whose inner product with every displacement vanishes,
// spanned by the near-null eigenvectors of the restricted Gram matrix lifted
// back to hollow coordinates.
template <typename Scalar>
std::vector<HollowVector<Scalar>> radical_basis(
    const Metric<Scalar>& m, const Tolerances<Scalar>& tol = {}) {
  Index n = m.dim();
  std::vector<HollowVector<Scalar>> basis;
  if (n == 0) return basis;
  Mat<Scalar> g = hessian_restriction(m);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g);
  Scalar t = tol.eig(n, detail::max_abs(es.eigenvalues()));
  for (Index k = 0; k < n; ++k) {
    if (std::abs(es.eigenvalues()[k]) > t) continue;
    Vec<Scalar> y = es.eigenvectors().col(k);
    Vec<Scalar> x(n + 1);
    x[0] = -y.sum();
    x.tail(n) = y;
    basis.push_back(HollowVector<Scalar>(std::move(x)));
  }
  return basis;
}

// Isometric coordinates in a diagonal pseudo-Euclidean space. Column i holds
// the image of R_i; R_0 sits at the origin, so column 0 is zero. sigma lists
// the axis signs, +1 first.
template <typename Scalar = double>
struct EmbedResult {
  Mat<Scalar> points;
  Vec<Scalar> sigma;
  InertiaIndex signature;

  Scalar sq_distance(Index i, Index j) const {
    Vec<Scalar> diff = points.col(i) - points.col(j);
    return diff.dot(sigma.asDiagonal() * diff);
  }
};

template <typename Scalar>
EmbedResult<Scalar> embed(const Metric<Scalar>& m,
                          const Tolerances<Scalar>& tol = {}) {
  Index n = m.dim();
  Mat<Scalar> g = hessian_restriction(m);
  EmbedResult<Scalar> out;
  if (n == 0) {
    out.points = Mat<Scalar>::Zero(0, 1);
    out.sigma = Vec<Scalar>(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g);
  Scalar t = tol.eig(n, detail::max_abs(es.eigenvalues()));
  std::vector<Index> kept;  // positive axes first, eigenvalues descending
  for (Index k = n - 1; k >= 0; --k)
    if (es.eigenvalues()[k] > t) kept.push_back(k);
  out.signature.positivity = static_cast<Index>(kept.size());
  for (Index k = 0; k < n; ++k)
    if (es.eigenvalues()[k] < -t) kept.push_back(k);
  out.signature.negativity =
      static_cast<Index>(kept.size()) - out.signature.positivity;
  out.signature.nullity = n - static_cast<Index>(kept.size());

  Index rank = static_cast<Index>(kept.size());
  out.points = Mat<Scalar>::Zero(rank, n + 1);
  out.sigma = Vec<Scalar>(rank);
  for (Index a = 0; a < rank; ++a) {
    Scalar lambda = es.eigenvalues()[kept[a]];
    out.sigma[a] = lambda > Scalar(0) ? Scalar(1) : Scalar(-1);
    out.points.row(a).tail(n) =
        std::sqrt(std::abs(lambda)) * es.eigenvectors().col(kept[a]).transpose();
  }
  return out;
}

// Metric induced on the source referential of an affine map: pairwise squared
// distances of the images of the source vertices.
template <typename Scalar>
Metric<Scalar> pullback_metric(const Metric<Scalar>& m,
                               const WeightMatrix<Scalar>& c,
                               const Tolerances<Scalar>& tol = {}) {
  if (c.target_dim() != m.dim())
    throw DimensionMismatch("map target and metric sizes disagree");
  Index nb = c.source_dim();
  Mat<Scalar> d = Mat<Scalar>::Zero(nb + 1, nb + 1);
  for (Index i = 0; i <= nb; ++i)
    for (Index j = i + 1; j <= nb; ++j)
      d(i, j) = d(j, i) = sq_pseudodistance(m, c.column(i), c.column(j));
  return Metric<Scalar>(std::move(d), tol);
}

}  // namespace cm
