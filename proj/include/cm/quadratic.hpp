#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cm/affine.hpp"
#include "cm/core.hpp"

// Quadratic functions and quadratic maps on weights. A quadratic function is
// p -> p^T D p for a symmetric coefficient matrix D over the referential; on
// points of a given referential this is the most general function whose
// restriction to every line is degree <= 2. Quadratic maps replace the scalar
// coefficients by target weights, one per referential pair.

namespace cm {

template <typename Scalar = double>
class QuadFn {
 public:
  // Accepts any matrix within the symmetry tolerance and stores the symmetric
  // part, so downstream algebra can rely on exact symmetry.
  explicit QuadFn(Mat<Scalar> coeffs, const Tolerances<Scalar>& tol = {})
      : m_(std::move(coeffs)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw DimensionMismatch("quadratic coefficient matrix must be square");
    Scalar asym = detail::max_abs(m_ - m_.transpose());
    if (asym > tol.sym(detail::max_abs(m_)))
      throw InvariantViolation("coefficient matrix asymmetric by " +
                               std::to_string(asym));
    m_ = ((m_ + m_.transpose()) / Scalar(2)).eval();
  }

  const Mat<Scalar>& coeffs() const { return m_; }
  Index dim() const { return m_.rows() - 1; }

 private:
  Mat<Scalar> m_;
};

template <typename Scalar>
Scalar quad_eval(const QuadFn<Scalar>& f, const Weight<Scalar>& p) {
  if (f.dim() != p.dim())
    throw DimensionMismatch("quadratic function and point sizes disagree");
  return p.entries().dot(f.coeffs() * p.entries());
}

// Recover the quadratic function from its values at vertices and edge
// midpoints: S(i,j) holds the value at the midpoint of R_i and R_j, so the
// diagonal holds vertex values.
template <typename Scalar>
QuadFn<Scalar> from_midpoint_values(const Mat<Scalar>& s,
                                    const Tolerances<Scalar>& tol = {}) {
  if (s.rows() != s.cols() || s.rows() < 1)
    throw DimensionMismatch("midpoint value grid must be square");
  Scalar asym = detail::max_abs(s - s.transpose());
  if (asym > tol.sym(detail::max_abs(s)))
    throw InvariantViolation("midpoint value grid asymmetric by " +
                             std::to_string(asym));
  RowVec<Scalar> d = s.diagonal().transpose();
  Mat<Scalar> delta = Scalar(2) * s;
  delta.rowwise() -= d / Scalar(2);
  delta.colwise() -= d.transpose() / Scalar(2);
  return QuadFn<Scalar>(std::move(delta), tol);
}

// Conjugation that re-centers the function at p: the result vanishes to first
// order at p and evaluates to (q-p)^T D (q-p) at any point q.
template <typename Scalar>
QuadFn<Scalar> homogenize_at(const QuadFn<Scalar>& f, const Weight<Scalar>& p,
                             const Tolerances<Scalar>& tol = {}) {
  if (f.dim() != p.dim())
    throw DimensionMismatch("quadratic function and point sizes disagree");
  Index k = f.dim() + 1;
  Mat<Scalar> shift =
      Mat<Scalar>::Identity(k, k) - p.entries() * RowVec<Scalar>::Ones(k);
  return QuadFn<Scalar>(shift.transpose() * f.coeffs() * shift, tol);
}

// Subtract the affine function interpolating the vertex values; the result is
// hollow (zero diagonal) and shares the quadratic part.
template <typename Scalar>
QuadFn<Scalar> reduce_at_referential(const QuadFn<Scalar>& f,
                                     const Tolerances<Scalar>& tol = {}) {
  RowVec<Scalar> d = f.coeffs().diagonal().transpose();
  Mat<Scalar> delta = f.coeffs();
  delta.rowwise() -= d / Scalar(2);
  delta.colwise() -= d.transpose() / Scalar(2);
  return QuadFn<Scalar>(std::move(delta), tol);
}

template <typename Scalar>
Covector<Scalar> gradient_at(const QuadFn<Scalar>& f, const Weight<Scalar>& p,
                             const Tolerances<Scalar>& tol = {}) {
  if (f.dim() != p.dim())
    throw DimensionMismatch("quadratic function and point sizes disagree");
  RowVec<Scalar> g = Scalar(2) * p.entries().transpose() * f.coeffs();
  return Covector<Scalar>(detail::mean_centered(g), tol);
}

// Second-order pairing of two displacements; independent of base point.
template <typename Scalar>
Scalar hessian_pair(const QuadFn<Scalar>& f, const HollowVector<Scalar>& x,
                    const HollowVector<Scalar>& y) {
  if (f.dim() != x.dim() || f.dim() != y.dim())
    throw DimensionMismatch("quadratic function and displacement sizes disagree");
  return Scalar(2) * x.entries().dot(f.coeffs() * y.entries());
}

// Affine functions are quadratic: symmetrize the rank-one coefficient layout.
template <typename Scalar>
QuadFn<Scalar> from_affine(const AffineFunction<Scalar>& f) {
  Index k = f.dim() + 1;
  Mat<Scalar> delta = (Vec<Scalar>::Ones(k) * f.coeffs() +
                       f.coeffs().transpose() * RowVec<Scalar>::Ones(k)) /
                      Scalar(2);
  return QuadFn<Scalar>(std::move(delta));
}

// Field of covectors depending affinely on the base point: the value at p is
// the class of the row p^T F. Canonical storage makes every row sum to zero,
// which pins one representative per class.
template <typename Scalar = double>
class CovectorField {
 public:
  explicit CovectorField(Mat<Scalar> f) : f_(std::move(f)) {
    if (f_.rows() != f_.cols() || f_.rows() < 1)
      throw DimensionMismatch("covector field matrix must be square");
    for (Index i = 0; i < f_.rows(); ++i)
      f_.row(i) = detail::mean_centered<Scalar>(f_.row(i)).eval();
  }

  const Mat<Scalar>& matrix() const { return f_; }
  Index dim() const { return f_.rows() - 1; }

 private:
  Mat<Scalar> f_;
};

template <typename Scalar>
Covector<Scalar> value_at(const CovectorField<Scalar>& field,
                          const Weight<Scalar>& p,
                          const Tolerances<Scalar>& tol = {}) {
  if (field.dim() != p.dim())
    throw DimensionMismatch("field and point sizes disagree");
  return Covector<Scalar>(p.entries().transpose() * field.matrix(), tol);
}

template <typename Scalar>
CovectorField<Scalar> field_of(const QuadFn<Scalar>& f) {
  return CovectorField<Scalar>(Scalar(2) * f.coeffs());
}

// A field is a gradient field iff its pairing is symmetric on displacements.
// Checked on the displacement basis R_0 -> R_i.
template <typename Scalar>
bool is_closed(const CovectorField<Scalar>& field,
               const Tolerances<Scalar>& tol = {}) {
  Index n = field.dim();
  if (n <= 1) return true;
  const Mat<Scalar>& f = field.matrix();
  Scalar t = tol.sym(detail::max_abs(f));
  for (Index i = 1; i <= n; ++i) {
    for (Index j = i + 1; j <= n; ++j) {
      Scalar ij = f(i, j) - f(0, j) - f(i, 0) + f(0, 0);
      Scalar ji = f(j, i) - f(0, i) - f(j, 0) + f(0, 0);
      if (std::abs(ij - ji) > t) return false;
    }
  }
  return true;
}

// Primitive of a closed field, normalized to vanish at R_0. The value at p is
// the line integral from R_0, exact for affine integrands: the mean of the
// field at the endpoints paired with the displacement. Sampling vertices and
// midpoints then pins the quadratic function.
template <typename Scalar>
QuadFn<Scalar> potential(const CovectorField<Scalar>& field,
                         const Tolerances<Scalar>& tol = {}) {
  if (!is_closed(field, tol))
    throw NotClosed("field pairing is asymmetric on displacements");
  Index n = field.dim();
  const Mat<Scalar>& f = field.matrix();
  auto integral = [&](const Vec<Scalar>& p) -> Scalar {
    RowVec<Scalar> mean_row = (f.row(0) + p.transpose() * f) / Scalar(2);
    Vec<Scalar> step = p;
    step[0] -= Scalar(1);
    return mean_row * step;
  };
  Mat<Scalar> s(n + 1, n + 1);
  for (Index i = 0; i <= n; ++i) {
    for (Index j = i; j <= n; ++j) {
      Vec<Scalar> mid = Vec<Scalar>::Zero(n + 1);
      mid[i] += Scalar(0.5);
      mid[j] += Scalar(0.5);
      s(i, j) = s(j, i) = integral(mid);
    }
  }
  return from_midpoint_values(s, tol);
}

// Quadratic map: one target weight per referential pair, evaluated by the
// same coefficient contraction as the scalar case. Stored as a block matrix
// whose column i*(n+1)+j is the weight attached to the pair (i, j).
template <typename Scalar = double>
class QuadMap {
 public:
  QuadMap(Index source_dim, Index target_dim, Mat<Scalar> blocks,
          const Tolerances<Scalar>& tol = {})
      : n_(source_dim), m_(target_dim), blocks_(std::move(blocks)) {
    if (n_ < 0 || m_ < 0 || blocks_.rows() != m_ + 1 ||
        blocks_.cols() != (n_ + 1) * (n_ + 1))
      throw DimensionMismatch("quadratic map block layout is wrong");
    Scalar scale = detail::max_abs(blocks_);
    Scalar t_sum = tol.sum(scale);
    Scalar t_sym = tol.sym(scale);
    for (Index i = 0; i <= n_; ++i) {
      for (Index j = 0; j <= n_; ++j) {
        Scalar s = blocks_.col(i * (n_ + 1) + j).sum();
        if (std::abs(s - Scalar(1)) > t_sum)
          throw InvariantViolation("coefficient (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ") sums to " +
                                   std::to_string(s) + ", expected 1");
        if (detail::max_abs(blocks_.col(i * (n_ + 1) + j) -
                            blocks_.col(j * (n_ + 1) + i)) > t_sym)
          throw InvariantViolation("coefficient grid asymmetric at (" +
                                   std::to_string(i) + ", " +
                                   std::to_string(j) + ")");
      }
    }
  }

  Index source_dim() const { return n_; }
  Index target_dim() const { return m_; }

  Weight<Scalar> coefficient(Index i, Index j) const {
    return weight_unchecked<Scalar>(blocks_.col(i * (n_ + 1) + j));
  }

  // The output weight invariant holds by construction (the contraction
  // coefficients sum to 1), so it is only asserted, not re-validated.
  Weight<Scalar> eval(const Weight<Scalar>& p) const {
    if (p.dim() != n_)
      throw DimensionMismatch("quadratic map and point sizes disagree");
    Vec<Scalar> acc = Vec<Scalar>::Zero(m_ + 1);
    for (Index i = 0; i <= n_; ++i)
      for (Index j = 0; j <= n_; ++j)
        acc += p[i] * p[j] * blocks_.col(i * (n_ + 1) + j);
    return weight_unchecked<Scalar>(std::move(acc));
  }

 private:
  Index n_, m_;
  Mat<Scalar> blocks_;
};

// Vector-valued analogue of from_midpoint_values: the grid holds target
// points sampled at vertices and midpoints, and the same combination (an
// affine one, so weights stay weights) recovers the map coefficients.
template <typename Scalar>
QuadMap<Scalar> from_midpoint_values_map(
    const std::vector<std::vector<Weight<Scalar>>>& s,
    const Tolerances<Scalar>& tol = {}) {
  Index k = static_cast<Index>(s.size());
  if (k < 1) throw DimensionMismatch("midpoint grid must be nonempty");
  Index n = k - 1;
  Index m = s[0][0].dim();
  for (const auto& row : s) {
    if (static_cast<Index>(row.size()) != k)
      throw DimensionMismatch("midpoint grid must be square");
    for (const auto& w : row)
      if (w.dim() != m)
        throw DimensionMismatch("grid targets live in different referentials");
  }
  Scalar scale(0);
  for (Index i = 0; i <= n; ++i)
    for (Index j = 0; j <= n; ++j)
      scale = std::max(scale, detail::max_abs(s[i][j].entries()));
  Scalar t = tol.sym(scale);
  Mat<Scalar> blocks(m + 1, k * k);
  for (Index i = 0; i <= n; ++i) {
    for (Index j = 0; j <= n; ++j) {
      if (detail::max_abs(s[i][j].entries() - s[j][i].entries()) > t)
        throw InvariantViolation("midpoint grid asymmetric at (" +
                                 std::to_string(i) + ", " + std::to_string(j) +
                                 ")");
      Vec<Scalar> block = Scalar(2) * s[i][j].entries() -
                          (s[i][i].entries() + s[j][j].entries()) / Scalar(2);
      Weight<Scalar>(block, tol);  // combination must land on a weight
      blocks.col(i * k + j) = block;
    }
  }
  return QuadMap<Scalar>(n, m, std::move(blocks), tol);
}

}  // namespace cm
