#pragma once

#include <string>
#include <vector>

#include "cm/core.hpp"

// Points, displacements and affine functions over a referential of n+1
// points, all in barycentric coordinates. A point is a weight vector whose
// entries sum to 1; a displacement is a hollow vector summing to 0; an affine
// function is a coefficient row acting by the dot product, defined up to a
// multiple of the all-ones row.

namespace cm {

template <typename Scalar = double>
class Weight {
 public:
  explicit Weight(Vec<Scalar> entries, const Tolerances<Scalar>& tol = {})
      : entries_(std::move(entries)) {
    if (entries_.size() < 1)
      throw DimensionMismatch("weight needs at least one entry");
    Scalar s = entries_.sum();
    if (std::abs(s - Scalar(1)) > tol.sum(detail::max_abs(entries_)))
      throw InvariantViolation("weight entries sum to " + std::to_string(s) +
                               ", expected 1");
  }

  static Weight vertex(Index n, Index i) {
    Vec<Scalar> e = Vec<Scalar>::Zero(n + 1);
    e[i] = Scalar(1);
    return Weight(std::move(e));
  }

  const Vec<Scalar>& entries() const { return entries_; }
  Index dim() const { return entries_.size() - 1; }
  Scalar operator[](Index i) const { return entries_[i]; }

 private:
  struct unchecked_tag {};
  Weight(Vec<Scalar> entries, unchecked_tag) : entries_(std::move(entries)) {}

  template <typename S>
  friend Weight<S> weight_unchecked(Vec<S> entries);

  Vec<Scalar> entries_;
};

// Construction bypass for values that sum to 1 by construction; the invariant
// still holds, it is just not re-verified.
template <typename Scalar>
Weight<Scalar> weight_unchecked(Vec<Scalar> entries) {
  eigen_assert(std::abs(entries.sum() - Scalar(1)) <
               Scalar(1e-6) * (Scalar(1) + detail::max_abs(entries)));
  return Weight<Scalar>(std::move(entries),
                        typename Weight<Scalar>::unchecked_tag{});
}

template <typename Scalar = double>
class HollowVector {
 public:
  explicit HollowVector(Vec<Scalar> entries,
                        const Tolerances<Scalar>& tol = {})
      : entries_(std::move(entries)) {
    if (entries_.size() < 1)
      throw DimensionMismatch("hollow vector needs at least one entry");
    Scalar s = entries_.sum();
    if (std::abs(s) > tol.sum(detail::max_abs(entries_)))
      throw InvariantViolation("hollow vector entries sum to " +
                               std::to_string(s) + ", expected 0");
  }

  const Vec<Scalar>& entries() const { return entries_; }
  Index dim() const { return entries_.size() - 1; }
  Scalar operator[](Index i) const { return entries_[i]; }

 private:
  Vec<Scalar> entries_;
};

// Affine function given by a coefficient row; the value at a point is the dot
// product with its weights. Rows differing by a multiple of the all-ones row
// act identically on weights.
template <typename Scalar = double>
class AffineFunction {
 public:
  explicit AffineFunction(RowVec<Scalar> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1)
      throw DimensionMismatch("affine function needs at least one coefficient");
  }

  const RowVec<Scalar>& coeffs() const { return coeffs_; }
  Index dim() const { return coeffs_.size() - 1; }

 private:
  RowVec<Scalar> coeffs_;
};

// Canonical (sum-zero) representative of an affine function modulo constants.
// Pairs with displacements; the pairing is insensitive to the representative.
template <typename Scalar = double>
class Covector {
 public:
  explicit Covector(RowVec<Scalar> coeffs, const Tolerances<Scalar>& tol = {})
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1)
      throw DimensionMismatch("covector needs at least one coefficient");
    Scalar s = coeffs_.sum();
    if (std::abs(s) > tol.sum(detail::max_abs(coeffs_)))
      throw InvariantViolation("covector coefficients sum to " +
                               std::to_string(s) + ", expected 0");
  }

  const RowVec<Scalar>& coeffs() const { return coeffs_; }
  Index dim() const { return coeffs_.size() - 1; }

 private:
  RowVec<Scalar> coeffs_;
};

// Affine map between referentials, stored as the matrix sending source
// vertices to target points: every column is a weight.
template <typename Scalar = double>
class WeightMatrix {
 public:
  explicit WeightMatrix(Mat<Scalar> m, const Tolerances<Scalar>& tol = {})
      : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.cols() < 1)
      throw DimensionMismatch("weight matrix must be nonempty");
    Scalar t = tol.sum(detail::max_abs(m_));
    for (Index j = 0; j < m_.cols(); ++j) {
      Scalar s = m_.col(j).sum();
      if (std::abs(s - Scalar(1)) > t)
        throw ColumnSumError(j, static_cast<double>(s));
    }
  }

  static WeightMatrix identity(Index n) {
    return WeightMatrix(Mat<Scalar>::Identity(n + 1, n + 1));
  }

  const Mat<Scalar>& matrix() const { return m_; }
  Index source_dim() const { return m_.cols() - 1; }
  Index target_dim() const { return m_.rows() - 1; }
  Weight<Scalar> column(Index j) const {
    return weight_unchecked<Scalar>(m_.col(j));
  }

 private:
  Mat<Scalar> m_;
};

template <typename Scalar>
Weight<Scalar> bary_combine(const std::vector<Weight<Scalar>>& points,
                            const Weight<Scalar>& w) {
  if (points.empty()) throw DimensionMismatch("no points to combine");
  if (w.dim() + 1 != static_cast<Index>(points.size()))
    throw DimensionMismatch("combination weight has " +
                            std::to_string(w.dim() + 1) + " entries for " +
                            std::to_string(points.size()) + " points");
  Vec<Scalar> acc = Vec<Scalar>::Zero(points[0].entries().size());
  for (size_t k = 0; k < points.size(); ++k) {
    if (points[k].entries().size() != acc.size())
      throw DimensionMismatch("points live in different referentials");
    acc += w[static_cast<Index>(k)] * points[k].entries();
  }
  return weight_unchecked<Scalar>(std::move(acc));
}

template <typename Scalar>
HollowVector<Scalar> vector_between(const Weight<Scalar>& p,
                                    const Weight<Scalar>& q) {
  if (p.dim() != q.dim())
    throw DimensionMismatch("points live in different referentials");
  return HollowVector<Scalar>(q.entries() - p.entries());
}

// Point reached from `center` by the displacement carrying `center` to `q`,
// applied backwards: the reflection 2*center - q.
template <typename Scalar>
Weight<Scalar> invert_point(const Weight<Scalar>& center,
                            const Weight<Scalar>& q) {
  if (center.dim() != q.dim())
    throw DimensionMismatch("points live in different referentials");
  return weight_unchecked<Scalar>(Scalar(2) * center.entries() - q.entries());
}

template <typename Scalar>
Scalar affine_eval(const AffineFunction<Scalar>& f, const Weight<Scalar>& p) {
  if (f.dim() != p.dim())
    throw DimensionMismatch("function and point sizes disagree");
  return f.coeffs() * p.entries();
}

namespace detail {

template <typename Scalar>
RowVec<Scalar> mean_centered(const RowVec<Scalar>& row) {
  return row.array() - row.mean();
}

}  // namespace detail

// Differential of an affine function: the sum-zero representative of its
// coefficient row modulo constants.
template <typename Scalar>
Covector<Scalar> differential(const AffineFunction<Scalar>& f) {
  return Covector<Scalar>(detail::mean_centered(f.coeffs()));
}

template <typename Scalar>
Scalar pairing(const Covector<Scalar>& c, const HollowVector<Scalar>& x) {
  if (c.dim() != x.dim())
    throw DimensionMismatch("covector and displacement sizes disagree");
  return c.coeffs() * x.entries();
}

template <typename Scalar>
Weight<Scalar> apply_map(const WeightMatrix<Scalar>& c,
                         const Weight<Scalar>& p) {
  if (c.source_dim() != p.dim())
    throw DimensionMismatch("map source and point sizes disagree");
  return weight_unchecked<Scalar>(c.matrix() * p.entries());
}

template <typename Scalar>
WeightMatrix<Scalar> compose(const WeightMatrix<Scalar>& outer,
                             const WeightMatrix<Scalar>& inner) {
  if (outer.source_dim() != inner.target_dim())
    throw DimensionMismatch("map composition sizes disagree");
  return WeightMatrix<Scalar>(outer.matrix() * inner.matrix());
}

}  // namespace cm
