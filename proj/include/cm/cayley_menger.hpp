#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cm/core.hpp"
#include "cm/affine.hpp"
#include "cm/metric.hpp"

// The pairing form of a metric referential on the space spanned by the point
// evaluations v_{R_i} and the constant functional v_m. Its matrix borders
// D/2 with ones; quadratic functions compatible with the metric sit on the
// isotropic slice cut out by this form.

namespace cm {

// Coordinates of a functional in the basis (v_{R_0}, ..., v_{R_n}, v_m).
template <typename Scalar = double>
class Functional {
 public:
  explicit Functional(Vec<Scalar> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2)
      throw DimensionMismatch("functional needs point and constant parts");
  }

  const Vec<Scalar>& coords() const { return coords_; }
  Index dim() const { return coords_.size() - 2; }
  // Point block and constant coefficient.
  auto point_part() const { return coords_.head(coords_.size() - 1); }
  Scalar constant_part() const { return coords_[coords_.size() - 1]; }

 private:
  Vec<Scalar> coords_;
};

// A function in the pairing hull, recorded by its pairings against the basis
// functionals rather than by coefficients. For a genuine quadratic function
// the first entries are its referential values and the last entry is 1.
template <typename Scalar = double>
class HullElement {
 public:
  explicit HullElement(Vec<Scalar> values) : values_(std::move(values)) {
    if (values_.size() < 2)
      throw DimensionMismatch("hull element needs point and constant parts");
  }

  const Vec<Scalar>& values() const { return values_; }
  Index dim() const { return values_.size() - 2; }

 private:
  Vec<Scalar> values_;
};

template <typename Scalar = double>
class CMForm {
 public:
  explicit CMForm(const Metric<Scalar>& m, const Tolerances<Scalar>& tol = {})
      : metric_(m) {
    Index k = m.dim() + 1;
    matrix_ = Mat<Scalar>::Zero(k + 1, k + 1);
    matrix_.topLeftCorner(k, k) = m.d_matrix() / Scalar(2);
    matrix_.topRightCorner(k, 1).setOnes();
    matrix_.bottomLeftCorner(1, k).setOnes();
    lu_.compute(matrix_);
    Scalar min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    singular_ = min_pivot < tol.pivot(detail::max_abs(matrix_));
  }

  const Mat<Scalar>& matrix() const { return matrix_; }
  const Metric<Scalar>& metric() const { return metric_; }
  Index dim() const { return metric_.dim(); }
  bool invertible() const { return !singular_; }

  Vec<Scalar> solve(const Vec<Scalar>& rhs) const {
    if (singular_)
      throw SingularCM("pairing form is singular, the metric is degenerate");
    if (rhs.size() != matrix_.rows())
      throw DimensionMismatch("right-hand side and form sizes disagree");
    return lu_.solve(rhs);
  }

 private:
  Metric<Scalar> metric_;
  Mat<Scalar> matrix_;
  Eigen::PartialPivLU<Mat<Scalar>> lu_;
  bool singular_ = false;
};

template <typename Scalar>
CMForm<Scalar> cm_matrix(const Metric<Scalar>& m,
                         const Tolerances<Scalar>& tol = {}) {
  return CMForm<Scalar>(m, tol);
}

template <typename Scalar>
Scalar cm_pair(const CMForm<Scalar>& form, const Functional<Scalar>& f1,
               const Functional<Scalar>& f2) {
  if (f1.dim() != form.dim() || f2.dim() != form.dim())
    throw DimensionMismatch("functional and form sizes disagree");
  return f1.coords().dot(form.matrix() * f2.coords());
}

// Pairing hull image of a functional: its value row against the basis.
template <typename Scalar>
HullElement<Scalar> cm_apply(const CMForm<Scalar>& form,
                             const Functional<Scalar>& f) {
  if (f.dim() != form.dim())
    throw DimensionMismatch("functional and form sizes disagree");
  return HullElement<Scalar>(form.matrix() * f.coords());
}

// Inverse conversion; only available when the form is invertible.
template <typename Scalar>
Functional<Scalar> cm_solve(const CMForm<Scalar>& form,
                            const HullElement<Scalar>& h) {
  if (h.dim() != form.dim())
    throw DimensionMismatch("hull element and form sizes disagree");
  return Functional<Scalar>(form.solve(h.values()));
}

template <typename Scalar>
Scalar cm_inverse_pair(const CMForm<Scalar>& form, const HullElement<Scalar>& h1,
                       const HullElement<Scalar>& h2) {
  if (h1.dim() != form.dim() || h2.dim() != form.dim())
    throw DimensionMismatch("hull element and form sizes disagree");
  return h1.values().dot(form.solve(h2.values()));
}

// Point evaluation functional. The constant coefficient is forced by the
// isotropy of point evaluations, no solve involved.
template <typename Scalar>
Functional<Scalar> v_of_point(const Metric<Scalar>& m,
                              const Weight<Scalar>& p) {
  if (m.dim() != p.dim())
    throw DimensionMismatch("metric and point sizes disagree");
  Vec<Scalar> dp = m.d_matrix() * p.entries();
  Vec<Scalar> coords(m.dim() + 2);
  coords.head(m.dim() + 1) = p.entries();
  coords[m.dim() + 1] = Scalar(-0.25) * p.entries().dot(dp);
  return Functional<Scalar>(std::move(coords));
}

// Half squared distances from the referential points to p; the referential
// value row of the half-square function at p.
template <typename Scalar>
Vec<Scalar> cm_coordinates(const Metric<Scalar>& m, const Weight<Scalar>& p) {
  if (m.dim() != p.dim())
    throw DimensionMismatch("metric and point sizes disagree");
  Vec<Scalar> dp = m.d_matrix() * p.entries();
  Scalar pdp = p.entries().dot(dp);
  return (dp / Scalar(2)).array() - pdp / Scalar(4);
}

template <typename Scalar = double>
struct LocalizeResult {
  Weight<Scalar> point;
  Scalar beta;
  // Inverse pairing of the padded value row with itself; zero exactly when
  // the values are the half squared distances of an actual point.
  Scalar residual;
};

template <typename Scalar>
LocalizeResult<Scalar> localize(const CMForm<Scalar>& form,
                                const Vec<Scalar>& delta,
                                const Tolerances<Scalar>& tol = {}) {
  Index k = form.dim() + 1;
  if (delta.size() != k)
    throw DimensionMismatch("value row and form sizes disagree");
  Vec<Scalar> h(k + 1);
  h.head(k) = delta;
  h[k] = Scalar(1);
  Vec<Scalar> y = form.solve(h);
  return LocalizeResult<Scalar>{Weight<Scalar>(y.head(k).eval(), tol), y[k],
                                h.dot(y)};
}

template <typename Scalar>
LocalizeResult<Scalar> localize(const Metric<Scalar>& m,
                                const Vec<Scalar>& delta,
                                const Tolerances<Scalar>& tol = {}) {
  return localize(CMForm<Scalar>(m, tol), delta, tol);
}

template <typename Scalar = double>
struct SphereFitResult {
  Weight<Scalar> center;
  // Signed: negative when the best sphere through the values is imaginary.
  Scalar r_squared;
};

// Center and squared radius of the sphere with the given referential value
// row of half squared distances minus half the squared radius.
template <typename Scalar>
SphereFitResult<Scalar> sphere_fit(const CMForm<Scalar>& form,
                                   const Vec<Scalar>& values,
                                   const Tolerances<Scalar>& tol = {}) {
  Index k = form.dim() + 1;
  if (values.size() != k)
    throw DimensionMismatch("value row and form sizes disagree");
  Vec<Scalar> h(k + 1);
  h.head(k) = values;
  h[k] = Scalar(1);
  Scalar r2 = -h.dot(form.solve(h));
  Vec<Scalar> delta = values.array() + r2 / Scalar(2);
  LocalizeResult<Scalar> loc = localize(form, delta, tol);
  return SphereFitResult<Scalar>{std::move(loc.point), r2};
}

template <typename Scalar>
SphereFitResult<Scalar> sphere_fit(const Metric<Scalar>& m,
                                   const Vec<Scalar>& values,
                                   const Tolerances<Scalar>& tol = {}) {
  return sphere_fit(CMForm<Scalar>(m, tol), values, tol);
}

// A functional is (the dual of) a genuine metric quadratic function iff it is
// isotropic and normalized against the constant functional.
template <typename Scalar>
bool quadric_test(const CMForm<Scalar>& form, const Functional<Scalar>& f,
                  const Tolerances<Scalar>& tol = {}) {
  if (f.dim() != form.dim())
    throw DimensionMismatch("functional and form sizes disagree");
  Scalar t = tol.quadric(detail::max_abs(form.metric().d_matrix()));
  Scalar self = cm_pair(form, f, f);
  Scalar unit = f.point_part().sum();
  return std::abs(self) <= t && std::abs(unit - Scalar(1)) <= t;
}

template <typename Scalar>
InertiaIndex cm_signature(const CMForm<Scalar>& form,
                          const Tolerances<Scalar>& tol = {}) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(form.matrix(),
                                                Eigen::EigenvaluesOnly);
  Scalar scale = detail::max_abs(es.eigenvalues());
  return spectral_inertia(form.matrix(),
                          tol.eig(form.matrix().rows(), scale));
}

// Matrix transporting functionals along an affine map: point evaluations go
// to point evaluations of the image points, the constant goes to the
// constant. Column j is v_of_point at the image of source vertex j.
template <typename Scalar>
Mat<Scalar> pushforward_matrix(const Metric<Scalar>& m,
                               const WeightMatrix<Scalar>& c) {
  if (c.target_dim() != m.dim())
    throw DimensionMismatch("map target and metric sizes disagree");
  Index ka = m.dim() + 1;
  Index kb = c.source_dim() + 1;
  Mat<Scalar> t = Mat<Scalar>::Zero(ka + 1, kb + 1);
  t.topLeftCorner(ka, kb) = c.matrix();
  for (Index j = 0; j < kb; ++j) {
    Vec<Scalar> img = c.matrix().col(j);
    t(ka, j) = Scalar(-0.25) * img.dot(m.d_matrix() * img);
  }
  t(ka, kb) = Scalar(1);
  return t;
}

template <typename Scalar = double>
struct FunctorialityResult {
  CMForm<Scalar> pulled_form;
  Mat<Scalar> transport;
  // Largest entry of the difference between the pulled-back form and the
  // transported one; zero in exact arithmetic.
  Scalar defect;
};

template <typename Scalar>
FunctorialityResult<Scalar> functoriality_check(
    const Metric<Scalar>& m, const WeightMatrix<Scalar>& c,
    const Tolerances<Scalar>& tol = {}) {
  CMForm<Scalar> ma(m, tol);
  CMForm<Scalar> mb(pullback_metric(m, c, tol), tol);
  Mat<Scalar> t = pushforward_matrix(m, c);
  Scalar defect =
      detail::max_abs(mb.matrix() - t.transpose() * ma.matrix() * t);
  return FunctorialityResult<Scalar>{std::move(mb), std::move(t), defect};
}

template <typename Scalar = double>
struct HyperbolicSplit {
  // Decomposition f = alpha * (constant functional) + beta * (evaluation at
  // the base point) + derivative lift of the direction.
  Scalar alpha;
  Scalar beta;
  HollowVector<Scalar> direction;
};

template <typename Scalar>
HyperbolicSplit<Scalar> hyperbolic_split(const Metric<Scalar>& m,
                                         const Functional<Scalar>& f,
                                         const Weight<Scalar>& q) {
  if (f.dim() != m.dim() || q.dim() != m.dim())
    throw DimensionMismatch("metric, functional and base point sizes disagree");
  Index k = m.dim() + 1;
  Vec<Scalar> c = f.coords().head(k);
  Scalar beta = c.sum();
  Vec<Scalar> x = c - beta * q.entries();
  Scalar alpha = c.dot(cm_coordinates(m, q)) + f.constant_part();
  return HyperbolicSplit<Scalar>{alpha, beta,
                                 HollowVector<Scalar>(std::move(x))};
}

// Inverse of hyperbolic_split at the same base point.
template <typename Scalar>
Functional<Scalar> from_split(const Metric<Scalar>& m, const Weight<Scalar>& q,
                              const HyperbolicSplit<Scalar>& split) {
  if (q.dim() != m.dim() || split.direction.dim() != m.dim())
    throw DimensionMismatch("metric, base point and direction sizes disagree");
  Index k = m.dim() + 1;
  Vec<Scalar> dq = m.d_matrix() * q.entries();
  Vec<Scalar> coords(k + 1);
  coords.head(k) = split.beta * q.entries() + split.direction.entries();
  coords[k] = split.alpha +
              split.beta * Scalar(-0.25) * q.entries().dot(dq) +
              Scalar(-0.5) * dq.dot(split.direction.entries());
  return Functional<Scalar>(std::move(coords));
}

}  // namespace cm
