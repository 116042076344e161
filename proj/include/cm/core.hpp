#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cm {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizes of two coupled objects disagree (point vs metric, map vs space, ...).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A structural invariant failed validation (entry sums, symmetry, hollowness).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ColumnSumError : public InvariantViolation {
 public:
  ColumnSumError(Index column, double sum)
      : InvariantViolation("column " + std::to_string(column) +
                           " sums to " + std::to_string(sum) + ", expected 1"),
        column_(column) {}

  Index column() const { return column_; }

 private:
  Index column_;
};

class NotClosed : public Error {
 public:
  using Error::Error;
};

class SingularCM : public Error {
 public:
  using Error::Error;
};

// Scale-aware comparison thresholds. Everything is derived from one base so a
// single knob retunes the whole stack.
template <typename Scalar = double>
struct Tolerances {
  Scalar base = Scalar(1e-9);

  Scalar sum(Scalar max_abs) const { return base * (Scalar(1) + max_abs); }
  Scalar sym(Scalar max_abs) const { return base * (Scalar(1) + max_abs); }
  Scalar eig(Index n, Scalar max_abs_eig) const {
    return base * Scalar(n) * max_abs_eig;
  }
  Scalar det(Scalar max_norm, Index n) const {
    return base * std::pow(max_norm, Scalar(n + 2));
  }
  Scalar quadric(Scalar max_abs_d) const {
    return Scalar(10) * base * (Scalar(1) + max_abs_d);
  }
  Scalar functorial(Scalar max_abs_d) const { return quadric(max_abs_d); }
  Scalar embed(Scalar max_abs_d) const { return quadric(max_abs_d); }
  // Rejection threshold for factorization pivots, 1e-12 * max|entry| at the
  // default base.
  Scalar pivot(Scalar max_abs_m) const {
    return base * Scalar(1e-3) * max_abs_m;
  }
};

namespace detail {

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0)
                       : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

}  // namespace cm
