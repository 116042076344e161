#pragma once

#include <random>
#include <vector>

#include "cm/cm.hpp"

// Deterministic generators for property tests. Everything is seeded
// explicitly so failures reproduce.

namespace testsupport {

using cm::Index;
using Rng = std::mt19937;

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline cm::Vec<double> rand_vec(Rng& rng, Index size, double lo = -1.0,
                                double hi = 1.0) {
  cm::Vec<double> v(size);
  for (Index i = 0; i < size; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

inline cm::Weight<double> rand_weight(Rng& rng, Index n) {
  cm::Vec<double> v = rand_vec(rng, n + 1);
  v.array() += (1.0 - v.sum()) / double(n + 1);
  return cm::Weight<double>(v);
}

inline cm::HollowVector<double> rand_hollow(Rng& rng, Index n) {
  cm::Vec<double> v = rand_vec(rng, n + 1);
  v.array() -= v.mean();
  return cm::HollowVector<double>(v);
}

inline cm::QuadFn<double> rand_quadfn(Rng& rng, Index n) {
  cm::Mat<double> a(n + 1, n + 1);
  for (Index i = 0; i <= n; ++i)
    for (Index j = 0; j <= n; ++j) a(i, j) = uniform(rng);
  return cm::QuadFn<double>(a + a.transpose());
}

inline cm::Metric<double> rand_metric(Rng& rng, Index n) {
  cm::Mat<double> d = cm::Mat<double>::Zero(n + 1, n + 1);
  for (Index i = 0; i <= n; ++i)
    for (Index j = i + 1; j <= n; ++j) d(i, j) = d(j, i) = uniform(rng, -2, 2);
  return cm::Metric<double>(std::move(d));
}

inline cm::Metric<double> rand_nondegenerate_metric(Rng& rng, Index n) {
  for (;;) {
    cm::Metric<double> m = rand_metric(rng, n);
    cm::InertiaIndex idx = cm::inertia(m);
    if (idx.nullity == 0) return m;
  }
}

inline cm::WeightMatrix<double> rand_weight_matrix(Rng& rng, Index target_n,
                                                   Index source_n) {
  cm::Mat<double> c(target_n + 1, source_n + 1);
  for (Index j = 0; j <= source_n; ++j) {
    cm::Vec<double> col = rand_vec(rng, target_n + 1);
    col.array() += (1.0 - col.sum()) / double(target_n + 1);
    c.col(j) = col;
  }
  return cm::WeightMatrix<double>(std::move(c));
}

inline cm::WeightMatrix<double> rand_permutation_matrix(Rng& rng, Index n) {
  std::vector<Index> perm(n + 1);
  for (Index i = 0; i <= n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  cm::Mat<double> c = cm::Mat<double>::Zero(n + 1, n + 1);
  for (Index j = 0; j <= n; ++j) c(perm[j], j) = 1.0;
  return cm::WeightMatrix<double>(std::move(c));
}

// Degenerate by construction: pull a metric on a small referential back to a
// strictly larger one, so the radical has dimension source - target.
inline cm::Metric<double> rand_degenerate_metric(Rng& rng, Index target_n,
                                                 Index source_n) {
  cm::Metric<double> base = rand_nondegenerate_metric(rng, target_n);
  cm::WeightMatrix<double> c = rand_weight_matrix(rng, target_n, source_n);
  return cm::pullback_metric(base, c);
}

inline cm::QuadMap<double> rand_quadmap(Rng& rng, Index n, Index m) {
  cm::Mat<double> blocks(m + 1, (n + 1) * (n + 1));
  for (Index i = 0; i <= n; ++i) {
    for (Index j = i; j <= n; ++j) {
      cm::Vec<double> w = rand_weight(rng, m).entries();
      blocks.col(i * (n + 1) + j) = w;
      blocks.col(j * (n + 1) + i) = w;
    }
  }
  return cm::QuadMap<double>(n, m, std::move(blocks));
}

inline cm::Functional<double> rand_functional(Rng& rng, Index n) {
  return cm::Functional<double>(rand_vec(rng, n + 2));
}

inline cm::Mat<double> example_midpoint_values() {
  cm::Mat<double> s(3, 3);
  s << 1, 4, -2, 4, 9, -1, -2, -1, 1;
  return s;
}

inline cm::Metric<double> example_metric() {
  cm::Mat<double> d(3, 3);
  d << 0, 8, 24, 8, 0, 48, 24, 48, 0;
  return cm::Metric<double>(std::move(d));
}

}  // namespace testsupport
