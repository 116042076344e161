#include <doctest.h>

#include "cm/metric.hpp"
#include "support.hpp"

using namespace cm;
using testsupport::Rng;

namespace {

Weight<double> wpoint(double a, double b, double c) {
  Vec<double> v(3);
  v << a, b, c;
  return Weight<double>(v);
}

Metric<double> lorentz_segment() {
  Mat<double> d(2, 2);
  d << 0, -2, -2, 0;
  return Metric<double>(std::move(d));
}

}  // namespace

TEST_CASE("metric constructor canonicalizes and rejects") {
  Mat<double> d = testsupport::example_metric().d_matrix();
  CHECK_NOTHROW((Metric<double>(d)));

  Mat<double> noisy = d;
  noisy(0, 1) += 1e-12;
  noisy(1, 1) = 1e-12;
  Metric<double> m(noisy);
  CHECK(m.d_matrix()(0, 1) == m.d_matrix()(1, 0));
  CHECK(m.d_matrix()(1, 1) == 0.0);

  Mat<double> asym = d;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS((Metric<double>(asym)), InvariantViolation);

  Mat<double> diag = d;
  diag(2, 2) = 0.5;
  CHECK_THROWS_AS((Metric<double>(diag)), InvariantViolation);
}

TEST_CASE("metric_of recovers the worked example distances") {
  QuadFn<double> f = from_midpoint_values(testsupport::example_midpoint_values());
  Metric<double> m = metric_of(f);
  CHECK((m.d_matrix() - testsupport::example_metric().d_matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("affine functions induce the zero metric") {
  Rng rng(301);
  for (int rep = 0; rep < 30; ++rep) {
    auto n = testsupport::uniform_index(rng, 0, 5);
    RowVec<double> c = testsupport::rand_vec(rng, n + 1).transpose();
    Metric<double> m = metric_of(from_affine(AffineFunction<double>(c)));
    CHECK(m.d_matrix().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("squared pseudodistances of the worked example") {
  Metric<double> m = testsupport::example_metric();
  auto e0 = Weight<double>::vertex(2, 0);
  auto e1 = Weight<double>::vertex(2, 1);
  CHECK(sq_pseudodistance(m, e0, e1) == doctest::Approx(8.0));
  CHECK(sq_pseudodistance(m, e0, wpoint(0.5, 0, 0.5)) == doctest::Approx(6.0));
  CHECK(sq_pseudodistance(m, e0, e0) == 0.0);
  CHECK(sq_pseudodistance(m, e1, e0) == doctest::Approx(8.0));
}

TEST_CASE("vertex distances read off the matrix") {
  Rng rng(302);
  for (int rep = 0; rep < 20; ++rep) {
    auto n = testsupport::uniform_index(rng, 1, 6);
    Metric<double> m = testsupport::rand_metric(rng, n);
    for (Index i = 0; i <= n; ++i)
      for (Index j = 0; j <= n; ++j)
        CHECK(sq_pseudodistance(m, Weight<double>::vertex(n, i),
                                Weight<double>::vertex(n, j)) ==
              doctest::Approx(m.d_matrix()(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("half_sq_fn_at matches the homogenized worked example") {
  Metric<double> m = testsupport::example_metric();
  QuadFn<double> h = half_sq_fn_at(m, wpoint(0.5, 0, 0.5));
  Mat<double> expected(3, 3);
  expected << 3, 5, -3, 5, 11, -5, -3, -5, 3;
  CHECK((h.coeffs() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("half_sq_fn_at evaluates half squared distances") {
  Rng rng(303);
  for (int rep = 0; rep < 50; ++rep) {
    auto n = testsupport::uniform_index(rng, 0, 5);
    Metric<double> m = testsupport::rand_metric(rng, n);
    auto p = testsupport::rand_weight(rng, n);
    auto q = testsupport::rand_weight(rng, n);
    QuadFn<double> h = half_sq_fn_at(m, p);
    CHECK(quad_eval(h, q) ==
          doctest::Approx(sq_pseudodistance(m, p, q) / 2).epsilon(1e-9));
  }
}

TEST_CASE("hessian restriction of the worked example") {
  Mat<double> g = hessian_restriction(testsupport::example_metric());
  Mat<double> expected(2, 2);
  expected << 8, -8, -8, 24;
  CHECK((g - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hessian restriction entries are hessian pairings") {
  Rng rng(304);
  for (int rep = 0; rep < 30; ++rep) {
    auto n = testsupport::uniform_index(rng, 1, 6);
    Metric<double> m = testsupport::rand_metric(rng, n);
    QuadFn<double> quarter(-0.25 * m.d_matrix());
    Mat<double> g = hessian_restriction(m);
    for (Index i = 1; i <= n; ++i) {
      for (Index j = 1; j <= n; ++j) {
        Vec<double> xi = Vec<double>::Zero(n + 1);
        xi[0] = -1;
        xi[i] += 1;
        Vec<double> xj = Vec<double>::Zero(n + 1);
        xj[0] = -1;
        xj[j] += 1;
        CHECK(g(i - 1, j - 1) ==
              doctest::Approx(hessian_pair(quarter, HollowVector<double>(xi),
                                           HollowVector<double>(xj)))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("inertia of the fixtures") {
  CHECK(inertia(testsupport::example_metric()) == InertiaIndex{2, 0, 0});
  CHECK(inertia(lorentz_segment()) == InertiaIndex{0, 1, 0});
  Metric<double> zero(Mat<double>::Zero(3, 3));
  CHECK(inertia(zero) == InertiaIndex{0, 0, 2});
  Mat<double> one(1, 1);
  one << 0;
  CHECK(inertia(Metric<double>(one)) == InertiaIndex{0, 0, 0});
}

TEST_CASE("inertia is stable under referential permutations") {
  Rng rng(305);
  for (int rep = 0; rep < 50; ++rep) {
    auto n = testsupport::uniform_index(rng, 1, 6);
    Metric<double> m = testsupport::rand_metric(rng, n);
    auto perm = testsupport::rand_permutation_matrix(rng, n);
    Metric<double> permuted = pullback_metric(m, perm);
    CHECK(inertia(permuted) == inertia(m));
  }
}

TEST_CASE("non-degeneracy agrees with the bordered determinant") {
  Rng rng(306);
  Tolerances<double> tol;
  for (int rep = 0; rep < 30; ++rep) {
    auto n = testsupport::uniform_index(rng, 1, 5);
    Metric<double> m = testsupport::rand_nondegenerate_metric(rng, n);
    Mat<double> b = bordered_matrix(m);
    double tau = tol.det(detail::max_abs(b), m.dim());
    CHECK(is_nondegenerate(m));
    CHECK(std::abs(b.determinant()) > tau);
  }
  for (int rep = 0; rep < 30; ++rep) {
    auto target = testsupport::uniform_index(rng, 0, 3);
    auto source = testsupport::uniform_index(rng, target + 1, 5);
    Metric<double> m = testsupport::rand_degenerate_metric(rng, target, source);
    Mat<double> b = bordered_matrix(m);
    double tau = tol.det(detail::max_abs(b), m.dim());
    CHECK_FALSE(is_nondegenerate(m));
    CHECK(std::abs(b.determinant()) <= tau);
  }
}

TEST_CASE("radical vectors annihilate the pairing and flatten distances") {
  Rng rng(307);
  for (int rep = 0; rep < 30; ++rep) {
    auto target = testsupport::uniform_index(rng, 0, 3);
    auto source = testsupport::uniform_index(rng, target + 1, 5);
    Metric<double> m = testsupport::rand_degenerate_metric(rng, target, source);
    auto n = m.dim();
    auto basis = radical_basis(m);
    CHECK(static_cast<Index>(basis.size()) == inertia(m).nullity);
    QuadFn<double> quarter(-0.25 * m.d_matrix());
    for (const auto& x : basis) {
      // D x is a multiple of the all-ones vector.
      Vec<double> dx = m.d_matrix() * x.entries();
      CHECK((dx.array() - dx.mean()).abs().maxCoeff() < 1e-9);
      for (Index i = 1; i <= n; ++i) {
        Vec<double> e = Vec<double>::Zero(n + 1);
        e[0] = -1;
        e[i] += 1;
        CHECK(std::abs(hessian_pair(quarter, x, HollowVector<double>(e))) <
              1e-9);
      }
      // Translating a point along the radical leaves every half squared
      // distance function unchanged.
      auto p = testsupport::rand_weight(rng, n);
      auto shifted = weight_unchecked<double>(p.entries() + x.entries());
      CHECK((half_sq_fn_at(m, p).coeffs() - half_sq_fn_at(m, shifted).coeffs())
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("distance functions separate points outside the radical") {
  Metric<double> m = testsupport::example_metric();
  auto p = wpoint(0.2, 0.3, 0.5);
  auto q = wpoint(0.4, 0.1, 0.5);
  CHECK((half_sq_fn_at(m, p).coeffs() - half_sq_fn_at(m, q).coeffs())
            .cwiseAbs()
            .maxCoeff() > 1e-3);
}

TEST_CASE("radical of the zero metric is everything") {
  Metric<double> zero(Mat<double>::Zero(4, 4));
  CHECK(radical_basis(zero).size() == 3);
  CHECK(radical_basis(testsupport::example_metric()).empty());
}

TEST_CASE("embedding the worked example gives a planar triangle") {
  Metric<double> m = testsupport::example_metric();
  EmbedResult<double> emb = embed(m);
  CHECK(emb.signature == InertiaIndex{2, 0, 0});
  CHECK(emb.sigma.size() == 2);
  CHECK(emb.sigma.minCoeff() == 1.0);
  CHECK(emb.points.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(emb.sq_distance(0, 1) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(emb.sq_distance(0, 2) == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(emb.sq_distance(1, 2) == doctest::Approx(48.0).epsilon(1e-12));
}

TEST_CASE("embedding a timelike segment needs a negative axis") {
  EmbedResult<double> emb = embed(lorentz_segment());
  CHECK(emb.signature == InertiaIndex{0, 1, 0});
  CHECK(emb.sigma.size() == 1);
  CHECK(emb.sigma[0] == -1.0);
  CHECK(emb.sq_distance(0, 1) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("embedding round-trips the distance matrix") {
  Rng rng(308);
  for (int rep = 0; rep < 50; ++rep) {
    auto n = testsupport::uniform_index(rng, 0, 6);
    Metric<double> m = testsupport::rand_metric(rng, n);
    EmbedResult<double> emb = embed(m);
    double scale = std::max(1.0, detail::max_abs(m.d_matrix()));
    for (Index i = 0; i <= n; ++i)
      for (Index j = 0; j <= n; ++j)
        CHECK(std::abs(emb.sq_distance(i, j) - m.d_matrix()(i, j)) <
              1e-8 * scale);
  }
}

TEST_CASE("zero metric embeds to a single pile of points") {
  Metric<double> zero(Mat<double>::Zero(3, 3));
  EmbedResult<double> emb = embed(zero);
  CHECK(emb.points.rows() == 0);
  CHECK(emb.signature == InertiaIndex{0, 0, 2});
  CHECK(emb.sq_distance(0, 2) == 0.0);
}

TEST_CASE("pullbacks along identity, permutations and constants") {
  Rng rng(309);
  Metric<double> m = testsupport::example_metric();

  auto id = WeightMatrix<double>::identity(2);
  CHECK((pullback_metric(m, id).d_matrix() - m.d_matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  Mat<double> swap(3, 3);
  swap << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  Metric<double> swapped = pullback_metric(m, WeightMatrix<double>(swap));
  CHECK(swapped.d_matrix()(0, 1) == m.d_matrix()(2, 1));
  CHECK(swapped.d_matrix()(0, 2) == m.d_matrix()(2, 0));
  CHECK(swapped.d_matrix()(1, 2) == m.d_matrix()(1, 0));

  // All columns equal: every image coincides, distances vanish.
  auto p = testsupport::rand_weight(rng, 2);
  Mat<double> constant(3, 4);
  for (Index j = 0; j < 4; ++j) constant.col(j) = p.entries();
  Metric<double> collapsed =
      pullback_metric(m, WeightMatrix<double>(constant));
  CHECK(collapsed.d_matrix().cwiseAbs().maxCoeff() == 0.0);
  CHECK(inertia(collapsed) == InertiaIndex{0, 0, 3});

  Mat<double> wrong(2, 2);
  wrong << 1, 0, 0, 1;
  CHECK_THROWS_AS(pullback_metric(m, WeightMatrix<double>(wrong)),
                  DimensionMismatch);
}

TEST_CASE("pullback distances are distances of image points") {
  Rng rng(310);
  for (int rep = 0; rep < 30; ++rep) {
    auto na = testsupport::uniform_index(rng, 0, 4);
    auto nb = testsupport::uniform_index(rng, 0, 4);
    Metric<double> m = testsupport::rand_metric(rng, na);
    auto c = testsupport::rand_weight_matrix(rng, na, nb);
    Metric<double> pulled = pullback_metric(m, c);
    auto p = testsupport::rand_weight(rng, nb);
    auto q = testsupport::rand_weight(rng, nb);
    CHECK(sq_pseudodistance(pulled, p, q) ==
          doctest::Approx(
              sq_pseudodistance(m, apply_map(c, p), apply_map(c, q)))
              .epsilon(1e-9));
  }
}
