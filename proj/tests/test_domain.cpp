#include <doctest.h>

#include <algorithm>

#include "relarb/domain.hpp"

using namespace relarb;

namespace {

Vec random_simplex_point(Rng& rng, int d) {
  // exponential spacings normalized to the simplex
  Vec w(d);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

TEST_CASE("contains: examples") {
  const Domain ball = make_ball({0.0, 0.0}, 1.0);
  CHECK(contains(ball, {0.0, 0.0}));
  CHECK(contains(ball, {1.0, 0.0}));  // closed ball
  CHECK_FALSE(contains(ball, {1.001, 0.0}));
  const Domain box = make_box({-1.0, -1.0}, {1.0, 1.0});
  CHECK(contains(box, {1.0, 1.0}));
  CHECK_FALSE(contains(box, {1.001, 0.0}));
}

TEST_CASE("face_of: cube faces") {
  const Domain cube = make_box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  SUBCASE("facet interior") {
    const FaceInfo f = face_of(cube, {1.0, 0.0, 0.0});
    CHECK(f.dimension == 2);
    CHECK_FALSE(f.interior);
    CHECK(f.active.size() == 1);
  }
  SUBCASE("edge") {
    const FaceInfo f = face_of(cube, {1.0, 1.0, 0.0});
    CHECK(f.dimension == 1);
  }
  SUBCASE("corner") { CHECK(face_of(cube, {1.0, 1.0, 1.0}).dimension == 0); }
  SUBCASE("interior") {
    const FaceInfo f = face_of(cube, {0.0, 0.0, 0.0});
    CHECK(f.interior);
    CHECK(f.dimension == 3);
  }
  CHECK_THROWS_AS(face_of(cube, {2.0, 0.0, 0.0}), ValidationError);
}

TEST_CASE("face_of: dimension weakly decreases as constraints tighten") {
  const Domain cube = make_box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  const int d_int = face_of(cube, {0.2, -0.4, 0.0}).dimension;
  const int d_face = face_of(cube, {1.0, -0.4, 0.0}).dimension;
  const int d_edge = face_of(cube, {1.0, -1.0, 0.0}).dimension;
  const int d_vert = face_of(cube, {1.0, -1.0, 1.0}).dimension;
  CHECK(d_int >= d_face);
  CHECK(d_face >= d_edge);
  CHECK(d_edge >= d_vert);
}

TEST_CASE("zero_boundary_predicted: cube with k=2 and k=1") {
  const Domain cube = make_box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  const ProblemParams k2(3, 2, 1.0);  // n - k = 1
  CHECK_FALSE(zero_boundary_predicted(cube, {1.0, 0.0, 0.0}, k2));
  CHECK(zero_boundary_predicted(cube, {1.0, 1.0, 0.0}, k2));

  const ProblemParams k1(3, 1, 1.0);  // n - k = 2: all faces qualify
  for (const Vec& x : {Vec{1.0, 0.0, 0.0}, Vec{1.0, 1.0, 0.0}, Vec{1.0, 1.0, 1.0}})
    CHECK(zero_boundary_predicted(cube, x, k1));
}

TEST_CASE("enclosing_ball: examples") {
  Vec c;
  double r = 0.0;
  enclosing_ball(make_ball({0.0, 0.0}, 1.0), c, r);
  CHECK(r == 1.0);
  CHECK(c == Vec{0.0, 0.0});

  enclosing_ball(make_box({-1.0, -1.0}, {1.0, 1.0}), c, r);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const Domain tri = make_simplex_image(3);
  enclosing_ball(tri, c, r);
  CHECK(r >= std::sqrt(2.0 / 3.0) - 1e-9);
  // containment of the mapped vertices
  const SimplexMap& map = std::get<SimplexImage>(tri.shape).embedding;
  for (int i = 0; i < 3; ++i) {
    Vec mu(3, 0.0);
    mu[i] = 1.0;
    const Vec x = map_point(map, mu);
    double dist = 0.0;
    for (size_t j = 0; j < x.size(); ++j) dist += (x[j] - c[j]) * (x[j] - c[j]);
    CHECK(std::sqrt(dist) <= r + 1e-9);
  }
}

TEST_CASE("enclosing_ball contains random domain points") {
  Rng rng(21);
  const Domain tri = make_simplex_image(4);
  const SimplexMap& map = std::get<SimplexImage>(tri.shape).embedding;
  Vec c;
  double r = 0.0;
  enclosing_ball(tri, c, r);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = map_point(map, random_simplex_point(rng, 4));
    double dist = 0.0;
    for (size_t j = 0; j < x.size(); ++j) dist += (x[j] - c[j]) * (x[j] - c[j]);
    CHECK(std::sqrt(dist) <= r + 1e-9);
  }
}

TEST_CASE("simplex_isometry: examples") {
  SUBCASE("d=2 vertices map to +-1/sqrt(2)") {
    const SimplexMap map = simplex_isometry(2);
    const Vec a = map_point(map, {1.0, 0.0});
    const Vec b = map_point(map, {0.0, 1.0});
    CHECK(a[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("barycenter maps to the origin") {
    const SimplexMap map = simplex_isometry(5);
    const Vec x = map_point(map, Vec(5, 0.2));
    CHECK(norm_inf(x) < 1e-14);
  }
  SUBCASE("d=3 pairwise vertex distances are sqrt(2)") {
    const SimplexMap map = simplex_isometry(3);
    std::vector<Vec> imgs;
    for (int i = 0; i < 3; ++i) {
      Vec mu(3, 0.0);
      mu[i] = 1.0;
      imgs.push_back(map_point(map, mu));
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        double d2 = 0.0;
        for (int t = 0; t < 2; ++t) d2 += (imgs[i][t] - imgs[j][t]) * (imgs[i][t] - imgs[j][t]);
        CHECK(std::sqrt(d2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
      }
  }
  SUBCASE("basis invariants") {
    const SimplexMap map = simplex_isometry(6);
    for (int a = 0; a < 5; ++a) {
      double ones = 0.0;
      for (int i = 0; i < 6; ++i) ones += map.basis(i, a);
      CHECK(std::abs(ones) < 1e-12);
      for (int b = 0; b < 5; ++b) {
        const double g = dot(map.basis.col(a), map.basis.col(b));
        CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(simplex_isometry(1), ValidationError);
}

TEST_CASE("simplex map is an isometry on random pairs") {
  Rng rng(22);
  const SimplexMap map = simplex_isometry(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec mu = random_simplex_point(rng, 4);
    const Vec nu = random_simplex_point(rng, 4);
    const Vec a = map_point(map, mu);
    const Vec b = map_point(map, nu);
    double d_chart = 0.0, d_simplex = 0.0;
    for (int i = 0; i < 3; ++i) d_chart += (a[i] - b[i]) * (a[i] - b[i]);
    for (int i = 0; i < 4; ++i) d_simplex += (mu[i] - nu[i]) * (mu[i] - nu[i]);
    CHECK(std::sqrt(d_chart) == doctest::Approx(std::sqrt(d_simplex)).epsilon(1e-12));
  }
}

TEST_CASE("map_point: validation lists offenders") {
  const SimplexMap map = simplex_isometry(3);
  CHECK_THROWS_WITH_AS(map_point(map, {0.5, 0.6, 0.1}), doctest::Contains("sum"), ValidationError);
  CHECK_THROWS_WITH_AS(map_point(map, {-0.2, 0.6, 0.6}), doctest::Contains("mu[0]"), ValidationError);
}

TEST_CASE("map_covariance: examples") {
  const SimplexMap map = simplex_isometry(3);
  SUBCASE("identity maps to identity") {
    const SymMatrix mapped = map_covariance(map, SymMatrix::identity(3));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(mapped(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
  SUBCASE("rank-one ones correction is invisible") {
    SymMatrix chat = SymMatrix::identity(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) chat(i, j) -= 1.0 / 3.0;
    const SymMatrix mapped = map_covariance(map, chat);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(mapped(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("simplex image: interior points map inside the polytope") {
  Rng rng(23);
  const Domain dom = make_simplex_image(3);
  const SimplexImage& img = std::get<SimplexImage>(dom.shape);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec mu = random_simplex_point(rng, 3);
    CHECK(contains(dom, map_point(img.embedding, mu)));
  }
  // vertices land on the boundary (0-dimensional faces)
  for (int i = 0; i < 3; ++i) {
    Vec mu(3, 0.0);
    mu[i] = 1.0;
    const Vec x = map_point(img.embedding, mu);
    CHECK(contains(dom, x));
    CHECK(face_of(dom, x).dimension == 0);
  }
}

TEST_CASE("polytope: construction validates geometry") {
  SUBCASE("triangle from half-spaces") {
    Mat rows(3, 2);
    rows(0, 0) = 1.0;
    rows(0, 1) = 0.0;
    rows(1, 0) = 0.0;
    rows(1, 1) = 1.0;
    rows(2, 0) = -1.0;
    rows(2, 1) = -1.0;
    const Domain tri = make_polytope(rows, {1.0, 1.0, 1.0});
    CHECK(contains(tri, {0.0, 0.0}));
    CHECK_FALSE(contains(tri, {1.5, 0.0}));
    Vec lo, hi;
    bounding_box(tri, lo, hi);
    CHECK(hi[0] == doctest::Approx(1.0));
  }
  SUBCASE("unbounded slab is rejected") {
    Mat rows(2, 2);
    rows(0, 0) = 1.0;
    rows(1, 0) = -1.0;
    CHECK_THROWS_AS(make_polytope(rows, {1.0, 1.0}), ValidationError);
  }
  SUBCASE("empty intersection is rejected") {
    Mat rows(4, 2);
    rows(0, 0) = 1.0;
    rows(1, 0) = -1.0;
    rows(2, 1) = 1.0;
    rows(3, 1) = -1.0;
    CHECK_THROWS_AS(make_polytope(rows, {-2.0, 1.0, 1.0, 1.0}), ValidationError);
  }
  SUBCASE("non-unit normals are renormalized") {
    Mat rows(4, 2);
    rows(0, 0) = 2.0;
    rows(1, 0) = -2.0;
    rows(2, 1) = 0.5;
    rows(3, 1) = -0.5;
    const Domain box = make_polytope(rows, {2.0, 2.0, 0.5, 0.5});
    CHECK(contains(box, {1.0, 1.0}));
    CHECK_FALSE(contains(box, {1.01, 0.0}));
  }
}

TEST_CASE("domain json round trip") {
  for (const Domain& dom :
       {make_ball({0.5, -1.0}, 2.0), make_box({-1.0, 0.0}, {1.0, 3.0}), make_simplex_image(4)}) {
    const Domain back = domain_from_json(domain_to_json(dom));
    CHECK(back.dim() == dom.dim());
    CHECK(domain_to_json(back) == domain_to_json(dom));
  }
  const Domain ball = domain_from_json(R"({"type":"ball","center":[0,0],"radius":1})");
  CHECK(contains(ball, {0.9, 0.0}));
  const Domain poly = domain_from_json(
      R"({"type":"polytope","normals":[[1,0],[-1,0],[0,1],[0,-1]],"offsets":[1,1,1,1]})");
  CHECK(contains(poly, {0.5, 0.5}));
  CHECK_THROWS_AS(domain_from_json(R"({"type":"cone"})"), ValidationError);
}

TEST_CASE("boundary_slack sign convention") {
  const Domain ball = make_ball({0.0, 0.0}, 1.0);
  CHECK(boundary_slack(ball, {0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(boundary_slack(ball, {2.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(boundary_slack(ball, {1.0, 0.0}) == doctest::Approx(0.0));
}
