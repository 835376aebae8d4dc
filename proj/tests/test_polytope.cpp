#include "doctest.h"

#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/polytope.hpp"
#include "test_util.hpp"

#include <algorithm>

using namespace reachnav;

namespace {

VPolytope cube(double lo, double hi, int d = 3) { return VPolytope::box(Vec::Constant(d, lo), Vec::Constant(d, hi)); }

// Set equality of vertex lists within tol.
bool same_vertex_set(const VPolytope& a, const VPolytope& b, double tol) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    bool found = false;
    for (int j = 0; j < b.size() && !found; ++j) found = (a.vertex(i) - b.vertex(j)).norm() <= tol;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("support: cube and homogeneity") {
  const VPolytope c = cube(-1, 1);
  const auto s = support(c, Vec3(1, 0, 0));
  CHECK(s.value == 1.0);
  CHECK(s.vertex(0) == 1.0);

  std::mt19937_64 rng(5);
  const VPolytope p(testutil::random_points(rng, 3, 20));
  for (int i = 0; i < 20; ++i) {
    const Vec d = testutil::random_unit(rng, 3);
    const auto s1 = support(p, d);
    const auto s2 = support(p, 2.0 * d);
    CHECK(s1.index == s2.index);
    CHECK(s2.value == doctest::Approx(2.0 * s1.value));
  }
}

TEST_CASE("support: exhaustive scan oracle on 20-vertex polytope") {
  std::mt19937_64 rng(8);
  const Mat P = testutil::random_points(rng, 3, 20);
  const VPolytope p(P);
  for (int i = 0; i < 100; ++i) {
    const Vec d = testutil::random_unit(rng, 3);
    CHECK(support(p, d).value == testutil::scan_support(P, d));
  }
}

TEST_CASE("support: ties resolve to the lowest index; zero direction rejected") {
  const VPolytope c = cube(-1, 1);
  const auto s = support(c, Vec3(1, 0, 0));
  for (int i = 0; i < s.index; ++i) CHECK(c.vertex(i)(0) < 1.0);
  CHECK_THROWS_AS(support(c, Vec3::Zero()), Error);
}

TEST_CASE("minkowski_sum: boxes and singletons") {
  const VPolytope s = minkowski_sum(cube(-1, 1), cube(-0.5, 0.5));
  CHECK(same_vertex_set(s, cube(-1.5, 1.5), 1e-12));

  const VPolytope t = VPolytope::point(Vec3(1, 2, 3));
  const VPolytope moved = minkowski_sum(cube(-1, 1), t);
  CHECK(same_vertex_set(moved, translate(cube(-1, 1), Vec3(1, 2, 3)), 0.0));

  CHECK_THROWS_AS(minkowski_sum(cube(-1, 1), cube(-1, 1, 2)), Error);
}

TEST_CASE("minkowski_sum: support additivity on random pairs") {
  std::mt19937_64 rng(21);
  for (int pair = 0; pair < 10; ++pair) {
    const VPolytope p(testutil::random_points(rng, 3, 10));
    const VPolytope q(testutil::random_points(rng, 3, 10, 0.5));
    const VPolytope s = minkowski_sum(p, q);
    for (int i = 0; i < 200; ++i) {
      const Vec c = testutil::random_unit(rng, 3);
      CHECK(std::abs(support(s, c).value - support(p, c).value - support(q, c).value) <= 1e-9);
    }
  }
}

TEST_CASE("reflect") {
  const VPolytope r = reflect(cube(0, 1));
  CHECK(same_vertex_set(r, cube(-1, 0), 0.0));
  CHECK(same_vertex_set(reflect(cube(-1, 1)), cube(-1, 1), 0.0));
  std::mt19937_64 rng(2);
  const VPolytope p(testutil::random_points(rng, 3, 12));
  CHECK(reflect(reflect(p)) == p);
}

TEST_CASE("contains: cube and convex combinations") {
  const HPolytope h = HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1));
  CHECK(contains(h, Vec3::Zero()));
  CHECK_FALSE(contains(h, Vec3(2, 0, 0)));
  CHECK_THROWS_AS(contains(h, Vec::Zero(2)), Error);

  std::mt19937_64 rng(17);
  const Hull hull = convex_hull(testutil::random_points(rng, 3, 40));
  const Mat& V = hull.vertices.vertices();
  for (int i = 0; i < 500; ++i) {
    const Vec x = V * testutil::random_weights(rng, V.cols());
    CHECK(contains(hull.facets, x, 1e-9));
  }
}

TEST_CASE("translate: V and H forms") {
  const VPolytope moved = translate(cube(-1, 1), Vec3(1, 0, 0));
  CHECK(moved.lower_corner().isApprox(Vec3(0, -1, -1)));
  CHECK(moved.upper_corner().isApprox(Vec3(2, 1, 1)));
  CHECK(translate(cube(-1, 1), Vec3::Zero()) == cube(-1, 1));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Hull hull = convex_hull(testutil::random_points(rng, 3, 30));
    const Vec t = testutil::random_in_ball(rng, 3, 3.0);
    const VPolytope vt = translate(hull.vertices, t);
    const HPolytope ht = translate(hull.facets, t);
    for (int i = 0; i < 20; ++i) {
      const Vec c = testutil::random_unit(rng, 3);
      CHECK(std::abs(support(vt, c).value - support_value(ht, c)) <= 1e-9);
      CHECK(std::abs(support(vt, c).value - support(hull.vertices, c).value - c.dot(t)) <= 1e-12);
    }
  }
}

TEST_CASE("HPolytope construction validates") {
  Mat N(2, 1);
  N << 2.0, -1.0;
  Vec off(2);
  off << 2.0, 0.0;
  const HPolytope h = HPolytope::from_halfspaces(N, off);
  CHECK(h.normal(0)(0) == 1.0);
  CHECK(h.offset(0) == 1.0);

  off << -2.0, 0.0;  // empty
  CHECK_THROWS_AS(HPolytope::from_halfspaces(N, off), Error);
  Mat half(1, 2);
  half << 1.0, 0.0;
  CHECK_THROWS_AS(HPolytope::from_halfspaces(half, Vec::Ones(1)), Error);
}

TEST_CASE("h_to_v recovers box and random hull vertices") {
  const VPolytope v = h_to_v(HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 2)));
  CHECK(same_vertex_set(v, cube(-1, 2), 1e-12));

  std::mt19937_64 rng(6);
  const Hull hull = convex_hull(testutil::random_points(rng, 3, 25));
  const VPolytope back = h_to_v(hull.facets);
  CHECK(same_vertex_set(back, hull.vertices, 1e-8));
}

TEST_CASE("h_to_v in 2-D") {
  const VPolytope v = h_to_v(HPolytope::box(Vec::Constant(2, 0), Vec::Constant(2, 1)));
  CHECK(v.size() == 4);
}
