#include "doctest.h"

#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/lp.hpp"
#include "test_util.hpp"

#include <set>

using namespace reachnav;

namespace {

// Every vertex is tight on >= d facets; V and H supports agree.
void check_duality(const Hull& h, std::mt19937_64& rng, double tol = 1e-7) {
  const int d = h.vertices.dim();
  for (int i = 0; i < h.vertices.size(); ++i) {
    const Vec slack = h.facets.offsets() - h.facets.normals() * h.vertices.vertex(i);
    CHECK(slack.minCoeff() >= -1e-9);
    CHECK((slack.array() <= tol).count() >= d);
  }
  for (int i = 0; i < 30; ++i) {
    const Vec c = testutil::random_unit(rng, d);
    CHECK(std::abs(support(h.vertices, c).value - support_value(h.facets, c)) <= tol);
  }
}

void check_unit_normals(const HPolytope& h) {
  for (int j = 0; j < h.num_facets(); ++j) CHECK(std::abs(h.normal(j).norm() - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("convex_hull: cube corners give six merged facets") {
  const Hull h = convex_hull(VPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1)).vertices(), {1e-8});
  CHECK(h.vertices.size() == 8);
  REQUIRE(h.facets.num_facets() == 6);
  check_unit_normals(h.facets);
  std::set<std::pair<int, int>> axes;
  for (int j = 0; j < 6; ++j) {
    const Vec n = h.facets.normal(j);
    int axis = -1;
    for (int k = 0; k < 3; ++k)
      if (std::abs(std::abs(n(k)) - 1.0) < 1e-12) axis = k;
    REQUIRE(axis >= 0);
    axes.insert({axis, n(axis) > 0 ? 1 : -1});
    CHECK(h.facets.offset(j) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(axes.size() == 6);
}

TEST_CASE("convex_hull: tetrahedron") {
  Mat P(3, 4);
  P << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  const Hull h = convex_hull(P);
  CHECK(h.vertices.size() == 4);
  CHECK(h.facets.num_facets() == 4);
}

TEST_CASE("convex_hull: interior and boundary points are not vertices") {
  Mat P(3, 8 + 3);
  P.leftCols(8) = VPolytope::box(Vec::Zero(3), Vec::Ones(3)).vertices();
  P.col(8) = Vec3(0.5, 0.5, 0.5);  // interior
  P.col(9) = Vec3(0.5, 0.0, 0.0);  // edge midpoint
  P.col(10) = Vec3(0.5, 0.5, 1.0);  // face center
  const Hull h = convex_hull(P);
  CHECK(h.vertices.size() == 8);
  CHECK(h.facets.num_facets() == 6);
}

TEST_CASE("convex_hull: edge midpoints processed before corners are filtered") {
  // Put edge midpoints and duplicates first so they enter the hull early.
  std::vector<Vec> pts{Vec3(0.5, 0, 0), Vec3(0.5, 1, 1), Vec3(0, 0.5, 0), Vec3(1, 0.5, 1)};
  const VPolytope c = VPolytope::box(Vec::Zero(3), Vec::Ones(3));
  for (int i = 0; i < c.size(); ++i) pts.push_back(c.vertex(i));
  pts.push_back(c.vertex(3));
  const Hull h = convex_hull(pts);
  CHECK(h.vertices.size() == 8);
  CHECK(h.facets.num_facets() == 6);
}

TEST_CASE("convex_hull: 1000 points in the unit ball") {
  std::mt19937_64 rng(1000);
  const Mat P = testutil::random_points(rng, 3, 1000);
  const Hull h = convex_hull(P);
  check_unit_normals(h.facets);
  double worst = -1e300;
  for (int i = 0; i < P.cols(); ++i) worst = std::max(worst, (h.facets.normals() * P.col(i) - h.facets.offsets()).maxCoeff());
  CHECK(worst <= 1e-9);
  check_duality(h, rng);
}

TEST_CASE("convex_hull: idempotent on its own vertices") {
  std::mt19937_64 rng(77);
  const Hull h1 = convex_hull(testutil::random_points(rng, 3, 200));
  const Hull h2 = convex_hull(h1.vertices.vertices());
  REQUIRE(h1.vertices.size() == h2.vertices.size());
  for (int i = 0; i < h1.vertices.size(); ++i) {
    bool found = false;
    for (int j = 0; j < h2.vertices.size(); ++j) found = found || (h1.vertices.vertex(i) - h2.vertices.vertex(j)).norm() < 1e-9;
    CHECK(found);
  }
  CHECK(h1.facets.num_facets() == h2.facets.num_facets());
}

TEST_CASE("convex_hull: dimensions 2 and 6") {
  std::mt19937_64 rng(12);
  SUBCASE("square with interior points") {
    Mat P(2, 6);
    P << 0, 2, 2, 0, 1, 1, 0, 0, 2, 2, 1, 0;
    const Hull h = convex_hull(P);
    CHECK(h.vertices.size() == 4);
    CHECK(h.facets.num_facets() == 4);
  }
  SUBCASE("random planar cloud") {
    const Hull h = convex_hull(testutil::random_points(rng, 2, 300));
    check_duality(h, rng);
  }
  SUBCASE("6-cube") {
    const Hull h = convex_hull(VPolytope::box(Vec::Constant(6, -1), Vec::Constant(6, 1)).vertices());
    CHECK(h.vertices.size() == 64);
    CHECK(h.facets.num_facets() == 12);
    check_duality(h, rng);
  }
  SUBCASE("random 6-D cloud") {
    const Mat P = testutil::random_points(rng, 6, 60);
    const Hull h = convex_hull(P);
    check_unit_normals(h.facets);
    for (int i = 0; i < P.cols(); ++i) CHECK((h.facets.normals() * P.col(i) - h.facets.offsets()).maxCoeff() <= 1e-9);
    check_duality(h, rng);
  }
}

TEST_CASE("convex_hull: errors") {
  CHECK_THROWS_AS(convex_hull(Mat(3, 0)), Error);
  Mat flat(3, 5);
  flat << 0, 1, 0, 1, 0.5, 0, 0, 1, 1, 0.5, 0, 0, 0, 0, 0;
  try {
    convex_hull(flat);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }
  try {
    convex_hull(std::vector<Vec>{});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
}
