#include "doctest.h"

#include "oracles.hpp"
#include "reachnav/distance.hpp"
#include "reachnav/error.hpp"
#include "reachnav/hull.hpp"
#include "reachnav/lp.hpp"
#include "reachnav/qp.hpp"
#include "test_util.hpp"

using namespace reachnav;

namespace {

bool intersect_lp(const Hull& a, const Hull& b) {
  Mat A(a.facets.num_facets() + b.facets.num_facets(), a.facets.dim());
  A << a.facets.normals(), b.facets.normals();
  Vec off(A.rows());
  off << a.facets.offsets(), b.facets.offsets();
  return lp_feasible(A, off).status == Feasibility::Feasible;
}

}  // namespace

TEST_CASE("project_point: interior and face") {
  const HPolytope cube = HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1));
  const auto in = project_point(Vec3(0.2, -0.3, 0.5), cube);
  CHECK(in.distance == 0.0);
  CHECK(in.closest_b.isApprox(Vec3(0.2, -0.3, 0.5)));
  const auto out = project_point(Vec3(2, 0, 0), cube);
  CHECK(out.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((out.closest_b - Vec3(1, 0, 0)).norm() <= 1e-12);
  const auto corner = project_point(Vec3(2, 3, -4), cube);
  CHECK(corner.distance == doctest::Approx(std::sqrt(1.0 + 4.0 + 9.0)));
}

TEST_CASE("project_point: random polytopes against dense oracles") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Hull hull = convex_hull(testutil::random_points(rng, 3, 15));
    const Vec x = testutil::random_in_ball(rng, 3, 3.0);
    const auto res = project_point(x, hull.facets);
    CHECK(std::abs(res.distance - (x - res.closest_b).norm()) <= 1e-7);
    CHECK(contains(hull.facets, res.closest_b, 1e-7));
    CHECK(res.distance == (contains(hull.facets, x, 1e-9) ? 0.0 : res.distance));
    // variational inequality against every vertex
    const Mat& V = hull.vertices.vertices();
    for (int i = 0; i < V.cols(); ++i) CHECK((x - res.closest_b).dot(V.col(i) - res.closest_b) <= 1e-6);
    // no sampled convex combination beats the projection
    double sampled = 1e300;
    for (int s = 0; s < 20000; ++s) sampled = std::min(sampled, (V * testutil::random_weights(rng, V.cols()) - x).norm());
    CHECK(sampled >= res.distance - 1e-9);
    CHECK(std::abs(oracle::point_to_hull_distance(x, V) - res.distance) <= 1e-5);
  }
}

TEST_CASE("project_point: trusted empty polytope throws EmptyPolytope") {
  Mat N(2, 1);
  N << 1.0, -1.0;
  Vec off(2);
  off << -1.0, -1.0;
  const HPolytope empty = HPolytope::trusted(N, off);
  try {
    project_point(Vec::Constant(1, 5.0), empty);
    FAIL("expected EmptyPolytope");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPolytope);
  }
}

TEST_CASE("polytope_distance: boxes") {
  const VPolytope a = VPolytope::box(Vec::Zero(3), Vec::Ones(3));
  const VPolytope overlapping = VPolytope::box(Vec::Constant(3, 0.5), Vec::Constant(3, 2.0));
  CHECK(polytope_distance(a, overlapping).distance == 0.0);
  const VPolytope gap = VPolytope::box(Vec3(2, 0, 0), Vec3(3, 1, 1));
  const auto res = polytope_distance(a, gap);
  CHECK(res.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.closest_a(0) == doctest::Approx(1.0));
  CHECK(res.closest_b(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(polytope_distance(a, VPolytope::point(Vec::Zero(2))), Error);
}

TEST_CASE("polytope_distance: random pairs vs convex-weights oracle, symmetry, LP consistency") {
  std::mt19937_64 rng(2024);
  int zero_count = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Vec ca = testutil::random_in_ball(rng, 3, 1.5);
    const Vec cb = testutil::random_in_ball(rng, 3, 1.5);
    const Mat Pa = testutil::random_points(rng, 3, 10, 1.0, &ca);
    const Mat Pb = testutil::random_points(rng, 3, 10, 1.0, &cb);
    const Hull ha = convex_hull(Pa);
    const Hull hb = convex_hull(Pb);
    const auto ab = polytope_distance(ha.vertices, hb.vertices);
    const auto ba = polytope_distance(hb.vertices, ha.vertices);
    CHECK(std::abs(ab.distance - ba.distance) <= 1e-9);
    CHECK(std::abs(ab.distance - (ab.closest_a - ab.closest_b).norm()) <= 1e-7);
    CHECK(contains(ha.facets, ab.closest_a, 1e-7));
    CHECK(contains(hb.facets, ab.closest_b, 1e-7));
    CHECK(std::abs(ab.distance - oracle::min_distance_convex_weights(Pa, Pb)) <= 1e-5);
    CHECK((ab.distance == 0.0) == intersect_lp(ha, hb));
    zero_count += ab.distance == 0.0;

    const Vec t = testutil::random_in_ball(rng, 3, 5.0);
    const auto moved = polytope_distance(translate(ha.vertices, t), translate(hb.vertices, t));
    CHECK(std::abs(moved.distance - ab.distance) <= 1e-9);
  }
  CHECK(zero_count > 0);
  CHECK(zero_count < 40);
}

TEST_CASE("polytope_distance: singleton to box") {
  const VPolytope box = VPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1));
  const auto res = polytope_distance(VPolytope::point(Vec3(3, 0, 0)), box);
  CHECK(res.distance == doctest::Approx(2.0));
}

TEST_CASE("solve_qp: equality and inequality constrained") {
  // min |x - (2,2)|^2 s.t. x0 + x1 = 1, x0 <= 0.25
  QpProblem qp;
  qp.H = 2.0 * Mat::Identity(2, 2);
  qp.g = Vec::Constant(2, -4.0);
  qp.Aeq = Mat::Ones(1, 2);
  qp.beq = Vec::Ones(1);
  qp.Ain = Mat(1, 2);
  qp.Ain << 1.0, 0.0;
  qp.bin = Vec::Constant(1, 0.25);
  const QpResult res = solve_qp(qp);
  REQUIRE(res.status == QpStatus::Optimal);
  CHECK(res.x(0) == doctest::Approx(0.25));
  CHECK(res.x(1) == doctest::Approx(0.75));
  CHECK(res.multipliers(0) > 0.0);

  Mat more(2, 2);
  more << 1.0, 0.0, -1.0, 0.0;
  qp.Ain = more;
  qp.bin = Vec(2);
  qp.bin << -1.0, -1.0;  // x0 <= -1 and x0 >= 1
  CHECK(solve_qp(qp).status == QpStatus::Infeasible);
}
