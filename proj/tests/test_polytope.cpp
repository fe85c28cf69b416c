#include <doctest.h>

#include "mtl/errors.hpp"
#include "mtl/polytope.hpp"
#include "mtl/sampling.hpp"

using namespace mtl;

namespace {

std::vector<Vec> rows(std::initializer_list<std::initializer_list<double>> list) {
  std::vector<Vec> out;
  for (const auto& r : list) {
    Vec v(static_cast<Eigen::Index>(r.size()));
    int i = 0;
    for (double x : r) v[i++] = x;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("face lattice of the unit cube") {
  const Polytope cube = make_box(Vec::Zero(3), Vec::Ones(3));
  CHECK(cube.face_counts() == std::vector<int>{8, 12, 6, 1});
  CHECK(cube.volume() == doctest::Approx(1.0));
  // the vertex at the origin has the negative octant as normal cone
  const Face& v0 = cube.faces(0).front();
  CHECK(v0.normal_cone.contains(-Vec::Ones(3).normalized()));
  CHECK_FALSE(v0.normal_cone.contains(Vec::Ones(3).normalized()));
}

TEST_CASE("face lattice of a 4-simplex") {
  std::vector<Vec> pts{Vec::Zero(4)};
  for (int i = 0; i < 4; ++i) pts.push_back(Vec::Unit(4, i));
  const Polytope s = Polytope::build(pts);
  CHECK(s.face_counts() == std::vector<int>{5, 10, 10, 5, 1});
  CHECK(s.volume() == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("hull volumes agree with an independent hull code") {
  // reference values from a Qhull run on the same points
  const Polytope p2 = Polytope::build(rows({{0, 0}, {3, 0}, {2.5, 2}, {0.5, 1.8}, {1, 1}, {-0.5, 1}}));
  CHECK(p2.vertices().size() == 5);
  CHECK(p2.volume() == doctest::Approx(5.45).epsilon(1e-12));
  const Polytope p3 = Polytope::build(
      rows({{0, 0, 0}, {2, 0, 0}, {0, 1.5, 0}, {0, 0, 1}, {1.2, 1.1, 0.9}, {0.3, -0.4, 0.7}, {1.5, 0.2, -0.6}}));
  CHECK(p3.vertices().size() == 7);
  CHECK(p3.volume() == doctest::Approx(1.6425).epsilon(1e-12));
  double area = 0.0;
  for (const auto& f : p3.faces(2)) {
    const int i = static_cast<int>(&f - p3.faces(2).data());
    for (const auto& s : p3.triangulate_face(2, i)) {
      const Eigen::Vector3d a = p3.vertex(s[1]) - p3.vertex(s[0]), b = p3.vertex(s[2]) - p3.vertex(s[0]);
      area += 0.5 * a.cross(b).norm();
    }
  }
  CHECK(area == doctest::Approx(8.627154407698567).epsilon(1e-12));
  const Polytope p4 = Polytope::build(rows({{0, 0, 0, 0},
                                            {1, 0, 0, 0},
                                            {0, 1, 0, 0},
                                            {0, 0, 1, 0},
                                            {0, 0, 0, 1},
                                            {0.6, 0.6, 0.6, 0.6},
                                            {-0.3, 0.2, 0.1, 0.4}}));
  CHECK(p4.volume() == doctest::Approx(0.115).epsilon(1e-12));
}

TEST_CASE("lower-dimensional polytopes keep the complement in their normal cones") {
  const Polytope square = make_box(Vec::Zero(3), (Vec(3) << 1, 1, 0).finished());
  CHECK(square.intrinsic_dim() == 2);
  CHECK(square.face_counts() == std::vector<int>{4, 4, 1});
  const Face& top = square.top_face();
  CHECK(top.normal_cone.dim() == 0);
  CHECK(top.normal_cone.contains(Vec::Unit(3, 2)));
  CHECK(top.normal_cone.contains(-Vec::Unit(3, 2)));
  const Polytope point = Polytope::build({Vec::Ones(2)});
  CHECK(point.intrinsic_dim() == 0);
  CHECK(point.top_face().normal_cone.dim() == 1);
}

TEST_CASE("ambiguous supporting planes raise DegenerateGeometry") {
  auto pts = rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 1 + 5e-9}});
  CHECK_THROWS_AS(Polytope::build(pts), DegenerateGeometry);
  CHECK_THROWS_AS(Polytope::build({}), InvalidArgument);
}

TEST_CASE("clipping a cube") {
  const Polytope cube = make_box(Vec::Zero(3), Vec::Ones(3));
  const auto half = clip(cube, {{Vec::Unit(3, 0), 0.5}});
  REQUIRE(half);
  CHECK(half->volume() == doctest::Approx(0.5));
  const auto corner = clip(cube, {{Vec::Ones(3), 1.0}});
  REQUIRE(corner);
  CHECK(corner->volume() == doctest::Approx(1.0 / 6.0));
  CHECK_FALSE(clip(cube, {{Vec::Unit(3, 0), -1.0}}));
}

TEST_CASE("oriented complements") {
  const Vec u = (Vec(2) << 0.6, 0.8).finished();
  const Vec ub = oriented_complement(u);
  Mat m(2, 2);
  m << u, ub;
  CHECK(m.determinant() == doctest::Approx(1.0));
  const Vec v = Vec::Unit(3, 2), w = Vec::Unit(3, 0);
  CHECK((oriented_complement(v, w) - Vec::Unit(3, 1)).norm() < 1e-15);
  CHECK(canonical_sign(-Vec::Unit(3, 1))[1] == 1.0);
}

TEST_CASE("property: random polytopes are closed under rigid motions") {
  Sampler rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const Polytope p = rng.polytope(n);
    const Mat theta = rng.orthogonal(n);
    const Vec t = rng.gaussian_vector(n);
    const Polytope q = translated(transformed(p, theta), t);
    CHECK(q.face_counts() == p.face_counts());
    CHECK(q.volume() == doctest::Approx(p.volume()).epsilon(1e-10));
    CHECK(q.contains(theta * p.centroid() + t));
    // each vertex of P lies in the relative interior of its own normal cone's dual
    for (const auto& f : p.faces(0))
      for (const auto& g : f.normal_generators) CHECK(normal_bundle_contains(p, p.vertex(f.vertices[0]), g));
  }
}
