#include <doctest.h>

#include <numbers>

#include "mtl/errors.hpp"
#include "mtl/sampling.hpp"
#include "mtl/valuations.hpp"

using namespace mtl;

namespace {

constexpr double pi = std::numbers::pi;

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

double intrinsic(const Polytope& p, int k) { return minkowski_tensor(p, k, 0, 0).value(); }

}  // namespace

TEST_CASE("intrinsic volumes of the cube and the square") {
  const Polytope cube = make_box(Vec::Zero(3), Vec::Ones(3));
  CHECK(intrinsic(cube, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(intrinsic(cube, 1) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(intrinsic(cube, 2) == doctest::Approx(3.0).epsilon(1e-13));
  const Polytope square = make_box(Vec::Zero(2), Vec::Ones(2));
  CHECK(intrinsic(square, 0) == doctest::Approx(1.0));
  CHECK(intrinsic(square, 1) == doctest::Approx(2.0));
}

TEST_CASE("intrinsic volumes of hulls against an independent hull code") {
  // half the boundary measure from a Qhull run on the same points
  const Polytope p2 = Polytope::build(rows({{0, 0}, {3, 0}, {2.5, 2}, {0.5, 1.8}, {1, 1}, {-0.5, 1}}));
  CHECK(intrinsic(p2, 1) == doctest::Approx(9.470186773269473 / 2).epsilon(1e-12));
  const Polytope p3 = Polytope::build(
      rows({{0, 0, 0}, {2, 0, 0}, {0, 1.5, 0}, {0, 0, 1}, {1.2, 1.1, 0.9}, {0.3, -0.4, 0.7}, {1.5, 0.2, -0.6}}));
  CHECK(intrinsic(p3, 2) == doctest::Approx(8.627154407698567 / 2).epsilon(1e-12));
  CHECK(intrinsic(p3, 0) == doctest::Approx(1.0).epsilon(1e-12));
  const Polytope p4 = Polytope::build(rows({{0, 0, 0, 0},
                                            {1, 0, 0, 0},
                                            {0, 1, 0, 0},
                                            {0, 0, 1, 0},
                                            {0, 0, 0, 1},
                                            {0.6, 0.6, 0.6, 0.6},
                                            {-0.3, 0.2, 0.1, 0.4}}));
  CHECK(intrinsic(p4, 3) == doctest::Approx(1.6708754304119495 / 2).epsilon(1e-12));
  CHECK(intrinsic(p4, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("second-order curvature tensor of the cube") {
  // each edge contributes a quarter circle of normals: the sum is 2 pi Q before normalization
  const Polytope cube = make_box(Vec::Zero(3), Vec::Ones(3));
  CHECK(normalizing_constant(3, 1, 0, 2) == doctest::Approx(1.0 / (4 * pi * pi)));
  CHECK(max_abs_diff(minkowski_tensor(cube, 1, 0, 2), (1.0 / (2 * pi)) * metric_tensor<double>(3)) < 1e-13);
}

TEST_CASE("local values on a square with a one-normal patch") {
  const Polytope square = make_box(Vec::Zero(2), Vec::Ones(2));
  ConeRegion cone;
  cone.halfspaces = {(Vec(2) << 1, -0.3).finished(), (Vec(2) << 1, 0.3).finished()};
  const SupportPatch eta = SupportPatch::single(PositionRegion::all(2), cone);
  CHECK(phi(square, eta, 1, 0, 0, 0).value() == doctest::Approx(0.5));
  const SymTensor t = phi_tilde_2d(square, eta, 1, 0, 0);
  CHECK(t.coeff({1}) == doctest::Approx(0.0));
  CHECK(t.coeff({2}) == doctest::Approx(1.0));
}

TEST_CASE("tilde valuations vanish on centrally symmetric bodies and ignore edge orientation") {
  const Polytope cube = make_box(-Vec::Ones(3), Vec::Ones(3));
  CHECK(phi_tilde_3d(cube, SupportPatch::all(3), 0, 0, 0).max_abs() < 1e-13);
  Sampler rng(41);
  const Polytope p = rng.polytope(3);
  const SupportPatch eta = rng.patch(3);
  ValuationOptions flipped;
  flipped.flip_edges = true;
  CHECK(max_abs_diff(phi_tilde_3d(p, eta, 0, 1, 1), phi_tilde_3d(p, eta, 0, 1, 1, flipped)) < 1e-13);
}

TEST_CASE("basis enumeration") {
  CHECK(enumerate_basis(3, 2).size() == 14);
  CHECK(enumerate_basis(2, 1).size() == 6);
  CHECK(enumerate_basis(2, 2).size() == 12);
  CHECK(enumerate_basis(3, 0).size() == 3);
  for (const auto& d : enumerate_basis(4, 3)) CHECK(d.kind == BasisKind::Phi);
  for (const auto& d : enumerate_basis(3, 3)) CHECK(d.rank() == 3);
  CHECK_THROWS_AS(BasisDescriptor::phi(3, 3, 0, 0, 0).validate(), InvalidArgument);
  CHECK_THROWS_AS(BasisDescriptor::phi(3, 0, 0, 2, 1).validate(), InvalidArgument);
  CHECK_THROWS_AS(BasisDescriptor::tilde2(2, 0, 0).validate(), InvalidArgument);
  CHECK(BasisDescriptor::phi(3, 1, 0, 1, 0).label() == "phi[k=1,m=0,r=0,s=1,j=0]");
}

TEST_CASE("property: Minkowski relation and translation law") {
  Sampler rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const Polytope p = rng.polytope(n);
    CHECK(minkowski_tensor(p, n - 1, 0, 1).max_abs() < 1e-12);
    const Vec t = rng.gaussian_vector(n);
    for (int k = 0; k < n; ++k) {
      // Phi_k^{1,0}(P + t) = Phi_k^{1,0}(P) + V_k(P) t
      const SymTensor moved = minkowski_tensor(translated(p, t), k, 1, 0);
      const SymTensor expected = minkowski_tensor(p, k, 1, 0) + intrinsic(p, k) * SymTensor::vector(t);
      CHECK(max_abs_diff(moved, expected) < 1e-11);
    }
  }
}

TEST_CASE("property: basis elements are rotation covariant and measures in the patch") {
  Sampler rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const auto basis = enumerate_basis(n, 2);
    const BasisDescriptor d = basis[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(basis.size()) - 1))];
    const Polytope p = rng.polytope(n);
    const SupportPatch eta = rng.patch(n);
    const Mat theta = rng.orthogonal(n);
    const SymTensor v = evaluate_basis_element(d, p, eta);
    CHECK(max_abs_diff(evaluate_basis_element(d, transformed(p, theta), eta.transformed(theta)), substitute(v, theta)) < 1e-11);
    const Vec h = rng.unit_vector(n);
    ConeRegion c1 = eta.pieces().front().normal, c2 = c1;
    c1.halfspaces.push_back(h);
    c2.halfspaces.push_back(-h);
    const auto& pos = eta.pieces().front().position;
    const SymTensor split = evaluate_basis_element(d, p, SupportPatch::single(pos, c1)) +
                            evaluate_basis_element(d, p, SupportPatch::single(pos, c2));
    CHECK(max_abs_diff(split, v) < 1e-11);
  }
}
