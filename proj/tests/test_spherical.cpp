#include <doctest.h>

#include <numbers>

#include "mtl/sampling.hpp"
#include "mtl/spherical_measure.hpp"

using namespace mtl;

namespace {

constexpr double pi = std::numbers::pi;

SphericalRegion octant() { return SphericalRegion(Subspace::full(3), {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)}); }

double coeff(const SymTensor& t, MultiIndex idx) { return t.coeff(idx); }

}  // namespace

TEST_CASE("sphere areas") {
  CHECK(omega(1) == doctest::Approx(2.0));
  CHECK(omega(2) == doctest::Approx(2 * pi));
  CHECK(omega(3) == doctest::Approx(4 * pi));
  CHECK(omega(4) == doctest::Approx(2 * pi * pi));
}

TEST_CASE("trigonometric reduction against a symbolic integral") {
  CHECK(detail::trig_integral(3, 2, 0.0, pi / 3) == doctest::Approx(0.11907849302036031393).epsilon(1e-14));
  CHECK(detail::trig_integral(0, 0, 0.2, 1.7) == doctest::Approx(1.5));
}

TEST_CASE("octant moments against symbolic integrals") {
  for (auto engine : {SphericalEngine::Exact, SphericalEngine::Adaptive}) {
    QuadratureConfig cfg;
    cfg.polygons = engine;
    const double tol = engine == SphericalEngine::Exact ? 1e-13 : 1e-10;
    CHECK(std::abs(spherical_measure(octant(), cfg) - pi / 2) < tol);
    // polynomial coefficients carry the multinomial factor
    CHECK(std::abs(coeff(spherical_moment(octant(), 4, {}, cfg), {1, 1, 2, 2}) - 6 * 0.10471975511965977462) < tol);
    CHECK(std::abs(coeff(spherical_moment(octant(), 3, {}, cfg), {1, 2, 3}) - 0.75) < tol);
    CHECK(std::abs(coeff(spherical_moment(octant(), 1, {}, cfg), {3}) - pi / 4) < tol);
  }
}

TEST_CASE("weighted arc moments") {
  const SphericalRegion quarter(Subspace::full(2), {Vec::Unit(2, 0), Vec::Unit(2, 1)});
  const SymTensor ubar = spherical_moment(quarter, 0, SphericalWeight::perp_complement());
  CHECK(coeff(ubar, {1}) == doctest::Approx(-1.0));
  CHECK(coeff(ubar, {2}) == doctest::Approx(1.0));
  const Subspace plane = Subspace::span(std::vector<Vec>{Vec::Unit(3, 0), Vec::Unit(3, 1)}, 3);
  const SphericalRegion arc(plane, {Vec::Unit(3, 0), Vec::Unit(3, 1)});
  const SymTensor cross = spherical_moment(arc, 0, SphericalWeight::cross_with(Vec::Unit(3, 2)));
  CHECK(coeff(cross, {1}) == doctest::Approx(-1.0));
  CHECK(coeff(cross, {2}) == doctest::Approx(1.0));
  CHECK(coeff(cross, {3}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(spherical_moment(octant(), 0, SphericalWeight::cross_with(Vec::Unit(3, 2))), InvalidArgument);
}

TEST_CASE("point regions and degenerate regions") {
  const Subspace line = Subspace::span(std::vector<Vec>{Vec::Unit(3, 1)}, 3);
  const SphericalRegion both = SphericalRegion::full(line);
  const SphericalRegion one(line, {Vec::Unit(3, 1)});
  CHECK(spherical_measure(both) == doctest::Approx(2.0));
  CHECK(coeff(spherical_moment(one, 1), {2}) == doctest::Approx(1.0));
  CHECK(spherical_moment(both, 1).max_abs() < 1e-15);
  const SphericalRegion great_circle(Subspace::full(3), {Vec::Unit(3, 2), -Vec::Unit(3, 2)});
  CHECK(spherical_moment(great_circle, 2).is_zero());
}

TEST_CASE("three-dimensional regions in R^4") {
  const SphericalRegion sphere = SphericalRegion::full(Subspace::full(4));
  CHECK(std::abs(spherical_measure(sphere) - 2 * pi * pi) < 1e-12);
  CHECK(max_abs_diff(spherical_moment(sphere, 2), (omega(4) / 4) * metric_tensor<double>(4)) < 1e-12);
  CHECK(spherical_moment(sphere, 3).max_abs() < 1e-14);

  // orthant moments from prod Gamma((b_i + 1)/2) / (2^3 Gamma((|b| + 4)/2)), times the multinomial factor
  const SphericalRegion orthant(Subspace::full(4), {Vec::Unit(4, 0), Vec::Unit(4, 1), Vec::Unit(4, 2), Vec::Unit(4, 3)});
  CHECK(std::abs(spherical_measure(orthant) - 2 * pi * pi / 16) < 1e-12);
  CHECK(std::abs(coeff(spherical_moment(orthant, 1), {1}) - 0.52359877559829887308) < 1e-12);
  CHECK(std::abs(coeff(spherical_moment(orthant, 4), {1, 2, 3, 4}) - 24 * 0.020833333333333333333) < 1e-12);
  CHECK(std::abs(coeff(spherical_moment(orthant, 4), {1, 1, 2, 2}) - 6 * 0.051404189589007076140) < 1e-12);
  CHECK(std::abs(coeff(spherical_moment(orthant, 4), {1, 1, 1, 1}) - 0.15421256876702122842) < 1e-12);
  CHECK(std::abs(coeff(spherical_moment(orthant, 6), {1, 1, 1, 2, 4, 4}) - 60 * 0.0081812308687234198918) < 1e-12);
}

TEST_CASE("boundary reduction agrees with subdivision in R^4") {
  Sampler rng(47);
  QuadratureConfig adaptive;
  adaptive.solids = SphericalEngine::Adaptive;
  std::vector<Vec> cons;
  for (int i = 0; i < 3; ++i) cons.push_back(rng.unit_vector(4));
  const SphericalRegion r(Subspace::full(4), cons);
  for (int s : {0, 2}) CHECK(max_abs_diff(spherical_moment(r, s), spherical_moment(r, s, {}, adaptive)) < 1e-6);
}

TEST_CASE("property: solid moments are rotation covariant and additive") {
  Sampler rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Vec> cons;
    for (int i = 0; i < 1 + trial % 4; ++i) cons.push_back(rng.unit_vector(4));
    const SphericalRegion r(Subspace::full(4), cons);
    const Mat theta = rng.orthogonal(4);
    const int s = trial % 5;
    const SymTensor m = spherical_moment(r, s);
    CHECK(max_abs_diff(spherical_moment(r.transformed(theta), s), substitute(m, theta)) < 1e-11);
    const Vec h = rng.unit_vector(4);
    auto c1 = cons, c2 = cons;
    c1.push_back(h);
    c2.push_back(-h);
    const SymTensor sum = spherical_moment(SphericalRegion(Subspace::full(4), c1), s) +
                          spherical_moment(SphericalRegion(Subspace::full(4), c2), s);
    CHECK(max_abs_diff(sum, m) < 1e-11);
  }
}

TEST_CASE("polytope moments of the unit square") {
  const Polytope square = make_box(Vec::Zero(2), Vec::Ones(2));
  const SymTensor m = polytope_moment(square, 2);
  CHECK(coeff(m, {1, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(coeff(m, {1, 2}) == doctest::Approx(0.5));
  CHECK(polytope_moment(square, 0).value() == doctest::Approx(1.0));
}

TEST_CASE("property: moments are rotation covariant and additive") {
  Sampler rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    std::vector<Vec> cons;
    for (int i = 0; i < 1 + trial % 3; ++i) cons.push_back(rng.unit_vector(n));
    const SphericalRegion r(Subspace::full(n), cons);
    const Mat theta = rng.orthogonal(n);
    const int s = trial % 4;
    const SymTensor m = spherical_moment(r, s);
    CHECK(max_abs_diff(spherical_moment(r.transformed(theta), s), substitute(m, theta)) < 1e-12);
    // splitting by a halfspace adds up
    const Vec h = rng.unit_vector(n);
    auto c1 = cons, c2 = cons;
    c1.push_back(h);
    c2.push_back(-h);
    const SymTensor sum = spherical_moment(SphericalRegion(Subspace::full(n), c1), s) +
                          spherical_moment(SphericalRegion(Subspace::full(n), c2), s);
    CHECK(max_abs_diff(sum, m) < 1e-12);
  }
}
