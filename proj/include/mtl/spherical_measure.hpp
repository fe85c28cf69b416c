#pragma once

#include "mtl/polytope.hpp"
#include "mtl/spherical_region.hpp"
#include "mtl/sym_tensor.hpp"

namespace mtl {

/// Surface measure of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double omega(int n);

/// int_A x^r dH^d over a d-polytope A (d = intrinsic dimension), exact by simplex decomposition.
SymTensor polytope_moment(const Polytope& a, int r);

/// int over the simplex with the given vertices of x^r dH^d.
SymTensor simplex_moment(const std::vector<Vec>& vertices, int r);

/// Linear factor w(u) multiplying u^s in a spherical integrand.
struct SphericalWeight {
  enum class Kind { None, CrossWith, PerpComplement };
  Kind kind = Kind::None;
  Vec v;  // the axis for CrossWith

  static SphericalWeight none() { return {}; }
  /// w(u) = v x u (n = 3).
  static SphericalWeight cross_with(Vec axis) { return {Kind::CrossWith, std::move(axis)}; }
  /// w(u) = u-bar, the quarter turn of u (n = 2).
  static SphericalWeight perp_complement() { return {Kind::PerpComplement, Vec()}; }
};

enum class SphericalEngine {
  Exact,     // closed forms: arcs by reduction formulas, polygons and solids by boundary reduction
  Adaptive,  // geodesic subdivision with fixed-order rules
};

struct QuadratureConfig {
  SphericalEngine arcs = SphericalEngine::Exact;
  SphericalEngine polygons = SphericalEngine::Exact;
  /// Exact for solids reduces every moment to facet polygons; only the volume is a 2-d quadrature.
  SphericalEngine solids = SphericalEngine::Exact;
  double arc_tol = 1e-12;  // adaptive arcs only
  double polygon_tol = 1e-10;
  double solid_tol = 1e-7;     // adaptive 3-dimensional regions (n = 4)
  double volume_tol = 1e-13;   // polar quadrature for the volume of a 3-dimensional region
  int max_depth = 16;
};

/// int_R w(u) u^s dH^{dim R}(u). Lower-dimensional (degenerate) regions give zero.
SymTensor spherical_moment(const SphericalRegion& region, int s,
                           const SphericalWeight& weight = SphericalWeight::none(),
                           const QuadratureConfig& config = {});

/// H^{dim R}(R).
double spherical_measure(const SphericalRegion& region, const QuadratureConfig& config = {});

/// Monomial moments int_R z^beta over the region in carrier coordinates, for all |beta| = degree,
/// ordered as monomial_basis(carrier.dim(), degree).
std::vector<double> carrier_moments(const SphericalRegion& region, int degree, const QuadratureConfig& config = {});

namespace detail {
/// int_{t0}^{t1} cos^a(t) sin^b(t) dt by reduction formulas.
double trig_integral(int a, int b, double t0, double t1);
}  // namespace detail

}  // namespace mtl
