#pragma once

#include <cstdint>
#include <random>

#include "mtl/polytope.hpp"
#include "mtl/spherical_region.hpp"
#include "mtl/support_patch.hpp"

namespace mtl {

/// Seeded source of random geometry. Only the raw 64-bit output of mt19937_64 is used, so
/// streams are identical on every platform.
/// Shortest edge over diameter; 1 for points. Random samples below 1e-3 are rejected because
/// their slivers make hull and clipping decisions ill-posed at the working tolerance.
double edge_ratio(const Polytope& p);

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive
  double gaussian();
  Vec gaussian_vector(int n);
  Vec unit_vector(int n);
  Vec uniform_vector(int n, double a, double b);

  /// Haar-distributed orthogonal map: QR of a Gaussian matrix with sign-fixed diagonal,
  /// then a column flip to reach the requested determinant.
  Mat orthogonal(int n, bool proper = true);
  Rotation rotation(int n, bool proper = true) { return Rotation(orthogonal(n, proper)); }

  Subspace subspace(int n, int k);

  /// Convex hull of `points` random points in a random d-flat through a point near the origin
  /// (d = n gives a full-dimensional body); retries until the hull has dimension d.
  Polytope polytope(int n, int d, int points);
  Polytope polytope(int n) { return polytope(n, n, n + 3); }

  /// Cone cut out by `count` random halfspaces through the origin.
  ConeRegion cone(int n, int count);
  /// Random box x random cone (at most two halfspaces).
  SupportPatch patch(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mtl
