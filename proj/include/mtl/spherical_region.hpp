#pragma once

#include <vector>

#include "mtl/subspace.hpp"

namespace mtl {

/// Polyhedral cone {u : <h, u> >= 0 for every listed h} in R^n. No halfspaces means all of R^n.
/// An equality <b, u> = 0 is written as the pair b, -b.
struct ConeRegion {
  std::vector<Vec> halfspaces;

  bool is_all() const { return halfspaces.empty(); }
  bool contains(const Vec& u, double tol = 1e-12) const {
    for (const auto& h : halfspaces)
      if (h.dot(u) < -tol) return false;
    return true;
  }
};

/// S^{n-1} intersected with a carrier subspace and a polyhedral cone. The region has
/// dimension carrier.dim() - 1; constraint normals are unit vectors inside the carrier.
class SphericalRegion {
 public:
  SphericalRegion() = default;

  /// Projects the constraint normals into the carrier, normalizes them and drops
  /// zero projections and duplicates.
  SphericalRegion(Subspace carrier, const std::vector<Vec>& constraints);

  static SphericalRegion full(Subspace carrier) { return SphericalRegion(std::move(carrier), {}); }

  const Subspace& carrier() const { return carrier_; }
  const std::vector<Vec>& constraints() const { return constraints_; }
  int dim() const { return carrier_.dim() - 1; }
  int ambient_dim() const { return carrier_.ambient_dim(); }

  bool contains(const Vec& u, double tol = 1e-10) const;

  /// Constraint normals expressed in the coordinates of the carrier basis.
  std::vector<Vec> local_constraints() const;

  SphericalRegion transformed(const Mat& orthogonal) const;

 private:
  Subspace carrier_;
  std::vector<Vec> constraints_;
};

/// Halfspace merge of a region with a cone.
SphericalRegion intersect_with_cone(const SphericalRegion& region, const ConeRegion& cone);

}  // namespace mtl
