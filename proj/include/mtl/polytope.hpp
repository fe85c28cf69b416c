#pragma once

#include <optional>
#include <vector>

#include "mtl/spherical_region.hpp"
#include "mtl/subspace.hpp"

namespace mtl {

/// Halfspace <normal, x> <= offset.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

/// A face of a polytope. Vertex indices refer to Polytope::vertices().
struct Face {
  int dim = 0;
  std::vector<int> vertices;
  Subspace direction;                 // L(F)
  std::vector<Vec> normal_generators;  // outer unit normals of the (relative) facets containing F
  SphericalRegion normal_cone;         // nu(P, F), a region of S_{L(F)^perp}
  Vec centroid;                        // vertex average, a point of relint F
};

/// Convex polytope given by its vertices, with the full face lattice.
///
/// Polytopes of any dimension up to the ambient one are supported; when dim P < n the
/// normal cones contain the whole orthogonal complement of aff P.
class Polytope {
 public:
  /// Convex hull of the points (n <= 4). Throws DegenerateGeometry when a supporting
  /// hyperplane cannot be classified at tolerance 1e-9 (relative to the point spread).
  static Polytope build(const std::vector<Vec>& points);

  int ambient_dim() const { return ambient_dim_; }
  int intrinsic_dim() const { return intrinsic_dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }

  /// Faces of dimension k in canonical order (lexicographic by sorted vertex-index set).
  /// k == intrinsic_dim() yields the polytope itself.
  const std::vector<Face>& faces(int k) const;
  const Face& top_face() const { return faces(intrinsic_dim_).front(); }
  std::vector<int> face_counts() const;

  /// Index of the k-face with exactly this vertex set, if any.
  std::optional<int> find_face(int k, const std::vector<int>& vertex_set) const;

  /// H-representation: relative facets plus the equalities of aff P as opposite pairs.
  const std::vector<Halfspace>& inequalities() const { return inequalities_; }
  bool contains(const Vec& x, double tol = 1e-9) const;

  Vec centroid() const;
  /// H^d(P) for d = intrinsic_dim().
  double volume() const;

  /// Simplices (vertex index lists of length k+1) triangulating the face (k, i).
  std::vector<std::vector<int>> triangulate_face(int k, int i) const;
  std::vector<std::vector<int>> triangulation() const { return triangulate_face(intrinsic_dim_, 0); }

  /// Affine frame of aff P: origin, orthonormal directions, orthogonal complement.
  const Vec& frame_origin() const { return origin_; }
  const Subspace& affine_directions() const { return directions_; }

 private:
  int ambient_dim_ = 0;
  int intrinsic_dim_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::vector<Face>> faces_;
  std::vector<Halfspace> inequalities_;
  Vec origin_;
  Subspace directions_;
};

inline Polytope build_polytope(const std::vector<Vec>& points) { return Polytope::build(points); }

/// nu(P, F); throws InvalidArgument when F is not a face of P.
SphericalRegion normal_cone(const Polytope& p, const Face& f);
inline const Subspace& direction_space(const Face& f) { return f.direction; }

/// Canonical unit vector along an edge: first nonzero coordinate positive.
Vec edge_unit_vector(const Polytope& p, const Face& edge);
Vec canonical_sign(Vec v);

/// n = 2: the vector u-bar with det[u, u-bar] = +1.
Vec oriented_complement(const Vec& u);
/// n = 3: v x u, completing (v, u, v x u) to a positively oriented orthonormal basis.
Vec oriented_complement(const Vec& v, const Vec& u);

/// (x, u) in Nor P: x a boundary point of P and u an outer unit normal there (tol 1e-9).
bool normal_bundle_contains(const Polytope& p, const Vec& x, const Vec& u, double tol = 1e-9);

/// P intersected with halfspaces; std::nullopt when the intersection is empty.
std::optional<Polytope> clip(const std::vector<Vec>& points, const std::vector<Halfspace>& halfspaces);
std::optional<Polytope> clip(const Polytope& p, const std::vector<Halfspace>& halfspaces);

Polytope translated(const Polytope& p, const Vec& t);
Polytope transformed(const Polytope& p, const Mat& linear);

/// Axis box [lo, hi] as a polytope (degenerate sides allowed).
Polytope make_box(const Vec& lo, const Vec& hi);

}  // namespace mtl
