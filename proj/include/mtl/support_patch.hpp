#pragma once

#include <optional>
#include <vector>

#include "mtl/polytope.hpp"
#include "mtl/spherical_region.hpp"

namespace mtl {

/// Position factor of a patch piece: all of R^n, an axis box, or a polytope.
class PositionRegion {
 public:
  enum class Kind { All, Box, Polytope };

  static PositionRegion all(int n);
  static PositionRegion box(Vec lo, Vec hi);
  static PositionRegion polytope(Polytope p);

  Kind kind() const { return kind_; }
  int ambient_dim() const { return n_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Polytope& shape() const { return *polytope_; }

  /// H-representation; empty for All.
  std::vector<Halfspace> halfspaces() const;
  bool contains(const Vec& x, double tol = 1e-9) const;

  PositionRegion translated(const Vec& t) const;
  /// Image under an orthogonal map; a rotated box becomes a polytope.
  PositionRegion transformed(const Mat& orthogonal) const;

 private:
  Kind kind_ = Kind::All;
  int n_ = 0;
  Vec lo_, hi_;
  std::optional<Polytope> polytope_;
};

struct PatchPiece {
  PositionRegion position;
  ConeRegion normal;
};

/// Borel set of Sigma^n given as a finite union of product pieces (position) x (normal cone).
class SupportPatch {
 public:
  enum class Disjointness {
    Checked,   // verified at construction: no two pieces overlap with nonempty interior in both factors
    Asserted,  // the caller guarantees disjointness
  };

  SupportPatch() = default;
  SupportPatch(int n, std::vector<PatchPiece> pieces, Disjointness mode = Disjointness::Checked);

  /// The whole of Sigma^n.
  static SupportPatch all(int n);
  static SupportPatch single(PositionRegion position, ConeRegion normal = {});

  int ambient_dim() const { return n_; }
  const std::vector<PatchPiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  bool contains(const Vec& x, const Vec& u, double tol = 1e-12) const;

  /// eta + t
  SupportPatch translated(const Vec& t) const;
  /// theta eta = {(theta x, theta u)}
  SupportPatch transformed(const Mat& orthogonal) const;

  /// Union with a patch assumed disjoint from this one.
  SupportPatch disjoint_union(const SupportPatch& other) const;

 private:
  int n_ = 0;
  std::vector<PatchPiece> pieces_;
};

}  // namespace mtl
