#include "mtl/support_patch.hpp"

#include "mtl/errors.hpp"

namespace mtl {

PositionRegion PositionRegion::all(int n) {
  PositionRegion r;
  r.kind_ = Kind::All;
  r.n_ = n;
  return r;
}

PositionRegion PositionRegion::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw DimensionError("box corners differ in dimension");
  if ((hi - lo).minCoeff() < 0) throw InvalidArgument("box needs min <= max in every coordinate");
  PositionRegion r;
  r.kind_ = Kind::Box;
  r.n_ = static_cast<int>(lo.size());
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

PositionRegion PositionRegion::polytope(Polytope p) {
  PositionRegion r;
  r.kind_ = Kind::Polytope;
  r.n_ = p.ambient_dim();
  r.polytope_ = std::move(p);
  return r;
}

std::vector<Halfspace> PositionRegion::halfspaces() const {
  switch (kind_) {
    case Kind::All:
      return {};
    case Kind::Box: {
      std::vector<Halfspace> out;
      for (int i = 0; i < n_; ++i) {
        Vec e = Vec::Zero(n_);
        e[i] = 1.0;
        out.push_back({e, hi_[i]});
        out.push_back({-e, -lo_[i]});
      }
      return out;
    }
    case Kind::Polytope:
      return polytope_->inequalities();
  }
  return {};
}

bool PositionRegion::contains(const Vec& x, double tol) const {
  for (const auto& h : halfspaces())
    if (h.normal.dot(x) > h.offset + tol) return false;
  return true;
}

PositionRegion PositionRegion::translated(const Vec& t) const {
  switch (kind_) {
    case Kind::All:
      return *this;
    case Kind::Box:
      return box(lo_ + t, hi_ + t);
    case Kind::Polytope:
      return polytope(mtl::translated(*polytope_, t));
  }
  return *this;
}

PositionRegion PositionRegion::transformed(const Mat& orthogonal) const {
  switch (kind_) {
    case Kind::All:
      return *this;
    case Kind::Box:
      return polytope(mtl::transformed(make_box(lo_, hi_), orthogonal));
    case Kind::Polytope:
      return polytope(mtl::transformed(*polytope_, orthogonal));
  }
  return *this;
}

namespace {

// Whether the halfspaces {<a, x> <= b} cut a full-dimensional piece out of a large box.
bool has_interior(int n, const std::vector<Halfspace>& hs, double extent) {
  const Polytope big = make_box(Vec::Constant(n, -extent), Vec::Constant(n, extent));
  const auto piece = clip(big, hs);
  return piece && piece->intrinsic_dim() == n && piece->volume() > 1e-12 * std::pow(extent, n);
}

bool overlap(int n, const PatchPiece& a, const PatchPiece& b) {
  auto pos = a.position.halfspaces();
  for (const auto& h : b.position.halfspaces()) pos.push_back(h);
  double extent = 1.0;
  for (const auto& h : pos) extent = std::max(extent, 4.0 * std::abs(h.offset));
  if (!has_interior(n, pos, extent)) return false;
  std::vector<Halfspace> cone;
  for (const auto& h : a.normal.halfspaces) cone.push_back({-h, 0.0});
  for (const auto& h : b.normal.halfspaces) cone.push_back({-h, 0.0});
  return has_interior(n, cone, 1.0);
}

}  // namespace

SupportPatch::SupportPatch(int n, std::vector<PatchPiece> pieces, Disjointness mode) : n_(n), pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (p.position.ambient_dim() != n) throw DimensionError("patch position has wrong dimension");
    for (const auto& h : p.normal.halfspaces)
      if (h.size() != n) throw DimensionError("patch normal cone has wrong dimension");
  }
  if (mode == Disjointness::Checked)
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      for (std::size_t j = i + 1; j < pieces_.size(); ++j)
        if (overlap(n, pieces_[i], pieces_[j]))
          throw InvalidArgument("patch pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
}

SupportPatch SupportPatch::all(int n) { return SupportPatch(n, {PatchPiece{PositionRegion::all(n), {}}}, Disjointness::Asserted); }

SupportPatch SupportPatch::single(PositionRegion position, ConeRegion normal) {
  const int n = position.ambient_dim();
  return SupportPatch(n, {PatchPiece{std::move(position), std::move(normal)}}, Disjointness::Asserted);
}

bool SupportPatch::contains(const Vec& x, const Vec& u, double tol) const {
  for (const auto& p : pieces_)
    if (p.position.contains(x, tol) && p.normal.contains(u, tol)) return true;
  return false;
}

SupportPatch SupportPatch::translated(const Vec& t) const {
  std::vector<PatchPiece> out;
  for (const auto& p : pieces_) out.push_back({p.position.translated(t), p.normal});
  return SupportPatch(n_, std::move(out), Disjointness::Asserted);
}

SupportPatch SupportPatch::transformed(const Mat& orthogonal) const {
  std::vector<PatchPiece> out;
  for (const auto& p : pieces_) {
    ConeRegion c;
    for (const auto& h : p.normal.halfspaces) c.halfspaces.push_back(orthogonal * h);
    out.push_back({p.position.transformed(orthogonal), std::move(c)});
  }
  return SupportPatch(n_, std::move(out), Disjointness::Asserted);
}

SupportPatch SupportPatch::disjoint_union(const SupportPatch& other) const {
  if (other.n_ != n_) throw DimensionError("patch union across dimensions");
  auto pieces = pieces_;
  for (const auto& p : other.pieces_) pieces.push_back(p);
  return SupportPatch(n_, std::move(pieces), Disjointness::Asserted);
}

}  // namespace mtl
