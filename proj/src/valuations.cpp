#include "mtl/valuations.hpp"

#include <cmath>
#include <optional>

#include "mtl/errors.hpp"

namespace mtl {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// int_{F cap A} x^r dH^k, or nullopt when F cap A is H^k-null.
std::optional<SymTensor> face_position_moment(const Polytope& p, int k, int i, const PositionRegion& a, int r) {
  const Face& f = p.faces(k)[static_cast<std::size_t>(i)];
  auto whole_face = [&] {
    SymTensor out(p.ambient_dim(), r);
    for (const auto& s : p.triangulate_face(k, i)) {
      std::vector<Vec> v;
      for (int idx : s) v.push_back(p.vertex(idx));
      out += simplex_moment(v, r);
    }
    return out;
  };
  if (a.kind() == PositionRegion::Kind::All) return whole_face();

  double spread = 1.0;
  for (int idx : f.vertices) spread = std::max(spread, p.vertex(idx).cwiseAbs().maxCoeff());
  const double tol = 1e-9 * spread;
  const auto hs = a.halfspaces();
  bool inside = true;
  for (const auto& h : hs) {
    bool all_out = true;
    for (int idx : f.vertices) {
      const double sv = h.normal.dot(p.vertex(idx)) - h.offset;
      if (sv > tol) inside = false;
      if (sv <= tol) all_out = false;
    }
    if (all_out) return std::nullopt;
  }
  if (inside) return whole_face();
  std::vector<Vec> pts;
  for (int idx : f.vertices) pts.push_back(p.vertex(idx));
  const auto piece = clip(pts, hs);
  if (!piece || piece->intrinsic_dim() < k) return std::nullopt;
  return polytope_moment(*piece, r);
}

SphericalRegion piece_region(const Face& f, const ConeRegion& c) {
  return c.is_all() ? f.normal_cone : intersect_with_cone(f.normal_cone, c);
}

// sum over pieces of (int_{F cap A} x^r) (int_{nu cap C} w(u) u^s)
SymTensor face_patch_integral(const Polytope& p, int k, int i, const SupportPatch& eta, int r, int s,
                              const SphericalWeight& w, const ValuationOptions& opts) {
  const int n = p.ambient_dim();
  const int wrank = w.kind == SphericalWeight::Kind::None ? 0 : 1;
  SymTensor acc(n, r + s + wrank);
  const Face& f = p.faces(k)[static_cast<std::size_t>(i)];
  for (const auto& piece : eta.pieces()) {
    const auto pos = face_position_moment(p, k, i, piece.position, r);
    if (!pos || pos->is_zero()) continue;
    const SymTensor nor = spherical_moment(piece_region(f, piece.normal), s, w, opts.quadrature);
    if (nor.is_zero()) continue;
    acc += sym_product(*pos, nor);
  }
  return acc;
}

void check_patch(const Polytope& p, const SupportPatch& eta) {
  if (eta.ambient_dim() != p.ambient_dim()) throw DimensionError("patch and polytope live in different dimensions");
}

}  // namespace

double normalizing_constant(int n, int k, int r, int s) {
  if (k < 0 || k > n - 1) throw InvalidArgument("normalizing_constant: need 0 <= k <= n-1");
  if (r < 0 || s < 0) throw InvalidArgument("normalizing_constant: negative index");
  return 1.0 / (factorial(r) * factorial(s) * omega(n - k + s));
}

SymTensor phi(const Polytope& p, const SupportPatch& eta, int k, int r, int s, int j, const ValuationOptions& opts) {
  const int n = p.ambient_dim();
  if (k < 0 || k > n - 1) throw InvalidArgument("phi: need 0 <= k <= n-1");
  if (r < 0 || s < 0 || j < 0) throw InvalidArgument("phi: negative index");
  if (k == 0 && j != 0) throw InvalidArgument("phi: j must vanish for k = 0");
  check_patch(p, eta);
  SymTensor out(n, 2 * j + r + s);
  const auto& faces = p.faces(k);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    SymTensor local = face_patch_integral(p, k, static_cast<int>(i), eta, r, s, SphericalWeight::none(), opts);
    if (local.is_zero()) continue;
    if (j > 0) local = sym_product(sym_power(metric_on_subspace(faces[i].direction), j), local);
    out += local;
  }
  return normalizing_constant(n, k, r, s) * out;
}

SymTensor phi_tilde_3d(const Polytope& p, const SupportPatch& eta, int r, int s, int j, const ValuationOptions& opts) {
  if (p.ambient_dim() != 3) throw DimensionError("phi_tilde_3d needs n = 3");
  if (r < 0 || s < 0 || j < 0) throw InvalidArgument("phi_tilde_3d: negative index");
  check_patch(p, eta);
  SymTensor out(3, 2 * j + r + s + 2);
  const auto& edges = p.faces(1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Vec v = edge_unit_vector(p, edges[i]);
    if (opts.flip_edges) v = -v;
    const SymTensor local =
        face_patch_integral(p, 1, static_cast<int>(i), eta, r, s, SphericalWeight::cross_with(v), opts);
    if (local.is_zero()) continue;
    out += sym_product(vector_power(v, 2 * j + 1), local);
  }
  return out;
}

SymTensor phi_tilde_2d(const Polytope& p, const SupportPatch& eta, int k, int r, int s, const ValuationOptions& opts) {
  if (p.ambient_dim() != 2) throw DimensionError("phi_tilde_2d needs n = 2");
  if (k != 0 && k != 1) throw InvalidArgument("phi_tilde_2d: k must be 0 or 1");
  if (r < 0 || s < 0) throw InvalidArgument("phi_tilde_2d: negative index");
  check_patch(p, eta);
  SymTensor out(2, r + s + 1);
  const auto& faces = p.faces(k);
  for (std::size_t i = 0; i < faces.size(); ++i)
    out += face_patch_integral(p, k, static_cast<int>(i), eta, r, s, SphericalWeight::perp_complement(), opts);
  return out;
}

SymTensor minkowski_tensor(const Polytope& p, int k, int r, int s, const ValuationOptions& opts) {
  // Lambda_k of a polytope carries the factor 1/omega_{n-k}, which cancels the omega_{n-k}
  // of the global normalization: Phi_k^{r,s}(P) = phi_k^{r,s,0}(P, Sigma^n).
  return phi(p, SupportPatch::all(p.ambient_dim()), k, r, s, 0, opts);
}

SymTensor q_power_multiply(int m, const SymTensor& t) {
  if (m < 0) throw InvalidArgument("q_power_multiply: negative power");
  if (m == 0) return t;
  return sym_product(sym_power(metric_tensor(t.ambient_dim()), m), t);
}

SymTensor evaluate_basis_element(const BasisDescriptor& d, const Polytope& p, const SupportPatch& eta,
                                 const ValuationOptions& opts) {
  d.validate();
  if (p.ambient_dim() != d.n) throw DimensionError("descriptor and polytope dimensions differ");
  switch (d.kind) {
    case BasisKind::Phi:
      return q_power_multiply(d.m, phi(p, eta, d.k, d.r, d.s, d.j, opts));
    case BasisKind::Tilde3:
      return q_power_multiply(d.m, phi_tilde_3d(p, eta, d.r, d.s, d.j, opts));
    case BasisKind::Tilde2:
      return q_power_multiply(d.m, phi_tilde_2d(p, eta, d.k, d.r, d.s, opts));
  }
  throw InvalidArgument("unknown basis kind");
}

}  // namespace mtl
