#include <cmath>

#include "mtl/analysis.hpp"
#include "mtl/errors.hpp"

namespace mtl {
namespace {

// L^perp with each basis vector sign-normalized, so components do not depend on QR signs.
Subspace canonical_complement(const Subspace& l) {
  const Subspace c = l.complement();
  Mat b = c.basis();
  for (int j = 0; j < b.cols(); ++j) b.col(j) = canonical_sign(b.col(j));
  return Subspace(b);
}

SymTensor lift(const SymTensor& component, const Subspace& complement) {
  if (complement.dim() == 0) return component;
  return pullback(component, complement);
}

// Plane rotation by a fixed generic angle inside span{a, b}.
Mat plane_rotation(const Vec& a, const Vec& b, double angle) {
  const int n = static_cast<int>(a.size());
  Mat r = Mat::Identity(n, n);
  r += (std::cos(angle) - 1.0) * (a * a.transpose() + b * b.transpose());
  r += std::sin(angle) * (b * a.transpose() - a * b.transpose());
  return r;
}

}  // namespace

SymTensor InvariantDecomposition::ambient(int j) const {
  const SymTensor& c = components.at(static_cast<std::size_t>(j));
  const SymTensor base = lift(c, complement);
  if (pairwise) return sym_product(sym_power(metric_on_subspace(l), j), base);
  return sym_product(vector_power(axis, j), base);
}

SymTensor InvariantDecomposition::recompose() const {
  SymTensor out;
  bool first = true;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const SymTensor a = ambient(static_cast<int>(j));
    if (first) {
      out = a;
      first = false;
    } else {
      out += a;
    }
  }
  return out;
}

InvariantDecomposition decompose_invariant_tensor(const SymTensor& t, const Subspace& l) {
  const int n = t.ambient_dim();
  const int r = t.rank();
  if (l.ambient_dim() != n) throw DimensionError("decompose_invariant_tensor: subspace dimension mismatch");
  const int k = l.dim();
  if (k < 1) throw InvalidArgument("decompose_invariant_tensor: need dim L >= 1");
  const double scale = std::max(1.0, t.max_abs());

  InvariantDecomposition out;
  out.l = l;
  out.complement = canonical_complement(l);

  if (k == 1) {
    // group the coefficients by powers of the coordinate along v_L
    out.axis = canonical_sign(Vec(l.basis().col(0)));
    Mat u(n, n);
    u.col(0) = out.axis;
    if (n > 1) u.rightCols(n - 1) = out.complement.basis();
    const SymTensor local = substitute(t, Mat(u.transpose()));
    const int m = std::max(1, n - 1);
    for (int j = 0; j <= r; ++j) out.components.emplace_back(m, r - j);
    for (const auto& [key, c] : local.terms()) {
      const int j = detail::exponent(key, 0);
      // shift the remaining exponents one coordinate down
      const MonomialKey rest = (key - j * detail::unit_key(0)) << 8;
      out.components[static_cast<std::size_t>(j)].add_term(n > 1 ? rest : 0, c);
    }
    if (n == 1) {
      // L = R^1: the complement is zero and only the top power survives
      for (int j = 0; j < r; ++j) out.components[static_cast<std::size_t>(j)] = SymTensor(1, r - j);
    }
    out.residual = max_abs_diff(out.recompose(), t) / scale;
    return out;
  }

  out.pairwise = true;
  // invariance under SO(L): rotations in the coordinate planes of L generate the group
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const Mat rot = plane_rotation(l.basis().col(a), l.basis().col(b), 0.7137);
      out.invariance_residual =
          std::max(out.invariance_residual, max_abs_diff(substitute(t, rot), t) / scale);
    }
  if (out.invariance_residual > 1e-8)
    throw InvalidArgument("decompose_invariant_tensor: tensor is not invariant under rotations fixing L^perp (residual " +
                          std::to_string(out.invariance_residual) + ")");

  const int c = out.complement.dim();
  const SymTensor ql = metric_on_subspace(l);
  std::vector<std::pair<int, MonomialKey>> cols;  // (j, monomial of T^{(r-2j)})
  std::vector<Vec> columns;
  for (int j = 0; 2 * j <= r; ++j) {
    const int deg = r - 2 * j;
    if (c == 0) {
      if (deg != 0) continue;
      cols.emplace_back(j, 0);
      columns.push_back(coefficient_vector(sym_power(ql, j)));
      continue;
    }
    const SymTensor qj = sym_power(ql, j);
    for (MonomialKey key : monomial_basis(c, deg)) {
      SymTensor mono(c, deg);
      mono.add_term(key, 1.0);
      cols.emplace_back(j, key);
      columns.push_back(coefficient_vector(sym_product(qj, pullback(mono, out.complement))));
    }
  }
  const Vec target = coefficient_vector(t);
  Mat a(target.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = columns[i];
  // odd rank with L = R^n leaves no spanning terms: the invariant part is zero
  const Vec x = columns.empty() ? Vec() : Vec(a.colPivHouseholderQr().solve(target));

  for (int j = 0; 2 * j <= r; ++j) out.components.emplace_back(c == 0 ? n : c, r - 2 * j);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (x[static_cast<Eigen::Index>(i)] == 0.0) continue;
    out.components[static_cast<std::size_t>(cols[i].first)].add_term(cols[i].second, x[static_cast<Eigen::Index>(i)]);
  }
  if (c == 0)
    for (int j = 0; 2 * j <= r; ++j)
      if (r - 2 * j != 0) out.components[static_cast<std::size_t>(j)] = SymTensor(n, r - 2 * j);
  out.residual = max_abs_diff(out.recompose(), t) / scale;
  return out;
}

}  // namespace mtl
