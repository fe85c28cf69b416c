#pragma once

#include <string>
#include <vector>

#include "mtl/polytope.hpp"
#include "mtl/spherical_measure.hpp"
#include "mtl/support_patch.hpp"
#include "mtl/sym_tensor.hpp"

namespace mtl {

enum class BasisKind { Phi, Tilde3, Tilde2 };

/// One basis valuation: Q^m phi_k^{r,s,j}, Q^m phi~^{r,s,j} (n = 3) or Q^m phi~_k^{r,s} (n = 2).
struct BasisDescriptor {
  BasisKind kind = BasisKind::Phi;
  int n = 3;
  int k = 0;  // unused for Tilde3
  int m = 0, r = 0, s = 0;
  int j = 0;  // unused for Tilde2

  /// Tensor rank of the valuation.
  int rank() const;
  /// Throws InvalidArgument unless the indices name a basis element.
  void validate() const;
  /// Short stable label, e.g. "phi[k=1,m=0,r=0,s=1,j=0]".
  std::string label() const;

  static BasisDescriptor phi(int n, int k, int r, int s, int j, int m = 0) { return {BasisKind::Phi, n, k, m, r, s, j}; }
  static BasisDescriptor tilde3(int r, int s, int j, int m = 0) { return {BasisKind::Tilde3, 3, 0, m, r, s, j}; }
  static BasisDescriptor tilde2(int k, int r, int s, int m = 0) { return {BasisKind::Tilde2, 2, k, m, r, s, 0}; }

  friend bool operator==(const BasisDescriptor&, const BasisDescriptor&) = default;
  friend auto operator<=>(const BasisDescriptor&, const BasisDescriptor&) = default;
};

struct ValuationOptions {
  QuadratureConfig quadrature;
  /// Use -v_F instead of the canonical edge vector in the n = 3 tilde valuation.
  bool flip_edges = false;
};

/// C_{n,k}^{r,s} = 1 / (r! s! omega_{n-k+s}).
double normalizing_constant(int n, int k, int r, int s);

/// phi_k^{r,s,j}(P, eta).
SymTensor phi(const Polytope& p, const SupportPatch& eta, int k, int r, int s, int j,
              const ValuationOptions& opts = {});

/// phi~^{r,s,j}(P, eta) for P in R^3.
SymTensor phi_tilde_3d(const Polytope& p, const SupportPatch& eta, int r, int s, int j,
                       const ValuationOptions& opts = {});

/// phi~_k^{r,s}(P, eta) for P in R^2, k in {0, 1}.
SymTensor phi_tilde_2d(const Polytope& p, const SupportPatch& eta, int k, int r, int s,
                       const ValuationOptions& opts = {});

/// Global Minkowski tensor Phi_k^{r,s}(P).
SymTensor minkowski_tensor(const Polytope& p, int k, int r, int s, const ValuationOptions& opts = {});

/// Q^m T.
SymTensor q_power_multiply(int m, const SymTensor& t);

SymTensor evaluate_basis_element(const BasisDescriptor& d, const Polytope& p, const SupportPatch& eta,
                                 const ValuationOptions& opts = {});

/// All basis descriptors of rank p on R^n, ordered by kind, k, m, j, r.
std::vector<BasisDescriptor> enumerate_basis(int n, int p);

}  // namespace mtl
