#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mtl/polytope.hpp"
#include "mtl/support_patch.hpp"
#include "mtl/sym_tensor.hpp"
#include "mtl/valuations.hpp"

namespace mtl {

// ---------------------------------------------------------------------------
// Oracles

/// A black-box tensor-valued map on (polytope, patch) pairs.
struct ValuationOracle {
  int n = 3;
  int p = 0;
  /// Degree q of the translation law the oracle claims to satisfy.
  int declared_degree = 0;
  std::string name;
  std::function<SymTensor(const Polytope&, const SupportPatch&)> eval;

  SymTensor operator()(const Polytope& poly, const SupportPatch& eta) const { return eval(poly, eta); }
};

/// Memo of basis-element values keyed by descriptor and an exact fingerprint of (P, eta).
class BasisEvaluator {
 public:
  explicit BasisEvaluator(ValuationOptions opts = {}) : opts_(std::move(opts)) {}
  SymTensor operator()(const BasisDescriptor& d, const Polytope& p, const SupportPatch& eta);
  const ValuationOptions& options() const { return opts_; }

 private:
  ValuationOptions opts_;
  std::mutex mutex_;
  std::map<std::string, SymTensor> memo_;
};

/// Exact byte fingerprint of a polytope and patch, used as a cache key.
std::string fingerprint(const Polytope& p, const SupportPatch& eta);

ValuationOracle basis_oracle(const BasisDescriptor& d, const ValuationOptions& opts = {});
/// sum_i c_i * d_i; the optional evaluator shares cached basis values between oracles.
ValuationOracle combination_oracle(const std::vector<std::pair<double, BasisDescriptor>>& terms,
                                   std::shared_ptr<BasisEvaluator> evaluator = nullptr);
/// Negative control: adds H^n(P) e_1^p, which depends on all of P.
ValuationOracle corrupted_oracle(const ValuationOracle& base);

// ---------------------------------------------------------------------------
// Axiom report

struct AxiomResult {
  std::string axiom;  // additivity | translation | rotation | valuation | local
  bool pass = true;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string witness;    // trial that produced the largest residual
  std::string signature;  // "sign_flip" when a failing rotation check is exactly anti-covariant
};

struct AxiomReport {
  std::string oracle;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<AxiomResult> results;

  bool all_pass() const;
  const AxiomResult& at(const std::string& axiom) const;
};

struct AxiomOptions {
  int trials = 50;
  double tolerance = 1e-7;
  /// Draw improper orthogonal maps in the rotation check.
  bool inject_improper = false;
};

AxiomReport axiom_report(const ValuationOracle& oracle, std::uint64_t seed, const AxiomOptions& options);
inline AxiomReport axiom_report(const ValuationOracle& oracle, std::uint64_t seed, int trials) {
  AxiomOptions o;
  o.trials = trials;
  return axiom_report(oracle, seed, o);
}

// ---------------------------------------------------------------------------
// Flat densities

/// Delta_k(L, B): the value of the oracle on A x B for a unit box A inside a flat k-cube P in L,
/// divided by H^k(A). B must lie in the unit sphere of L^perp. Recomputes with a larger cube
/// and throws NotLocallyDefined if the two densities differ by more than 1e-9.
SymTensor extract_delta(const ValuationOracle& oracle, const Subspace& l, const SphericalRegion& b);

struct DeltaSample {
  Subspace l;
  SphericalRegion b;
  SymTensor value;
};

struct DeltaFamilyOptions {
  /// n = 3, k = 1: include the family Q^a Q_L^{b-a} v_L int (v_L x u) u^{p-2b-2}.
  bool include_cross_family = true;
};

struct DeltaTerm {
  std::string label;
  SymTensor value;
};

/// The spanning family for Delta_k at (L, B) with rank p.
std::vector<DeltaTerm> delta_family(int n, int k, int p, const Subspace& l, const SphericalRegion& b,
                                    const DeltaFamilyOptions& opts = {});

struct DeltaFit {
  std::vector<std::string> labels;
  Vec coefficients;
  double residual = 0.0;  // ||A c - b|| / ||b||, 0 when b = 0
  double condition = 0.0;
};

DeltaFit fit_delta_representation(const std::vector<DeltaSample>& samples, int n, int k, int p,
                                  const DeltaFamilyOptions& opts = {});

// ---------------------------------------------------------------------------
// Decomposition on the basis

/// Linear functionals used to flatten rank-p tensors: p_T(y_t) at seeded points y_t.
class TensorFlattener {
 public:
  TensorFlattener(int n, int p, std::uint64_t seed);
  int size() const { return static_cast<int>(points_.size()); }
  Vec operator()(const SymTensor& t) const;

 private:
  std::vector<Vec> points_;
};

struct SampleSpec {
  std::uint64_t seed = 1;
  /// Flat polytopes of each dimension 0..n-1 with patches beta x omega.
  int flats_per_dim = 3;
  /// Random polytopes (full and lower dimensional) with random box x cone patches. A design whose
  /// training matrix is ill-conditioned draws up to 30 more.
  int random_samples = 10;
};

struct DecompositionResult {
  std::vector<std::pair<BasisDescriptor, double>> coefficients;
  double residual = 0.0;        // normalized RMS on held-out samples
  double train_residual = 0.0;  // normalized RMS on the fitting samples
  int sample_count = 0;
  double condition = 0.0;
};

/// Evaluation design of a list of basis elements over seeded samples, reusable across oracles.
class DecompositionDesign {
 public:
  DecompositionDesign(int n, int p, const SampleSpec& spec, std::vector<BasisDescriptor> basis = {},
                      std::shared_ptr<BasisEvaluator> evaluator = nullptr);

  /// Throws IllConditioned when the condition number of the column-normalized training matrix exceeds 1e10.
  DecompositionResult decompose(const ValuationOracle& oracle) const;

  const std::vector<BasisDescriptor>& basis() const { return basis_; }
  /// Column-normalized matrix over all samples (training rows first).
  const Mat& matrix() const { return full_; }
  int sample_count() const { return static_cast<int>(samples_.size()); }
  double condition() const { return condition_; }

 private:
  struct Sample {
    Polytope polytope;
    SupportPatch patch;
  };
  void build(const SampleSpec& spec, BasisEvaluator& evaluator);

  int n_, p_;
  std::vector<BasisDescriptor> basis_;
  std::vector<Sample> samples_;
  TensorFlattener flattener_;
  Mat train_, held_, full_;
  Vec scale_;
  double condition_ = 0.0;
  Eigen::JacobiSVD<Mat> solver_;
};

DecompositionResult decompose_on_basis(const ValuationOracle& oracle, const SampleSpec& spec, double tol = 1e-8,
                                       const std::vector<BasisDescriptor>& basis = {});

struct RankCertificate {
  int rank = 0;
  int expected = 0;
  /// sigma_r / sigma_{r+1} after appending one column that is a combination of the others.
  double gap = 0.0;
  Vec singular_values;
  bool pass() const { return rank == expected; }
};

RankCertificate independence_rank(int n, int p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Invariant tensors

struct InvariantDecomposition {
  /// Case (b), k = 1: components[j] = T^{(r-j)}. Case (a): components[j] = T^{(r-2j)}.
  /// Each component is written in the coordinates of `complement` (on R^n when L^perp = 0).
  std::vector<SymTensor> components;
  Subspace l;
  Subspace complement;  // L^perp with a canonical basis
  Vec axis;             // v_L in case (b)
  bool pairwise = false;  // true for case (a)
  double residual = 0.0;  // of the recomposition
  double invariance_residual = 0.0;

  /// pi^* of component j as an ambient tensor.
  SymTensor ambient(int j) const;
  SymTensor recompose() const;
};

InvariantDecomposition decompose_invariant_tensor(const SymTensor& t, const Subspace& l);

}  // namespace mtl
