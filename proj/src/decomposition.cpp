#include <algorithm>
#include <cmath>

#include "mtl/analysis.hpp"
#include "mtl/errors.hpp"
#include "mtl/sampling.hpp"

namespace mtl {

TensorFlattener::TensorFlattener(int n, int p, std::uint64_t seed) {
  Sampler rng(seed);
  const int count = static_cast<int>(monomial_basis(n, p).size()) + 2;
  for (int i = 0; i < count; ++i) points_.push_back(rng.gaussian_vector(n));
}

Vec TensorFlattener::operator()(const SymTensor& t) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = evaluate_polynomial(t, points_[static_cast<std::size_t>(i)]);
  return out;
}

namespace {

struct DesignSample {
  Polytope polytope;
  SupportPatch patch;
};

// Flat polytopes of every dimension below n carrying a box around part of the polytope, then
// random bodies of mixed dimension with random box x cone patches.
std::vector<DesignSample> design_samples(int n, const SampleSpec& spec) {
  Sampler rng(spec.seed);
  std::vector<DesignSample> out;
  for (int d = 0; d < n; ++d)
    for (int i = 0; i < spec.flats_per_dim; ++i) {
      const Polytope f = rng.polytope(n, d, d + 1 + rng.uniform_int(0, 2));
      const Vec c = f.centroid();
      const Vec half = rng.uniform_vector(n, 0.2, 0.7);
      out.push_back({f, SupportPatch::single(PositionRegion::box(c - half, c + half), rng.cone(n, rng.uniform_int(0, 2)))});
    }
  for (int i = 0; i < spec.random_samples; ++i) {
    const int d = i % 3 == 2 ? rng.uniform_int(1, n - 1) : n;
    const Polytope body = rng.polytope(n, d, d + 1 + rng.uniform_int(1, 3));
    out.push_back({body, rng.patch(n)});
  }
  return out;
}

Vec column_norms(const Mat& a) {
  Vec s(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    s[c] = a.col(c).norm();
    if (s[c] == 0.0) s[c] = 1.0;
  }
  return s;
}

}  // namespace

DecompositionDesign::DecompositionDesign(int n, int p, const SampleSpec& spec, std::vector<BasisDescriptor> basis,
                                         std::shared_ptr<BasisEvaluator> evaluator)
    : n_(n), p_(p), basis_(std::move(basis)), flattener_(n, p, spec.seed ^ 0x9e3779b97f4a7c15ull) {
  if (basis_.empty()) basis_ = enumerate_basis(n, p);
  for (const auto& d : basis_) {
    d.validate();
    if (d.n != n || d.rank() != p) throw InvalidArgument("DecompositionDesign: " + d.label() + " has the wrong shape");
  }
  if (!evaluator) evaluator = std::make_shared<BasisEvaluator>();
  // a design too small to separate the basis is grown; earlier samples stay a prefix, so the
  // evaluator cache keeps their values
  SampleSpec grown = spec;
  for (int attempt = 0;; ++attempt) {
    build(grown, *evaluator);
    if (condition_ <= 1e8 || attempt == 3) break;
    grown.random_samples += 10;
  }
}

void DecompositionDesign::build(const SampleSpec& spec, BasisEvaluator& evaluator) {
  samples_.clear();
  for (auto& s : design_samples(n_, spec)) samples_.push_back({std::move(s.polytope), std::move(s.patch)});

  const Eigen::Index m = flattener_.size();
  const Eigen::Index cols = static_cast<Eigen::Index>(basis_.size());
  const Eigen::Index n_train = static_cast<Eigen::Index>((samples_.size() + 1) / 2);
  const Eigen::Index n_held = static_cast<Eigen::Index>(samples_.size()) - n_train;
  if (n_train * m < cols) throw InvalidArgument("DecompositionDesign: sample set too small for the basis");
  train_.resize(n_train * m, cols);
  held_.resize(n_held * m, cols);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    Mat& target = i % 2 == 0 ? train_ : held_;
    const Eigen::Index row = static_cast<Eigen::Index>(i / 2) * m;
    for (Eigen::Index c = 0; c < cols; ++c)
      target.block(row, c, m, 1) = flattener_(evaluator(basis_[static_cast<std::size_t>(c)], samples_[i].polytope, samples_[i].patch));
  }
  scale_ = column_norms(train_);
  for (Eigen::Index c = 0; c < cols; ++c) {
    train_.col(c) /= scale_[c];
    held_.col(c) /= scale_[c];
  }
  full_.resize(train_.rows() + held_.rows(), cols);
  full_ << train_, held_;
  solver_.compute(train_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = solver_.singularValues();
  condition_ = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
}

DecompositionResult DecompositionDesign::decompose(const ValuationOracle& oracle) const {
  if (oracle.n != n_ || oracle.p != p_) throw DimensionError("decompose: oracle shape differs from the design");
  if (!(condition_ <= 1e10)) throw IllConditioned("decompose: evaluation matrix is ill-conditioned", condition_);
  const Eigen::Index m = flattener_.size();
  Vec b_train(train_.rows()), b_held(held_.rows());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    Vec& target = i % 2 == 0 ? b_train : b_held;
    target.segment(static_cast<Eigen::Index>(i / 2) * m, m) = flattener_(oracle(samples_[i].polytope, samples_[i].patch));
  }
  const Vec c = solver_.solve(b_train);
  auto normalized = [](const Vec& r, const Vec& b) { return b.norm() > 0 ? r.norm() / b.norm() : r.norm(); };
  DecompositionResult out;
  out.train_residual = normalized(train_ * c - b_train, b_train);
  out.residual = normalized(held_ * c - b_held, b_held);
  out.sample_count = sample_count();
  out.condition = condition_;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    out.coefficients.emplace_back(basis_[i], c[static_cast<Eigen::Index>(i)] / scale_[static_cast<Eigen::Index>(i)]);
  return out;
}

DecompositionResult decompose_on_basis(const ValuationOracle& oracle, const SampleSpec& spec, double tol,
                                       const std::vector<BasisDescriptor>& basis) {
  const DecompositionDesign design(oracle.n, oracle.p, spec, basis);
  DecompositionResult r = design.decompose(oracle);
  // drop round-off noise below the requested tolerance
  for (auto& [d, c] : r.coefficients)
    if (std::abs(c) < tol) c = 0.0;
  return r;
}

RankCertificate independence_rank(int n, int p, std::uint64_t seed) {
  SampleSpec spec;
  spec.seed = seed;
  spec.flats_per_dim = 3;
  spec.random_samples = 12;
  const DecompositionDesign design(n, p, spec);
  const Mat& a = design.matrix();
  RankCertificate cert;
  cert.expected = static_cast<int>(design.basis().size());

  // control column: a seeded combination of the others, which the rank must not count
  Sampler rng(seed + 1);
  Mat aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = a * rng.gaussian_vector(static_cast<int>(a.cols()));
  aug.col(a.cols()).normalize();

  const Vec sv = Eigen::JacobiSVD<Mat>(aug).singularValues();
  cert.singular_values = sv;
  const double cutoff = 1e-8 * sv[0];
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++cert.rank;
  if (cert.rank < sv.size()) {
    const double next = sv[cert.rank];
    cert.gap = cert.rank == 0 ? 0.0 : (next > 0 ? sv[cert.rank - 1] / next : INFINITY);
  }
  return cert;
}

}  // namespace mtl
