// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "mtl/analysis.hpp"
#include "mtl/errors.hpp"
#include "mtl/sampling.hpp"
#include "mtl/spherical_measure.hpp"
#include "mtl/valuations.hpp"

using namespace mtl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elementary_symmetric(const Vec& a, int k) {
  std::vector<double> e(static_cast<std::size_t>(a.size()) + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j >= 1; --j) e[j] += a[i] * e[j - 1];
  return e[static_cast<std::size_t>(k)];
}

// --- 1
Outcome intrinsic_volumes() {
  Sampler rng(101);
  double worst = 0.0;
  for (int n : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      const Vec lo = rng.uniform_vector(n, -1.0, 1.0);
      const Vec sides = rng.uniform_vector(n, 0.2, 2.0);
      const Polytope box = make_box(lo, lo + sides);
      for (int k = 0; k <= n - 1; ++k) {
        const double v = phi(box, SupportPatch::all(n), k, 0, 0, 0).value();
        worst = std::max(worst, std::abs(v - elementary_symmetric(sides, k)));
      }
    }
  return {worst < 1e-8, fmt("max |V_k - e_k(a)| = %.2e", worst)};
}

// --- 2
Outcome minkowski_relation() {
  Sampler rng(202);
  double worst = 0.0;
  for (int n : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      const Polytope p = rng.polytope(n, n, n + 2 + trial % 6);
      worst = std::max(worst, phi(p, SupportPatch::all(n), n - 1, 0, 1, 0).max_abs());
    }
  return {worst < 1e-8, fmt("max coefficient = %.2e", worst)};
}

// --- 3
Outcome axiom_suite() {
  double worst = 0.0;
  int elements = 0;
  std::string failed;
  for (int n : {2, 3})
    for (int p = 0; p <= 3; ++p)
      for (const auto& d : enumerate_basis(n, p)) {
        const AxiomReport r = axiom_report(basis_oracle(d), 3000 + static_cast<std::uint64_t>(elements), 50);
        ++elements;
        for (const auto& a : r.results) {
          worst = std::max(worst, a.residual);
          if (!a.pass && failed.empty()) failed = " first failure " + d.label() + "/" + a.axiom + " " + a.witness;
        }
      }
  return {worst < 1e-7 && failed.empty(),
          std::to_string(elements) + " elements x 5 axioms x 50 trials, max residual " + fmt("%.2e", worst) + failed};
}

// --- 4
Outcome reflection_dichotomy() {
  Sampler rng(404);
  double phi_worst = 0.0, tilde_worst = 0.0;
  std::vector<BasisDescriptor> elems;
  for (int n : {2, 3})
    for (int p = 0; p <= 3; ++p)
      for (const auto& d : enumerate_basis(n, p)) elems.push_back(d);
  for (int trial = 0; trial < 20; ++trial)
    for (int n : {2, 3}) {
      const Mat theta = rng.orthogonal(n, false);
      const Polytope poly = rng.polytope(n);
      const SupportPatch eta = rng.patch(n);
      const Polytope moved = transformed(poly, theta);
      const SupportPatch moved_eta = eta.transformed(theta);
      for (const auto& d : elems) {
        if (d.n != n) continue;
        const SymTensor v = evaluate_basis_element(d, poly, eta);
        const SymTensor image = substitute(v, theta);
        const SymTensor w = evaluate_basis_element(d, moved, moved_eta);
        const double scale = std::max(1.0, v.max_abs());
        if (d.kind == BasisKind::Phi)
          phi_worst = std::max(phi_worst, max_abs_diff(w, image) / scale);
        else
          tilde_worst = std::max(tilde_worst, (w + image).max_abs() / scale);
      }
    }
  return {phi_worst < 1e-8 && tilde_worst < 1e-8,
          "Phi covariance " + fmt("%.2e", phi_worst) + ", Tilde anti-covariance " + fmt("%.2e", tilde_worst)};
}

// --- 5
Outcome linear_independence() {
  bool ok = true;
  std::string detail;
  for (auto [n, p, want] : {std::tuple{3, 2, 14}, std::tuple{2, 1, 6}, std::tuple{2, 2, 12}}) {
    const RankCertificate c = independence_rank(n, p, 7);
    ok = ok && c.rank == want && c.expected == want && c.gap > 1e6;
    detail += "(n=" + std::to_string(n) + ",p=" + std::to_string(p) + "): (" + std::to_string(c.rank) + "," +
              std::to_string(c.expected) + ") gap " + fmt("%.1e", c.gap) + "; ";
  }
  return {ok, detail};
}

// --- 6
Outcome constructive_decomposition() {
  Sampler rng(606);
  double coef_err = 0.0, resid = 0.0;
  for (auto [n, p] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 2}, std::pair{3, 3}}) {
    auto evaluator = std::make_shared<BasisEvaluator>();
    SampleSpec spec;
    spec.seed = 60 + static_cast<std::uint64_t>(10 * n + p);
    const DecompositionDesign design(n, p, spec, {}, evaluator);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::pair<double, BasisDescriptor>> terms;
      for (const auto& d : design.basis()) terms.emplace_back(rng.uniform(-10.0, 10.0), d);
      const DecompositionResult r = design.decompose(combination_oracle(terms, evaluator));
      resid = std::max(resid, r.residual);
      for (std::size_t i = 0; i < terms.size(); ++i)
        coef_err = std::max(coef_err, std::abs(r.coefficients[i].second - terms[i].first));
    }
  }
  // the tilde valuation is outside the span of the Phi family
  std::vector<BasisDescriptor> phi_only;
  for (const auto& d : enumerate_basis(3, 2))
    if (d.kind == BasisKind::Phi) phi_only.push_back(d);
  const DecompositionResult outside =
      decompose_on_basis(basis_oracle(BasisDescriptor::tilde3(0, 0, 0)), SampleSpec{}, 1e-8, phi_only);
  return {coef_err < 1e-5 && resid < 1e-7 && outside.residual > 0.1,
          "max coefficient error " + fmt("%.2e", coef_err) + ", held-out residual " + fmt("%.2e", resid) +
              ", tilde vs Phi-only residual " + fmt("%.3f", outside.residual)};
}

// --- 7
SphericalRegion random_region(Sampler& rng, const Subspace& carrier) {
  const int count = carrier.dim() == 1 ? rng.uniform_int(0, 1) : rng.uniform_int(1, 2);
  std::vector<Vec> cons;
  for (int i = 0; i < count; ++i) cons.push_back(carrier.basis() * rng.unit_vector(carrier.dim()));
  return SphericalRegion(carrier, cons);
}

Outcome delta_representations() {
  Sampler rng(707);
  double worst = 0.0;
  int fits = 0;
  std::string failed;
  for (int n : {2, 3})
    for (int k = 0; k <= n - 1; ++k) {
      std::vector<std::pair<Subspace, SphericalRegion>> geometry;
      for (int i = 0; i < 30; ++i) {
        const Subspace l = rng.subspace(n, k);
        geometry.emplace_back(l, random_region(rng, l.complement()));
      }
      for (int p = 0; p <= 3; ++p)
        for (const auto& d : enumerate_basis(n, p)) {
          if (d.r != 0) continue;
          const ValuationOracle o = basis_oracle(d);
          std::vector<DeltaSample> samples;
          for (const auto& [l, b] : geometry) samples.push_back({l, b, extract_delta(o, l, b)});
          const DeltaFit fit = fit_delta_representation(samples, n, k, p);
          ++fits;
          worst = std::max(worst, fit.residual);
          if (fit.residual >= 1e-7 && failed.empty())
            failed = " first failure " + d.label() + " at k=" + std::to_string(k) + fmt(" (%.2e)", fit.residual);
        }
    }
  return {worst < 1e-7, std::to_string(fits) + " fits over 30 (L,B) each, max residual " + fmt("%.2e", worst) + failed};
}

// --- 8
SymTensor random_tensor(Sampler& rng, int n, int r) {
  SymTensor t(n, r);
  for (MonomialKey key : monomial_basis(n, r)) t.add_term(key, rng.uniform(-1.0, 1.0));
  return t;
}

// Mean of y^a over the unit sphere: prod Gamma((a_i + 1)/2) / Gamma((|a| + n)/2) / pi^{n/2}, zero for odd a_i.
double sphere_mean(MonomialKey key, int n) {
  double num = 1.0;
  int deg = 0;
  for (int i = 0; i < n; ++i) {
    const int a = detail::exponent(key, i);
    if (a % 2 == 1) return 0.0;
    num *= std::tgamma(0.5 * (a + 1));
    deg += a;
  }
  return num / std::tgamma(0.5 * (deg + n)) * std::tgamma(0.5 * n) / std::tgamma(0.5) / std::pow(std::numbers::pi, 0.5 * (n - 1));
}

// Haar average over the rotations of L that fix L^perp pointwise, by an exact cubature.
SymTensor group_average(const SymTensor& t, const Subspace& l) {
  const int n = l.ambient_dim();
  if (l.dim() == n && n == 4) {
    // theta^T y is uniform on the sphere of radius |y|
    if (t.rank() % 2 == 1) return SymTensor(n, t.rank());
    double mean = 0.0;
    for (const auto& [key, c] : t.terms()) mean += c * sphere_mean(key, n);
    return mean * sym_power(metric_tensor<double>(n), t.rank() / 2);
  }
  const Mat u = l.basis();
  const Mat fixed = Mat::Identity(n, n) - u * u.transpose();
  auto lift = [&](const Mat& r) { return Mat(u * r * u.transpose() + fixed); };
  SymTensor acc(n, t.rank());
  if (l.dim() == 2) {
    const int m = 16;
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * i / m;
      Mat r(2, 2);
      r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
      acc += (1.0 / m) * substitute(t, lift(r));
    }
    return acc;
  }
  // ZYZ Euler angles; Gauss-Legendre in cos(beta)
  const int m = 12;
  const double x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                       0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
  const double w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                       0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
  auto rz = [](double a) {
    Mat r = Mat::Identity(3, 3);
    r(0, 0) = std::cos(a), r(0, 1) = -std::sin(a), r(1, 0) = std::sin(a), r(1, 1) = std::cos(a);
    return r;
  };
  for (int i = 0; i < m; ++i)
    for (int g = 0; g < 6; ++g)
      for (int j = 0; j < m; ++j) {
        const double beta = std::acos(x[g]);
        Mat ry = Mat::Identity(3, 3);
        ry(0, 0) = std::cos(beta), ry(0, 2) = std::sin(beta), ry(2, 0) = -std::sin(beta), ry(2, 2) = std::cos(beta);
        const Mat r = rz(2.0 * std::numbers::pi * i / m) * ry * rz(2.0 * std::numbers::pi * j / m);
        acc += (w[g] / (2.0 * m * m)) * substitute(t, lift(r));
      }
  return acc;
}

Outcome invariant_tensors() {
  Sampler rng(808);
  double worst_b = 0.0, worst_a = 0.0;
  for (int trial = 0; trial < 20; ++trial)
    for (int n : {2, 3, 4})
      for (int r = 0; r <= 4; ++r) {
        const SymTensor t = random_tensor(rng, n, r);
        worst_b = std::max(worst_b, decompose_invariant_tensor(t, rng.subspace(n, 1)).residual);
      }
  for (int trial = 0; trial < 5; ++trial)
    for (int n : {3, 4})
      for (int k = 2; k <= n; ++k)
        for (int r = 0; r <= 4; ++r) {
          const Subspace l = rng.subspace(n, k);
          const SymTensor t = group_average(random_tensor(rng, n, r), l);
          worst_a = std::max(worst_a, decompose_invariant_tensor(t, l).residual);
        }
  return {worst_b < 1e-12 && worst_a < 1e-8,
          "case (b) residual " + fmt("%.2e", worst_b) + ", case (a) residual " + fmt("%.2e", worst_a)};
}

// --- 9
// int_{t0}^{t1} cos^a sin^b via the exponential expansion, independent of the reduction formulas.
double trig_reference(int a, int b, double t0, double t1) {
  using C = std::complex<double>;
  std::vector<C> coeff(static_cast<std::size_t>(2 * (a + b) + 1), C(0.0));
  const int off = a + b;
  coeff[static_cast<std::size_t>(off)] = 1.0;
  auto multiply = [&](C cm, C cp) {  // by cm e^{-it} + cp e^{it}
    std::vector<C> next(coeff.size(), C(0.0));
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      if (coeff[i] == C(0.0)) continue;
      if (i > 0) next[i - 1] += cm * coeff[i];
      if (i + 1 < coeff.size()) next[i + 1] += cp * coeff[i];
    }
    coeff = next;
  };
  for (int i = 0; i < a; ++i) multiply(0.5, 0.5);
  for (int i = 0; i < b; ++i) multiply(C(0.0, 0.5), C(0.0, -0.5));
  C total = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const int f = static_cast<int>(i) - off;
    if (f == 0)
      total += coeff[i] * (t1 - t0);
    else
      total += coeff[i] * (std::exp(C(0.0, f * t1)) - std::exp(C(0.0, f * t0))) / C(0.0, f);
  }
  return total.real();
}

Outcome quadrature_cross_check() {
  Sampler rng(909);
  QuadratureConfig adaptive;
  adaptive.arcs = SphericalEngine::Adaptive;
  double arc_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const Mat q = rng.orthogonal(n);
    const Vec a = q.col(0), b = q.col(1);
    const double t0 = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double t1 = t0 + rng.uniform(0.05, 3.0);
    const int s = rng.uniform_int(0, 5);
    const Subspace carrier(Mat(q.leftCols(2)));
    const SphericalRegion arc(carrier, {Vec(-std::sin(t0) * a + std::cos(t0) * b), Vec(std::sin(t1) * a - std::cos(t1) * b)});
    // closed form: sum over binomial terms of a^{s-i} b^i int cos^{s-i} sin^i
    SymTensor expected(n, s);
    double binom = 1.0;
    for (int i = 0; i <= s; ++i) {
      expected += binom * trig_reference(s - i, i, t0, t1) * sym_product(vector_power(a, s - i), vector_power(b, i));
      binom = binom * (s - i) / (i + 1);
    }
    const SymTensor got = spherical_moment(arc, s, SphericalWeight::none(), adaptive);
    arc_worst = std::max(arc_worst, max_abs_diff(got, expected));
  }
  const SymTensor q = metric_tensor<double>(3);
  const SphericalRegion sphere = SphericalRegion::full(Subspace::full(3));
  QuadratureConfig adaptive_polygons;
  adaptive_polygons.polygons = SphericalEngine::Adaptive;
  const double sphere_err =
      std::max(max_abs_diff(spherical_moment(sphere, 2), (omega(3) / 3.0) * q),
               max_abs_diff(spherical_moment(sphere, 2, SphericalWeight::none(), adaptive_polygons), (omega(3) / 3.0) * q));
  return {arc_worst < 1e-9 && sphere_err < 1e-8,
          "arcs max error " + fmt("%.2e", arc_worst) + ", full-sphere s=2 error " + fmt("%.2e", sphere_err)};
}

}  // namespace

int main() {
  report(1, "intrinsic volumes of boxes", intrinsic_volumes);
  report(2, "Minkowski relation", minkowski_relation);
  report(3, "axiom suite for every basis element with p <= 3", axiom_suite);
  report(4, "reflection dichotomy", reflection_dichotomy);
  report(5, "linear independence rank", linear_independence);
  report(6, "constructive decomposition", constructive_decomposition);
  report(7, "flat density representations", delta_representations);
  report(8, "invariant tensor round trip", invariant_tensors);
  report(9, "quadrature cross-check", quadrature_cross_check);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
