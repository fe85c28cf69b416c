#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>

#include "mtl/analysis.hpp"
#include "mtl/errors.hpp"
#include "mtl/sampling.hpp"

namespace mtl {

// ---------------------------------------------------------------------------
// Oracles

namespace {

void append_bytes(std::string& out, const Vec& v) {
  out.append(reinterpret_cast<const char*>(v.data()), sizeof(double) * static_cast<std::size_t>(v.size()));
  out.push_back('|');
}

}  // namespace

std::string fingerprint(const Polytope& p, const SupportPatch& eta) {
  std::string key;
  for (const auto& v : p.vertices()) append_bytes(key, v);
  key.push_back('#');
  for (const auto& piece : eta.pieces()) {
    key.push_back(static_cast<char>('0' + static_cast<int>(piece.position.kind())));
    if (piece.position.kind() == PositionRegion::Kind::Box) {
      append_bytes(key, piece.position.lo());
      append_bytes(key, piece.position.hi());
    } else if (piece.position.kind() == PositionRegion::Kind::Polytope) {
      for (const auto& v : piece.position.shape().vertices()) append_bytes(key, v);
    }
    key.push_back('/');
    for (const auto& h : piece.normal.halfspaces) append_bytes(key, h);
    key.push_back(';');
  }
  return key;
}

SymTensor BasisEvaluator::operator()(const BasisDescriptor& d, const Polytope& p, const SupportPatch& eta) {
  const std::string key = d.label() + "@" + fingerprint(p, eta);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  SymTensor value = evaluate_basis_element(d, p, eta, opts_);
  std::lock_guard<std::mutex> lock(mutex_);
  memo_.emplace(key, value);
  return value;
}

ValuationOracle basis_oracle(const BasisDescriptor& d, const ValuationOptions& opts) {
  d.validate();
  ValuationOracle o;
  o.n = d.n;
  o.p = d.rank();
  o.declared_degree = d.r;
  o.name = d.label();
  o.eval = [d, opts](const Polytope& p, const SupportPatch& eta) { return evaluate_basis_element(d, p, eta, opts); };
  return o;
}

ValuationOracle combination_oracle(const std::vector<std::pair<double, BasisDescriptor>>& terms,
                                   std::shared_ptr<BasisEvaluator> evaluator) {
  if (terms.empty()) throw InvalidArgument("combination_oracle: no terms");
  ValuationOracle o;
  o.n = terms.front().second.n;
  o.p = terms.front().second.rank();
  std::ostringstream name;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [c, d] = terms[i];
    d.validate();
    if (d.n != o.n || d.rank() != o.p) throw InvalidArgument("combination_oracle: terms differ in n or rank");
    o.declared_degree = std::max(o.declared_degree, d.r);
    name << (i ? " + " : "") << c << "*" << d.label();
  }
  o.name = name.str();
  if (!evaluator) evaluator = std::make_shared<BasisEvaluator>();
  o.eval = [terms, evaluator, n = o.n, p = o.p](const Polytope& poly, const SupportPatch& eta) {
    SymTensor out(n, p);
    for (const auto& [c, d] : terms) out += c * (*evaluator)(d, poly, eta);
    return out;
  };
  return o;
}

ValuationOracle corrupted_oracle(const ValuationOracle& base) {
  ValuationOracle o = base;
  o.name = "corrupted(" + base.name + ")";
  o.eval = [base](const Polytope& poly, const SupportPatch& eta) {
    SymTensor v = base(poly, eta);
    if (poly.intrinsic_dim() == poly.ambient_dim()) {
      Vec e1 = Vec::Zero(base.n);
      e1[0] = 1.0;
      v += poly.volume() * vector_power(e1, base.p);
    }
    return v;
  };
  return o;
}

// ---------------------------------------------------------------------------
// Axiom report

bool AxiomReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.pass; });
}

const AxiomResult& AxiomReport::at(const std::string& axiom) const {
  for (const auto& r : results)
    if (r.axiom == axiom) return r;
  throw InvalidArgument("no axiom named " + axiom);
}

namespace {

double rel(const SymTensor& diff, const SymTensor& ref) { return diff.max_abs() / std::max(1.0, ref.max_abs()); }

struct Tracker {
  AxiomResult result;
  bool seen = false;
  void record(double residual, int trial, const std::string& what) {
    if (std::isnan(residual)) residual = INFINITY;
    if (seen && residual <= result.residual) return;
    seen = true;
    result.residual = residual;
    result.witness = "trial " + std::to_string(trial) + ": " + what;
  }
};

// Columns of the map K -> K t^j over the monomial basis of rank p - j.
Mat multiplication_matrix(int n, int p, int j, const Vec& t) {
  const auto in = monomial_basis(n, p - j);
  const SymTensor tj = vector_power(t, j);
  Mat m(static_cast<Eigen::Index>(monomial_basis(n, p).size()), static_cast<Eigen::Index>(in.size()));
  for (std::size_t c = 0; c < in.size(); ++c) {
    SymTensor mono(n, p - j);
    mono.add_term(in[c], 1.0);
    m.col(static_cast<Eigen::Index>(c)) = coefficient_vector(sym_product(mono, tj));
  }
  return m;
}

// Translation law: lambda -> Gamma(P + lambda t, eta + lambda t) is a polynomial of degree <= q whose
// coefficient of lambda^j has the form K_j t^j with K_j independent of t.
double translation_residual(const ValuationOracle& g, const Polytope& p, const SupportPatch& eta,
                            const std::vector<Vec>& dirs) {
  const int q = g.declared_degree;
  const int n = g.n;
  const SymTensor base = g(p, eta);
  const double scale = std::max(1.0, base.max_abs());
  std::vector<double> lambdas;
  for (int i = 0; i < q + 2; ++i) lambdas.push_back(-1.0 + 2.0 * i / (q + 1));
  const Eigen::Index dim = static_cast<Eigen::Index>(monomial_basis(n, g.p).size());
  double residual = 0.0;
  // coeffs[d][j] = coefficient vector of lambda^j along direction d
  std::vector<std::vector<Vec>> coeffs;
  for (const auto& t : dirs) {
    Mat vals(dim, q + 2);
    Mat vander(q + 2, q + 2);
    for (int i = 0; i < q + 2; ++i) {
      const double lam = lambdas[static_cast<std::size_t>(i)];
      const SymTensor v = lam == 0.0 ? base : g(translated(p, lam * t), eta.translated(lam * t));
      vals.col(i) = coefficient_vector(v);
      for (int j = 0; j < q + 2; ++j) vander(i, j) = std::pow(lam, j);
    }
    const Mat c = vander.partialPivLu().solve(vals.transpose()).transpose();  // dim x (q+2)
    residual = std::max(residual, c.col(q + 1).cwiseAbs().maxCoeff() / scale);
    std::vector<Vec> per;
    for (int j = 0; j <= q; ++j) per.push_back(c.col(j));
    coeffs.push_back(std::move(per));
  }
  for (int j = 1; j <= std::min(q, g.p); ++j) {
    Mat a(dim * static_cast<Eigen::Index>(dirs.size()), static_cast<Eigen::Index>(monomial_basis(n, g.p - j).size()));
    Vec b(a.rows());
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      a.middleRows(static_cast<Eigen::Index>(d) * dim, dim) = multiplication_matrix(n, g.p, j, dirs[d]);
      b.segment(static_cast<Eigen::Index>(d) * dim, dim) = coeffs[d][static_cast<std::size_t>(j)];
    }
    const Vec k = a.colPivHouseholderQr().solve(b);
    residual = std::max(residual, (a * k - b).cwiseAbs().maxCoeff() / scale);
  }
  // coefficients of lambda^j for j > p cannot have the form K t^j
  for (int j = g.p + 1; j <= q; ++j)
    for (const auto& per : coeffs) residual = std::max(residual, per[static_cast<std::size_t>(j)].cwiseAbs().maxCoeff() / scale);
  return residual;
}

Polytope random_body(Sampler& rng, int n, int trial) {
  // mostly full-dimensional, every fourth trial a lower-dimensional polytope
  const int d = (trial % 4 == 3) ? rng.uniform_int(1, n - 1) : n;
  return rng.polytope(n, d, d + rng.uniform_int(1, 3));
}

Vec vertex_scale_vector(const Polytope& p) {
  Vec lo = p.vertex(0), hi = p.vertex(0);
  for (const auto& v : p.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return hi - lo;
}

}  // namespace

AxiomReport axiom_report(const ValuationOracle& g, std::uint64_t seed, const AxiomOptions& options) {
  if (options.trials < 1) throw InvalidArgument("axiom_report: trials must be positive");
  const int n = g.n;
  AxiomReport report;
  report.oracle = g.name;
  report.seed = seed;
  report.trials = options.trials;

  Tracker additivity{{"additivity", true, 0.0, options.tolerance, "", ""}};
  Tracker translation{{"translation", true, 0.0, options.tolerance, "", ""}};
  Tracker rotation{{"rotation", true, 0.0, options.tolerance, "", ""}};
  Tracker valuation{{"valuation", true, 0.0, options.tolerance, "", ""}};
  Tracker local{{"local", true, 0.0, options.tolerance, "", ""}};
  double anti_residual = 0.0;

  Sampler rng(seed);
  // a draw whose geometry cannot be decided at the working tolerance is redrawn
  auto attempt = [](const std::function<void()>& check) {
    for (int tries = 0; tries < 8; ++tries) {
      try {
        check();
        return;
      } catch (const DegenerateGeometry&) {
      }
    }
    throw DegenerateGeometry("axiom_report: no well-conditioned sample after 8 draws");
  };
  for (int trial = 0; trial < options.trials; ++trial) {
    // (i) measure additivity over a split patch
    attempt([&] {
      const Polytope p = random_body(rng, n, trial);
      const SupportPatch eta = rng.patch(n);
      const PatchPiece& piece = eta.pieces().front();
      SupportPatch a, b;
      std::string what;
      if (trial % 2 == 0) {
        const int axis = rng.uniform_int(0, n - 1);
        const double cut = rng.uniform(piece.position.lo()[axis], piece.position.hi()[axis]);
        Vec hi1 = piece.position.hi(), lo2 = piece.position.lo();
        hi1[axis] = cut;
        lo2[axis] = cut;
        a = SupportPatch::single(PositionRegion::box(piece.position.lo(), hi1), piece.normal);
        b = SupportPatch::single(PositionRegion::box(lo2, piece.position.hi()), piece.normal);
        what = "box split along axis " + std::to_string(axis + 1);
      } else {
        const Vec h = rng.unit_vector(n);
        ConeRegion c1 = piece.normal, c2 = piece.normal;
        c1.halfspaces.push_back(h);
        c2.halfspaces.push_back(-h);
        a = SupportPatch::single(piece.position, c1);
        b = SupportPatch::single(piece.position, c2);
        what = "cone split by a random halfspace";
      }
      const SymTensor whole = g(p, eta);
      const SymTensor split = g(p, a.disjoint_union(b));
      const double r1 = rel(whole - g(p, a) - g(p, b), whole);
      const double r2 = rel(whole - split, whole);
      additivity.record(std::max(r1, r2), trial, what);
    });

    // (ii) translation law of the declared degree
    attempt([&] {
      const Polytope p = random_body(rng, n, trial);
      const SupportPatch eta = rng.patch(n);
      std::vector<Vec> dirs = {0.6 * rng.gaussian_vector(n), 0.6 * rng.gaussian_vector(n)};
      translation.record(translation_residual(g, p, eta, dirs), trial,
                         "degree " + std::to_string(g.declared_degree) + " law along two directions");
    });

    // (iii) rotation covariance
    attempt([&] {
      const Polytope p = random_body(rng, n, trial);
      const SupportPatch eta = rng.patch(n);
      const Mat theta = rng.orthogonal(n, !options.inject_improper);
      const SymTensor v = g(p, eta);
      const SymTensor moved = g(transformed(p, theta), eta.transformed(theta));
      const SymTensor expected = substitute(v, theta);
      rotation.record(rel(moved - expected, v), trial, options.inject_improper ? "improper map" : "proper rotation");
      anti_residual = std::max(anti_residual, rel(moved + expected, v));
    });

    // (iv) valuation property on a hyperplane split
    attempt([&] {
      Polytope p = trial % 2 == 0 ? make_box(rng.uniform_vector(n, -1.0, -0.2), rng.uniform_vector(n, 0.2, 1.0))
                                  : rng.polytope(n, n, n + 1);
      const Vec a = rng.unit_vector(n);
      const double level = a.dot(p.centroid()) + 0.2 * rng.uniform(-1.0, 1.0) * vertex_scale_vector(p).norm();
      const auto lower = clip(p, {{a, level}});
      const auto upper = clip(p, {{-a, -level}});
      const auto middle = clip(p, {{a, level}, {-a, -level}});
      if (lower && upper && middle) {
        if (std::min({edge_ratio(*lower), edge_ratio(*upper), edge_ratio(*middle)}) < 1e-3)
          throw DegenerateGeometry("sliver cut");
        const SupportPatch eta = rng.patch(n);
        const SymTensor lhs = g(p, eta) + g(*middle, eta);
        const SymTensor rhs = g(*lower, eta) + g(*upper, eta);
        valuation.record(rel(lhs - rhs, lhs), trial, trial % 2 == 0 ? "box cut by a hyperplane" : "simplex cut by a hyperplane");
      }
    });

    // (v) local definedness: P and P' agree near the patch
    attempt([&] {
      const Polytope p = rng.polytope(n, n, n + 3);
      const Vec a = rng.unit_vector(n);
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& v : p.vertices()) {
        lo = std::min(lo, a.dot(v));
        hi = std::max(hi, a.dot(v));
      }
      const auto cut = clip(p, {{a, lo + 0.6 * (hi - lo)}});
      const Polytope region = *clip(make_box(Vec::Constant(n, -4.0), Vec::Constant(n, 4.0)), {{a, lo + 0.5 * (hi - lo)}});
      const SupportPatch eta =
          SupportPatch::single(PositionRegion::polytope(region), rng.cone(n, rng.uniform_int(0, 1)));
      if (cut) {
        if (edge_ratio(*cut) < 1e-3) throw DegenerateGeometry("sliver cut");
        double r = rel(g(p, eta) - g(*cut, eta), g(p, eta));
        // a far-away piece meets neither normal bundle
        const SupportPatch far = eta.disjoint_union(SupportPatch::single(
            PositionRegion::box(Vec::Constant(n, 10.0), Vec::Constant(n, 11.0)), rng.cone(n, 1)));
        r = std::max(r, rel(g(p, far) - g(*cut, eta), g(p, far)));
        local.record(r, trial, "polytope cut above the patch, plus a distant patch piece");
      }
    });
  }

  for (Tracker* t : {&additivity, &translation, &rotation, &valuation, &local}) {
    t->result.pass = t->result.residual <= t->result.tolerance;
    report.results.push_back(t->result);
  }
  auto& rot = report.results[2];
  if (!rot.pass && anti_residual <= options.tolerance) rot.signature = "sign_flip";
  return report;
}

}  // namespace mtl
