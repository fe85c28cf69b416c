#include <cmath>

#include "mtl/analysis.hpp"
#include "mtl/errors.hpp"

namespace mtl {
namespace {

// Prism origin + L [lo,hi]^k + L^perp [-1,1]^{n-k}, full dimensional.
Polytope prism(const Subspace& l, const Subspace& perp, double lo, double hi) {
  const int n = l.ambient_dim();
  const int k = l.dim();
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec x = Vec::Zero(n);
    for (int i = 0; i < k; ++i) x += ((mask >> i) & 1 ? hi : lo) * l.basis().col(i);
    for (int i = 0; i < n - k; ++i) x += ((mask >> (k + i)) & 1 ? 1.0 : -1.0) * perp.basis().col(i);
    pts.push_back(x);
  }
  return Polytope::build(pts);
}

Polytope flat_cube(const Subspace& l, double lo, double hi) {
  const int k = l.dim();
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vec x = Vec::Zero(l.ambient_dim());
    for (int i = 0; i < k; ++i) x += ((mask >> i) & 1 ? hi : lo) * l.basis().col(i);
    pts.push_back(x);
  }
  return Polytope::build(pts);
}

void check_region(const Subspace& l, const SphericalRegion& b) {
  const int n = l.ambient_dim();
  if (b.ambient_dim() != n) throw DimensionError("extract_delta: region lives in another dimension");
  if (b.carrier().dim() != n - l.dim()) throw DimensionError("extract_delta: region must lie in the sphere of L^perp");
  if (l.dim() > 0 && (l.basis().transpose() * b.carrier().basis()).cwiseAbs().maxCoeff() > 1e-9)
    throw DimensionError("extract_delta: region carrier is not orthogonal to L");
}

// (Q - u^2)^b u^e on S^1 written through u-bar: u-bar^{2b+e'} u^{q}.
SymTensor ubar_moment(const SphericalRegion& b, int jbar, int q) {
  const int n = b.ambient_dim();
  const int half = jbar / 2;
  const bool odd = jbar % 2 == 1;
  const SymTensor metric = metric_tensor<double>(n);
  SymTensor out(n, jbar + q);
  double binom = 1.0;
  for (int i = 0; i <= half; ++i) {
    // u-bar^2 = Q - u^2 on the unit circle
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    const SymTensor m = spherical_moment(b, q + 2 * i, odd ? SphericalWeight::perp_complement() : SphericalWeight::none());
    out += sign * binom * sym_product(sym_power(metric, half - i), m);
    binom = binom * (half - i) / (i + 1);
  }
  return out;
}

std::string tag(const char* name, std::initializer_list<std::pair<const char*, int>> idx) {
  std::string s = name;
  s += "[";
  bool first = true;
  for (const auto& [k, v] : idx) {
    if (!first) s += ",";
    first = false;
    s += k;
    s += "=" + std::to_string(v);
  }
  return s + "]";
}

}  // namespace

SymTensor extract_delta(const ValuationOracle& oracle, const Subspace& l, const SphericalRegion& b) {
  const int n = oracle.n;
  const int k = l.dim();
  if (l.ambient_dim() != n) throw DimensionError("extract_delta: subspace dimension mismatch");
  if (k > n - 1) throw InvalidArgument("extract_delta: need dim L <= n-1");
  check_region(l, b);

  ConeRegion cone;
  cone.halfspaces = b.constraints();
  if (k == 0) {
    const Polytope point = Polytope::build({Vec::Zero(n)});
    return oracle(point, SupportPatch::single(PositionRegion::box(Vec::Constant(n, -0.5), Vec::Constant(n, 0.5)), cone));
  }
  for (int i = 0; i < k; ++i) {
    cone.halfspaces.push_back(l.basis().col(i));
    cone.halfspaces.push_back(-l.basis().col(i));
  }
  const Subspace perp = l.complement();
  const SupportPatch eta = SupportPatch::single(PositionRegion::polytope(prism(l, perp, 0.25, 0.75)), cone);
  const double area = std::pow(0.5, k);
  const SymTensor delta = (1.0 / area) * oracle(flat_cube(l, 0.0, 1.0), eta);
  const SymTensor check = (1.0 / area) * oracle(flat_cube(l, -1.0, 2.0), eta);
  const double diff = max_abs_diff(delta, check) / std::max(1.0, delta.max_abs());
  if (diff > 1e-9)
    throw NotLocallyDefined("extract_delta: density depends on the flat polytope (difference " + std::to_string(diff) + ")");
  return delta;
}

std::vector<DeltaTerm> delta_family(int n, int k, int p, const Subspace& l, const SphericalRegion& b,
                                    const DeltaFamilyOptions& opts) {
  if (k < 0 || k > n - 1) throw InvalidArgument("delta_family: need 0 <= k <= n-1");
  if (p < 0) throw InvalidArgument("delta_family: negative rank");
  const SymTensor q = metric_tensor<double>(n);
  const SymTensor ql = metric_on_subspace(l);
  std::vector<DeltaTerm> out;
  auto moment = [&](int s) { return spherical_moment(b, s); };

  if (n == 2 && k == 0) {
    for (int j = 0; j <= p; ++j) out.push_back({tag("ubar", {{"j", j}}), ubar_moment(b, j, p - j)});
    return out;
  }
  if (n == 2 && k == 1) {
    for (int a = 0; 2 * a <= p; ++a)
      out.push_back({tag("alpha", {{"a", a}}), sym_product(sym_power(q, a), moment(p - 2 * a))});
    for (int a = 0; 2 * a + 1 <= p; ++a)
      out.push_back({tag("beta", {{"a", a}}), sym_product(sym_power(q, a), ubar_moment(b, 1, p - 2 * a - 1))});
    return out;
  }
  if (k == 0) {
    for (int j = 0; 2 * j <= p; ++j) out.push_back({tag("q", {{"j", j}}), sym_product(sym_power(q, j), moment(p - 2 * j))});
    return out;
  }
  if (k == n - 1) {
    // u^2 = Q - Q_L on the two-point sphere of L^perp, so only parities of u survive
    for (int a = 0; 2 * a <= p; ++a)
      for (int c = 0; 2 * a + 2 * c <= p; ++c) {
        const int e = p - 2 * a - 2 * c;
        if (e > 1) continue;
        out.push_back({tag("qql", {{"a", a}, {"c", c}, {"e", e}}),
                       sym_product(sym_product(sym_power(q, a), sym_power(ql, c)), moment(e))});
      }
    return out;
  }
  for (int bb = 0; 2 * bb <= p; ++bb)
    for (int a = 0; a <= bb; ++a)
      out.push_back({tag("qql", {{"a", a}, {"b", bb}}),
                     sym_product(sym_product(sym_power(q, a), sym_power(ql, bb - a)), moment(p - 2 * bb))});
  if (n == 3 && k == 1 && opts.include_cross_family) {
    const Vec v = canonical_sign(Vec(l.basis().col(0)));
    const SymTensor vt = SymTensor::vector(v);
    for (int bb = 0; 2 * bb + 2 <= p; ++bb)
      for (int a = 0; a <= bb; ++a) {
        const SymTensor m = spherical_moment(b, p - 2 * bb - 2, SphericalWeight::cross_with(v));
        out.push_back({tag("cross", {{"a", a}, {"b", bb}}),
                       sym_product(sym_product(sym_product(sym_power(q, a), sym_power(ql, bb - a)), vt), m)});
      }
  }
  return out;
}

DeltaFit fit_delta_representation(const std::vector<DeltaSample>& samples, int n, int k, int p,
                                  const DeltaFamilyOptions& opts) {
  if (samples.empty()) throw InvalidArgument("fit_delta_representation: no samples");
  const TensorFlattener flat(n, p, 0x5eed);
  const Eigen::Index rows_per = flat.size();
  DeltaFit fit;
  Mat a;
  Vec rhs(rows_per * static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    if (smp.l.dim() != k) throw InvalidArgument("fit_delta_representation: samples must share k");
    if (smp.value.ambient_dim() != n || smp.value.rank() != p)
      throw DimensionError("fit_delta_representation: sample value has the wrong shape");
    const auto family = delta_family(n, k, p, smp.l, smp.b, opts);
    if (i == 0) {
      for (const auto& t : family) fit.labels.push_back(t.label);
      a.resize(rhs.size(), static_cast<Eigen::Index>(family.size()));
    }
    const Eigen::Index row = static_cast<Eigen::Index>(i) * rows_per;
    for (std::size_t c = 0; c < family.size(); ++c) a.block(row, static_cast<Eigen::Index>(c), rows_per, 1) = flat(family[c].value);
    rhs.segment(row, rows_per) = flat(smp.value);
  }
  if (a.cols() == 0) {
    fit.coefficients = Vec();
    fit.residual = rhs.norm() == 0.0 ? 0.0 : 1.0;
    return fit;
  }
  // normalize columns before judging the conditioning
  Vec scale(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    scale[c] = a.col(c).norm();
    if (scale[c] > 0) a.col(c) /= scale[c];
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  fit.condition = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  if (!(fit.condition <= 1e10)) throw IllConditioned("fit_delta_representation: rank-deficient sample design", fit.condition);
  Vec c = svd.solve(rhs);
  const double bnorm = rhs.norm();
  fit.residual = bnorm == 0.0 ? (a * c).norm() : (a * c - rhs).norm() / bnorm;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] /= scale[i];
  fit.coefficients = c;
  return fit;
}

}  // namespace mtl
