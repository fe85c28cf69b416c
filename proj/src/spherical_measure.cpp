#include "mtl/spherical_measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <functional>
#include <numbers>
#include <optional>
#include <queue>

#include "mtl/errors.hpp"

namespace mtl {

// ---------------------------------------------------------------------------
// SphericalRegion

SphericalRegion::SphericalRegion(Subspace carrier, const std::vector<Vec>& constraints)
    : carrier_(std::move(carrier)) {
  for (const auto& h : constraints) {
    if (h.size() != carrier_.ambient_dim()) throw DimensionError("spherical region constraint has wrong dimension");
    Vec p = carrier_.project(h);
    const double len = p.norm();
    if (len < 1e-12 * std::max(1.0, h.norm())) continue;
    p /= len;
    bool dup = false;
    for (const auto& q : constraints_)
      if ((p - q).cwiseAbs().maxCoeff() < 1e-12) {
        dup = true;
        break;
      }
    if (!dup) constraints_.push_back(std::move(p));
  }
}

bool SphericalRegion::contains(const Vec& u, double tol) const {
  if (u.size() != ambient_dim()) return false;
  if (std::abs(u.norm() - 1.0) > tol) return false;
  if ((u - carrier_.project(u)).norm() > tol) return false;
  for (const auto& h : constraints_)
    if (h.dot(u) < -tol) return false;
  return true;
}

std::vector<Vec> SphericalRegion::local_constraints() const {
  std::vector<Vec> out;
  for (const auto& h : constraints_) out.push_back(carrier_.basis().transpose() * h);
  return out;
}

SphericalRegion SphericalRegion::transformed(const Mat& orthogonal) const {
  const Mat moved = orthogonal * carrier_.basis();
  std::vector<Vec> cons;
  for (const auto& h : constraints_) cons.push_back(orthogonal * h);
  Subspace carrier = carrier_.dim() == 0 ? Subspace::zero(ambient_dim()) : Subspace::span(moved);
  if (carrier_.dim() > 0 && ((moved.transpose() * moved) - Mat::Identity(moved.cols(), moved.cols())).cwiseAbs().maxCoeff() <= 1e-12)
    carrier = Subspace(moved);
  return SphericalRegion(std::move(carrier), cons);
}

SphericalRegion intersect_with_cone(const SphericalRegion& region, const ConeRegion& cone) {
  std::vector<Vec> cons = region.constraints();
  for (const auto& h : cone.halfspaces) {
    if (h.size() != region.ambient_dim()) throw DimensionError("cone halfspace has wrong dimension");
    cons.push_back(h);
  }
  return SphericalRegion(region.carrier(), cons);
}

// ---------------------------------------------------------------------------
// Flat moments

double omega(int n) {
  if (n < 1) throw InvalidArgument("omega: n must be positive");
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

SymTensor simplex_moment(const std::vector<Vec>& vertices, int r) {
  if (vertices.empty()) throw InvalidArgument("simplex_moment: no vertices");
  const int n = static_cast<int>(vertices.front().size());
  const int d = static_cast<int>(vertices.size()) - 1;
  double fact_d = 1.0;
  for (int i = 2; i <= d; ++i) fact_d *= i;
  double vol = 1.0;
  if (d > 0) {
    Mat e(n, d);
    for (int i = 0; i < d; ++i) e.col(i) = vertices[static_cast<std::size_t>(i + 1)] - vertices[0];
    vol = std::sqrt(std::max(0.0, (e.transpose() * e).determinant())) / fact_d;
  }
  // int_simplex x^r = vol * d! r! / (d+r)! * h_r(v_0, ..., v_d), h_r the complete symmetric sum
  std::vector<SymTensor> h(static_cast<std::size_t>(r + 1));
  for (int q = 0; q <= r; ++q) h[static_cast<std::size_t>(q)] = vector_power(vertices[0], q);
  for (int j = 1; j <= d; ++j) {
    std::vector<SymTensor> pw;
    for (int q = 0; q <= r; ++q) pw.push_back(vector_power(vertices[static_cast<std::size_t>(j)], q));
    std::vector<SymTensor> next;
    for (int q = 0; q <= r; ++q) {
      SymTensor acc(n, q);
      for (int i = 0; i <= q; ++i) acc += sym_product(pw[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(q - i)]);
      next.push_back(std::move(acc));
    }
    h = std::move(next);
  }
  double scale = vol;
  for (int i = 1; i <= r; ++i) scale *= static_cast<double>(i) / static_cast<double>(d + i);
  return scale * h[static_cast<std::size_t>(r)];
}

SymTensor polytope_moment(const Polytope& a, int r) {
  SymTensor out(a.ambient_dim(), r);
  for (const auto& s : a.triangulation()) {
    std::vector<Vec> v;
    for (int i : s) v.push_back(a.vertex(i));
    out += simplex_moment(v, r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spherical moments

namespace detail {

double trig_integral(int a, int b, double t0, double t1) {
  if (a < 0 || b < 0) throw InvalidArgument("trig_integral: negative exponent");
  auto pw = [](double x, int e) { return e == 0 ? 1.0 : std::pow(x, e); };
  if (a >= 2) {
    const double head = (pw(std::cos(t1), a - 1) * pw(std::sin(t1), b + 1) - pw(std::cos(t0), a - 1) * pw(std::sin(t0), b + 1)) / (a + b);
    return head + static_cast<double>(a - 1) / (a + b) * trig_integral(a - 2, b, t0, t1);
  }
  if (b >= 2) {
    const double head = -(pw(std::cos(t1), a + 1) * pw(std::sin(t1), b - 1) - pw(std::cos(t0), a + 1) * pw(std::sin(t0), b - 1)) / (a + b);
    return head + static_cast<double>(b - 1) / (a + b) * trig_integral(a, b - 2, t0, t1);
  }
  if (a == 0 && b == 0) return t1 - t0;
  if (a == 1 && b == 0) return std::sin(t1) - std::sin(t0);
  if (a == 0 && b == 1) return std::cos(t0) - std::cos(t1);
  return 0.5 * (std::sin(t1) * std::sin(t1) - std::sin(t0) * std::sin(t0));
}

}  // namespace detail

namespace {

using Moments = std::vector<double>;

double monomial_value(MonomialKey key, const Vec& z) {
  double v = 1.0;
  for (int i = 0; i < z.size(); ++i)
    for (int e = detail::exponent(key, i); e > 0; --e) v *= z[i];
  return v;
}

void accumulate(Moments& acc, const std::vector<MonomialKey>& keys, const Vec& z, double w) {
  for (std::size_t i = 0; i < keys.size(); ++i) acc[i] += w * monomial_value(keys[i], z);
}

double max_gap(const Moments& a, const Moments& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Moments& operator+=(Moments& a, const Moments& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

bool has_opposite_pair(const std::vector<Vec>& cons) {
  for (std::size_t i = 0; i < cons.size(); ++i)
    for (std::size_t j = i + 1; j < cons.size(); ++j)
      if ((cons[i] + cons[j]).cwiseAbs().maxCoeff() < 1e-12) return true;
  return false;
}

// Null vector of the (c-1) x c matrix by cofactors.
Vec cofactor_null(const Mat& rows) {
  const int c = static_cast<int>(rows.cols());
  Vec out(c);
  for (int j = 0; j < c; ++j) {
    Mat minor(c - 1, c - 1);
    for (int k = 0, kk = 0; k < c; ++k)
      if (k != j) minor.col(kk++) = rows.col(k);
    const double det = minor.determinant();
    out[j] = (j % 2 == 0) ? det : -det;
  }
  return out;
}

// Unit extreme rays of the pointed cone {z : <h, z> >= 0 for h in cons} in R^c.
std::vector<Vec> extreme_rays(const std::vector<Vec>& cons, int c) {
  std::vector<Vec> rays;
  const int m = static_cast<int>(cons.size());
  std::vector<int> idx(static_cast<std::size_t>(c - 1));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == c - 1) {
      Mat rows(c - 1, c);
      for (int i = 0; i < c - 1; ++i) rows.row(i) = cons[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].transpose();
      Vec r = cofactor_null(rows);
      const double len = r.norm();
      if (len < 1e-12) return;
      r /= len;
      for (double sign : {1.0, -1.0}) {
        const Vec cand = sign * r;
        bool ok = true;
        for (const auto& h : cons)
          if (h.dot(cand) < -1e-12) {
            ok = false;
            break;
          }
        if (!ok) continue;
        bool dup = false;
        for (const auto& q : rays)
          if ((q - cand).cwiseAbs().maxCoeff() < 1e-10) {
            dup = true;
            break;
          }
        if (!dup) rays.push_back(cand);
      }
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return rays;
}

std::vector<std::vector<Vec>> orthant_pieces_constraints(const std::vector<Vec>& cons, int c) {
  std::vector<std::vector<Vec>> out;
  for (int mask = 0; mask < (1 << c); ++mask) {
    std::vector<Vec> all = cons;
    for (int i = 0; i < c; ++i) {
      Vec e = Vec::Zero(c);
      e[i] = (mask & (1 << i)) ? -1.0 : 1.0;
      all.push_back(e);
    }
    out.push_back(std::move(all));
  }
  return out;
}

// Counterclockwise (seen from outside) spherical polygons covering the region, starting at
// their lexicographically smallest vertex.
std::vector<std::vector<Eigen::Vector3d>> spherical_polygons(const std::vector<Vec>& cons) {
  std::vector<std::vector<Eigen::Vector3d>> polys;
  for (const auto& piece : orthant_pieces_constraints(cons, 3)) {
    const auto rays = extreme_rays(piece, 3);
    if (rays.size() < 3) continue;
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& r : rays) g += Eigen::Vector3d(r);
    g.normalize();
    Eigen::Vector3d t1 = Eigen::Vector3d(rays[0]) - Eigen::Vector3d(rays[0]).dot(g) * g;
    if (t1.norm() < 1e-8) t1 = Eigen::Vector3d(rays[1]) - Eigen::Vector3d(rays[1]).dot(g) * g;
    t1.normalize();
    const Eigen::Vector3d t2 = g.cross(t1);
    std::vector<std::pair<double, Eigen::Vector3d>> ordered;
    for (const auto& r : rays) {
      const Eigen::Vector3d v(r);
      ordered.emplace_back(std::atan2(v.dot(t2), v.dot(t1)), v);
    }
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Eigen::Vector3d> poly;
    for (const auto& [ang, v] : ordered) poly.push_back(v);
    auto smallest = std::min_element(poly.begin(), poly.end(), [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
      return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });
    std::rotate(poly.begin(), smallest, poly.end());
    polys.push_back(std::move(poly));
  }
  return polys;
}

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

// Exact polygon moments via the surface Laplacian: for f homogeneous of degree D on S^2,
// D(D+1) int_R f = int_R Lap f + sum over edges of int <grad f, inward conormal>.
class GreenPolygon {
 public:
  explicit GreenPolygon(const std::vector<Eigen::Vector3d>& poly) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) area_ += triangle_area(poly[0], poly[i], poly[i + 1]);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector3d a = poly[i];
      const Eigen::Vector3d b = poly[(i + 1) % poly.size()];
      const Eigen::Vector3d axb = a.cross(b);
      Edge e;
      e.a = a;
      e.e = (b - a.dot(b) * a).normalized();
      e.normal = axb.normalized();
      e.angle = std::atan2(axb.norm(), a.dot(b));
      edges_.push_back(e);
    }
  }

  double area() const { return area_; }

  double integrate(MonomialKey key) {
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    int deg = 0;
    for (int i = 0; i < 3; ++i) deg += detail::exponent(key, i);
    double value = 0.0;
    if (deg == 0) {
      value = area_;
    } else {
      double sum = 0.0;
      for (int i = 0; i < 3; ++i) {
        const int b = detail::exponent(key, i);
        if (b >= 2) sum += b * (b - 1) * integrate(key - 2 * detail::unit_key(i));
      }
      for (std::size_t k = 0; k < edges_.size(); ++k) {
        for (int i = 0; i < 3; ++i) {
          const int b = detail::exponent(key, i);
          if (b == 0 || edges_[k].normal[i] == 0.0) continue;
          sum += edges_[k].normal[i] * b * edge_moment(k, key - detail::unit_key(i));
        }
      }
      value = sum / (deg * (deg + 1));
    }
    memo_.emplace(key, value);
    return value;
  }

 private:
  struct Edge {
    Eigen::Vector3d a, e, normal;
    double angle = 0.0;
    std::map<MonomialKey, double> moments;
  };

  // int_0^angle of z^gamma along z = cos(t) a + sin(t) e
  double edge_moment(std::size_t k, MonomialKey gamma) {
    Edge& edge = edges_[k];
    auto it = edge.moments.find(gamma);
    if (it != edge.moments.end()) return it->second;
    int deg = 0;
    for (int i = 0; i < 3; ++i) deg += detail::exponent(gamma, i);
    SymTensor mono(3, deg);
    mono.add_term(gamma, 1.0);
    Mat m(2, 3);
    m.row(0) = edge.a.transpose();
    m.row(1) = edge.e.transpose();
    const SymTensor trig = substitute(mono, m);
    double value = 0.0;
    for (const auto& [tk, c] : trig.terms())
      value += c * detail::trig_integral(detail::exponent(tk, 0), detail::exponent(tk, 1), 0.0, edge.angle);
    edge.moments.emplace(gamma, value);
    return value;
  }

  double area_ = 0.0;
  std::vector<Edge> edges_;
  std::map<MonomialKey, double> memo_;
};

// Fixed-order rules on flat simplices, in barycentric coordinates with weights summing to 1.
struct SimplexRule {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

const SimplexRule& gauss_legendre_5() {
  static const SimplexRule rule = [] {
    const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891, 0.2369268850561891};
    SimplexRule r;
    for (int i = 0; i < 5; ++i) {
      const double t = 0.5 * (x[i] + 1.0);
      r.points.push_back({1.0 - t, t});
      r.weights.push_back(0.5 * w[i]);
    }
    return r;
  }();
  return rule;
}

const SimplexRule& radon_7() {
  static const SimplexRule rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0, b = 1.0 - 2.0 * a;
    const double c = (6.0 + s15) / 21.0, d = 1.0 - 2.0 * c;
    const double wa = (155.0 - s15) / 1200.0, wc = (155.0 + s15) / 1200.0;
    SimplexRule r;
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a, a, b}, {a, b, a}, {b, a, a}, {c, c, d}, {c, d, c}, {d, c, c}};
    r.weights = {9.0 / 40, wa, wa, wa, wc, wc, wc};
    return r;
  }();
  return rule;
}

// Grundmann-Moeller rule of degree 5 on the tetrahedron.
const SimplexRule& grundmann_moeller_5() {
  static const SimplexRule rule = [] {
    const int n = 3, s = 2, d = 2 * s + 1;
    SimplexRule r;
    auto factorial = [](int k) {
      double f = 1.0;
      for (int i = 2; i <= k; ++i) f *= i;
      return f;
    };
    for (int i = 0; i <= s; ++i) {
      const double w = ((i % 2 == 0) ? 1.0 : -1.0) * std::pow(2.0, -2 * s) * std::pow(d + n - 2 * i, d) /
                       (factorial(i) * factorial(d + n - i)) * factorial(n);
      const int total = s - i;
      for (int b0 = 0; b0 <= total; ++b0)
        for (int b1 = 0; b0 + b1 <= total; ++b1)
          for (int b2 = 0; b0 + b1 + b2 <= total; ++b2) {
            const int b3 = total - b0 - b1 - b2;
            const double den = d + n - 2 * i;
            r.points.push_back({(2 * b0 + 1) / den, (2 * b1 + 1) / den, (2 * b2 + 1) / den, (2 * b3 + 1) / den});
            r.weights.push_back(w);
          }
    }
    return r;
  }();
  return rule;
}

// Radially projected simplex rule: a spherical simplex with unit vertices is the image of the
// flat simplex under x -> x/|x|, with density h/|x|^{k+1} (h the distance of the flat hull).
class AdaptiveSimplex {
 public:
  AdaptiveSimplex(int c, int degree, const QuadratureConfig& cfg)
      : c_(c), keys_(monomial_basis(c, degree)), cfg_(cfg) {}

  Moments integrate(const std::vector<Vec>& verts, double tol) {
    const Moments base = rule(verts);
    return refine(verts, base, tol, 0);
  }

  std::size_t size() const { return keys_.size(); }

 private:
  const SimplexRule& rule_for(int k) const {
    if (k == 1) return gauss_legendre_5();
    if (k == 2) return radon_7();
    return grundmann_moeller_5();
  }

  Moments rule(const std::vector<Vec>& v) const {
    const int k = static_cast<int>(v.size()) - 1;
    Mat e(c_, k);
    for (int i = 0; i < k; ++i) e.col(i) = v[static_cast<std::size_t>(i + 1)] - v[0];
    const Mat gram = e.transpose() * e;
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    const double vol = std::sqrt(std::max(0.0, gram.determinant())) / fact;
    Moments acc(keys_.size(), 0.0);
    if (vol == 0.0) return acc;
    // distance from the origin to the affine hull of the vertices
    const Vec foot = v[0] - e * gram.ldlt().solve(e.transpose() * v[0]);
    const double h = foot.norm();
    const SimplexRule& r = rule_for(k);
    for (std::size_t q = 0; q < r.weights.size(); ++q) {
      Vec x = Vec::Zero(c_);
      for (int i = 0; i <= k; ++i) x += r.points[q][static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      const double len = x.norm();
      accumulate(acc, keys_, x / len, r.weights[q] * vol * h / std::pow(len, k + 1));
    }
    return acc;
  }

  static Vec mid(const Vec& a, const Vec& b) { return (a + b).normalized(); }

  std::vector<std::vector<Vec>> children(const std::vector<Vec>& v) const {
    const int k = static_cast<int>(v.size()) - 1;
    if (k == 1) {
      const Vec m = mid(v[0], v[1]);
      return {{v[0], m}, {m, v[1]}};
    }
    if (k == 2) {
      const Vec m01 = mid(v[0], v[1]), m12 = mid(v[1], v[2]), m02 = mid(v[0], v[2]);
      return {{v[0], m01, m02}, {m01, v[1], m12}, {m02, m12, v[2]}, {m01, m12, m02}};
    }
    const Vec m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m03 = mid(v[0], v[3]);
    const Vec m12 = mid(v[1], v[2]), m13 = mid(v[1], v[3]), m23 = mid(v[2], v[3]);
    return {{v[0], m01, m02, m03}, {m01, v[1], m12, m13}, {m02, m12, v[2], m23}, {m03, m13, m23, v[3]},
            {m01, m02, m03, m13}, {m01, m02, m12, m13}, {m02, m03, m13, m23}, {m02, m12, m13, m23}};
  }

  Moments refine(const std::vector<Vec>& v, const Moments& parent, double tol, int depth) {
    const auto kids = children(v);
    std::vector<Moments> parts;
    Moments sum(keys_.size(), 0.0);
    for (const auto& kid : kids) {
      parts.push_back(rule(kid));
      sum += parts.back();
    }
    if (depth >= cfg_.max_depth || max_gap(sum, parent) < tol) return sum;
    Moments out(keys_.size(), 0.0);
    const double child_tol = tol / static_cast<double>(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) out += refine(kids[i], parts[i], child_tol, depth + 1);
    return out;
  }

  int c_;
  std::vector<MonomialKey> keys_;
  QuadratureConfig cfg_;
};

Moments point_moments(const std::vector<Vec>& cons, int degree) {
  const auto keys = monomial_basis(1, degree);
  Moments out(keys.size(), 0.0);
  for (double z : {1.0, -1.0}) {
    bool ok = true;
    for (const auto& h : cons)
      if (h[0] * z < -1e-12) ok = false;
    if (ok) out[0] += std::pow(z, degree);
  }
  return out;
}

// Arc [t0, t1] of the unit circle cut out by half-circle constraints, if of positive length.
std::optional<std::pair<double, double>> arc_interval(const std::vector<Vec>& cons) {
  constexpr double pi = std::numbers::pi;
  if (cons.empty()) return std::make_pair(0.0, 2.0 * pi);
  double phi0 = std::atan2(cons[0][1], cons[0][0]);
  double lo = phi0 - pi / 2, hi = phi0 + pi / 2;
  for (std::size_t i = 1; i < cons.size(); ++i) {
    double phi = std::atan2(cons[i][1], cons[i][0]);
    const double mid = 0.5 * (lo + hi);
    while (phi < mid - pi) phi += 2 * pi;
    while (phi >= mid + pi) phi -= 2 * pi;
    lo = std::max(lo, phi - pi / 2);
    hi = std::min(hi, phi + pi / 2);
    if (hi <= lo) return std::nullopt;
  }
  return std::make_pair(lo, hi);
}

Moments arc_moments(const std::vector<Vec>& cons, int degree, const QuadratureConfig& cfg) {
  const auto keys = monomial_basis(2, degree);
  Moments out(keys.size(), 0.0);
  if (has_opposite_pair(cons)) return out;
  const auto iv = arc_interval(cons);
  if (!iv) return out;
  const auto [t0, t1] = *iv;
  if (cfg.arcs == SphericalEngine::Exact) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      out[i] = detail::trig_integral(detail::exponent(keys[i], 0), detail::exponent(keys[i], 1), t0, t1);
    return out;
  }
  // adaptive: split into pieces of at most a quarter turn
  AdaptiveSimplex engine(2, degree, cfg);
  const int pieces = std::max(1, static_cast<int>(std::ceil((t1 - t0) / (std::numbers::pi / 2))));
  for (int i = 0; i < pieces; ++i) {
    const double a = t0 + (t1 - t0) * i / pieces, b = t0 + (t1 - t0) * (i + 1) / pieces;
    Vec va(2), vb(2);
    va << std::cos(a), std::sin(a);
    vb << std::cos(b), std::sin(b);
    out += engine.integrate({va, vb}, cfg.arc_tol / pieces);
  }
  return out;
}

Moments polygon_moments(const std::vector<Vec>& cons, int degree, const QuadratureConfig& cfg) {
  const auto keys = monomial_basis(3, degree);
  Moments out(keys.size(), 0.0);
  if (has_opposite_pair(cons)) return out;
  const auto polys = spherical_polygons(cons);
  AdaptiveSimplex engine(3, degree, cfg);
  for (const auto& poly : polys) {
    GreenPolygon green(poly);
    if (green.area() < 1e-15) continue;
    if (cfg.polygons == SphericalEngine::Exact) {
      for (std::size_t i = 0; i < keys.size(); ++i) out[i] += green.integrate(keys[i]);
      continue;
    }
    const double tol = cfg.polygon_tol / static_cast<double>(polys.size() * (poly.size() - 2));
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
      out += engine.integrate({Vec(poly[0]), Vec(poly[i]), Vec(poly[i + 1])}, tol);
  }
  return out;
}

Moments adaptive_solid_moments(const std::vector<Vec>& cons, int degree, const QuadratureConfig& cfg) {
  const auto keys = monomial_basis(4, degree);
  Moments out(keys.size(), 0.0);
  AdaptiveSimplex engine(4, degree, cfg);
  std::vector<std::vector<Vec>> tets;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<Vec> piece = cons;
    Vec sigma(4);
    for (int i = 0; i < 4; ++i) {
      sigma[i] = (mask & (1 << i)) ? -1.0 : 1.0;
      Vec e = Vec::Zero(4);
      e[i] = sigma[i];
      piece.push_back(e);
    }
    const auto rays = extreme_rays(piece, 4);
    if (rays.size() < 4) continue;
    std::vector<Vec> projected;
    for (const auto& r : rays) projected.push_back(r / sigma.dot(r));
    const Polytope hull = Polytope::build(projected);
    if (hull.intrinsic_dim() < 3) continue;
    for (const auto& s : hull.triangulation()) {
      std::vector<Vec> t;
      for (int i : s) t.push_back(hull.vertex(i).normalized());
      tets.push_back(std::move(t));
    }
  }
  for (const auto& t : tets) out += engine.integrate(t, cfg.solid_tol / static_cast<double>(tets.size()));
  return out;
}

std::vector<Vec> unit_constraints(const std::vector<Vec>& cons) {
  std::vector<Vec> out;
  for (const auto& h : cons) {
    const double len = h.norm();
    if (len < 1e-14) continue;
    const Vec u = h / len;
    if (std::none_of(out.begin(), out.end(), [&](const Vec& q) { return (q - u).cwiseAbs().maxCoeff() < 1e-12; }))
      out.push_back(u);
  }
  return out;
}

// Orthonormal basis of the complement of the unit vector h, as columns.
Mat perp_basis(const Vec& h) {
  const Mat m = h;
  const Mat q = Eigen::HouseholderQR<Mat>(m).householderQ();
  return q.rightCols(h.size() - 1);
}

bool spans_space(const std::vector<Vec>& cons, int c) {
  if (static_cast<int>(cons.size()) < c) return false;
  Mat m(c, static_cast<Eigen::Index>(cons.size()));
  for (std::size_t i = 0; i < cons.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cons[i];
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(1e-10);
  return lu.rank() == c;
}

// The facet of a region in S^3 on the great sphere orthogonal to one of its unit constraints.
struct SolidFacet {
  Vec h;
  Mat basis;  // 4 x 3
  std::vector<std::vector<Eigen::Vector3d>> polygons;
  std::vector<GreenPolygon> green;
  std::map<MonomialKey, double> memo;

  SolidFacet(const std::vector<Vec>& cons, std::size_t i) : h(cons[i]), basis(perp_basis(cons[i])) {
    std::vector<Vec> local;
    for (std::size_t j = 0; j < cons.size(); ++j) {
      if (j == i) continue;
      const Vec l = basis.transpose() * cons[j];
      if (l.norm() > 1e-12) local.push_back(l);
    }
    if (has_opposite_pair(local)) return;
    for (auto& poly : spherical_polygons(local)) {
      GreenPolygon g(poly);
      if (g.area() < 1e-15) continue;
      polygons.push_back(std::move(poly));
      green.push_back(std::move(g));
    }
  }

  // int over the facet of x^gamma
  double moment(MonomialKey gamma) {
    auto it = memo.find(gamma);
    if (it != memo.end()) return it->second;
    int deg = 0;
    for (int i = 0; i < 4; ++i) deg += detail::exponent(gamma, i);
    SymTensor mono(4, deg);
    mono.add_term(gamma, 1.0);
    const SymTensor local = substitute(mono, basis.transpose());
    double value = 0.0;
    for (const auto& [key, c] : local.terms())
      for (auto& g : green) value += c * g.integrate(key);
    memo.emplace(gamma, value);
    return value;
  }
};

// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_m.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int m) {
  std::vector<double> x(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// Conical product rule on the flat triangle, pushed radially onto the sphere. Exact for
// polynomials of degree 15 on the flat triangle.
template <class F>
double triangle_rule(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Eigen::Vector3d& r, const F& f) {
  static const auto gl = gauss_legendre_unit(8);
  const Eigen::Vector3d cr = (q - p).cross(r - p);
  const double area = 0.5 * cr.norm();
  if (area == 0.0) return 0.0;
  const double h = std::abs(cr.normalized().dot(p));
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.first.size(); ++i) {
    const double u = gl.first[i];
    for (std::size_t j = 0; j < gl.first.size(); ++j) {
      const double v = gl.first[j];
      const Eigen::Vector3d x = u * p + (1.0 - u) * v * q + (1.0 - u) * (1.0 - v) * r;
      const double len = x.norm();
      acc += gl.second[i] * gl.second[j] * (1.0 - u) * f(Eigen::Vector3d(x / len)) / (len * len * len);
    }
  }
  return 2.0 * area * h * acc;
}

// Volume of a pointed region in S^3 in geodesic polar coordinates about an interior point a:
// the geodesic from a in direction w leaves through the facet it meets first, at angle psi(w),
// and contributes int_0^psi sin^2 = psi/2 - sin(2 psi)/4. Facets seen from a tile the sphere of
// directions, so the volume is a sum of smooth integrals over spherical polygons.
double polar_volume(const std::vector<Vec>& cons, const QuadratureConfig& cfg) {
  const auto rays = extreme_rays(cons, 4);
  if (!spans_space(rays, 4)) return 0.0;
  Vec a = Vec::Zero(4);
  for (const auto& r : rays) a += r;
  a.normalize();
  for (const auto& h : cons)
    if (h.dot(a) < 1e-12) return 0.0;
  const Mat frame = perp_basis(a);

  struct Piece {
    Eigen::Vector3d v[3];
    Eigen::Vector3d hw;
    double ha;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const SolidFacet facet(cons, i);
    const Eigen::Vector3d hw = frame.transpose() * cons[i];
    for (const auto& poly : facet.polygons) {
      std::vector<Eigen::Vector3d> seen;
      for (const auto& y : poly) seen.push_back((frame.transpose() * (facet.basis * Vec(y))).normalized());
      for (std::size_t k = 1; k + 1 < seen.size(); ++k) pieces.push_back({{seen[0], seen[k], seen[k + 1]}, hw, cons[i].dot(a)});
    }
  }
  // globally adaptive: split the triangle with the largest error estimate until the sum is small
  struct Cell {
    std::size_t piece;
    Eigen::Vector3d v[3];
    double value, error;
    bool operator<(const Cell& o) const { return error < o.error; }
  };
  auto integrand = [&](std::size_t i) {
    return [&, i](const Eigen::Vector3d& w) {
      const double psi = std::atan2(pieces[i].ha, -pieces[i].hw.dot(w));
      return 0.5 * psi - 0.25 * std::sin(2.0 * psi);
    };
  };
  auto make = [&](std::size_t i, const Eigen::Vector3d& a0, const Eigen::Vector3d& a1, const Eigen::Vector3d& a2) {
    const auto f = integrand(i);
    const Eigen::Vector3d m01 = (a0 + a1).normalized(), m12 = (a1 + a2).normalized(), m20 = (a2 + a0).normalized();
    const double fine = triangle_rule(a0, m01, m20, f) + triangle_rule(m01, a1, m12, f) + triangle_rule(m20, m12, a2, f) +
                        triangle_rule(m01, m12, m20, f);
    return Cell{i, {a0, a1, a2}, fine, std::abs(fine - triangle_rule(a0, a1, a2, f))};
  };
  std::priority_queue<Cell> heap;
  double error = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Cell c = make(i, pieces[i].v[0], pieces[i].v[1], pieces[i].v[2]);
    error += c.error;
    heap.push(c);
  }
  const int max_cells = 1 << (2 * std::min(cfg.max_depth, 10));
  while (!heap.empty() && error > cfg.volume_tol && static_cast<int>(heap.size()) < max_cells) {
    const Cell c = heap.top();
    heap.pop();
    error -= c.error;
    const Eigen::Vector3d m01 = (c.v[0] + c.v[1]).normalized(), m12 = (c.v[1] + c.v[2]).normalized(),
                          m20 = (c.v[2] + c.v[0]).normalized();
    for (const Cell& k : {make(c.piece, c.v[0], m01, m20), make(c.piece, m01, c.v[1], m12), make(c.piece, m20, m12, c.v[2]),
                          make(c.piece, m01, m12, m20)}) {
      error += k.error;
      heap.push(k);
    }
  }
  double vol = 0.0;
  while (!heap.empty()) {
    vol += heap.top().value;
    heap.pop();
  }
  return vol;
}

// Exact moments on a region of S^3 from the divergence theorem on the solid cone: for g homogeneous
// of degree D, (D + 3) int_R g x_a = int_R d_a g + sum over facets of h_a int_F g.
Moments solid_moments(const std::vector<Vec>& raw, int degree, const QuadratureConfig& cfg) {
  const auto keys = monomial_basis(4, degree);
  Moments out(keys.size(), 0.0);
  if (has_opposite_pair(raw)) return out;
  if (cfg.solids == SphericalEngine::Adaptive) return adaptive_solid_moments(raw, degree, cfg);
  const auto cons = unit_constraints(raw);
  if (cons.empty() && degree % 2 == 1) return out;

  double volume = 0.0;
  if (spans_space(cons, 4)) {
    volume = polar_volume(cons, cfg);
  } else {
    for (const auto& piece : orthant_pieces_constraints(cons, 4)) volume += polar_volume(unit_constraints(piece), cfg);
  }
  if (degree == 0) {
    out[0] = volume;
    return out;
  }
  std::vector<SolidFacet> facets;
  for (std::size_t i = 0; i < cons.size(); ++i) facets.emplace_back(cons, i);

  std::map<MonomialKey, double> memo;
  std::function<double(MonomialKey)> moment = [&](MonomialKey beta) -> double {
    if (beta == 0) return volume;
    auto it = memo.find(beta);
    if (it != memo.end()) return it->second;
    int deg = 0, a = -1;
    for (int i = 0; i < 4; ++i) {
      deg += detail::exponent(beta, i);
      if (a < 0 && detail::exponent(beta, i) > 0) a = i;
    }
    const int ba = detail::exponent(beta, a);
    const MonomialKey g = beta - detail::unit_key(a);
    double sum = ba >= 2 ? (ba - 1) * moment(g - detail::unit_key(a)) : 0.0;
    for (auto& f : facets)
      if (f.h[a] != 0.0) sum += f.h[a] * f.moment(g);
    const double value = sum / (deg + 2);
    memo.emplace(beta, value);
    return value;
  };
  for (std::size_t i = 0; i < keys.size(); ++i) out[i] = moment(keys[i]);
  return out;
}

double multinomial(MonomialKey key, int c, int degree) {
  double m = 1.0;
  int remaining = degree;
  for (int i = 0; i < c; ++i) {
    const int a = detail::exponent(key, i);
    for (int j = 1; j <= a; ++j) m = m * (remaining - a + j) / j;
    remaining -= a;
  }
  return m;
}

}  // namespace

std::vector<double> carrier_moments(const SphericalRegion& region, int degree, const QuadratureConfig& config) {
  const int c = region.carrier().dim();
  if (c == 0) return {};
  const auto cons = region.local_constraints();
  switch (c) {
    case 1:
      return point_moments(cons, degree);
    case 2:
      return arc_moments(cons, degree, config);
    case 3:
      return polygon_moments(cons, degree, config);
    case 4:
      return solid_moments(cons, degree, config);
    default:
      throw DimensionError("spherical regions of dimension above 3 are not supported");
  }
}

SymTensor spherical_moment(const SphericalRegion& region, int s, const SphericalWeight& weight,
                           const QuadratureConfig& config) {
  if (s < 0) throw InvalidArgument("spherical_moment: negative degree");
  const int n = region.ambient_dim();
  const int c = region.carrier().dim();
  const Mat& basis = region.carrier().basis();
  const bool weighted = weight.kind != SphericalWeight::Kind::None;

  Mat w;
  if (weight.kind == SphericalWeight::Kind::CrossWith) {
    if (n != 3 || weight.v.size() != 3) throw DimensionError("CrossWith weight needs n = 3");
    if (c != 2 || (basis.transpose() * weight.v).norm() > 1e-9)
      throw InvalidArgument("CrossWith weight needs a 2-dimensional carrier orthogonal to the axis");
    w = Mat::Zero(3, 3);
    w << 0, -weight.v[2], weight.v[1], weight.v[2], 0, -weight.v[0], -weight.v[1], weight.v[0], 0;
  } else if (weight.kind == SphericalWeight::Kind::PerpComplement) {
    if (n != 2) throw DimensionError("PerpComplement weight needs n = 2");
    w = Mat::Zero(2, 2);
    w << 0, -1, 1, 0;
  }

  const int rank = s + (weighted ? 1 : 0);
  SymTensor out(n, rank);
  if (c == 0) return out;

  const int degree = weighted ? s + 1 : s;
  const auto moments = carrier_moments(region, degree, config);
  const auto keys = monomial_basis(c, degree);
  SymTensor local(c, degree);
  for (std::size_t i = 0; i < keys.size(); ++i) local.add_term(keys[i], multinomial(keys[i], c, degree) * moments[i]);

  if (!weighted) return substitute(local, basis);

  // int z_i <z, b>^s = (1/(s+1)) d/db_i int <z, b>^{s+1}; each z_i carries the form lambda_i = W C e_i
  for (int i = 0; i < c; ++i) {
    SymTensor deriv(c, s);
    for (const auto& [key, coef] : local.terms()) {
      const int e = detail::exponent(key, i);
      if (e > 0) deriv.add_term(key - detail::unit_key(i), coef * e);
    }
    const Vec lambda = w * basis.col(i);
    out += sym_product(substitute(deriv, basis), SymTensor::vector(lambda));
  }
  return (1.0 / (s + 1)) * out;
}

double spherical_measure(const SphericalRegion& region, const QuadratureConfig& config) {
  if (region.carrier().dim() == 0) return 0.0;
  return carrier_moments(region, 0, config).front();
}

}  // namespace mtl
