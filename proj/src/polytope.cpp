#include "mtl/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "mtl/errors.hpp"

namespace mtl {
namespace {

constexpr double kRelTol = 1e-9;
// distances in (tol, kAmbiguityFactor * tol] make a supporting hyperplane undecidable
constexpr double kAmbiguityFactor = 100.0;

double point_spread(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, (p - pts.front()).cwiseAbs().maxCoeff());
  return std::max(1.0, s);
}

// Null vector of the (d-1) x d matrix `rows` by cofactor expansion.
Vec cofactor_normal(const Mat& rows) {
  const int d = static_cast<int>(rows.cols());
  Vec normal(d);
  for (int j = 0; j < d; ++j) {
    Mat minor(d - 1, d - 1);
    for (int c = 0, cc = 0; c < d; ++c) {
      if (c == j) continue;
      minor.col(cc++) = rows.col(c);
    }
    const double det = d == 1 ? 1.0 : minor.determinant();
    normal[j] = (j % 2 == 0) ? det : -det;
  }
  return normal;
}

int affine_rank(const std::vector<Vec>& pts, double tol) {
  if (pts.size() <= 1) return 0;
  Mat m(pts.front().size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t i = 1; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i - 1)) = pts[i] - pts[0];
  Eigen::JacobiSVD<Mat> svd(m);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++r;
  return r;
}

struct FacetCandidate {
  std::vector<int> on;  // indices into the local point list
  Vec normal;           // outward, local coordinates
  double offset;
};

void for_each_combination(int m, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k > m) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::vector<FacetCandidate> find_facets(const std::vector<Vec>& y, double tol) {
  const int m = static_cast<int>(y.size());
  const int d = static_cast<int>(y.front().size());
  std::vector<FacetCandidate> facets;
  std::set<std::vector<int>> seen;
  auto consider = [&](const Vec& a_in) {
    Vec a = a_in.normalized();
    // offset from the maximizing side: facets are where all s <= 0
    for (double sign : {1.0, -1.0}) {
      const Vec an = sign * a;
      double b = -std::numeric_limits<double>::infinity();
      for (const auto& p : y) b = std::max(b, an.dot(p));
      std::vector<int> on;
      int ambiguous = 0;
      for (int i = 0; i < m; ++i) {
        const double s = an.dot(y[static_cast<std::size_t>(i)]) - b;
        if (s >= -tol) on.push_back(i);
        else if (s >= -kAmbiguityFactor * tol) ++ambiguous;
      }
      if (static_cast<int>(on.size()) < d) continue;
      std::vector<Vec> on_pts;
      for (int i : on) on_pts.push_back(y[static_cast<std::size_t>(i)]);
      if (affine_rank(on_pts, tol) != d - 1) continue;
      if (ambiguous > 0)
        throw DegenerateGeometry("supporting hyperplane classification is ambiguous at tolerance 1e-9");
      if (seen.insert(on).second) facets.push_back({on, an, b});
    }
  };
  if (d == 1) {
    consider(Vec::Ones(1));
    return facets;
  }
  for_each_combination(m, d, [&](const std::vector<int>& idx) {
    Mat rows(d - 1, d);
    for (int r = 1; r < d; ++r) rows.row(r - 1) = (y[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])] - y[static_cast<std::size_t>(idx[0])]).transpose();
    const Vec normal = cofactor_normal(rows);
    double scale = 1.0;
    for (int r = 0; r < d - 1; ++r) scale *= std::max(rows.row(r).norm(), 1e-300);
    if (normal.norm() <= 1e-10 * scale) return;
    // only hyperplanes through the chosen points can be facets
    const Vec a = normal.normalized();
    const double b0 = a.dot(y[static_cast<std::size_t>(idx[0])]);
    double hi = -1e300, lo = 1e300;
    for (const auto& p : y) {
      hi = std::max(hi, a.dot(p) - b0);
      lo = std::min(lo, a.dot(p) - b0);
    }
    if (hi > kAmbiguityFactor * tol && lo < -kAmbiguityFactor * tol) return;
    consider(a);
  });
  return facets;
}

}  // namespace

Polytope Polytope::build(const std::vector<Vec>& points_in) {
  if (points_in.empty()) throw InvalidArgument("build_polytope: empty point list");
  const int n = static_cast<int>(points_in.front().size());
  if (n < 1 || n > 4) throw DimensionError("build_polytope supports ambient dimensions 1..4");
  for (const auto& p : points_in) {
    if (p.size() != n) throw DimensionError("build_polytope: points of different dimensions");
    if (!p.allFinite()) throw InvalidArgument("build_polytope: non-finite coordinate");
  }
  const double tol = kRelTol * point_spread(points_in);

  std::vector<Vec> pts;
  for (const auto& p : points_in) {
    bool dup = false;
    for (const auto& q : pts)
      if ((p - q).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    if (!dup) pts.push_back(p);
  }

  Polytope poly;
  poly.ambient_dim_ = n;

  // affine hull: smallest d whose top-d principal directions reproduce all points
  Vec c = Vec::Zero(n);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Mat x(static_cast<Eigen::Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = (pts[i] - c).transpose();
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullV);
  const Mat v = svd.matrixV();
  int d = n;
  for (int cand = 0; cand <= n; ++cand) {
    double resid = 0.0;
    for (const auto& p : pts) {
      const Vec r = (p - c) - v.leftCols(cand) * (v.leftCols(cand).transpose() * (p - c));
      resid = std::max(resid, r.norm());
    }
    if (resid <= tol) {
      d = cand;
      break;
    }
  }
  poly.intrinsic_dim_ = d;
  poly.origin_ = c;
  poly.directions_ = d == 0 ? Subspace::zero(n) : Subspace::span(Mat(v.leftCols(d)));
  const Mat u = poly.directions_.basis();
  const Subspace complement = poly.directions_.complement();

  std::vector<Vec> local;
  for (const auto& p : pts) local.push_back(u.transpose() * (p - c));

  std::vector<FacetCandidate> facets;
  std::vector<int> vertex_ids;  // indices into pts
  if (d == 0) {
    vertex_ids = {0};
  } else {
    facets = find_facets(local, tol);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      std::vector<Vec> normals;
      for (const auto& f : facets)
        if (std::binary_search(f.on.begin(), f.on.end(), i)) normals.push_back(f.normal);
      if (static_cast<int>(normals.size()) < d) continue;
      Mat nm(d, static_cast<Eigen::Index>(normals.size()));
      for (std::size_t k = 0; k < normals.size(); ++k) nm.col(static_cast<Eigen::Index>(k)) = normals[k];
      Eigen::JacobiSVD<Mat> s2(nm);
      int rank = 0;
      for (int k = 0; k < s2.singularValues().size(); ++k)
        if (s2.singularValues()[k] > 1e-9) ++rank;
      if (rank == d) vertex_ids.push_back(i);
    }
  }

  // canonical vertex order: lexicographic in coordinates
  std::sort(vertex_ids.begin(), vertex_ids.end(), [&](int a, int b) {
    const Vec& pa = pts[static_cast<std::size_t>(a)];
    const Vec& pb = pts[static_cast<std::size_t>(b)];
    return std::lexicographical_compare(pa.data(), pa.data() + n, pb.data(), pb.data() + n);
  });
  std::map<int, int> new_index;
  for (std::size_t i = 0; i < vertex_ids.size(); ++i) {
    new_index[vertex_ids[i]] = static_cast<int>(i);
    poly.vertices_.push_back(pts[static_cast<std::size_t>(vertex_ids[i])]);
  }
  const int nv = static_cast<int>(vertex_ids.size());

  // facets in vertex indices, with ambient outer normals
  std::map<std::vector<int>, Vec> facet_normals;
  for (const auto& f : facets) {
    std::vector<int> vs;
    for (int i : f.on) {
      auto it = new_index.find(i);
      if (it != new_index.end()) vs.push_back(it->second);
    }
    std::sort(vs.begin(), vs.end());
    facet_normals[vs] = u * f.normal;
    poly.inequalities_.push_back({u * f.normal, f.offset + (u * f.normal).dot(c)});
  }
  for (int j = 0; j < complement.dim(); ++j) {
    const Vec w = complement.basis().col(j);
    poly.inequalities_.push_back({w, w.dot(c)});
    poly.inequalities_.push_back({-w, -w.dot(c)});
  }

  // face lattice: closure of the facet vertex sets under intersection
  std::set<std::vector<int>> face_sets;
  std::queue<std::vector<int>> work;
  for (const auto& [vs, nrm] : facet_normals)
    if (face_sets.insert(vs).second) work.push(vs);
  while (!work.empty()) {
    const auto cur = work.front();
    work.pop();
    for (const auto& [vs, nrm] : facet_normals) {
      std::vector<int> inter;
      std::set_intersection(cur.begin(), cur.end(), vs.begin(), vs.end(), std::back_inserter(inter));
      if (!inter.empty() && face_sets.insert(inter).second) work.push(inter);
    }
  }
  std::vector<int> all(static_cast<std::size_t>(nv));
  std::iota(all.begin(), all.end(), 0);
  face_sets.insert(all);

  poly.faces_.assign(static_cast<std::size_t>(d + 1), {});
  for (const auto& vs : face_sets) {
    std::vector<Vec> fp;
    for (int i : vs) fp.push_back(poly.vertices_[static_cast<std::size_t>(i)]);
    const int fd = affine_rank(fp, tol);
    Face f;
    f.dim = fd;
    f.vertices = vs;
    f.centroid = Vec::Zero(n);
    for (const auto& q : fp) f.centroid += q;
    f.centroid /= static_cast<double>(fp.size());
    if (fd == d) {
      f.direction = poly.directions_;
    } else {
      Mat diffs(n, static_cast<Eigen::Index>(fp.size() - 1));
      for (std::size_t i = 1; i < fp.size(); ++i) diffs.col(static_cast<Eigen::Index>(i - 1)) = fp[i] - fp[0];
      f.direction = Subspace::span(diffs, 1e-9);
      if (f.direction.dim() != fd) f.direction = fd == 0 ? Subspace::zero(n) : f.direction;
    }
    for (const auto& [fvs, nrm] : facet_normals)
      if (std::includes(fvs.begin(), fvs.end(), vs.begin(), vs.end()) && fvs != vs) f.normal_generators.push_back(nrm);
    if (fd == d - 1 && d >= 1) f.normal_generators = {facet_normals.at(vs)};
    poly.faces_[static_cast<std::size_t>(fd)].push_back(std::move(f));
  }
  for (auto& level : poly.faces_)
    std::sort(level.begin(), level.end(), [](const Face& a, const Face& b) { return a.vertices < b.vertices; });

  // normal cones: one constraint per (k+1)-face containing F, pointing away from it
  for (int k = 0; k <= d; ++k) {
    for (auto& f : poly.faces_[static_cast<std::size_t>(k)]) {
      Subspace carrier = f.direction.complement();
      std::vector<Vec> cons;
      if (k < d) {
        for (const auto& g : poly.faces_[static_cast<std::size_t>(k + 1)]) {
          if (!std::includes(g.vertices.begin(), g.vertices.end(), f.vertices.begin(), f.vertices.end())) continue;
          cons.push_back(-carrier.project(g.centroid - f.centroid));
        }
      }
      f.normal_cone = SphericalRegion(std::move(carrier), cons);
    }
  }
  return poly;
}

const std::vector<Face>& Polytope::faces(int k) const {
  if (k < 0 || k > intrinsic_dim_) {
    static const std::vector<Face> empty;
    return empty;
  }
  return faces_[static_cast<std::size_t>(k)];
}

std::vector<int> Polytope::face_counts() const {
  std::vector<int> counts;
  for (const auto& level : faces_) counts.push_back(static_cast<int>(level.size()));
  return counts;
}

std::optional<int> Polytope::find_face(int k, const std::vector<int>& vertex_set) const {
  const auto& level = faces(k);
  for (std::size_t i = 0; i < level.size(); ++i)
    if (level[i].vertices == vertex_set) return static_cast<int>(i);
  return std::nullopt;
}

bool Polytope::contains(const Vec& x, double tol) const {
  for (const auto& h : inequalities_)
    if (h.normal.dot(x) > h.offset + tol) return false;
  return true;
}

Vec Polytope::centroid() const { return top_face().centroid; }

std::vector<std::vector<int>> Polytope::triangulate_face(int k, int i) const {
  const Face& g = faces(k).at(static_cast<std::size_t>(i));
  if (k == 0) return {g.vertices};
  const int apex = g.vertices.front();
  std::vector<std::vector<int>> out;
  const auto& lower = faces(k - 1);
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const auto& f = lower[j];
    if (!std::includes(g.vertices.begin(), g.vertices.end(), f.vertices.begin(), f.vertices.end())) continue;
    if (std::binary_search(f.vertices.begin(), f.vertices.end(), apex)) continue;
    for (auto simplex : triangulate_face(k - 1, static_cast<int>(j))) {
      simplex.insert(simplex.begin(), apex);
      out.push_back(std::move(simplex));
    }
  }
  return out;
}

double Polytope::volume() const {
  double total = 0.0;
  const int d = intrinsic_dim_;
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  for (const auto& s : triangulation()) {
    if (d == 0) {
      total += 1.0;
      continue;
    }
    Mat e(ambient_dim_, d);
    for (int i = 0; i < d; ++i) e.col(i) = vertex(s[static_cast<std::size_t>(i + 1)]) - vertex(s[0]);
    total += std::sqrt(std::max(0.0, (e.transpose() * e).determinant())) / fact;
  }
  return total;
}

SphericalRegion normal_cone(const Polytope& p, const Face& f) {
  const auto idx = p.find_face(f.dim, f.vertices);
  if (!idx) throw InvalidArgument("normal_cone: face does not belong to the polytope");
  const Face& own = p.faces(f.dim)[static_cast<std::size_t>(*idx)];
  if (own.vertices.size() != f.vertices.size() || own.centroid.size() != f.centroid.size() ||
      (own.centroid - f.centroid).norm() > 1e-9)
    throw InvalidArgument("normal_cone: face does not belong to the polytope");
  return own.normal_cone;
}

Vec canonical_sign(Vec v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

Vec edge_unit_vector(const Polytope& p, const Face& edge) {
  if (edge.dim != 1) throw InvalidArgument("edge_unit_vector: face is not an edge");
  const Vec d = p.vertex(edge.vertices.back()) - p.vertex(edge.vertices.front());
  return canonical_sign(d.normalized());
}

Vec oriented_complement(const Vec& u) {
  if (u.size() != 2) throw DimensionError("oriented_complement(u) needs n = 2");
  if (std::abs(u.norm() - 1.0) > 1e-10) throw InvalidArgument("oriented_complement: u must be a unit vector");
  Vec out(2);
  out << -u[1], u[0];
  return out;
}

Vec oriented_complement(const Vec& v, const Vec& u) {
  if (u.size() != 3 || v.size() != 3) throw DimensionError("oriented_complement(v, u) needs n = 3");
  if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(v.norm() - 1.0) > 1e-10 || std::abs(u.dot(v)) > 1e-10)
    throw InvalidArgument("oriented_complement: v, u must be orthonormal");
  const Eigen::Vector3d a = v, b = u;
  return a.cross(b);
}

bool normal_bundle_contains(const Polytope& p, const Vec& x, const Vec& u, double tol) {
  if (x.size() != p.ambient_dim() || u.size() != p.ambient_dim()) return false;
  if (std::abs(u.norm() - 1.0) > tol) return false;
  if (!p.contains(x, tol)) return false;
  for (const auto& v : p.vertices())
    if (u.dot(v - x) > tol) return false;
  return true;
}

std::optional<Polytope> clip(const std::vector<Vec>& points, const std::vector<Halfspace>& halfspaces) {
  if (points.empty()) return std::nullopt;
  return clip(Polytope::build(points), halfspaces);
}

// Only edges can cross a cutting plane at new vertices; pairs of vertices spanning the interior
// would add points close to the boundary of the section.
std::optional<Polytope> clip(const Polytope& p, const std::vector<Halfspace>& halfspaces) {
  Polytope cur = p;
  const double tol = kRelTol * point_spread(p.vertices());
  for (const auto& h : halfspaces) {
    const auto& v = cur.vertices();
    std::vector<double> s;
    bool cut = false;
    for (const auto& x : v) {
      s.push_back(h.normal.dot(x) - h.offset);
      if (s.back() > tol) cut = true;
    }
    if (!cut) continue;
    std::vector<Vec> next;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (s[i] <= tol) next.push_back(v[i]);
    if (next.empty()) return std::nullopt;
    if (cur.intrinsic_dim() >= 1)
      for (const auto& e : cur.faces(1)) {
        const auto a = static_cast<std::size_t>(e.vertices[0]);
        const auto b = static_cast<std::size_t>(e.vertices[1]);
        if ((s[a] < -tol && s[b] > tol) || (s[b] < -tol && s[a] > tol)) {
          const double t = s[a] / (s[a] - s[b]);
          next.push_back(v[a] + t * (v[b] - v[a]));
        }
      }
    cur = Polytope::build(next);
  }
  return cur;
}

Polytope translated(const Polytope& p, const Vec& t) {
  std::vector<Vec> pts;
  for (const auto& v : p.vertices()) pts.push_back(v + t);
  return Polytope::build(pts);
}

Polytope transformed(const Polytope& p, const Mat& linear) {
  std::vector<Vec> pts;
  for (const auto& v : p.vertices()) pts.push_back(linear * v);
  return Polytope::build(pts);
}

Polytope make_box(const Vec& lo, const Vec& hi) {
  const int n = static_cast<int>(lo.size());
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = (mask & (1 << i)) ? hi[i] : lo[i];
    pts.push_back(p);
  }
  return Polytope::build(pts);
}

}  // namespace mtl
