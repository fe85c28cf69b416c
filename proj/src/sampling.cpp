#include "mtl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtl/errors.hpp"

namespace mtl {

double edge_ratio(const Polytope& p) {
  if (p.intrinsic_dim() == 0) return 1.0;
  double diam = 0.0;
  for (const auto& a : p.vertices())
    for (const auto& b : p.vertices()) diam = std::max(diam, (a - b).norm());
  double shortest = diam;
  for (const auto& e : p.faces(1)) shortest = std::min(shortest, (p.vertex(e.vertices[0]) - p.vertex(e.vertices[1])).norm());
  return shortest / diam;
}

double Sampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int Sampler::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double Sampler::gaussian() {
  // Box-Muller on the raw stream; the second variate is discarded to keep the stream simple
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec Sampler::gaussian_vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian();
  return v;
}

Vec Sampler::unit_vector(int n) {
  Vec v = gaussian_vector(n);
  while (v.norm() < 1e-6) v = gaussian_vector(n);
  return v.normalized();
}

Vec Sampler::uniform_vector(int n, double a, double b) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
  return v;
}

Mat Sampler::orthogonal(int n, bool proper) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  const bool positive = q.determinant() > 0;
  if (positive != proper) q.col(0) = -q.col(0);
  return q;
}

Subspace Sampler::subspace(int n, int k) {
  if (k == 0) return Subspace::zero(n);
  return Subspace(Mat(orthogonal(n).leftCols(k)));
}

Polytope Sampler::polytope(int n, int d, int points) {
  if (d < 0 || d > n) throw InvalidArgument("Sampler::polytope: need 0 <= d <= n");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat basis = d == n ? Mat(Mat::Identity(n, n)) : Mat(orthogonal(n).leftCols(d));
    const Vec origin = uniform_vector(n, -0.5, 0.5);
    std::vector<Vec> pts;
    for (int i = 0; i < std::max(points, d + 1); ++i) pts.push_back(origin + basis * uniform_vector(d, -1.0, 1.0));
    try {
      Polytope p = Polytope::build(pts);
      if (p.intrinsic_dim() == d && edge_ratio(p) >= 1e-3) return p;
    } catch (const DegenerateGeometry&) {
    }
  }
  throw DegenerateGeometry("Sampler::polytope: no nondegenerate sample found");
}

ConeRegion Sampler::cone(int n, int count) {
  ConeRegion c;
  for (int i = 0; i < count; ++i) c.halfspaces.push_back(unit_vector(n));
  return c;
}

SupportPatch Sampler::patch(int n) {
  const Vec lo = uniform_vector(n, -1.5, 0.2);
  Vec hi = lo;
  for (int i = 0; i < n; ++i) hi[i] += uniform(0.6, 2.5);
  return SupportPatch::single(PositionRegion::box(lo, hi), cone(n, uniform_int(0, 2)));
}

}  // namespace mtl
