#include <string>

#include "mtl/errors.hpp"
#include "mtl/valuations.hpp"

namespace mtl {

int BasisDescriptor::rank() const {
  switch (kind) {
    case BasisKind::Phi:
      return 2 * m + 2 * j + r + s;
    case BasisKind::Tilde3:
      return 2 * m + 2 * j + r + s + 2;
    case BasisKind::Tilde2:
      return 2 * m + r + s + 1;
  }
  return 0;
}

void BasisDescriptor::validate() const {
  if (m < 0 || r < 0 || s < 0 || j < 0 || k < 0) throw InvalidArgument(label() + ": negative index");
  switch (kind) {
    case BasisKind::Phi:
      if (n < 1 || n > 4) throw InvalidArgument(label() + ": n must be in 1..4");
      if (k > n - 1) throw InvalidArgument(label() + ": k must be at most n-1");
      if ((k == 0 || k == n - 1) && j != 0) throw InvalidArgument(label() + ": j must vanish for k in {0, n-1}");
      return;
    case BasisKind::Tilde3:
      if (n != 3) throw InvalidArgument(label() + ": tilde3 needs n = 3");
      if (k != 0) throw InvalidArgument(label() + ": tilde3 has no k");
      return;
    case BasisKind::Tilde2:
      if (n != 2) throw InvalidArgument(label() + ": tilde2 needs n = 2");
      if (k > 1) throw InvalidArgument(label() + ": tilde2 needs k in {0, 1}");
      if (j != 0) throw InvalidArgument(label() + ": tilde2 has no j");
      return;
  }
}

std::string BasisDescriptor::label() const {
  auto f = [](const char* name, int v) { return std::string(name) + "=" + std::to_string(v); };
  switch (kind) {
    case BasisKind::Phi:
      return "phi[" + f("k", k) + "," + f("m", m) + "," + f("r", r) + "," + f("s", s) + "," + f("j", j) + "]";
    case BasisKind::Tilde3:
      return "tilde3[" + f("m", m) + "," + f("r", r) + "," + f("s", s) + "," + f("j", j) + "]";
    case BasisKind::Tilde2:
      return "tilde2[" + f("k", k) + "," + f("m", m) + "," + f("r", r) + "," + f("s", s) + "]";
  }
  return "?";
}

std::vector<BasisDescriptor> enumerate_basis(int n, int p) {
  if (n < 2 || n > 4) throw InvalidArgument("enumerate_basis: n must be in 2..4");
  if (p < 0) throw InvalidArgument("enumerate_basis: negative rank");
  std::vector<BasisDescriptor> out;
  for (int k = 0; k <= n - 1; ++k) {
    const int jmax = (k == 0 || k == n - 1) ? 0 : p / 2;
    for (int m = 0; 2 * m <= p; ++m)
      for (int j = 0; j <= jmax && 2 * m + 2 * j <= p; ++j)
        for (int r = 0; 2 * m + 2 * j + r <= p; ++r)
          out.push_back(BasisDescriptor::phi(n, k, r, p - 2 * m - 2 * j - r, j, m));
  }
  if (n == 3)
    for (int m = 0; 2 * m + 2 <= p; ++m)
      for (int j = 0; 2 * m + 2 * j + 2 <= p; ++j)
        for (int r = 0; 2 * m + 2 * j + r + 2 <= p; ++r)
          out.push_back(BasisDescriptor::tilde3(r, p - 2 - 2 * m - 2 * j - r, j, m));
  if (n == 2)
    for (int k = 0; k <= 1; ++k)
      for (int m = 0; 2 * m + 1 <= p; ++m)
        for (int r = 0; 2 * m + r + 1 <= p; ++r)
          out.push_back(BasisDescriptor::tilde2(k, r, p - 1 - 2 * m - r, m));
  return out;
}

}  // namespace mtl
