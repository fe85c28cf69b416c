#include "mtl/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mtl/errors.hpp"

namespace mtl::io {
namespace {

Vec vec_from_json(const Json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw InvalidArgument(std::string(what) + ": expected an array of length " + std::to_string(n));
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw InvalidArgument(std::string(what) + ": non-numeric entry");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::vector<Vec> points_from_json(const Json& j, int n, const char* what) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(std::string(what) + ": expected a nonempty array of points");
  std::vector<Vec> pts;
  for (const auto& e : j) pts.push_back(vec_from_json(e, n, what));
  return pts;
}

int int_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InvalidArgument(std::string("missing integer field \"") + key + "\"");
  return j[key].get<int>();
}

}  // namespace

Json tensor_to_json(const SymTensor& t) {
  Json coeffs = Json::object();
  for (const auto& [key, c] : t.terms()) {
    if (std::abs(c) < 1e-14) continue;
    std::string k = "[";
    const auto idx = detail::multi_index_from_key(key, t.ambient_dim());
    for (std::size_t i = 0; i < idx.size(); ++i) k += (i ? "," : "") + std::to_string(idx[i]);
    coeffs[k + "]"] = c;
  }
  return Json{{"n", t.ambient_dim()}, {"rank", t.rank()}, {"coeffs", coeffs}};
}

SymTensor tensor_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("tensor: expected an object");
  const int n = int_field(j, "n");
  const int rank = int_field(j, "rank");
  SymTensor t(n, rank);
  if (!j.contains("coeffs") || !j["coeffs"].is_object()) throw InvalidArgument("tensor: missing \"coeffs\" object");
  for (const auto& [k, v] : j["coeffs"].items()) {
    Json idx;
    try {
      idx = Json::parse(k);
    } catch (const Json::exception&) {
      throw InvalidArgument("tensor: malformed multi-index key " + k);
    }
    if (!idx.is_array() || static_cast<int>(idx.size()) != rank) throw InvalidArgument("tensor: key " + k + " has the wrong length");
    MultiIndex mi;
    for (const auto& e : idx) {
      if (!e.is_number_integer()) throw InvalidArgument("tensor: key " + k + " is not integral");
      mi.push_back(e.get<int>());
    }
    if (!v.is_number()) throw InvalidArgument("tensor: coefficient of " + k + " is not a number");
    t.add_term(detail::key_from_multi_index(mi, n), v.get<double>());
  }
  return t;
}

Json polytope_to_json(const Polytope& p) {
  Json v = Json::array();
  for (const auto& x : p.vertices()) v.push_back(vec_to_json(x));
  return Json{{"dim", p.ambient_dim()}, {"vertices", v}};
}

Polytope polytope_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("polytope: expected an object");
  const int n = int_field(j, "dim");
  if (n < 1 || n > 4) throw InvalidArgument("polytope: dim must be in 1..4");
  if (!j.contains("vertices")) throw InvalidArgument("polytope: missing \"vertices\"");
  return Polytope::build(points_from_json(j["vertices"], n, "polytope vertices"));
}

Json patch_to_json(const SupportPatch& eta) {
  Json pieces = Json::array();
  for (const auto& piece : eta.pieces()) {
    Json pos;
    switch (piece.position.kind()) {
      case PositionRegion::Kind::All:
        pos = Json{{"type", "all"}};
        break;
      case PositionRegion::Kind::Box:
        pos = Json{{"type", "box"}, {"min", vec_to_json(piece.position.lo())}, {"max", vec_to_json(piece.position.hi())}};
        break;
      case PositionRegion::Kind::Polytope:
        pos = Json{{"type", "polytope"}, {"vertices", polytope_to_json(piece.position.shape())["vertices"]}};
        break;
    }
    Json nor;
    if (piece.normal.is_all()) {
      nor = Json{{"type", "all"}};
    } else {
      Json normals = Json::array();
      for (const auto& h : piece.normal.halfspaces) normals.push_back(vec_to_json(h));
      nor = Json{{"type", "halfspaces"}, {"normals", normals}};
    }
    pieces.push_back(Json{{"position", pos}, {"normal", nor}});
  }
  return Json{{"patches", pieces}};
}

SupportPatch patch_from_json(const Json& j, int n) {
  if (!j.is_object() || !j.contains("patches") || !j["patches"].is_array())
    throw InvalidArgument("patch: expected {\"patches\": [...]}");
  std::vector<PatchPiece> pieces;
  for (const auto& e : j["patches"]) {
    if (!e.is_object() || !e.contains("position") || !e.contains("normal"))
      throw InvalidArgument("patch: each piece needs \"position\" and \"normal\"");
    const Json& pos = e["position"];
    const std::string pt = pos.value("type", "");
    PositionRegion position = PositionRegion::all(n);
    if (pt == "box") {
      position = PositionRegion::box(vec_from_json(pos.value("min", Json()), n, "patch box min"),
                                     vec_from_json(pos.value("max", Json()), n, "patch box max"));
    } else if (pt == "polytope") {
      position = PositionRegion::polytope(Polytope::build(points_from_json(pos.value("vertices", Json()), n, "patch polytope")));
    } else if (pt != "all") {
      throw InvalidArgument("patch: unknown position type \"" + pt + "\"");
    }
    const Json& nor = e["normal"];
    const std::string nt = nor.value("type", "");
    ConeRegion cone;
    if (nt == "halfspaces") {
      if (!nor.contains("normals") || !nor["normals"].is_array()) throw InvalidArgument("patch: halfspaces need \"normals\"");
      for (const auto& h : nor["normals"]) cone.halfspaces.push_back(vec_from_json(h, n, "patch normal"));
    } else if (nt != "all") {
      throw InvalidArgument("patch: unknown normal type \"" + nt + "\"");
    }
    pieces.push_back({std::move(position), std::move(cone)});
  }
  return SupportPatch(n, std::move(pieces));
}

Json descriptor_to_json(const BasisDescriptor& d) {
  switch (d.kind) {
    case BasisKind::Phi:
      return Json{{"kind", "phi"}, {"k", d.k}, {"m", d.m}, {"r", d.r}, {"s", d.s}, {"j", d.j}};
    case BasisKind::Tilde3:
      return Json{{"kind", "tilde3"}, {"m", d.m}, {"r", d.r}, {"s", d.s}, {"j", d.j}};
    case BasisKind::Tilde2:
      return Json{{"kind", "tilde2"}, {"k", d.k}, {"m", d.m}, {"r", d.r}, {"s", d.s}};
  }
  return {};
}

BasisDescriptor descriptor_from_json(const Json& j, int n) {
  if (!j.is_object()) throw InvalidArgument("descriptor: expected an object");
  const std::string kind = j.value("kind", "");
  BasisDescriptor d;
  d.n = n;
  d.m = j.value("m", 0);
  d.r = int_field(j, "r");
  d.s = int_field(j, "s");
  if (kind == "phi") {
    d.kind = BasisKind::Phi;
    d.k = int_field(j, "k");
    d.j = j.value("j", 0);
  } else if (kind == "tilde3") {
    d.kind = BasisKind::Tilde3;
    d.j = j.value("j", 0);
  } else if (kind == "tilde2") {
    d.kind = BasisKind::Tilde2;
    d.k = int_field(j, "k");
  } else {
    throw InvalidArgument("descriptor: unknown kind \"" + kind + "\"");
  }
  d.validate();
  return d;
}

Json report_to_json(const AxiomReport& r) {
  Json axioms = Json::array();
  for (const auto& a : r.results) {
    Json e{{"axiom", a.axiom}, {"pass", a.pass}, {"residual", a.residual}, {"tolerance", a.tolerance}, {"witness", a.witness}};
    if (!a.signature.empty()) e["signature"] = a.signature;
    axioms.push_back(e);
  }
  return Json{{"oracle", r.oracle}, {"seed", r.seed}, {"trials", r.trials}, {"pass", r.all_pass()}, {"axioms", axioms}};
}

Json decomposition_to_json(const DecompositionResult& r) {
  Json coeffs = Json::array();
  for (const auto& [d, c] : r.coefficients) coeffs.push_back(Json{{"descriptor", descriptor_to_json(d)}, {"coefficient", c}});
  return Json{{"coefficients", coeffs},
              {"residual", r.residual},
              {"train_residual", r.train_residual},
              {"sample_count", r.sample_count},
              {"condition", r.condition}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mtl::io
