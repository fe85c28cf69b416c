#include "cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mtl/errors.hpp"
#include "mtl/io.hpp"

namespace mtl::cli {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split(s, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad index list \"" + s + "\"");
    }
    if (used != tok.size()) throw InvalidArgument("bad index list \"" + s + "\"");
    out.push_back(v);
  }
  return out;
}

// "<kind>:<indices>"
BasisDescriptor parse_term(const std::string& term, int n) {
  const auto colon = term.find(':');
  if (colon == std::string::npos) throw InvalidArgument("oracle term \"" + term + "\" needs <kind>:<indices>");
  const std::string kind = term.substr(0, colon);
  const auto idx = parse_ints(term.substr(colon + 1));
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (idx.size() < lo || idx.size() > hi) throw InvalidArgument("oracle term \"" + term + "\" has the wrong number of indices");
  };
  BasisDescriptor d;
  if (kind == "phi") {
    need(4, 5);
    d = BasisDescriptor::phi(n, idx[0], idx[1], idx[2], idx[3], idx.size() > 4 ? idx[4] : 0);
  } else if (kind == "tilde3") {
    need(3, 4);
    d = BasisDescriptor::tilde3(idx[0], idx[1], idx[2], idx.size() > 3 ? idx[3] : 0);
    if (n != 3) throw InvalidArgument("tilde3 needs --n 3");
  } else if (kind == "tilde2") {
    need(3, 4);
    d = BasisDescriptor::tilde2(idx[0], idx[1], idx[2], idx.size() > 3 ? idx[3] : 0);
    if (n != 2) throw InvalidArgument("tilde2 needs --n 2");
  } else {
    throw InvalidArgument("unknown valuation kind \"" + kind + "\"");
  }
  d.validate();
  return d;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MTL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidArgument("MTL_SEED is not an unsigned integer");
    }
  }
  return 1;
}

void emit(const io::Json& j, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << j.dump(2) << "\n";
  else
    io::write_json_file(path, j);
}

Subspace read_subspace(const std::string& path, int n, int k) {
  if (path.empty()) return Subspace(Mat(Mat::Identity(n, n).leftCols(k)));
  const io::Json j = io::read_json_file(path);
  if (!j.contains("basis") || !j["basis"].is_array()) throw InvalidArgument(path + ": expected {\"basis\": [[...]]}");
  std::vector<Vec> vs;
  for (const auto& e : j["basis"]) {
    if (!e.is_array() || static_cast<int>(e.size()) != n) throw InvalidArgument(path + ": basis vectors need length n");
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = e[static_cast<std::size_t>(i)].get<double>();
    vs.push_back(v);
  }
  const Subspace l = Subspace::span(vs, n);
  if (l.dim() != k) throw InvalidArgument(path + ": basis spans dimension " + std::to_string(l.dim()) + ", expected " + std::to_string(k));
  return l;
}

}  // namespace

ValuationOracle parse_oracle(const std::string& spec, int n) {
  if (spec.rfind("builtin:", 0) == 0) return basis_oracle(parse_term(spec.substr(8), n));
  if (spec.rfind("combo:", 0) == 0) {
    std::vector<std::pair<double, BasisDescriptor>> terms;
    for (const auto& part : split(spec.substr(6), ';')) {
      const auto star = part.find('*');
      if (star == std::string::npos) throw InvalidArgument("combo term \"" + part + "\" needs <coeff>*<kind>:<indices>");
      double c = 0.0;
      try {
        std::size_t used = 0;
        c = std::stod(part.substr(0, star), &used);
        if (used != star) throw InvalidArgument("");
      } catch (const std::exception&) {
        throw InvalidArgument("bad coefficient in combo term \"" + part + "\"");
      }
      terms.emplace_back(c, parse_term(part.substr(star + 1), n));
    }
    if (terms.empty()) throw InvalidArgument("empty combo recipe");
    return combination_oracle(terms);
  }
  throw InvalidArgument("oracle must start with builtin: or combo:");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local tensor valuations on polytopes"};
  app.require_subcommand(1);

  std::string polytope_path, patch_path, out_path, valuation = "phi";
  int k = 0, r = 0, s = 0, j = 0, m = 0;
  auto* compute = app.add_subcommand("compute", "evaluate one basis valuation on a polytope and patch");
  compute->add_option("--polytope", polytope_path, "polytope file")->required();
  compute->add_option("--patch", patch_path, "patch file (default: all of Sigma^n)");
  compute->add_option("--valuation", valuation, "phi | tilde3 | tilde2");
  compute->add_option("--k", k);
  compute->add_option("--r", r);
  compute->add_option("--s", s);
  compute->add_option("--j", j);
  compute->add_option("--m", m);
  compute->add_option("--out", out_path, "output tensor file (default: stdout)");

  std::string oracle_spec;
  int n = 3, p = 0, trials = 50;
  double tol = 1e-7;
  bool improper = false;
  std::optional<std::uint64_t> seed;
  auto* check = app.add_subcommand("check", "run the axiom suite on an oracle");
  check->add_option("--oracle", oracle_spec)->required();
  check->add_option("--n", n);
  check->add_option("--seed", seed);
  check->add_option("--trials", trials);
  check->add_option("--tol", tol);
  check->add_flag("--improper", improper, "draw improper orthogonal maps in the rotation check");
  check->add_option("--out", out_path);

  bool as_json = false;
  auto* basis = app.add_subcommand("basis", "list the basis of rank-p valuations on R^n");
  basis->add_option("--n", n);
  basis->add_option("--p", p);
  basis->add_flag("--json", as_json);

  auto* rank = app.add_subcommand("rank", "certify linear independence of the basis");
  rank->add_option("--n", n);
  rank->add_option("--p", p);
  rank->add_option("--seed", seed);

  int flats = 3, randoms = 10;
  auto* decompose = app.add_subcommand("decompose", "decompose an oracle on the basis");
  decompose->add_option("--oracle", oracle_spec)->required();
  decompose->add_option("--n", n);
  decompose->add_option("--seed", seed);
  decompose->add_option("--tol", tol);
  decompose->add_option("--flats", flats, "flat polytopes per dimension");
  decompose->add_option("--samples", randoms, "random samples");
  decompose->add_option("--out", out_path);

  std::string subspace_path, region_path;
  auto* delta = app.add_subcommand("delta", "extract the flat density of an oracle");
  delta->add_option("--oracle", oracle_spec)->required();
  delta->add_option("--n", n);
  delta->add_option("--k", k);
  delta->add_option("--subspace", subspace_path, "file {\"basis\": [[...]]} (default: span of the first k axes)");
  delta->add_option("--region", region_path, "file {\"normals\": [[...]]} cutting the sphere of L^perp (default: all)");
  delta->add_option("--out", out_path);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*compute) {
      const Polytope poly = io::polytope_from_json(io::read_json_file(polytope_path));
      const int dim = poly.ambient_dim();
      const SupportPatch eta = patch_path.empty() ? SupportPatch::all(dim) : io::patch_from_json(io::read_json_file(patch_path), dim);
      BasisDescriptor d;
      if (valuation == "phi")
        d = BasisDescriptor::phi(dim, k, r, s, j, m);
      else if (valuation == "tilde3")
        d = BasisDescriptor::tilde3(r, s, j, m);
      else if (valuation == "tilde2")
        d = BasisDescriptor::tilde2(k, r, s, m);
      else
        throw InvalidArgument("unknown valuation \"" + valuation + "\"");
      d.validate();
      if (d.n != dim) throw InvalidArgument(d.label() + " does not live in dimension " + std::to_string(dim));
      emit(io::tensor_to_json(evaluate_basis_element(d, poly, eta)), out_path, out);
      return 0;
    }
    if (*check) {
      AxiomOptions opts;
      opts.trials = trials;
      opts.tolerance = tol;
      opts.inject_improper = improper;
      const AxiomReport report = axiom_report(parse_oracle(oracle_spec, n), resolve_seed(seed), opts);
      emit(io::report_to_json(report), out_path, out);
      return report.all_pass() ? 0 : 1;
    }
    if (*basis) {
      const auto list = enumerate_basis(n, p);
      for (const auto& d : list) {
        if (as_json)
          out << io::descriptor_to_json(d).dump() << "\n";
        else
          out << d.label() << "\n";
      }
      return 0;
    }
    if (*rank) {
      const RankCertificate cert = independence_rank(n, p, resolve_seed(seed));
      out << "rank=" << cert.rank << " expected=" << cert.expected << (cert.pass() ? " PASS" : " FAIL") << "\n";
      return cert.pass() ? 0 : 1;
    }
    if (*decompose) {
      const ValuationOracle oracle = parse_oracle(oracle_spec, n);
      SampleSpec spec;
      spec.seed = resolve_seed(seed);
      spec.flats_per_dim = flats;
      spec.random_samples = randoms;
      emit(io::decomposition_to_json(decompose_on_basis(oracle, spec, tol)), out_path, out);
      return 0;
    }
    if (*delta) {
      const ValuationOracle oracle = parse_oracle(oracle_spec, n);
      if (k < 0 || k > n - 1) throw InvalidArgument("--k must be in 0..n-1");
      const Subspace l = read_subspace(subspace_path, n, k);
      std::vector<Vec> normals;
      if (!region_path.empty()) {
        const io::Json jr = io::read_json_file(region_path);
        if (!jr.contains("normals") || !jr["normals"].is_array()) throw InvalidArgument(region_path + ": expected {\"normals\": [[...]]}");
        for (const auto& e : jr["normals"]) {
          if (!e.is_array() || static_cast<int>(e.size()) != n) throw InvalidArgument(region_path + ": normals need length n");
          Vec v(n);
          for (int i = 0; i < n; ++i) v[i] = e[static_cast<std::size_t>(i)].get<double>();
          normals.push_back(v);
        }
      }
      const SphericalRegion b(l.complement(), normals);
      emit(io::tensor_to_json(extract_delta(oracle, l, b)), out_path, out);
      return 0;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateGeometry& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mtl::cli
