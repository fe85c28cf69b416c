#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mtl/io.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mtl");
  std::ostringstream out, err;
  const int code = mtl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("mtl_cli_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

const char* kCube = R"({"dim": 3, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,0],[1,0,1],[0,1,1],[1,1,1]]})";

}  // namespace

TEST_CASE("basis lists one label per line") {
  const Result r = run({"basis", "--n", "3", "--p", "2"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 14);

  const Result j = run({"basis", "--n", "2", "--p", "1", "--json"});
  CHECK(j.code == 0);
  std::istringstream lines(j.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(mtl::io::Json::parse(line).is_object());
    ++count;
  }
  CHECK(count > 0);
}

TEST_CASE("compute gives half the surface area of the unit cube") {
  const std::string cube = temp_file("cube.json", kCube);
  const Result r = run({"compute", "--polytope", cube, "--valuation", "phi", "--k", "2"});
  REQUIRE(r.code == 0);
  const mtl::SymTensor t = mtl::io::tensor_from_json(mtl::io::Json::parse(r.out));
  CHECK(t.rank() == 0);
  CHECK(t.value() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("compute writes the same bytes on repeated runs") {
  const std::string cube = temp_file("cube2.json", kCube);
  const Result a = run({"compute", "--polytope", cube, "--valuation", "phi", "--k", "1", "--s", "2"});
  const Result b = run({"compute", "--polytope", cube, "--valuation", "phi", "--k", "1", "--s", "2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("rank reports a passing certificate") {
  const Result r = run({"rank", "--n", "2", "--p", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("check passes for a basis element and flags anti-covariance") {
  const Result ok = run({"check", "--oracle", "builtin:phi:1,0,1,0", "--n", "3", "--trials", "4"});
  CHECK(ok.code == 0);
  CHECK(mtl::io::Json::parse(ok.out)["pass"].get<bool>());

  const Result bad = run({"check", "--oracle", "builtin:tilde3:0,1,0", "--n", "3", "--trials", "4", "--improper"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("sign_flip") != std::string::npos);
}

TEST_CASE("seed falls back to the environment") {
  const std::vector<std::string> args = {"check", "--oracle", "builtin:phi:1,0,0,0", "--n", "2", "--trials", "2"};
  setenv("MTL_SEED", "17", 1);
  const Result env = run(args);
  unsetenv("MTL_SEED");
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "17"});
  const Result flag = run(explicit_args);
  CHECK(env.code == 0);
  CHECK(mtl::io::Json::parse(env.out)["seed"] == 17);
  CHECK(env.out == flag.out);

  setenv("MTL_SEED", "not-a-number", 1);
  CHECK(run(args).code == 2);
  unsetenv("MTL_SEED");
}

TEST_CASE("malformed input exits with 2") {
  const std::string broken = temp_file("broken.json", "{\"dim\": 3, \"vertices\": [[0,0]");
  CHECK(run({"compute", "--polytope", broken, "--valuation", "phi", "--k", "0"}).code == 2);
  CHECK(run({"compute", "--polytope", "/nonexistent/cube.json", "--valuation", "phi"}).code == 2);
  CHECK(run({"check", "--oracle", "builtin:nothing:1", "--n", "3"}).code == 2);
  CHECK(run({"check", "--oracle", "combo:x*phi:0,0,0,0", "--n", "3"}).code == 2);
  CHECK(run({"rank", "--n", "three"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("delta prints the density of a basis element") {
  const Result r = run({"delta", "--oracle", "builtin:phi:1,0,0,0", "--n", "3", "--k", "1"});
  REQUIRE(r.code == 0);
  const mtl::SymTensor t = mtl::io::tensor_from_json(mtl::io::Json::parse(r.out));
  CHECK(t.rank() == 0);
  // the whole circle of normals to a unit segment in R^3, with the flat density of V_1
  CHECK(t.value() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parse_oracle builds combinations") {
  const auto o = mtl::cli::parse_oracle("combo:2*phi:1,0,0,0;-1*phi:2,0,0,0", 3);
  CHECK(o.n == 3);
  CHECK(o.p == 0);
  CHECK_THROWS(mtl::cli::parse_oracle("phi:1,0,0,0", 3));
}
