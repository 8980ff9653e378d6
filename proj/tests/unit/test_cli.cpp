#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "polytoep/linalg.hpp"
#include "polytoep/model.hpp"
#include "polytoep/sampling.hpp"

using namespace polytoep;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "polytoep");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("polytoep_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::vector<std::string> column(const std::string& csv, std::size_t col) {
  std::vector<std::string> values;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(ls, cell, ',');
    values.push_back(cell);
  }
  return values;
}

}  // namespace

TEST_CASE("weights: f = z, m = 2 gives 1,2,3,4") {
  const fs::path dir = scratch("weights");
  write_text(dir / "z2.json", R"({"k":1,"n":[1],"m":[2],"coeffs":[{"i":1,"word":[1],"a":1}]})");
  const Result r = run({"weights", "--spec", (dir / "z2.json").string(), "--trunc", "3"});
  CHECK(r.code == cli::kPass);
  CHECK(column(r.out, 2) == std::vector<std::string>{"1", "2", "3", "4"});
}

TEST_CASE("weights: phi example with m = 1 reports a ratio column of 2") {
  const fs::path dir = scratch("phi");
  write_text(dir / "phi.json", phi_spec(2, 1, 5).to_json_text());
  const Result r = run({"weights", "--spec", (dir / "phi.json").string(), "--trunc", "5", "--out", dir.string()});
  REQUIRE(r.code == cli::kPass);
  const auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["oracle"]["passed"].get<bool>());
  const auto& trend = rep["compactness"][0]["trend"];
  REQUIRE(trend.size() == 5);
  for (const auto& t : trend) {
    if (t["degree"].get<int>() < 2) continue;  // b_{g_j} / b_e = 1
    CHECK(t["min_ratio"].get<double>() == 2.0);
    CHECK(t["max_ratio"].get<double>() == 2.0);
  }
  CHECK(fs::exists(dir / "weights.csv"));
}

TEST_CASE("malformed specs and arguments are input errors") {
  const fs::path dir = scratch("bad");
  write_text(dir / "neg.json", R"({"k":1,"n":[1],"m":[2],"coeffs":[{"i":1,"word":[1],"a":-1}]})");
  Result r = run({"weights", "--spec", (dir / "neg.json").string()});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("SpecError") != std::string::npos);

  write_text(dir / "junk.json", "{ not json");
  CHECK(run({"weights", "--spec", (dir / "junk.json").string()}).code == cli::kInputError);
  CHECK(run({"verify", "--trunc", "3,3,3"}).code == cli::kInputError);
  CHECK(run({"verify", "--trunc", "0"}).code == cli::kInputError);
  CHECK(run({"weights", "--bogus"}).code == cli::kInputError);
  CHECK(run({}).code == cli::kInputError);
}

TEST_CASE("toeplitz: identity file gives the trivial symbol") {
  const fs::path dir = scratch("ident");
  const auto space = make_space(cli::default_spec(), {3, 3});
  write_coo((dir / "I.coo").string(), identity(space).matrix());
  const Result r = run({"toeplitz", "--op", (dir / "I.coo").string(), "--trunc", "3", "--out", dir.string()});
  REQUIRE(r.code == cli::kPass);
  const auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["verdict"].get<bool>());
  CHECK(rep["skipped_pairs"].get<int>() == 0);
  std::ifstream is(dir / "symbol.json");
  const auto sym = nlohmann::json::parse(is);
  REQUIRE(sym.size() == 1);
  CHECK(sym[0]["pair"]["left"] == nlohmann::json::parse("[[],[]]"));
  CHECK(sym[0]["pair"]["right"] == nlohmann::json::parse("[[],[]]"));
  CHECK(sym[0]["re"][0][0].get<double>() == 1.0);
  CHECK(sym[0]["im"][0][0].get<double>() == 0.0);
}

TEST_CASE("toeplitz: a saved monomial returns its coefficient") {
  const fs::path dir = scratch("mono");
  const auto space = make_space(cli::default_spec(), {3, 3}, 2);
  DenseMatrix a(2, 2);
  a << cplx(0.25, -0.5), cplx(0.0, 1.0), cplx(-0.75, 0.0), cplx(0.125, 0.375);
  const IndexPair pair{MultiWord({Word(2, {1, 2}), Word(1, {})}), MultiWord({Word(2, {}), Word(1, {1})})};
  write_coo((dir / "T.coo").string(), monomial(space, pair, a).matrix());
  const Result r = run({"toeplitz", "--op", (dir / "T.coo").string(), "--trunc", "3", "--out", dir.string()});
  REQUIRE(r.code == cli::kPass);
  std::ifstream is(dir / "symbol.json");
  const auto sym = nlohmann::json::parse(is);
  REQUIRE(sym.size() == 1);
  CHECK(sym[0]["pair"]["left"] == nlohmann::json::parse("[[1,2],[]]"));
  CHECK(sym[0]["pair"]["right"] == nlohmann::json::parse("[[],[1]]"));
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      CHECK(std::abs(sym[0]["re"][y][x].get<double>() - a(y, x).real()) <= 1e-12);
      CHECK(std::abs(sym[0]["im"][y][x].get<double>() - a(y, x).imag()) <= 1e-12);
    }
}

TEST_CASE("toeplitz: dimension mismatch exits with 3") {
  const fs::path dir = scratch("dim");
  write_coo((dir / "bad.coo").string(), sparse_identity(7));
  const Result r = run({"toeplitz", "--op", (dir / "bad.coo").string(), "--trunc", "3"});
  CHECK(r.code == cli::kDimensionError);
  CHECK(r.err.find("DimensionMismatch") != std::string::npos);
  write_text(dir / "garbage.coo", "3 3 1\n0 x 1 0\n");
  CHECK(run({"toeplitz", "--op", (dir / "garbage.coo").string(), "--trunc", "3"}).code == cli::kDimensionError);
}

TEST_CASE("fourier then toeplitz round trip") {
  const fs::path dir = scratch("fourier");
  const auto space = make_space(cli::default_spec(), {3, 3});
  const IndexPair pair{MultiWord({Word(2, {2}), Word(1, {})}), MultiWord({Word(2, {}), Word(1, {1})})};
  DenseMatrix a(1, 1);
  a(0, 0) = cplx(0.5, 0.25);
  write_coo((dir / "T.coo").string(), monomial(space, pair, a).matrix());
  REQUIRE(run({"toeplitz", "--op", (dir / "T.coo").string(), "--trunc", "3", "--out", (dir / "t").string()}).code ==
          cli::kPass);
  REQUIRE(run({"fourier", "--symbol", (dir / "t" / "symbol.json").string(), "--trunc", "3", "--out",
               (dir / "f").string()})
              .code == cli::kPass);
  const SparseMatrix back = read_coo((dir / "f" / "operator.coo").string());
  CHECK(max_abs(SparseMatrix(back - monomial(space, pair, a).matrix())) <= 1e-14);
}

TEST_CASE("verify is deterministic and flags an injected violation") {
  cli::RunConfig cfg;
  cfg.seed = 7;
  std::ostringstream a, b;
  CHECK(cli::run_verify(cfg, {}, a) == cli::kPass);
  CHECK(cli::run_verify(cfg, {}, b) == cli::kPass);
  CHECK(a.str() == b.str());

  const Result bad = run({"verify", "--seed", "7", "--inject-violation"});
  CHECK(bad.code == cli::kVerificationFailure);
  const auto rep = nlohmann::json::parse(bad.out);
  CHECK_FALSE(rep["passed"].get<bool>());
  const auto& flagged = rep["checks"]["toeplitz_roundtrip"]["flagged"];
  REQUIRE(flagged.is_object());
  CHECK(flagged["report"]["worst_pair"]["omega"].get<std::string>() == "(g1, e)");
  CHECK(flagged["report"]["worst_pair"]["gamma"].get<std::string>() == "(g2, e)");
}

TEST_CASE("other commands run on defaults") {
  CHECK(run({"model", "--trunc", "3"}).code == cli::kPass);
  CHECK(run({"berezin", "--trunc", "3"}).code == cli::kPass);
  CHECK(run({"brown-halmos", "--trunc", "3", "--factor", "2"}).code == cli::kPass);
  CHECK(run({"brown-halmos", "--trunc", "3", "--factor", "3"}).code == cli::kInputError);
  CHECK(run({"brown-halmos", "--trunc", "3", "--search", "3"}).code == cli::kPass);
  CHECK(run({"kernel-psd", "--trunc", "3", "--samples", "4"}).code == cli::kPass);
}
