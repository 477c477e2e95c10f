#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sscf/cli.hpp"
#include "sscf/genbench.hpp"
#include "sscf/jsonschema.hpp"
#include "sscf/spy.hpp"

using namespace sscf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json report_schema() {
  return parse_json_file(std::string(SSCF_SOURCE_DIR) + "/schemas/report.schema.json");
}

void check_report(const fs::path& path) {
  std::string err;
  const bool ok = schema::validate(report_schema(), parse_json_file(path.string()), &err);
  CHECK_MESSAGE(ok, err);
}

std::string write_constant_matrix(const fs::path& dir, const std::string& name,
                                  const Eigen::MatrixXd& m) {
  const auto path = (dir / name).string();
  write_file(path, to_json(MatrixFunction::constant(m, Interval(-1, 1))).dump(2));
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate creates one instance file per count") {
  const auto dir = temp_dir("generate");
  const auto out = (dir / "corpus").string();
  const auto report = (dir / "report.json").string();
  const int code = cli::run({"--json", report, "generate", "--mu", "2", "--ells",
                             "1,1", "--seed", "7", "--out", out});
  CHECK(code == cli::kExitOk);
  CHECK(fs::exists(fs::path(out) / "instance_0000.json"));
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  check_report(report);
  const auto loaded = import_corpus(out);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].spec.seed == 7);
}

TEST_CASE("generate from characteristics reproduces the reference signature") {
  const auto dir = temp_dir("generate_chars");
  const auto out = (dir / "corpus").string();
  const int code = cli::run({"generate", "--from-characteristics",
                             "m=26,r=18,thetas=7,5,4,2", "--variant", "col",
                             "--seed", "1", "--out", out});
  CHECK(code == cli::kExitOk);
  const auto loaded = import_corpus(out);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].spec.sig.ells == std::vector<int>({8, 7, 5, 4, 2}));
}

TEST_CASE("generate rejects mis-ordered ells with exit 2") {
  const auto dir = temp_dir("generate_bad");
  const int code = cli::run({"generate", "--ells", "1,2", "--variant", "col",
                             "--out", (dir / "c").string()});
  CHECK(code == cli::kExitInput);
  CHECK(cli::run({"generate", "--mu", "3", "--ells", "1,1",
                  "--out", (dir / "c2").string()}) == cli::kExitInput);
}

TEST_CASE("canonicalize reports identity for an elementary input") {
  const auto dir = temp_dir("canon_elem");
  const auto out = (dir / "corpus").string();
  REQUIRE(cli::run({"generate", "--ells", "2,1", "--seed", "3", "--entry-degree",
                    "0", "--out", out}) == cli::kExitOk);
  // Overwrite the instance with the exact elementary matrix.
  auto loaded = import_corpus(out);
  loaded[0].sut.N =
      MatrixFunction::constant(elementary_col(loaded[0].spec.sig), Interval(-1, 1));
  export_corpus(out, loaded);
  const auto report = (dir / "report.json").string();
  const int code = cli::run({"--json", report, "canonicalize", "--in",
                             (fs::path(out) / "instance_0000.json").string()});
  CHECK(code == cli::kExitOk);
  const Json rep = parse_json_file(report);
  check_report(report);
  CHECK(rep["results"]["identity"].get<bool>());
  CHECK(rep["results"]["effective_changes"].get<int>() == 0);
  CHECK(rep["results"]["verify"]["pass"].get<bool>());
}

TEST_CASE("canonicalize solves the worked index-2 instance") {
  const auto dir = temp_dir("canon_mu2");
  // Instance with N = [[0, 2+t], [0, 0]]: encode directly.
  CorpusInstance inst;
  inst.id = "worked";
  inst.spec.sig = BlockSignature({1, 1});
  inst.spec.variant = SutVariant::columns;
  inst.spec.seed = 0;
  const auto N = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 1) = 2 + t;
        return m;
      },
      Interval(-1, 1), 1e-12);
  inst.sut = SutMatrixFunction{N, inst.spec.sig, inst.spec.variant};
  const auto corpus = (dir / "corpus").string();
  export_corpus(corpus, {inst});
  const auto report = (dir / "report.json").string();
  const auto transform = (dir / "transform.json").string();
  const int code = cli::run({"--json", report, "canonicalize", "--in",
                             (fs::path(corpus) / "instance_0000.json").string(),
                             "--tol", "1e-10", "--out-transform", transform});
  CHECK(code == cli::kExitOk);
  const Json rep = parse_json_file(report);
  CHECK(rep["results"]["verify"]["residual_E"].get<double>() <= 1e-10);
  // The exported transform verifies through the CLI verify command.
  const auto pair_path = (dir / "pair.json").string();
  const auto target_path = (dir / "target.json").string();
  write_file(pair_path,
             to_json(DaePair{N, MatrixFunction::identity(2, Interval(-1, 1))}).dump(2));
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 1, 0, 0;
  write_file(target_path,
             to_json(DaePair{MatrixFunction::constant(j2, Interval(-1, 1)),
                             MatrixFunction::identity(2, Interval(-1, 1))})
                 .dump(2));
  CHECK(cli::run({"verify", "--pair", pair_path, "--transform", transform,
                  "--target", target_path, "--tol", "1e-9"}) == cli::kExitOk);
  // Global flag form works as a default.
  CHECK(cli::run({"--tol", "1e-9", "verify", "--pair", pair_path, "--transform",
                  transform, "--target", target_path}) == cli::kExitOk);
  // A mismatched transform fails with exit 3.
  CHECK(cli::run({"verify", "--pair", target_path, "--transform", transform,
                  "--target", pair_path, "--tol", "1e-9"}) == cli::kExitVerification);
}

TEST_CASE("canonicalize rejects a rank-deficient instance with exit 3") {
  const auto dir = temp_dir("canon_bad");
  CorpusInstance inst;
  inst.id = "bad";
  inst.spec.sig = BlockSignature({1, 1});
  inst.spec.variant = SutVariant::columns;
  const auto N = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 1) = t;
        return m;
      },
      Interval(-1, 1), 1e-12);
  inst.sut = SutMatrixFunction{N, inst.spec.sig, inst.spec.variant};
  const auto corpus = (dir / "corpus").string();
  export_corpus(corpus, {inst});
  CHECK(cli::run({"canonicalize", "--in",
                  (fs::path(corpus) / "instance_0000.json").string()}) ==
        cli::kExitVerification);
}

TEST_CASE("characteristics of the reference Jordan matrix") {
  const auto dir = temp_dir("chars");
  const auto J = oracles::jordan_direct_sum({5, 5, 4, 4, 3, 2, 2, 1});
  const auto path = write_constant_matrix(dir, "j.json", J);
  const auto report = (dir / "report.json").string();
  CHECK(cli::run({"--json", report, "characteristics", "--in", path}) == cli::kExitOk);
  const Json rep = parse_json_file(report);
  check_report(report);
  CHECK(rep["results"]["characteristics"]["r"] == 18);
  CHECK(rep["results"]["characteristics"]["mu"] == 5);
  CHECK(rep["results"]["characteristics"]["thetas"] == Json::array({7, 5, 4, 2}));
  CHECK(rep["results"]["characteristics"]["d"] == 0);
  CHECK(rep["results"]["ranks_of_powers"] == Json::array({18, 11, 6, 2, 0}));
}

TEST_CASE("characteristics of the zero matrix report index 1") {
  const auto dir = temp_dir("chars_zero");
  const auto path = write_constant_matrix(dir, "z.json", Eigen::MatrixXd::Zero(3, 3));
  const auto report = (dir / "report.json").string();
  CHECK(cli::run({"--json", report, "characteristics", "--in", path}) == cli::kExitOk);
  const Json rep = parse_json_file(report);
  CHECK(rep["results"]["characteristics"]["mu"] == 1);
  CHECK(rep["results"]["characteristics"]["thetas"] == Json::array());
}

TEST_CASE("characteristics of the row elementary matrix match") {
  const auto dir = temp_dir("chars_row");
  const auto path = write_constant_matrix(
      dir, "e.json", elementary_row(BlockSignature({2, 4, 5, 7, 8})));
  const auto report = (dir / "report.json").string();
  CHECK(cli::run({"--json", report, "characteristics", "--in", path}) == cli::kExitOk);
  const Json rep = parse_json_file(report);
  CHECK(rep["results"]["characteristics"]["thetas"] == Json::array({7, 5, 4, 2}));
}

TEST_CASE("jordan reports the block multiset") {
  const auto dir = temp_dir("jordan");
  const auto path = write_constant_matrix(
      dir, "e.json", elementary_col(BlockSignature({8, 7, 5, 4, 2})));
  const auto report = (dir / "report.json").string();
  CHECK(cli::run({"--json", report, "jordan", "--in", path}) == cli::kExitOk);
  const Json rep = parse_json_file(report);
  check_report(report);
  CHECK(rep["results"]["blocks"] ==
        Json{{"1", 1}, {"2", 2}, {"3", 1}, {"4", 2}, {"5", 2}});
  CHECK(rep["results"]["is_elementary"].get<bool>());
}

TEST_CASE("solve runs a manufactured problem end to end") {
  const auto dir = temp_dir("solve");
  const Interval iv(-1, 1);
  SolveProblem prob;
  prob.d = 1;
  prob.omega = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = t;
        return m;
      },
      iv, 1e-12);
  GenSpec gs;
  gs.sig = BlockSignature({1, 1});
  gs.variant = SutVariant::columns;
  gs.entry_degree = 1;
  gs.seed = 5;
  prob.n_part = random_sut(gs).N;
  prob.sig = gs.sig;
  prob.variant = gs.variant;
  // Manufactured solution x = (e^t, sin t, cos t).
  const auto x_true = MatrixFunction::fit(
      [](double t) {
        Eigen::MatrixXd m(3, 1);
        m << std::exp(t), std::sin(t), std::cos(t);
        return m;
      },
      iv, 1e-12);
  const auto dp = to_dae_pair(assemble(prob.omega, prob.n_part));
  prob.q = add(mul(dp.E, x_true.derivative()), mul(dp.F, x_true));
  prob.x0_dyn = Eigen::VectorXd(1);
  prob.x0_dyn(0) = std::exp(-1.0);
  const auto path = (dir / "problem.json").string();
  write_file(path, to_json(prob).dump(2));
  const auto report = (dir / "report.json").string();
  const auto xout = (dir / "x.json").string();
  CHECK(cli::run({"--json", report, "solve", "--in", path, "--out-x", xout}) ==
        cli::kExitOk);
  const Json rep = parse_json_file(report);
  check_report(report);
  CHECK(rep["results"]["residual"].get<double>() <= 1e-6);
  CHECK(rep["results"]["free_initial_dimension"] == 1);
  const auto x = matrix_function_from_json(parse_json_file(xout));
  CHECK(grid_distance(x, x_true) <= 1e-6);
}

TEST_CASE("spy panels count the ones of elementary powers") {
  const auto dir = temp_dir("spy");
  const auto path = write_constant_matrix(
      dir, "e.json", elementary_col(BlockSignature({8, 7, 5, 4, 2})));
  const auto report = (dir / "report.json").string();
  const auto out = (dir / "spy.txt").string();
  CHECK(cli::run({"--json", report, "spy", "--in", path, "--powers", "5",
                  "--out", out}) == cli::kExitOk);
  const Json rep = parse_json_file(report);
  check_report(report);
  CHECK(rep["results"]["nnz"] == Json::array({18, 11, 6, 2, 0}));

  // SVG output is deterministic byte for byte.
  const auto svg1 = (dir / "a.svg").string();
  const auto svg2 = (dir / "b.svg").string();
  CHECK(cli::run({"spy", "--in", path, "--powers", "3", "--format", "svg",
                  "--out", svg1}) == cli::kExitOk);
  CHECK(cli::run({"spy", "--in", path, "--powers", "3", "--format", "svg",
                  "--out", svg2}) == cli::kExitOk);
  CHECK(read_file(svg1) == read_file(svg2));

  // Nonsquare input exits with a spec error.
  const auto bad = write_constant_matrix(dir, "bad.json", Eigen::MatrixXd::Zero(2, 3));
  CHECK(cli::run({"spy", "--in", bad, "--powers", "2"}) == cli::kExitInput);
}

TEST_CASE("spy of a single Jordan block") {
  const auto dir = temp_dir("spy_j2");
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 1, 0, 0;
  const auto path = write_constant_matrix(dir, "j2.json", j2);
  const auto report = (dir / "report.json").string();
  CHECK(cli::run({"--json", report, "spy", "--in", path, "--powers", "2"}) ==
        cli::kExitOk);
  const Json rep = parse_json_file(report);
  CHECK(rep["results"]["nnz"] == Json::array({1, 0}));
}

}  // TEST_SUITE
