#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sscf/genbench.hpp"

using namespace sscf;
namespace fs = std::filesystem;

namespace {

GenSpec make_spec(const std::vector<int>& ells, SutVariant variant,
                  std::uint64_t seed, int degree) {
  GenSpec spec;
  spec.sig = BlockSignature(ells);
  spec.variant = variant;
  spec.entry_degree = degree;
  spec.seed = seed;
  return spec;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::path("genbench_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("genbench") {

TEST_CASE("entry_degree zero produces constant instances") {
  const auto inst = random_sut(make_spec({3, 2}, SutVariant::columns, 7, 0));
  CHECK(inst.N.degree() == 0);
  CHECK(is_sut_columns(inst.N, inst.sig, 1e-8));
}

TEST_CASE("same spec twice gives identical coefficients") {
  const auto spec = make_spec({3, 2, 1}, SutVariant::columns, 1234, 3);
  const auto a = random_sut(spec);
  const auto b = random_sut(spec);
  REQUIRE(a.N.degree() == b.N.degree());
  for (int i = 0; i < a.N.rows(); ++i)
    for (int j = 0; j < a.N.cols(); ++j)
      for (int k = 0; k <= a.N.degree(); ++k)
        CHECK(a.N.coeff(i, j, k) == b.N.coeff(i, j, k));
}

TEST_CASE("generated instances always satisfy the variant predicate") {
  // Sweep over seeds and small signatures; the acceptance suite runs the
  // large version of this property.
  const std::vector<std::vector<int>> col_sigs{{1, 1}, {2, 1}, {3, 2}, {2, 2, 1},
                                               {4, 3, 2, 1}};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto& ells = col_sigs[seed % col_sigs.size()];
    const auto spec = make_spec(ells, SutVariant::columns, seed, static_cast<int>(seed % 4));
    const auto inst = random_sut(spec);
    CHECK(is_sut_columns(inst.N, inst.sig, 1e-8));
    std::vector<int> rev(ells.rbegin(), ells.rend());
    const auto rspec = make_spec(rev, SutVariant::rows, seed, static_cast<int>(seed % 4));
    const auto rinst = random_sut(rspec);
    CHECK(is_sut_rows(rinst.N, rinst.sig, 1e-8));
  }
}

TEST_CASE("ordering mismatches are rejected") {
  CHECK_THROWS_AS((void)random_sut(make_spec({1, 2}, SutVariant::columns, 1, 1)),
                  SignatureError);
  CHECK_THROWS_AS((void)random_sut(make_spec({2, 1}, SutVariant::rows, 1, 1)),
                  SignatureError);
}

TEST_CASE("zero-magnitude scramble is the identity") {
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 1, 0, 0;
  const Interval iv(-1, 1);
  const auto p = assemble_nilpotent(MatrixFunction::constant(j2, iv));
  const auto scr = scramble(p, 5, 1, 0.0);
  CHECK(grid_distance(scr.t_true.K, MatrixFunction::identity(2, iv)) <= 1e-13);
  CHECK(grid_distance(scr.t_true.L, MatrixFunction::identity(2, iv)) <= 1e-13);
  CHECK(grid_distance(scr.scrambled.E, p.N) <= 1e-12);
}

TEST_CASE("scramble then inverse transform recovers the pair") {
  const auto sut = random_sut(make_spec({2, 1}, SutVariant::columns, 42, 1));
  const auto p = assemble_nilpotent(sut.N);
  const auto scr = scramble(p, 43, 2);
  CHECK(scr.verify_residual <= 1e-9);
  const auto back = apply(inverse_transform(scr.t_true, 1e-10), scr.scrambled);
  const auto src = to_dae_pair(p);
  CHECK(grid_distance(back.E, src.E) <= 1e-9);
  CHECK(grid_distance(back.F, src.F) <= 1e-9);
}

TEST_CASE("empty corpus exports a manifest") {
  const auto dir = temp_dir("empty");
  export_corpus(dir.string(), {});
  const Json manifest = parse_json_file((dir / "manifest.json").string());
  CHECK(manifest["count"].get<int>() == 0);
  CHECK(import_corpus(dir.string()).empty());
}

TEST_CASE("corpus round trip preserves values and determinism") {
  const auto dir = temp_dir("roundtrip");
  CorpusInstance inst;
  inst.id = "t-1";
  inst.spec = make_spec({2, 1}, SutVariant::columns, 11, 2);
  inst.sut = random_sut(inst.spec);
  export_corpus(dir.string(), {inst});
  const auto text1 = read_file((dir / "instance_0000.json").string());
  const auto loaded = import_corpus(dir.string());
  REQUIRE(loaded.size() == 1);
  CHECK(grid_distance(loaded[0].sut.N, inst.sut.N) <= defaults::fit_tol);
  CHECK(loaded[0].spec.seed == inst.spec.seed);
  // Re-export from the regenerated spec: bit-identical file.
  CorpusInstance regen;
  regen.id = "t-1";
  regen.spec = loaded[0].spec;
  regen.sut = random_sut(regen.spec);
  const auto dir2 = temp_dir("roundtrip2");
  export_corpus(dir2.string(), {regen});
  const auto text2 = read_file((dir2 / "instance_0000.json").string());
  CHECK(text1 == text2);
}

TEST_CASE("scrambled corpus instances embed the verification residual") {
  const auto dir = temp_dir("scrambled");
  CorpusInstance inst;
  inst.id = "s-1";
  inst.spec = make_spec({2, 1}, SutVariant::columns, 3, 1);
  inst.sut = random_sut(inst.spec);
  const auto scr = scramble(assemble_nilpotent(inst.sut.N), 4, 1);
  inst.scrambled = scr.scrambled;
  inst.t_true = scr.t_true;
  inst.scramble_residual = scr.verify_residual;
  export_corpus(dir.string(), {inst});
  const auto loaded = import_corpus(dir.string());
  REQUIRE(loaded.size() == 1);
  REQUIRE(loaded[0].scrambled.has_value());
  REQUIRE(loaded[0].t_true.has_value());
  CHECK(*loaded[0].scramble_residual <= 1e-9);
  const auto rep = verify(*loaded[0].t_true, to_dae_pair(assemble_nilpotent(loaded[0].sut.N)),
                          *loaded[0].scrambled);
  CHECK(rep.pass);
}

TEST_CASE("checksum mismatch raises an integrity error") {
  const auto dir = temp_dir("integrity");
  CorpusInstance inst;
  inst.id = "c-1";
  inst.spec = make_spec({1, 1}, SutVariant::columns, 9, 0);
  inst.sut = random_sut(inst.spec);
  export_corpus(dir.string(), {inst});
  // Tamper with the instance file.
  auto text = read_file((dir / "instance_0000.json").string());
  text += " ";
  write_file((dir / "instance_0000.json").string(), text);
  CHECK_THROWS_AS((void)import_corpus(dir.string()), IntegrityError);
}

TEST_CASE("malformed instance file raises a parse error with its location") {
  const auto dir = temp_dir("malformed");
  write_file((dir / "broken.json").string(), "{ not json");
  CHECK_THROWS_AS((void)parse_json_file((dir / "broken.json").string()), ParseError);
  try {
    (void)parse_json_file((dir / "broken.json").string());
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
  }
}

}  // TEST_SUITE
