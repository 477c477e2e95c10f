#pragma once

#include <json.hpp>
#include <string>

#include "sscf/dae.hpp"
#include "sscf/equivalence.hpp"
#include "sscf/structure.hpp"

namespace sscf {

using Json = nlohmann::json;

Json to_json(const Interval& iv);
Interval interval_from_json(const Json& j);

/// {rows, cols, interval:[a,b], degree, fit_tol, coeffs: row-major array of
/// coefficient arrays}. Round-trip value error stays within fit_tol.
Json to_json(const MatrixFunction& m);
MatrixFunction matrix_function_from_json(const Json& j);

Json to_json(const BlockSignature& sig);
BlockSignature block_signature_from_json(const Json& j);

Json to_json(const Characteristics& c);
Characteristics characteristics_from_json(const Json& j);

Json to_json(const EquivalenceTransform& t);
EquivalenceTransform transform_from_json(const Json& j);

Json to_json(const DaePair& p);
DaePair dae_pair_from_json(const Json& j);

Json to_json(const VerifyReport& r);

/// Problem file: SCF pair data plus inhomogeneity and dynamic initial value.
struct SolveProblem {
  int d = 0;
  MatrixFunction omega;
  MatrixFunction n_part;
  BlockSignature sig;
  SutVariant variant = SutVariant::columns;
  MatrixFunction q;
  Eigen::VectorXd x0_dyn;
};

Json to_json(const SolveProblem& p);
SolveProblem solve_problem_from_json(const Json& j);

/// Reads a whole file; throws ParseError with the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
Json parse_json_file(const std::string& path);

}  // namespace sscf
