#include "sscf/serialize.hpp"

#include <fstream>
#include <sstream>

namespace sscf {

Json to_json(const Interval& iv) { return Json::array({iv.a, iv.b}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError("interval", "expected [a, b]");
  return Interval(j[0].get<double>(), j[1].get<double>());
}

Json to_json(const MatrixFunction& m) {
  Json coeffs = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      Json entry = Json::array();
      const double* c = m.entry(i, j);
      for (int k = 0; k <= m.degree(); ++k) entry.push_back(c[k]);
      coeffs.push_back(std::move(entry));
    }
  }
  return Json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"interval", to_json(m.interval())},
              {"degree", m.degree()},
              {"fit_tol", m.fit_tol()},
              {"coeffs", std::move(coeffs)}};
}

MatrixFunction matrix_function_from_json(const Json& j) {
  try {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const Interval iv = interval_from_json(j.at("interval"));
    const int degree = j.at("degree").get<int>();
    const double fit_tol = j.value("fit_tol", defaults::fit_tol);
    const Json& coeffs = j.at("coeffs");
    if (static_cast<int>(coeffs.size()) != rows * cols)
      throw ParseError("matrix_function", "coeffs entry count mismatch");
    std::vector<double> flat(static_cast<size_t>(rows) * cols * (degree + 1), 0.0);
    for (int e = 0; e < rows * cols; ++e) {
      const Json& entry = coeffs[static_cast<size_t>(e)];
      if (static_cast<int>(entry.size()) != degree + 1)
        throw ParseError("matrix_function", "coefficient array length mismatch");
      for (int k = 0; k <= degree; ++k)
        flat[static_cast<size_t>(e) * (degree + 1) + k] = entry[static_cast<size_t>(k)].get<double>();
    }
    return MatrixFunction(rows, cols, iv, degree, std::move(flat), fit_tol);
  } catch (const Json::exception& e) {
    throw ParseError("matrix_function", e.what());
  }
}

Json to_json(const BlockSignature& sig) {
  return Json{{"mu", sig.mu()}, {"ells", sig.ells}};
}

BlockSignature block_signature_from_json(const Json& j) {
  try {
    BlockSignature sig(j.at("ells").get<std::vector<int>>());
    if (j.contains("mu") && j.at("mu").get<int>() != sig.mu())
      throw ParseError("block_signature", "mu does not match ells length");
    return sig;
  } catch (const Json::exception& e) {
    throw ParseError("block_signature", e.what());
  }
}

Json to_json(const Characteristics& c) {
  return Json{{"m", c.m}, {"r", c.r}, {"mu", c.mu}, {"thetas", c.thetas}, {"d", c.d}};
}

Characteristics characteristics_from_json(const Json& j) {
  try {
    Characteristics c;
    c.m = j.at("m").get<int>();
    c.r = j.at("r").get<int>();
    c.mu = j.at("mu").get<int>();
    c.thetas = j.at("thetas").get<std::vector<int>>();
    c.d = j.at("d").get<int>();
    return c;
  } catch (const Json::exception& e) {
    throw ParseError("characteristics", e.what());
  }
}

Json to_json(const EquivalenceTransform& t) {
  return Json{{"L", to_json(t.L)},
              {"K", to_json(t.K)},
              {"certificates",
               Json{{"min_sigma_L", t.cert_L.min_sigma},
                    {"worst_t_L", t.cert_L.worst_t},
                    {"min_sigma_K", t.cert_K.min_sigma},
                    {"worst_t_K", t.cert_K.worst_t},
                    {"grid", t.cert_L.grid_size}}}};
}

EquivalenceTransform transform_from_json(const Json& j) {
  try {
    return make_transform(matrix_function_from_json(j.at("L")),
                          matrix_function_from_json(j.at("K")));
  } catch (const Json::exception& e) {
    throw ParseError("transform", e.what());
  }
}

Json to_json(const DaePair& p) {
  return Json{{"e", to_json(p.E)}, {"f", to_json(p.F)}};
}

DaePair dae_pair_from_json(const Json& j) {
  try {
    return DaePair{matrix_function_from_json(j.at("e")),
                   matrix_function_from_json(j.at("f"))};
  } catch (const Json::exception& e) {
    throw ParseError("dae_pair", e.what());
  }
}

Json to_json(const VerifyReport& r) {
  return Json{{"residual_E", r.residual_E}, {"residual_F", r.residual_F},
              {"worst_t", r.worst_t},       {"pass", r.pass},
              {"tol", r.tol},               {"grid", r.grid}};
}

Json to_json(const SolveProblem& p) {
  Json sig = to_json(p.sig);
  sig["variant"] = to_string(p.variant);
  std::vector<double> x0(p.x0_dyn.data(), p.x0_dyn.data() + p.x0_dyn.size());
  return Json{{"interval", to_json(p.n_part.interval())},
              {"d", p.d},
              {"omega", to_json(p.omega)},
              {"n_part", to_json(p.n_part)},
              {"signature", std::move(sig)},
              {"q", to_json(p.q)},
              {"x0_dyn", x0}};
}

SolveProblem solve_problem_from_json(const Json& j) {
  try {
    SolveProblem p;
    p.d = j.at("d").get<int>();
    p.omega = matrix_function_from_json(j.at("omega"));
    p.n_part = matrix_function_from_json(j.at("n_part"));
    p.sig = block_signature_from_json(j.at("signature"));
    p.variant = sut_variant_from_string(j.at("signature").value("variant", "columns"));
    p.q = matrix_function_from_json(j.at("q"));
    const auto x0 = j.at("x0_dyn").get<std::vector<double>>();
    p.x0_dyn = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    if (static_cast<int>(x0.size()) != p.d)
      throw ParseError("problem", "x0_dyn length must equal d");
    return p;
  } catch (const Json::exception& e) {
    throw ParseError("problem", e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot open file for writing");
  out << content;
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

}  // namespace sscf
