#include "sscf/genbench.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "sscf/util.hpp"

namespace fs = std::filesystem;

namespace sscf {

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  g.next();
  return g;
}

std::uint64_t SplitMix64::next() {
  s_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double a, double b) { return a + (b - a) * uniform(); }

int SplitMix64::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

// Polynomial with sup norm <= 1 on the interval, as Chebyshev coefficients.
std::vector<double> bounded_poly(SplitMix64& rng, int degree) {
  std::vector<double> c(static_cast<size_t>(degree) + 1);
  for (double& v : c) v = rng.uniform(-1.0, 1.0) / (degree + 1);
  return c;
}

double eval_poly(const std::vector<double>& c, const Interval& iv, double t) {
  // Direct T_k evaluation via the recurrence.
  const double s = iv.to_unit(t);
  double acc = 0.0, tkm = 1.0, tk = s;
  acc += c[0] * tkm;
  if (c.size() > 1) acc += c[1] * tk;
  for (size_t k = 2; k < c.size(); ++k) {
    const double tn = 2.0 * s * tk - tkm;
    acc += c[static_cast<size_t>(k)] * tn;
    tkm = tk;
    tk = tn;
  }
  return acc;
}

struct GivensPlan {
  int p, q;
  std::vector<double> angle;  // Chebyshev coeffs of the (scaled) angle
};

std::vector<GivensPlan> plan_rotations(SplitMix64& rng, int n, int count,
                                       int degree, double magnitude,
                                       double amplitude) {
  std::vector<GivensPlan> plans;
  if (n < 2 || magnitude == 0.0) return plans;
  plans.reserve(static_cast<size_t>(count));
  for (int r = 0; r < count; ++r) {
    GivensPlan g;
    g.p = rng.uniform_int(0, n - 2);
    g.q = rng.uniform_int(g.p + 1, n - 1);
    g.angle = bounded_poly(rng, degree);
    const double base = rng.uniform(0.0, 2.0 * M_PI);
    for (double& v : g.angle) v *= amplitude * magnitude;
    g.angle[0] += base * magnitude;
    plans.push_back(std::move(g));
  }
  return plans;
}

Eigen::MatrixXd eval_rotations(const std::vector<GivensPlan>& plans, int n,
                               const Interval& iv, double t) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  for (const auto& g : plans) {
    const double phi = eval_poly(g.angle, iv, t);
    const double c = std::cos(phi), s = std::sin(phi);
    // Apply the rotation to rows p, q of Q (left multiplication).
    for (int j = 0; j < n; ++j) {
      const double a = Q(g.p, j), b = Q(g.q, j);
      Q(g.p, j) = c * a - s * b;
      Q(g.q, j) = s * a + c * b;
    }
  }
  return Q;
}

MatrixFunction poly_matrix(SplitMix64& rng, int rows, int cols, const Interval& iv,
                           int degree, double amplitude) {
  std::vector<double> flat(static_cast<size_t>(rows) * cols * (degree + 1));
  for (int e = 0; e < rows * cols; ++e) {
    const auto c = bounded_poly(rng, degree);
    for (int k = 0; k <= degree; ++k)
      flat[static_cast<size_t>(e) * (degree + 1) + k] = amplitude * c[static_cast<size_t>(k)];
  }
  return MatrixFunction(rows, cols, iv, degree, std::move(flat), defaults::fit_tol)
      .compressed(1e-15);
}

}  // namespace

SutMatrixFunction random_sut(const GenSpec& spec) {
  const BlockSignature& sig = spec.sig;
  if (spec.variant == SutVariant::columns && !sig.column_ordered())
    throw SignatureError("random_sut: column variant needs a column-ordered signature");
  if (spec.variant == SutVariant::rows && !sig.row_ordered())
    throw SignatureError("random_sut: row variant needs a row-ordered signature");
  if (spec.conditioning < 1.0)
    throw SignatureError("random_sut: conditioning must be >= 1");

  const Interval iv = spec.interval;
  const int mu = sig.mu();
  SplitMix64 rng = SplitMix64::stream(spec.seed, 0);

  std::vector<std::vector<MatrixFunction>> grid(static_cast<size_t>(mu));
  for (int bi = 0; bi < mu; ++bi) {
    for (int bj = 0; bj < mu; ++bj) {
      const int r = sig.ells[static_cast<size_t>(bi)];
      const int c = sig.ells[static_cast<size_t>(bj)];
      if (bj == bi + 1) {
        // Full-rank secondary block: rotation times bounded positive diagonal.
        const int k = std::min(r, c);
        // Spaced bands keep the block spectrum separated uniformly in t,
        // which keeps the smooth-SVD factors well conditioned.
        const double spacing = (spec.conditioning - 1.0) / k;
        std::vector<double> base(static_cast<size_t>(k));
        std::vector<std::vector<double>> wiggle(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) {
          base[static_cast<size_t>(i)] = 1.0 + (i + 0.5) * spacing;
          wiggle[static_cast<size_t>(i)] = bounded_poly(rng, spec.entry_degree);
        }
        const int qdim = spec.variant == SutVariant::columns ? r : c;
        const auto plans = plan_rotations(rng, qdim, qdim, spec.entry_degree, 1.0, 0.35);
        auto sampler = [&](double t) {
          Eigen::MatrixXd D = Eigen::MatrixXd::Zero(r, c);
          for (int i = 0; i < k; ++i) {
            const double w = eval_poly(wiggle[static_cast<size_t>(i)], iv, t);
            const double v = base[static_cast<size_t>(i)] +
                             0.25 * ((spec.conditioning - 1.0) / k) * w;
            if (spec.variant == SutVariant::columns)
              D(i, i) = v;  // [D; 0]
            else
              D(i, c - k + i) = v;  // [0 D]
          }
          const Eigen::MatrixXd Q = eval_rotations(plans, qdim, iv, t);
          return spec.variant == SutVariant::columns ? (Q * D).eval() : (D * Q).eval();
        };
        grid[static_cast<size_t>(bi)].push_back(
            MatrixFunction::fit(sampler, iv, defaults::fit_tol));
      } else if (bj > bi + 1) {
        // Row sums of the fill region stay below 0.5 so products along the
        // pipeline do not compound.
        int fill_width = 0;
        for (int bk = bi + 2; bk < mu; ++bk) fill_width += sig.ells[static_cast<size_t>(bk)];
        const double amp = 0.5 / std::max(1, fill_width);
        grid[static_cast<size_t>(bi)].push_back(poly_matrix(rng, r, c, iv, spec.entry_degree, amp));
      } else {
        grid[static_cast<size_t>(bi)].push_back(MatrixFunction::zero(r, c, iv));
      }
    }
  }
  std::vector<MatrixFunction> rows_mf;
  rows_mf.reserve(static_cast<size_t>(mu));
  for (int bi = 0; bi < mu; ++bi) rows_mf.push_back(hstack(grid[static_cast<size_t>(bi)]));
  return SutMatrixFunction{vstack(rows_mf), sig, spec.variant};
}

MatrixFunction random_omega(int d, Interval iv, int degree, std::uint64_t seed) {
  if (d <= 0) throw DimensionError("random_omega: d must be positive");
  SplitMix64 rng = SplitMix64::stream(seed, 1);
  return poly_matrix(rng, d, d, iv, degree, 1.0);
}

ScrambleResult scramble(const ScfPair& p, std::uint64_t seed, int degree,
                        double magnitude) {
  const Interval iv = p.N.interval();
  const int m = p.m();
  SplitMix64 rng = SplitMix64::stream(seed, 2);

  const int nrot = (m + 1) / 2;
  const auto rotK = plan_rotations(rng, m, nrot, degree, magnitude, 0.4);
  const auto rotL = plan_rotations(rng, m, nrot, degree, magnitude, 0.4);

  // Strictly triangular perturbations with row sums below 0.3 * magnitude.
  auto tri_poly = [&](bool upper) {
    std::vector<std::vector<double>> entries;
    entries.reserve(static_cast<size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if ((upper && j > i) || (!upper && j < i)) entries.push_back(bounded_poly(rng, degree));
    return entries;
  };
  const auto KsU = tri_poly(true), KsL = tri_poly(false);
  const auto LsU = tri_poly(true), LsL = tri_poly(false);
  const double amp = 0.3 * magnitude / std::max(1, m - 1);

  auto tri_eval = [&](const std::vector<std::vector<double>>& entries, bool upper,
                      double t) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(m, m);
    size_t e = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if ((upper && j > i) || (!upper && j < i))
          S(i, j) = amp * eval_poly(entries[e++], iv, t);
    return S;
  };

  auto K_sampler = [&](double t) {
    return (eval_rotations(rotK, m, iv, t) * tri_eval(KsU, true, t) *
            tri_eval(KsL, false, t))
        .eval();
  };
  auto L_sampler = [&](double t) {
    return (tri_eval(LsU, true, t) * tri_eval(LsL, false, t) *
            eval_rotations(rotL, m, iv, t))
        .eval();
  };

  MatrixFunction K = MatrixFunction::fit(K_sampler, iv, defaults::fit_tol);
  MatrixFunction L = MatrixFunction::fit(L_sampler, iv, defaults::fit_tol);

  ScrambleResult res{DaePair{MatrixFunction::zero(m, m, iv), MatrixFunction::zero(m, m, iv)},
                     make_transform(std::move(L), std::move(K)),
                     0.0};
  const DaePair src = to_dae_pair(p);
  res.scrambled = apply(res.t_true, src);
  const VerifyReport rep = verify(res.t_true, src, res.scrambled);
  res.verify_residual = std::max(rep.residual_E, rep.residual_F);
  return res;
}

Json to_json(const GenSpec& spec) {
  Json j = Json{{"sig", to_json(spec.sig)},
                {"variant", to_string(spec.variant)},
                {"interval", to_json(spec.interval)},
                {"entry_degree", spec.entry_degree},
                {"seed", spec.seed},
                {"conditioning", spec.conditioning}};
  return j;
}

GenSpec gen_spec_from_json(const Json& j) {
  try {
    GenSpec spec;
    spec.sig = block_signature_from_json(j.at("sig"));
    spec.variant = sut_variant_from_string(j.at("variant").get<std::string>());
    spec.interval = interval_from_json(j.at("interval"));
    spec.entry_degree = j.at("entry_degree").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.conditioning = j.at("conditioning").get<double>();
    return spec;
  } catch (const Json::exception& e) {
    throw ParseError("gen_spec", e.what());
  }
}

Json to_json(const CorpusInstance& inst) {
  Json j = Json{{"id", inst.id},
                {"spec", to_json(inst.spec)},
                {"n", to_json(inst.sut.N)}};
  if (inst.scrambled) j["scrambled"] = to_json(*inst.scrambled);
  if (inst.t_true) j["t_true"] = to_json(*inst.t_true);
  if (inst.scramble_residual) j["scramble_residual"] = *inst.scramble_residual;
  return j;
}

CorpusInstance corpus_instance_from_json(const Json& j) {
  try {
    CorpusInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.spec = gen_spec_from_json(j.at("spec"));
    inst.sut = SutMatrixFunction{matrix_function_from_json(j.at("n")), inst.spec.sig,
                                 inst.spec.variant};
    if (j.contains("scrambled")) inst.scrambled = dae_pair_from_json(j.at("scrambled"));
    if (j.contains("t_true")) inst.t_true = transform_from_json(j.at("t_true"));
    if (j.contains("scramble_residual"))
      inst.scramble_residual = j.at("scramble_residual").get<double>();
    return inst;
  } catch (const Json::exception& e) {
    throw ParseError("corpus_instance", e.what());
  }
}

void export_corpus(const std::string& dir, const std::vector<CorpusInstance>& instances) {
  fs::create_directories(dir);
  Json manifest;
  manifest["version"] = 1;
  manifest["count"] = instances.size();
  manifest["instances"] = Json::array();
  for (size_t i = 0; i < instances.size(); ++i) {
    std::ostringstream name;
    name << "instance_" << std::setw(4) << std::setfill('0') << i << ".json";
    const std::string text = to_json(instances[i]).dump(2) + "\n";
    write_file((fs::path(dir) / name.str()).string(), text);
    Json entry = Json{{"file", name.str()},
                      {"id", instances[i].id},
                      {"seed", instances[i].spec.seed},
                      {"spec", to_json(instances[i].spec)},
                      {"checksum", fnv1a64_hex(text)}};
    if (instances[i].scramble_residual)
      entry["residual"] = *instances[i].scramble_residual;
    manifest["instances"].push_back(std::move(entry));
  }
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::vector<CorpusInstance> import_corpus(const std::string& dir) {
  const Json manifest = parse_json_file((fs::path(dir) / "manifest.json").string());
  std::vector<CorpusInstance> out;
  try {
    for (const auto& entry : manifest.at("instances")) {
      const std::string file = entry.at("file").get<std::string>();
      const std::string path = (fs::path(dir) / file).string();
      const std::string text = read_file(path);
      const std::string expect = entry.at("checksum").get<std::string>();
      if (fnv1a64_hex(text) != expect) {
        throw IntegrityError("import_corpus: checksum mismatch for " + file);
      }
      Json j;
      try {
        j = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw ParseError(path, e.what());
      }
      out.push_back(corpus_instance_from_json(j));
    }
  } catch (const Json::exception& e) {
    throw ParseError(dir + "/manifest.json", e.what());
  }
  return out;
}

}  // namespace sscf
