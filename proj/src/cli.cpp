#include "sscf/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sscf/genbench.hpp"
#include "sscf/spy.hpp"
#include "sscf/util.hpp"

namespace sscf::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const Json& v) { return v.dump(); }

Json make_report(const std::string& command, const std::string& digest,
                 Json flags, Json results, double total_ms, bool pass) {
  return Json{{"command", command},
              {"input_digest", digest},
              {"flags", std::move(flags)},
              {"results", std::move(results)},
              {"timings_ms", Json{{"total", total_ms}}},
              {"pass", pass}};
}

void emit(const Json& report, const std::string& json_path) {
  if (!json_path.empty()) write_file(json_path, report.dump(2) + "\n");
  std::cout << report["command"].get<std::string>()
            << (report["pass"].get<bool>() ? ": ok" : ": FAIL") << "\n";
  for (auto it = report["results"].begin(); it != report["results"].end(); ++it) {
    std::cout << "  " << it.key() << " = " << fmt(it.value()) << "\n";
  }
}

std::string file_digest(const std::string& path) {
  return fnv1a64_hex(read_file(path));
}

// Parses "m=26,r=18,thetas=7,5,4,2".
Characteristics parse_characteristics_flag(const std::string& text) {
  Characteristics c;
  bool have_m = false, have_r = false;
  std::string cur;
  std::string active;
  auto handle = [&](const std::string& token) {
    std::string key = active;
    std::string value = token;
    if (const auto eq = token.find('='); eq != std::string::npos) {
      key = token.substr(0, eq);
      value = token.substr(eq + 1);
      active = key;
    }
    int v = 0;
    try {
      v = std::stoi(value);
    } catch (...) {
      throw ParseError("--from-characteristics", "bad integer '" + value + "'");
    }
    if (key == "m") { c.m = v; have_m = true; }
    else if (key == "r") { c.r = v; have_r = true; }
    else if (key == "thetas") c.thetas.push_back(v);
    else throw ParseError("--from-characteristics", "unknown key '" + key + "'");
  };
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    if (!cur.empty()) handle(cur);
  }
  if (!have_m || !have_r || c.thetas.empty())
    throw ParseError("--from-characteristics", "need m=, r= and thetas=");
  c.mu = static_cast<int>(c.thetas.size()) + 1;
  int sum = 0;
  for (int t : c.thetas) sum += t;
  c.d = c.r - sum;
  if (c.d < 0) throw ParseError("--from-characteristics", "r < sum(thetas)");
  return c;
}

struct GenerateArgs {
  int mu = 0;
  std::vector<int> ells;
  std::string variant = "col";
  std::string from_characteristics;
  std::uint64_t seed = 0;
  int count = 1;
  int entry_degree = 1;
  double conditioning = 4.0;
  std::vector<double> interval{-1.0, 1.0};
  std::string out = "corpus";
};

int cmd_generate(const GenerateArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const SutVariant variant = sut_variant_from_string(a.variant);
  BlockSignature sig;
  if (!a.from_characteristics.empty()) {
    const Characteristics c = parse_characteristics_flag(a.from_characteristics);
    sig = signature_from_characteristics(c, c.m - c.d, variant);
  } else if (!a.ells.empty()) {
    sig = BlockSignature(a.ells);
  } else {
    throw ParseError("generate", "need --ells or --from-characteristics");
  }
  if (a.mu > 0 && a.mu != sig.mu()) {
    throw SignatureError("generate: --mu disagrees with the number of ells");
  }
  if (variant == SutVariant::columns && !sig.column_ordered())
    throw SignatureError("generate: ells are not column-ordered (nonincreasing)");
  if (variant == SutVariant::rows && !sig.row_ordered())
    throw SignatureError("generate: ells are not row-ordered (nondecreasing)");

  std::vector<CorpusInstance> instances;
  for (int i = 0; i < a.count; ++i) {
    GenSpec spec;
    spec.sig = sig;
    spec.variant = variant;
    spec.interval = Interval(a.interval[0], a.interval[1]);
    spec.entry_degree = a.entry_degree;
    spec.seed = a.seed + static_cast<std::uint64_t>(i);
    spec.conditioning = a.conditioning;
    CorpusInstance inst;
    inst.id = "gen-" + std::to_string(spec.seed);
    inst.spec = spec;
    inst.sut = random_sut(spec);
    instances.push_back(std::move(inst));
  }
  export_corpus(a.out, instances);

  Json files = Json::array();
  for (size_t i = 0; i < instances.size(); ++i) {
    std::ostringstream name;
    name << "instance_" << std::setw(4) << std::setfill('0') << i << ".json";
    files.push_back(name.str());
  }
  Json flags{{"ells", sig.ells}, {"variant", a.variant}, {"seed", a.seed},
             {"count", a.count}, {"entry_degree", a.entry_degree},
             {"conditioning", a.conditioning}, {"out", a.out}};
  Json results{{"count", instances.size()}, {"dir", a.out}, {"files", files},
               {"m", sig.m()}, {"mu", sig.mu()}};
  emit(make_report("generate", fnv1a64_hex(Json(flags).dump()), flags, results,
                   ms_since(t0), true),
       json_path);
  return kExitOk;
}

struct CanonicalizeArgs {
  std::string in;
  std::string variant;  // default: from the instance
  double tol = defaults::check_tol;
  int grid = defaults::verify_grid;
  std::string out_transform;
  std::string out_trace;
};

int cmd_canonicalize(const CanonicalizeArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  CorpusInstance inst = corpus_instance_from_json(parse_json_file(a.in));
  SutVariant variant = inst.spec.variant;
  if (!a.variant.empty()) variant = sut_variant_from_string(a.variant);
  inst.sut.variant = variant;

  PipelineOptions opts;
  opts.grid = a.grid;

  Json steps = Json::array();
  VerifyReport report;
  Json transform_json;
  int effective_changes = 0;
  bool identity = false;
  Eigen::MatrixXd target;

  auto record_steps = [&](const auto& trace) {
    const Interval iv = inst.sut.N.interval();
    const int m = inst.sut.sig.m();
    const MatrixFunction I = MatrixFunction::identity(m, iv);
    for (const auto& st : trace.steps) {
      Json s{{"k", st.k}, {"degree_N", st.N.degree()}};
      if constexpr (requires { st.kappa; }) {
        s["kappa"] = st.kappa;
        s["row_coincidence_residual"] = st.row_coincidence_residual;
      } else {
        s["lambda"] = st.lambda;
        s["col_coincidence_residual"] = st.col_coincidence_residual;
      }
      if (st.K) {
        s["degree_K"] = st.K->degree();
        if (grid_distance(*st.K, I, a.grid) > a.tol) ++effective_changes;
      }
      if (st.H) s["degree_H"] = st.H->degree();
      steps.push_back(std::move(s));
    }
    const MatrixFunction Im = MatrixFunction::identity(m, iv);
    identity = grid_distance(trace.total.K, Im, a.grid) <= a.tol &&
               grid_distance(trace.total.L, Im, a.grid) <= a.tol;
    transform_json = to_json(trace.total);
  };

  if (variant == SutVariant::columns) {
    auto res = canonicalize_col(inst.sut, a.tol, opts);
    record_steps(res.trace);
    report = res.report;
    target = res.Nc;
  } else {
    auto res = canonicalize_row(inst.sut, a.tol, opts);
    record_steps(res.trace);
    report = res.report;
    target = res.Nr;
  }

  if (!a.out_transform.empty())
    write_file(a.out_transform, transform_json.dump(2) + "\n");
  if (!a.out_trace.empty())
    write_file(a.out_trace, Json{{"steps", steps}}.dump(2) + "\n");

  Json flags{{"in", a.in}, {"variant", to_string(variant)}, {"tol", a.tol},
             {"grid", a.grid}};
  Json results{{"verify", to_json(report)},
               {"identity", identity},
               {"effective_changes", effective_changes},
               {"steps", steps},
               {"target_rank", numerical_rank(target)}};
  emit(make_report("canonicalize", file_digest(a.in), flags, results,
                   ms_since(t0), report.pass),
       json_path);
  return report.pass ? kExitOk : kExitVerification;
}

struct MatrixInArgs {
  std::string in;
  int r = -1;
  int d = 0;
};

Eigen::MatrixXd load_constant_matrix(const std::string& path) {
  const MatrixFunction M = matrix_function_from_json(parse_json_file(path));
  if (!M.is_constant())
    throw ParseError(path, "expected a constant matrix (degree 0)");
  return M.eval(M.interval().mid());
}

int cmd_characteristics(const MatrixInArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const Eigen::MatrixXd N = load_constant_matrix(a.in);
  const int r = a.r >= 0 ? a.r : a.d + numerical_rank(N);
  const Characteristics c = characteristics_from_nilpotent(N, r, a.d);
  Json flags{{"in", a.in}, {"r", r}, {"d", a.d}};
  Json results{{"characteristics", to_json(c)},
               {"ranks_of_powers", ranks_of_powers(N)}};
  emit(make_report("characteristics", file_digest(a.in), flags, results,
                   ms_since(t0), true),
       json_path);
  return kExitOk;
}

int cmd_jordan(const MatrixInArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const Eigen::MatrixXd N = load_constant_matrix(a.in);
  const int r = a.r >= 0 ? a.r : a.d + numerical_rank(N);
  const Characteristics c = characteristics_from_nilpotent(N, r, a.d);
  const auto blocks = jordan_blocks(c, c.m);
  Json blocks_json = Json::object();
  for (const auto& [order, count] : blocks)
    blocks_json[std::to_string(order)] = count;

  Json results{{"blocks", blocks_json}, {"characteristics", to_json(c)}};
  // Permutation available when the input is one of the elementary forms.
  bool elementary = false;
  for (const SutVariant variant : {SutVariant::columns, SutVariant::rows}) {
    if (c.mu < 2) break;
    const BlockSignature sig =
        signature_from_characteristics(c, static_cast<int>(N.rows()), variant);
    const Eigen::MatrixXd elem =
        variant == SutVariant::columns ? elementary_col(sig) : elementary_row(sig);
    if (max_abs(N - elem) <= 1e-9) {
      results["permutation"] = jordan_permutation(sig, variant);
      results["variant"] = to_string(variant);
      elementary = true;
      break;
    }
  }
  results["is_elementary"] = elementary;
  Json flags{{"in", a.in}, {"r", r}, {"d", a.d}};
  emit(make_report("jordan", file_digest(a.in), flags, results, ms_since(t0), true),
       json_path);
  return kExitOk;
}

struct SolveArgs {
  std::string in;
  double tol = 1e-8;
  int grid = defaults::verify_grid;
  std::string out_x;
};

int cmd_solve(const SolveArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const SolveProblem prob = solve_problem_from_json(parse_json_file(a.in));
  const ScfPair pair = prob.d > 0 ? assemble(prob.omega, prob.n_part)
                                  : assemble_nilpotent(prob.n_part);
  bool canonicalized = false;
  SolveResult sol;
  Json verify_json;
  if (pair.is_sscf) {
    sol = solve_sscf(pair, prob.q, prob.x0_dyn, a.tol);
  } else {
    canonicalized = true;
    PipelineOptions opts;
    opts.grid = a.grid;
    const auto canon = canonicalize_pair(pair, prob.sig, prob.variant, a.tol, opts);
    verify_json = to_json(canon.report);
    if (!canon.report.pass)
      throw NonConvergenceError("solve: canonicalization verification failed");
    const MatrixFunction q_t = mul(canon.T.L, prob.q);
    SolveResult inner = solve_sscf(canon.sscf, q_t, prob.x0_dyn, a.tol);
    auto [x, q_back] = pull_back(canon.T, inner.x, q_t, a.tol);
    (void)q_back;
    sol.x = x;
    sol.free_initial_dimension = inner.free_initial_dimension;
    sol.residual_norm = residual(to_dae_pair(pair), x, prob.q, a.grid);
  }
  if (!a.out_x.empty()) write_file(a.out_x, to_json(sol.x).dump(2) + "\n");
  const bool pass = sol.residual_norm <= 100.0 * a.tol;
  Json flags{{"in", a.in}, {"tol", a.tol}, {"grid", a.grid}};
  Json results{{"residual", sol.residual_norm},
               {"free_initial_dimension", sol.free_initial_dimension},
               {"canonicalized", canonicalized}};
  if (!verify_json.is_null()) results["canonicalization_verify"] = verify_json;
  emit(make_report("solve", file_digest(a.in), flags, results, ms_since(t0), pass),
       json_path);
  return pass ? kExitOk : kExitVerification;
}

struct VerifyArgs {
  std::string pair;
  std::string transform;
  std::string target;
  double tol = defaults::check_tol;
  int grid = defaults::verify_grid;
};

int cmd_verify(const VerifyArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const DaePair p = dae_pair_from_json(parse_json_file(a.pair));
  const EquivalenceTransform T = transform_from_json(parse_json_file(a.transform));
  const DaePair pt = dae_pair_from_json(parse_json_file(a.target));
  const VerifyReport rep = verify(T, p, pt, a.grid, a.tol);
  Json flags{{"pair", a.pair}, {"transform", a.transform}, {"target", a.target},
             {"tol", a.tol}, {"grid", a.grid}};
  const std::string digest =
      fnv1a64_hex(read_file(a.pair) + read_file(a.transform) + read_file(a.target));
  emit(make_report("verify", digest, flags, Json{{"verify", to_json(rep)}},
                   ms_since(t0), rep.pass),
       json_path);
  return rep.pass ? kExitOk : kExitVerification;
}

struct SpyArgs {
  std::string in;
  int powers = 1;
  std::string format = "ascii";
  std::string out;
  double threshold = defaults::check_tol;
};

int cmd_spy(const SpyArgs& a, const std::string& json_path) {
  const auto t0 = Clock::now();
  const MatrixFunction M = matrix_function_from_json(parse_json_file(a.in));
  if (!M.is_square()) throw DimensionError("spy: square matrix input required");
  const auto panels = spy_powers(M, a.powers, a.threshold);
  std::string rendered;
  if (a.format == "ascii") rendered = render_ascii(panels);
  else if (a.format == "svg") rendered = render_svg(panels);
  else throw ParseError("--format", "expected ascii or svg");
  if (!a.out.empty()) write_file(a.out, rendered);
  else std::cout << rendered;

  Json nnz = Json::array();
  for (const auto& p : panels) nnz.push_back(pattern_count(p));
  Json flags{{"in", a.in}, {"powers", a.powers}, {"format", a.format},
             {"threshold", a.threshold}, {"out", a.out}};
  emit(make_report("spy", file_digest(a.in), flags, Json{{"nnz", nnz}},
                   ms_since(t0), true),
       json_path);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Canonical-form toolkit for linear time-varying DAEs"};
  app.require_subcommand(1);
  std::string json_path;
  app.add_option("--json", json_path, "write the machine-readable report here");
  double global_tol = 0.0;
  int global_grid = 0;
  std::uint64_t global_seed = 0;
  auto* gtol = app.add_option("--tol", global_tol, "default tolerance for all commands");
  auto* ggrid = app.add_option("--grid", global_grid, "default grid size for all commands");
  auto* gseed = app.add_option("--seed", global_seed, "default seed for generate");

  GenerateArgs gen;
  auto* sgen = app.add_subcommand("generate", "generate a corpus of SUT instances");
  sgen->add_option("--mu", gen.mu, "number of blocks (checked against --ells)");
  sgen->add_option("--ells", gen.ells, "block sizes l_1,..,l_mu")->delimiter(',');
  sgen->add_option("--variant", gen.variant, "col or row");
  sgen->add_option("--from-characteristics", gen.from_characteristics,
                   "m=..,r=..,thetas=..,..");
  sgen->add_option("--seed", gen.seed, "base seed");
  sgen->add_option("--count", gen.count, "number of instances");
  sgen->add_option("--entry-degree", gen.entry_degree, "polynomial degree of entries");
  sgen->add_option("--conditioning", gen.conditioning, "R-block conditioning bound");
  sgen->add_option("--interval", gen.interval, "interval a b")->expected(2);
  sgen->add_option("--out", gen.out, "output directory");

  CanonicalizeArgs canon;
  auto* scanon = app.add_subcommand("canonicalize", "reduce an instance to its elementary form");
  scanon->add_option("--in", canon.in, "instance file")->required();
  scanon->add_option("--variant", canon.variant, "col or row (default: instance)");
  scanon->add_option("--tol", canon.tol, "verification tolerance");
  scanon->add_option("--grid", canon.grid, "verification grid size");
  scanon->add_option("--out-transform", canon.out_transform, "write the transform here");
  scanon->add_option("--out-trace", canon.out_trace, "write the per-step trace here");

  MatrixInArgs chars;
  auto* schars = app.add_subcommand("characteristics", "canonical characteristics of a constant nilpotent matrix");
  schars->add_option("--in", chars.in, "matrix-function file (constant)")->required();
  schars->add_option("--r", chars.r, "rank of E (default d + rank N)");
  schars->add_option("--d", chars.d, "dynamic dimension (default 0)");

  MatrixInArgs jord;
  auto* sjord = app.add_subcommand("jordan", "Jordan block multiset and permutation");
  sjord->add_option("--in", jord.in, "matrix-function file (constant)")->required();
  sjord->add_option("--r", jord.r, "rank of E (default d + rank N)");
  sjord->add_option("--d", jord.d, "dynamic dimension (default 0)");

  SolveArgs solve;
  auto* ssolve = app.add_subcommand("solve", "solve a problem file");
  ssolve->add_option("--in", solve.in, "problem file")->required();
  ssolve->add_option("--tol", solve.tol, "solver tolerance");
  ssolve->add_option("--grid", solve.grid, "residual grid");
  ssolve->add_option("--out-x", solve.out_x, "write the solution interpolant here");

  VerifyArgs ver;
  auto* sver = app.add_subcommand("verify", "verify an equivalence transform");
  sver->add_option("--pair", ver.pair, "source pair file")->required();
  sver->add_option("--transform", ver.transform, "transform file")->required();
  sver->add_option("--target", ver.target, "target pair file")->required();
  sver->add_option("--tol", ver.tol, "tolerance");
  sver->add_option("--grid", ver.grid, "grid size");

  SpyArgs spy;
  auto* sspy = app.add_subcommand("spy", "rank-pattern panels of matrix powers");
  sspy->add_option("--in", spy.in, "matrix-function file")->required();
  sspy->add_option("--powers", spy.powers, "highest power to draw");
  sspy->add_option("--format", spy.format, "ascii or svg");
  sspy->add_option("--out", spy.out, "output file (default stdout)");
  sspy->add_option("--threshold", spy.threshold, "nonzero threshold");

  std::vector<std::string> full;
  full.emplace_back("sscf");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(full.size());
  for (auto& s : full) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  // Global flags act as defaults where the subcommand did not set its own.
  if (gtol->count() > 0) {
    if (scanon->count("--tol") == 0) canon.tol = global_tol;
    if (ssolve->count("--tol") == 0) solve.tol = global_tol;
    if (sver->count("--tol") == 0) ver.tol = global_tol;
  }
  if (ggrid->count() > 0) {
    if (scanon->count("--grid") == 0) canon.grid = global_grid;
    if (ssolve->count("--grid") == 0) solve.grid = global_grid;
    if (sver->count("--grid") == 0) ver.grid = global_grid;
  }
  if (gseed->count() > 0 && sgen->count("--seed") == 0) gen.seed = global_seed;

  try {
    if (app.got_subcommand(sgen)) return cmd_generate(gen, json_path);
    if (app.got_subcommand(scanon)) return cmd_canonicalize(canon, json_path);
    if (app.got_subcommand(schars)) return cmd_characteristics(chars, json_path);
    if (app.got_subcommand(sjord)) return cmd_jordan(jord, json_path);
    if (app.got_subcommand(ssolve)) return cmd_solve(solve, json_path);
    if (app.got_subcommand(sver)) return cmd_verify(ver, json_path);
    if (app.got_subcommand(sspy)) return cmd_spy(spy, json_path);
  } catch (const PredicateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const NearSingularError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const RankChangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const AlignmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const SolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace sscf::cli
