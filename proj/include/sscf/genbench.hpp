#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sscf/dae.hpp"
#include "sscf/serialize.hpp"

namespace sscf {

/// Counter-based splittable PRNG (SplitMix64); instance streams derive from
/// (seed, index) so generation is deterministic and order-independent.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);
  std::uint64_t next();
  double uniform();                      // [0, 1)
  double uniform(double a, double b);    // [a, b)
  int uniform_int(int lo, int hi);       // inclusive bounds

 private:
  std::uint64_t s_;
};

struct GenSpec {
  BlockSignature sig;
  SutVariant variant = SutVariant::columns;
  Interval interval{-1.0, 1.0};
  int entry_degree = 1;
  std::uint64_t seed = 0;
  double conditioning = 4.0;  // bound on R-block condition numbers
};

/// Deterministic full-rank SUT instance: secondary blocks are smooth
/// rotations times a positive diagonal (entries in [1, conditioning] with a
/// bounded polynomial wiggle), fill blocks random smooth polynomials; the
/// variant predicate holds by construction.
SutMatrixFunction random_sut(const GenSpec& spec);

/// Random smooth d x d dynamic block.
MatrixFunction random_omega(int d, Interval iv, int degree, std::uint64_t seed);

struct ScrambleResult {
  DaePair scrambled;
  EquivalenceTransform t_true;
  double verify_residual = 0.0;
};

/// Equivalence-scrambles a pair with K, L built from smooth rotations and
/// I + (small strictly triangular); magnitude 0 gives the identity.
ScrambleResult scramble(const ScfPair& p, std::uint64_t seed, int degree,
                        double magnitude = 1.0);

struct CorpusInstance {
  std::string id;
  GenSpec spec;
  SutMatrixFunction sut;
  std::optional<DaePair> scrambled;
  std::optional<EquivalenceTransform> t_true;
  std::optional<double> scramble_residual;
};

Json to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const Json& j);
Json to_json(const CorpusInstance& inst);
CorpusInstance corpus_instance_from_json(const Json& j);

/// One JSON file per instance plus manifest.json with specs, seeds and
/// checksums. Import verifies the checksums.
void export_corpus(const std::string& dir, const std::vector<CorpusInstance>& instances);
std::vector<CorpusInstance> import_corpus(const std::string& dir);

}  // namespace sscf
