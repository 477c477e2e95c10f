#pragma once

#include <stdexcept>
#include <string>

namespace sscf {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& msg, double worst_t, double min_sigma)
      : Error(msg), worst_t(worst_t), min_sigma(min_sigma) {}
  double worst_t;
  double min_sigma;
};

class RankChangeError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class SignatureError : public Error {
 public:
  using Error::Error;
};

class CharacteristicsError : public Error {
 public:
  using Error::Error;
};

class PredicateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& detail)
      : Error(where + ": " + detail), where(where) {}
  std::string where;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class SolveError : public Error {
 public:
  SolveError(const std::string& msg, double residual)
      : Error(msg), residual(residual) {}
  double residual;
};

}  // namespace sscf
