#pragma once

#include "slice/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace slice {

enum class TypeErrorKind {
  AffineViolation,
  ReadOnlyMisuse,
  UnboundVariable,
  ArityMismatch,
  OperatorSignatureMismatch,
};

std::string to_string(TypeErrorKind k);

class TypeError : public std::runtime_error {
 public:
  TypeError(TypeErrorKind kind, std::string message, std::string variable = {},
            std::vector<SourceLoc> sites = {});
  TypeErrorKind kind;
  std::string variable;
  std::vector<SourceLoc> sites;  // both use sites for AffineViolation
};

// Type of a closed expression (Gamma = Delta = empty). Throws TypeError.
SliceType typecheck(const Expr& e);

struct Violation {
  std::string kind;  // "type error", "not disjoint", ...
  std::string message;
};

// Well-formedness of a verification entry point. `agents` > 0 additionally
// demands the type Piece^agents. An empty result means well-formed.
std::vector<Violation> check_wellformed(const Expr& e, int agents = 0);

// Piece^n (a bare Piece when n = 1).
SliceType allocation_type(int agents);

}  // namespace slice
