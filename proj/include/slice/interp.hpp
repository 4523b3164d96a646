#pragma once

#include "slice/core.hpp"
#include "slice/valuation.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace slice {

class Stuck : public std::runtime_error {
 public:
  enum class Kind { DivideOutOfRange, MarkInfeasible, IrrationalMark, ReplayInvalid, AssertFailed };
  Stuck(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
  Kind kind;
};

std::string to_string(Stuck::Kind k);

using MarkTable = std::map<MarkId, Rational>;

struct EvalTrace {
  std::vector<Rational> points;  // sorted, deduplicated
  MarkTable mark_answers;
  std::vector<bool> decisions;   // if-guards in evaluation order
};

struct RunResult {
  Value value;
  EvalTrace trace;
};

struct EvalOptions {
  // Marks found here answer with the stored point instead of the leftmost
  // one; the answer must satisfy V_a[l, r] = target exactly.
  const MarkTable* replay = nullptr;
};

// Closed, well-typed expression. Throws Stuck.
RunResult evaluate(const Expr& e, const ValuationSet& vs, const EvalOptions& opt = {});

// Numeric value of a symbolic valuation sum.
Rational vltn_number(const VltnVal& v, const ValuationSet& vs);

struct EnvyCheck {
  bool envy_free = true;
  // First violating pair in (envier, envied) lexicographic order.
  AgentId envier = 0, envied = 0;
  Rational own, other;
};

// `allocation` is a tuple of pieces, or a single piece for one agent.
EnvyCheck check_envy_free(const Value& allocation, const ValuationSet& vs);

// Pieces of an allocation as a vector indexed by agent - 1.
std::vector<PieceVal> allocation_pieces(const Value& allocation);

}  // namespace slice
