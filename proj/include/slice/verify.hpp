#pragma once

#include "slice/interp.hpp"
#include "slice/logic.hpp"
#include "slice/smt.hpp"
#include "slice/syntax.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slice {

// Piecewise-uniform valuation set read off a model of psi(S):
// support_a = U [z_{a,w}, w] over w in S \ {0}, zero-length parts dropped,
// constant = reciprocal support length.
ValuationSet extract_valuation_set(const std::map<std::string, Rational>& model,
                                   const logic::Replacement& s, int agents);
logic::Assignment assignment_from_model(const std::map<std::string, Rational>& model,
                                        const logic::Replacement& s, int agents);

struct Counterexample {
  std::uint64_t path_index = 0;
  logic::Replacement replacement;
  ValuationSet valuations;
  MarkTable mark_table;
  Value allocation;
  EnvyCheck witness;
};

nlohmann::json to_json(const Counterexample& c);
Counterexample counterexample_from_json(const nlohmann::json& j);

struct ReplayResult {
  bool ok = false;  // ran to completion and envy was found
  std::optional<RunResult> run;
  EnvyCheck witness;
  std::string error;
};

// Runs the protocol under the counterexample's valuations and mark table.
ReplayResult replay(const Expr& protocol, const ValuationSet& vs, const MarkTable& marks);

enum class Verdict { Valid, Invalid, Unknown, SolverError, IllFormed };
std::string to_string(Verdict v);

struct VerifyOptions {
  std::vector<std::string> solver{"z3", "-in"};
  double timeout_s = 60;
  int jobs = 1;
  bool exhaustive = false;
  bool prune = true;
  std::string dump_dir;  // empty: no dump
  // Called after each finished path with (paths done, total); may be empty.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

struct VerifyReport {
  Verdict verdict = Verdict::Valid;
  std::uint64_t paths = 0;
  std::uint64_t paths_checked = 0;
  std::uint64_t queries = 0;        // (path, S) items sent to the solver
  std::uint64_t nonlinear_vcs = 0;  // must stay 0
  std::uint64_t solver_warnings = 0;
  std::vector<std::string> diagnostics;
  std::vector<std::string> violations;  // IllFormed only
  std::string reason;                   // Unknown or SolverError
  std::optional<std::uint64_t> failing_path;
  std::optional<logic::Replacement> failing_replacement;
  std::optional<Counterexample> counterexample;
  double compile_seconds = 0, solve_seconds = 0;
};

VerifyReport verify_protocol(const SourceFile& src, const VerifyOptions& opt = {});

}  // namespace slice
