#pragma once

#include "slice/logic.hpp"

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace slice::smt {

// One satisfiability query: the negation of a VC.
struct Query {
  std::vector<std::string> vars;  // declared Real constants, SMT names unquoted
  std::string body;               // declarations and assertions
};

// Declares every y and z variable of S (z for each agent and each point of
// S other than 0) and asserts hyp /\ not goal.
Query make_query(const logic::VC& vc, const logic::Replacement& s, int agents);

// A standalone script: logic and option header, the query, check-sat.
std::string emit_script(const Query& q);
inline std::string emit_smt(const logic::VC& vc, const logic::Replacement& s, int agents) {
  return emit_script(make_query(vc, s, agents));
}

std::string smt_rational(const Rational& r);
std::string smt_formula(const logic::FormulaPtr& f);
std::string quote(const std::string& name);

struct CheckResult {
  enum class Status { Sat, Unsat, Unknown, Error };
  Status status = Status::Error;
  std::map<std::string, Rational> model;  // sat only
  std::string reason;                     // unknown or error
  std::vector<std::string> diagnostics;   // unexpected solver output
};

// Parses a solver value: "3", "-2", "0.5", "(/ 1.0 3.0)", "(- 2.0)".
Rational parse_smt_value(const std::string& text);

// Interactive solver process (SMT-LIB2 over a pipe), reused across queries
// with push/pop. Not thread-safe; use one per worker.
class Solver {
 public:
  Solver(std::vector<std::string> command, std::chrono::milliseconds timeout);
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  CheckResult check(const Query& q);

 private:
  void start();
  void stop();
  void send(const std::string& text);
  enum class ReadStatus { Ok, Timeout, Closed };
  // Next complete response: an atom line or a balanced s-expression.
  ReadStatus read_response(std::string& out);

  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1, to_child_ = -1, from_child_ = -1;
  std::string buffer_;
};

// Runs one standalone script in a fresh process; reads the first check-sat
// answer (and a get-value answer when `vars` is nonempty).
CheckResult check_script(const std::vector<std::string>& command, const std::string& script,
                         const std::vector<std::string>& vars,
                         std::chrono::milliseconds timeout);

}  // namespace slice::smt
