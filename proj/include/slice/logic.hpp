#pragma once

#include "slice/core.hpp"
#include "slice/valuation.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace slice::logic {

class LogicError : public std::runtime_error {
 public:
  enum class Kind { PointAtomNotInS, IllSorted, DegenerateModel };
  LogicError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
  Kind kind;
};

// Points that may sit in a replacement: 0, 1, or the y-variable of a mark.
using PointRef = int;
inline constexpr PointRef kZero = -2;
inline constexpr PointRef kOne = -3;

// ---------------------------------------------------------------- terms

enum class TermKind {
  Num,       // rational constant; `flag` set when it is a point r#Pt
  Bool,      // `flag` holds the value
  YVar,      // a = mark id
  ZVar,      // a = agent, b = mark id or kOne
  Interval,  // [args0, args1]
  Piece,     // union of interval args
  Tuple,
  Proj,      // pi_a(args0), a is 1-based
  Left,
  Right,
  Val,       // val_a(args0)
  Sum,       // args0 + ... ; empty sum is 0
  Scale,     // num * args0
  And,
  Or,
  Not,
  Geq,
  Eq,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  Rational num;
  bool flag = false;
  int a = 0, b = 0;
  std::vector<TermPtr> args;
};

namespace t {
TermPtr num(Rational r);
TermPtr pt(Rational r);
TermPtr boolean(bool v);
TermPtr y(MarkId id);
TermPtr z(AgentId a, PointRef y);
TermPtr interval(TermPtr lo, TermPtr hi);
TermPtr piece(std::vector<TermPtr> parts);
TermPtr tuple(std::vector<TermPtr> elems);
TermPtr proj(int k, TermPtr t);
TermPtr left(TermPtr t);
TermPtr right(TermPtr t);
TermPtr val(AgentId a, TermPtr t);
TermPtr sum(std::vector<TermPtr> ts);
TermPtr scale(Rational r, TermPtr t);
TermPtr op(TermKind k, std::vector<TermPtr> args);
TermPtr point_ref(PointRef p);
}  // namespace t

// ---------------------------------------------------------------- formulas

enum class FormulaKind { True, False, Geq, Eq, IsTrue, Not, And, Or, Implies };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind;
  TermPtr lhs, rhs;  // Geq, Eq; IsTrue uses lhs
  std::vector<FormulaPtr> args;
};

namespace f {
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr geq(TermPtr l, TermPtr r);
FormulaPtr eq(TermPtr l, TermPtr r);
FormulaPtr is_true(TermPtr t);
FormulaPtr not_(FormulaPtr x);
FormulaPtr and_(std::vector<FormulaPtr> xs);
FormulaPtr or_(std::vector<FormulaPtr> xs);
FormulaPtr implies(FormulaPtr l, FormulaPtr r);
}  // namespace f

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);

// ---------------------------------------------------------------- translation

// Logical embedding of a value; read-only wrappers are dropped.
TermPtr embed(const Value& v);

struct Translation {
  TermPtr rho;
  FormulaPtr c;
};

// rho(b) and c(b) of a closed path (no If). Binders are substituted by
// projections of the scrutinee's term.
Translation translate(const Expr& b);
inline TermPtr rho(const Expr& b) { return translate(b).rho; }
inline FormulaPtr cnstr(const Expr& b) { return translate(b).c; }

// E(x): val_a(pi_a x) >= val_a(pi_a' x) for all agents a, a'.
FormulaPtr envy(const TermPtr& alloc, int agents);

// R: projections and endpoint selectors over literals are reduced, boolean
// terms under `= true` are lifted to formulas, and trivially true or false
// conjuncts and disjuncts are folded.
TermPtr simplify(const TermPtr& t);
FormulaPtr simplify(const FormulaPtr& f);

std::set<MarkId> yvars(const TermPtr& t);
std::set<MarkId> yvars(const FormulaPtr& f);

// ---------------------------------------------------------------- replacements

struct Replacement {
  std::vector<PointRef> order;  // kZero first, kOne last
  bool operator==(const Replacement&) const = default;
};

std::string to_string(const Replacement& s);

// Every total order of `ys` between 0 and 1 (|ys|! of them), in
// lexicographic order of the y sequence.
std::vector<Replacement> enumerate_replacements(const std::vector<MarkId>& ys);

// The orders consistent with the point comparisons among the top-level
// conjuncts of a simplified constraint. Points forced equal by those
// comparisons may appear in any order. A constraint that simplified to false
// admits no run at all and yields no orders.
std::vector<Replacement> enumerate_replacements(const std::vector<MarkId>& ys,
                                                const FormulaPtr& simplified_c);

// S(f) for a simplified f. Throws LogicError(PointAtomNotInS).
FormulaPtr apply_replacement(const Replacement& s, const FormulaPtr& f);
TermPtr apply_replacement(const Replacement& s, const TermPtr& t);

FormulaPtr psi(const Replacement& s, int agents);

// The pieces of S(R(c(b) /\ psi(S) => E(rho(b)))) kept apart, so the solver
// can assert the negation directly.
struct VC {
  FormulaPtr hyp;   // S(R(c(b))) /\ psi(S)
  FormulaPtr goal;  // S(R(E(rho(b))))
  FormulaPtr implication() const;
};

// Per-path data shared by all replacements of that path.
struct PathFormulas {
  TermPtr rho;          // simplified
  FormulaPtr c;         // simplified
  FormulaPtr e;         // simplified envy formula
  std::vector<MarkId> ys;
};

PathFormulas path_formulas(const Expr& b, int agents);
VC build_vc(const PathFormulas& p, const Replacement& s, int agents);
FormulaPtr build_vc(const Expr& b, const Replacement& s, int agents);

// ---------------------------------------------------------------- linear form

std::string y_name(MarkId id);
std::string z_name(AgentId a, PointRef y);

struct LinExpr {
  std::map<std::string, Rational> coeffs;  // no zero entries
  Rational constant;
};

std::optional<LinExpr> linearize(const TermPtr& t);
// Every atom compares linear real expressions; no val, projection or
// interval term survives.
bool is_linear(const FormulaPtr& f);

// ---------------------------------------------------------------- semantics

struct Assignment {
  std::map<MarkId, Rational> y;
  std::map<std::pair<AgentId, PointRef>, Rational> z;
  Rational point(PointRef p) const;
};

bool holds(const FormulaPtr& f, const ValuationSet& vs, const Assignment& alpha);
// Numeric value of a Real, Point or Vltn sorted term.
Rational number(const TermPtr& t, const ValuationSet& vs, const Assignment& alpha);
// Interval, piece or tuple sorted term as a program value.
Value value_of(const TermPtr& t, const ValuationSet& vs, const Assignment& alpha);

// Points considered by f under alpha: every point subterm and interval
// endpoint, evaluated.
std::vector<Rational> formula_points(const FormulaPtr& f, const Assignment& alpha);

}  // namespace slice::logic
