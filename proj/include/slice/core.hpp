#pragma once

#include "slice/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace slice {

using AgentId = int;  // 1-based
using MarkId = int;   // -1 while unassigned
inline constexpr MarkId kNoMark = -1;

// ---------------------------------------------------------------- values

struct Interval {
  Rational lo, hi;
  bool operator==(const Interval&) const = default;
};

struct PieceVal {
  std::vector<Interval> parts;
  bool operator==(const PieceVal&) const = default;
};

// Target of an eval query: an interval or a piece.
using Region = std::variant<Interval, PieceVal>;

struct VltnTerm {
  Rational coeff;
  AgentId agent;
  Region target;
  bool operator==(const VltnTerm&) const = default;
};

// Symbolic sum  coeff_1 * V_{a_1}(P_1) + ... ; the empty sum is 0.
struct VltnVal {
  std::vector<VltnTerm> terms;
  bool operator==(const VltnVal&) const = default;
};

struct PointVal {
  Rational at;
  bool operator==(const PointVal&) const = default;
};

struct ReadOnlyVal {
  Region inner;
  bool operator==(const ReadOnlyVal&) const = default;
};

struct Value;

struct TupleVal {
  std::vector<Value> elems;
  bool operator==(const TupleVal&) const;
};

struct Value {
  std::variant<bool, PointVal, Interval, PieceVal, VltnVal, TupleVal, ReadOnlyVal> v;

  Value() : v(false) {}
  Value(bool b) : v(b) {}
  Value(PointVal p) : v(std::move(p)) {}
  Value(Interval i) : v(std::move(i)) {}
  Value(PieceVal p) : v(std::move(p)) {}
  Value(VltnVal x) : v(std::move(x)) {}
  Value(TupleVal t) : v(std::move(t)) {}
  Value(ReadOnlyVal r) : v(std::move(r)) {}

  template <class T> bool is() const { return std::holds_alternative<T>(v); }
  template <class T> const T& as() const { return std::get<T>(v); }
  bool operator==(const Value&) const = default;
};

inline bool TupleVal::operator==(const TupleVal& o) const { return elems == o.elems; }

Value point(Rational r);
Value interval(Rational lo, Rational hi);
Value tuple(std::vector<Value> elems);

Value read(const Value& v);
Value unread(const Value& v);

// ---------------------------------------------------------------- types

struct SliceType {
  enum class Kind { Bool, Point, Vltn, RdIntvl, RdPiece, Intvl, Piece, Product };
  Kind kind = Kind::Bool;
  std::vector<SliceType> components;  // Product only

  static SliceType base(Kind k) { return SliceType{k, {}}; }
  static SliceType product(std::vector<SliceType> comps) {
    return SliceType{Kind::Product, std::move(comps)};
  }
  bool affine() const;
  bool operator==(const SliceType&) const = default;
};

// rd(tau): Intvl -> RdIntvl, Piece -> RdPiece, products componentwise.
SliceType read_type(const SliceType& t);
std::string to_string(const SliceType& t);

// True when every non-affine component precedes every affine one.
bool product_well_ordered(const std::vector<SliceType>& comps);

// Unique type of a closed value; nullopt for values outside the grammar
// (reversed intervals, badly ordered tuples).
std::optional<SliceType> type_of_value(const Value& v);

// ---------------------------------------------------------------- expressions

enum class OpKind { And, Or, Not, Geq, Eq, Add, Scale };

struct SourceLoc {
  int line = 0, col = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace ex {
struct Lit { Value value; };
// Affinity of a plain variable is a property of its binder, decided by the
// typechecker; `read_only` marks the @w occurrences.
struct Var { std::string name; bool read_only = false; };
struct Tuple { std::vector<ExprPtr> elems; };
struct Split { std::vector<std::string> binders; ExprPtr scrutinee, body; };
struct If { ExprPtr cond, then_e, else_e; };
struct Assert { ExprPtr cond, body; };
struct Op { OpKind op; Rational scalar; std::vector<ExprPtr> args; };
struct Cake {};
struct Divide { ExprPtr interval, at; };
struct Piece { std::vector<ExprPtr> parts; };
struct Mark { AgentId agent; ExprPtr interval, target; MarkId id = kNoMark; };
struct Eval { AgentId agent; ExprPtr subject; };
}  // namespace ex

struct Expr {
  using Node = std::variant<ex::Lit, ex::Var, ex::Tuple, ex::Split, ex::If, ex::Assert,
                            ex::Op, ex::Cake, ex::Divide, ex::Piece, ex::Mark, ex::Eval>;
  Node node;
  SourceLoc loc;

  template <class T> bool is() const { return std::holds_alternative<T>(node); }
  template <class T> const T& as() const { return std::get<T>(node); }
};

ExprPtr make_expr(Expr::Node node, SourceLoc loc = {});

namespace mk {
ExprPtr lit(Value v);
ExprPtr var(std::string name);
ExprPtr rdvar(std::string name);
ExprPtr tuple(std::vector<ExprPtr> elems);
ExprPtr split(std::vector<std::string> binders, ExprPtr scrutinee, ExprPtr body);
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr assert_(ExprPtr c, ExprPtr body);
ExprPtr op(OpKind k, std::vector<ExprPtr> args);
ExprPtr scale(Rational r, ExprPtr arg);
ExprPtr cake();
ExprPtr divide(ExprPtr i, ExprPtr p);
ExprPtr piece(std::vector<ExprPtr> parts);
ExprPtr mark(AgentId a, ExprPtr i, ExprPtr target, MarkId id = kNoMark);
ExprPtr eval(AgentId a, ExprPtr subject);
}  // namespace mk

// Structural equality, ignoring source locations.
bool same_expr(const Expr& a, const Expr& b);
inline bool same_expr(const ExprPtr& a, const ExprPtr& b) { return same_expr(*a, *b); }

// Direct children in evaluation (left-to-right) order.
std::vector<ExprPtr> children(const Expr& e);

std::size_t count_nodes(const Expr& e);

// ---------------------------------------------------------------- interval lists

using IntervalList = std::vector<Interval>;

IntervalList interval_list(const Value& v);
IntervalList interval_list(const Expr& e);

// Two intervals are disjoint when they share at most an endpoint.
bool intervals_disjoint(const Interval& a, const Interval& b);
bool is_disjoint(const IntervalList& l);
inline bool is_disjoint(const Value& v) { return is_disjoint(interval_list(v)); }
inline bool is_disjoint(const Expr& e) { return is_disjoint(interval_list(e)); }

// Every rational occurring as a point, interval or piece coordinate in v,
// including those under read-only wrappers and inside valuation values.
void collect_points(const Value& v, std::vector<Rational>& out);

}  // namespace slice
