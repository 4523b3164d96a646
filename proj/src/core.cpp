#include "slice/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace slice {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

Value point(Rational r) { return PointVal{std::move(r)}; }
Value interval(Rational lo, Rational hi) { return Interval{std::move(lo), std::move(hi)}; }
Value tuple(std::vector<Value> elems) { return TupleVal{std::move(elems)}; }

Value read(const Value& v) {
  if (v.is<Interval>()) return ReadOnlyVal{v.as<Interval>()};
  if (v.is<PieceVal>()) return ReadOnlyVal{v.as<PieceVal>()};
  if (v.is<TupleVal>()) {
    TupleVal t;
    for (const auto& c : v.as<TupleVal>().elems) t.elems.push_back(read(c));
    return t;
  }
  return v;
}

Value unread(const Value& v) {
  if (v.is<ReadOnlyVal>())
    return std::visit([](const auto& r) { return Value(r); }, v.as<ReadOnlyVal>().inner);
  if (v.is<TupleVal>()) {
    TupleVal t;
    for (const auto& c : v.as<TupleVal>().elems) t.elems.push_back(unread(c));
    return t;
  }
  return v;
}

bool SliceType::affine() const {
  return kind == Kind::Intvl || kind == Kind::Piece || kind == Kind::Product;
}

SliceType read_type(const SliceType& t) {
  switch (t.kind) {
    case SliceType::Kind::Intvl: return SliceType::base(SliceType::Kind::RdIntvl);
    case SliceType::Kind::Piece: return SliceType::base(SliceType::Kind::RdPiece);
    case SliceType::Kind::Product: {
      std::vector<SliceType> comps;
      for (const auto& c : t.components) comps.push_back(read_type(c));
      return SliceType::product(std::move(comps));
    }
    default: return t;
  }
}

std::string to_string(const SliceType& t) {
  using K = SliceType::Kind;
  switch (t.kind) {
    case K::Bool: return "Bool";
    case K::Point: return "Point";
    case K::Vltn: return "Vltn";
    case K::RdIntvl: return "rd Intvl";
    case K::RdPiece: return "rd Piece";
    case K::Intvl: return "Intvl";
    case K::Piece: return "Piece";
    case K::Product: {
      std::string s = "(";
      for (std::size_t i = 0; i < t.components.size(); ++i) {
        if (i) s += " * ";
        s += to_string(t.components[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

bool product_well_ordered(const std::vector<SliceType>& comps) {
  bool seen_affine = false;
  for (const auto& c : comps) {
    if (c.affine()) seen_affine = true;
    else if (seen_affine) return false;
  }
  return true;
}

namespace {

bool valid_interval(const Interval& i) { return i.lo <= i.hi; }

bool valid_region(const Region& r) {
  if (auto* i = std::get_if<Interval>(&r)) return valid_interval(*i);
  for (const auto& i : std::get<PieceVal>(r).parts)
    if (!valid_interval(i)) return false;
  return true;
}

}  // namespace

std::optional<SliceType> type_of_value(const Value& v) {
  using K = SliceType::Kind;
  return std::visit(
      overloaded{
          [](bool) -> std::optional<SliceType> { return SliceType::base(K::Bool); },
          [](const PointVal&) -> std::optional<SliceType> { return SliceType::base(K::Point); },
          [](const Interval& i) -> std::optional<SliceType> {
            if (!valid_interval(i)) return std::nullopt;
            return SliceType::base(K::Intvl);
          },
          [](const PieceVal& p) -> std::optional<SliceType> {
            if (!valid_region(p)) return std::nullopt;
            return SliceType::base(K::Piece);
          },
          [](const VltnVal& x) -> std::optional<SliceType> {
            for (const auto& t : x.terms)
              if (!valid_region(t.target)) return std::nullopt;
            return SliceType::base(K::Vltn);
          },
          [](const ReadOnlyVal& r) -> std::optional<SliceType> {
            if (!valid_region(r.inner)) return std::nullopt;
            return SliceType::base(std::holds_alternative<Interval>(r.inner) ? K::RdIntvl
                                                                             : K::RdPiece);
          },
          [](const TupleVal& t) -> std::optional<SliceType> {
            std::vector<SliceType> comps;
            for (const auto& c : t.elems) {
              auto ct = type_of_value(c);
              if (!ct) return std::nullopt;
              comps.push_back(*ct);
            }
            if (!product_well_ordered(comps)) return std::nullopt;
            return SliceType::product(std::move(comps));
          },
      },
      v.v);
}

// ---------------------------------------------------------------- expressions

ExprPtr make_expr(Expr::Node node, SourceLoc loc) {
  return std::make_shared<const Expr>(Expr{std::move(node), loc});
}

namespace mk {
ExprPtr lit(Value v) { return make_expr(ex::Lit{std::move(v)}); }
ExprPtr var(std::string name) { return make_expr(ex::Var{std::move(name), false}); }
ExprPtr rdvar(std::string name) { return make_expr(ex::Var{std::move(name), true}); }
ExprPtr tuple(std::vector<ExprPtr> elems) { return make_expr(ex::Tuple{std::move(elems)}); }
ExprPtr split(std::vector<std::string> binders, ExprPtr scrutinee, ExprPtr body) {
  return make_expr(ex::Split{std::move(binders), std::move(scrutinee), std::move(body)});
}
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e) {
  return make_expr(ex::If{std::move(c), std::move(t), std::move(e)});
}
ExprPtr assert_(ExprPtr c, ExprPtr body) {
  return make_expr(ex::Assert{std::move(c), std::move(body)});
}
ExprPtr op(OpKind k, std::vector<ExprPtr> args) {
  return make_expr(ex::Op{k, Rational(0), std::move(args)});
}
ExprPtr scale(Rational r, ExprPtr arg) {
  return make_expr(ex::Op{OpKind::Scale, std::move(r), {std::move(arg)}});
}
ExprPtr cake() { return make_expr(ex::Cake{}); }
ExprPtr divide(ExprPtr i, ExprPtr p) { return make_expr(ex::Divide{std::move(i), std::move(p)}); }
ExprPtr piece(std::vector<ExprPtr> parts) { return make_expr(ex::Piece{std::move(parts)}); }
ExprPtr mark(AgentId a, ExprPtr i, ExprPtr target, MarkId id) {
  return make_expr(ex::Mark{a, std::move(i), std::move(target), id});
}
ExprPtr eval(AgentId a, ExprPtr subject) { return make_expr(ex::Eval{a, std::move(subject)}); }
}  // namespace mk

namespace {

bool same_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_expr(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

bool same_expr(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const ex::Lit& x) { return x.value == b.as<ex::Lit>().value; },
          [&](const ex::Var& x) {
            auto& y = b.as<ex::Var>();
            return x.name == y.name && x.read_only == y.read_only;
          },
          [&](const ex::Tuple& x) { return same_list(x.elems, b.as<ex::Tuple>().elems); },
          [&](const ex::Split& x) {
            auto& y = b.as<ex::Split>();
            return x.binders == y.binders && same_expr(x.scrutinee, y.scrutinee) &&
                   same_expr(x.body, y.body);
          },
          [&](const ex::If& x) {
            auto& y = b.as<ex::If>();
            return same_expr(x.cond, y.cond) && same_expr(x.then_e, y.then_e) &&
                   same_expr(x.else_e, y.else_e);
          },
          [&](const ex::Assert& x) {
            auto& y = b.as<ex::Assert>();
            return same_expr(x.cond, y.cond) && same_expr(x.body, y.body);
          },
          [&](const ex::Op& x) {
            auto& y = b.as<ex::Op>();
            return x.op == y.op && x.scalar == y.scalar && same_list(x.args, y.args);
          },
          [&](const ex::Cake&) { return true; },
          [&](const ex::Divide& x) {
            auto& y = b.as<ex::Divide>();
            return same_expr(x.interval, y.interval) && same_expr(x.at, y.at);
          },
          [&](const ex::Piece& x) { return same_list(x.parts, b.as<ex::Piece>().parts); },
          [&](const ex::Mark& x) {
            auto& y = b.as<ex::Mark>();
            return x.agent == y.agent && x.id == y.id && same_expr(x.interval, y.interval) &&
                   same_expr(x.target, y.target);
          },
          [&](const ex::Eval& x) {
            auto& y = b.as<ex::Eval>();
            return x.agent == y.agent && same_expr(x.subject, y.subject);
          },
      },
      a.node);
}

std::vector<ExprPtr> children(const Expr& e) {
  return std::visit(
      overloaded{
          [](const ex::Lit&) { return std::vector<ExprPtr>{}; },
          [](const ex::Var&) { return std::vector<ExprPtr>{}; },
          [](const ex::Tuple& x) { return x.elems; },
          [](const ex::Split& x) { return std::vector<ExprPtr>{x.scrutinee, x.body}; },
          [](const ex::If& x) { return std::vector<ExprPtr>{x.cond, x.then_e, x.else_e}; },
          [](const ex::Assert& x) { return std::vector<ExprPtr>{x.cond, x.body}; },
          [](const ex::Op& x) { return x.args; },
          [](const ex::Cake&) { return std::vector<ExprPtr>{}; },
          [](const ex::Divide& x) { return std::vector<ExprPtr>{x.interval, x.at}; },
          [](const ex::Piece& x) { return x.parts; },
          [](const ex::Mark& x) { return std::vector<ExprPtr>{x.interval, x.target}; },
          [](const ex::Eval& x) { return std::vector<ExprPtr>{x.subject}; },
      },
      e.node);
}

std::size_t count_nodes(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : children(e)) n += count_nodes(*c);
  return n;
}

// ---------------------------------------------------------------- interval lists

IntervalList interval_list(const Value& v) {
  IntervalList out;
  if (v.is<Interval>()) out.push_back(v.as<Interval>());
  else if (v.is<PieceVal>()) out = v.as<PieceVal>().parts;
  else if (v.is<TupleVal>())
    for (const auto& c : v.as<TupleVal>().elems) {
      auto sub = interval_list(c);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  return out;
}

IntervalList interval_list(const Expr& e) {
  if (e.is<ex::Cake>()) return {Interval{Rational(0), Rational(1)}};
  if (e.is<ex::Lit>()) return interval_list(e.as<ex::Lit>().value);
  IntervalList out;
  for (const auto& c : children(e)) {
    auto sub = interval_list(*c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

bool intervals_disjoint(const Interval& a, const Interval& b) {
  // Overlap has positive length iff max(lo) < min(hi).
  return !(std::max(a.lo, b.lo) < std::min(a.hi, b.hi));
}

bool is_disjoint(const IntervalList& l) {
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = i + 1; j < l.size(); ++j)
      if (!intervals_disjoint(l[i], l[j])) return false;
  return true;
}

namespace {

void collect_region(const Region& r, std::vector<Rational>& out) {
  if (auto* i = std::get_if<Interval>(&r)) {
    out.push_back(i->lo);
    out.push_back(i->hi);
    return;
  }
  for (const auto& i : std::get<PieceVal>(r).parts) {
    out.push_back(i.lo);
    out.push_back(i.hi);
  }
}

}  // namespace

void collect_points(const Value& v, std::vector<Rational>& out) {
  std::visit(overloaded{
                 [](bool) {},
                 [&](const PointVal& p) { out.push_back(p.at); },
                 [&](const Interval& i) { collect_region(i, out); },
                 [&](const PieceVal& p) { collect_region(p, out); },
                 [&](const VltnVal& x) {
                   for (const auto& t : x.terms) collect_region(t.target, out);
                 },
                 [&](const TupleVal& t) {
                   for (const auto& c : t.elems) collect_points(c, out);
                 },
                 [&](const ReadOnlyVal& r) { collect_region(r.inner, out); },
             },
             v.v);
}

}  // namespace slice
