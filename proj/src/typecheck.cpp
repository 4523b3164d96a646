#include "slice/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace slice {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

std::string to_string(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::AffineViolation: return "AffineViolation";
    case TypeErrorKind::ReadOnlyMisuse: return "ReadOnlyMisuse";
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::ArityMismatch: return "ArityMismatch";
    case TypeErrorKind::OperatorSignatureMismatch: return "OperatorSignatureMismatch";
  }
  return "?";
}

TypeError::TypeError(TypeErrorKind kind, std::string message, std::string variable,
                     std::vector<SourceLoc> sites)
    : std::runtime_error(to_string(kind) + ": " + message),
      kind(kind),
      variable(std::move(variable)),
      sites(std::move(sites)) {}

SliceType allocation_type(int agents) {
  if (agents == 1) return SliceType::base(SliceType::Kind::Piece);
  return SliceType::product(
      std::vector<SliceType>(agents, SliceType::base(SliceType::Kind::Piece)));
}

namespace {

using K = SliceType::Kind;

std::string where(const SourceLoc& l) {
  return std::to_string(l.line) + ":" + std::to_string(l.col);
}

struct Binding {
  std::string name;
  SliceType type;
  bool affine;
  int id;
};

// The affine bindings consumed by a subexpression, with their use sites.
using Usage = std::map<int, SourceLoc>;

struct Judgement {
  SliceType type;
  Usage used;
};

class Checker {
 public:
  SliceType run(const Expr& e) { return check(e).type; }

 private:
  Usage disjoint_union(const Usage& a, const Usage& b) {
    Usage out = a;
    for (const auto& [id, loc] : b) {
      auto [it, fresh] = out.emplace(id, loc);
      if (!fresh) {
        const auto& name = names_.at(id);
        throw TypeError(TypeErrorKind::AffineViolation,
                        "affine variable '" + name + "' used at " + where(it->second) +
                            " and at " + where(loc),
                        name, {it->second, loc});
      }
    }
    return out;
  }

  const Binding* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  static bool is(const SliceType& t, K k) { return t.kind == k; }

  [[noreturn]] static void signature(const std::string& what, const SourceLoc& l) {
    throw TypeError(TypeErrorKind::OperatorSignatureMismatch, what + " at " + where(l));
  }

  Judgement check(const Expr& e) {
    return std::visit(
        overloaded{
            [&](const ex::Lit& x) -> Judgement {
              auto t = type_of_value(x.value);
              if (!t) signature("ill-formed literal", e.loc);
              return {*t, {}};
            },
            [&](const ex::Var& x) -> Judgement {
              const Binding* b = lookup(x.name);
              if (!b || (x.read_only && !b->affine))
                throw TypeError(TypeErrorKind::UnboundVariable,
                                "unbound variable '" + std::string(x.read_only ? "@" : "") +
                                    x.name + "' at " + where(e.loc),
                                x.name, {e.loc});
              if (x.read_only) return {read_type(b->type), {}};
              if (!b->affine) return {b->type, {}};
              return {b->type, Usage{{b->id, e.loc}}};
            },
            [&](const ex::Tuple& x) -> Judgement {
              Judgement out{SliceType::product({}), {}};
              for (const auto& c : x.elems) {
                auto j = check(*c);
                out.type.components.push_back(j.type);
                out.used = disjoint_union(out.used, j.used);
              }
              if (!product_well_ordered(out.type.components))
                signature("tuple lists an affine component before a non-affine one", e.loc);
              return out;
            },
            [&](const ex::Split& x) -> Judgement {
              auto scrut = check(*x.scrutinee);
              std::vector<SliceType> comps =
                  is(scrut.type, K::Product) ? scrut.type.components
                                             : std::vector<SliceType>{scrut.type};
              if (comps.size() != x.binders.size())
                throw TypeError(TypeErrorKind::ArityMismatch,
                                "split binds " + std::to_string(x.binders.size()) +
                                    " names but the scrutinee has " +
                                    std::to_string(comps.size()) + " components at " +
                                    where(e.loc));
              if (!product_well_ordered(comps))
                signature("split scrutinee lists an affine component first", e.loc);
              std::size_t mark = scope_.size();
              std::set<int> fresh;
              for (std::size_t i = 0; i < comps.size(); ++i) {
                int id = next_id_++;
                names_[id] = x.binders[i];
                scope_.push_back({x.binders[i], comps[i], comps[i].affine(), id});
                fresh.insert(id);
              }
              auto body = check(*x.body);
              scope_.resize(mark);
              Usage outer;
              for (const auto& [id, loc] : body.used)
                if (!fresh.count(id)) outer.emplace(id, loc);
              return {body.type, disjoint_union(scrut.used, outer)};
            },
            [&](const ex::If& x) -> Judgement {
              auto c = check(*x.cond);
              if (!is(c.type, K::Bool)) signature("if-guard is not Bool", x.cond->loc);
              auto t = check(*x.then_e);
              auto f = check(*x.else_e);
              if (!(t.type == f.type))
                signature("branches have types " + to_string(t.type) + " and " +
                              to_string(f.type),
                          e.loc);
              // Both branches live in the same Delta.
              Usage branches = t.used;
              branches.insert(f.used.begin(), f.used.end());
              return {t.type, disjoint_union(c.used, branches)};
            },
            [&](const ex::Assert& x) -> Judgement {
              auto c = check(*x.cond);
              if (!is(c.type, K::Bool)) signature("assert guard is not Bool", x.cond->loc);
              auto b = check(*x.body);
              return {b.type, disjoint_union(c.used, b.used)};
            },
            [&](const ex::Op& x) -> Judgement { return op(x, e.loc); },
            [&](const ex::Cake&) -> Judgement { return {SliceType::base(K::Intvl), {}}; },
            [&](const ex::Divide& x) -> Judgement {
              auto i = check(*x.interval);
              auto p = check(*x.at);
              if (is(i.type, K::RdIntvl) || is(i.type, K::RdPiece))
                throw TypeError(TypeErrorKind::ReadOnlyMisuse,
                                "divide applied to a read-only interval at " + where(e.loc));
              if (!is(i.type, K::Intvl)) signature("divide expects an interval", e.loc);
              if (!is(p.type, K::Point)) signature("divide expects a point", e.loc);
              return {SliceType::product(
                          {SliceType::base(K::Intvl), SliceType::base(K::Intvl)}),
                      disjoint_union(i.used, p.used)};
            },
            [&](const ex::Piece& x) -> Judgement {
              Usage used;
              for (const auto& c : x.parts) {
                auto j = check(*c);
                if (is(j.type, K::RdIntvl) || is(j.type, K::RdPiece))
                  throw TypeError(TypeErrorKind::ReadOnlyMisuse,
                                  "piece applied to a read-only value at " + where(c->loc));
                if (!is(j.type, K::Intvl)) signature("piece expects intervals", c->loc);
                used = disjoint_union(used, j.used);
              }
              return {SliceType::base(K::Piece), used};
            },
            [&](const ex::Mark& x) -> Judgement {
              auto i = check(*x.interval);
              auto t = check(*x.target);
              if (!is(i.type, K::RdIntvl))
                signature("mark expects a read-only interval", x.interval->loc);
              if (!is(t.type, K::Vltn)) signature("mark expects a valuation", x.target->loc);
              return {SliceType::base(K::Point), disjoint_union(i.used, t.used)};
            },
            [&](const ex::Eval& x) -> Judgement {
              auto s = check(*x.subject);
              if (!is(s.type, K::RdIntvl) && !is(s.type, K::RdPiece))
                signature("eval expects a read-only interval or piece", x.subject->loc);
              return {SliceType::base(K::Vltn), s.used};
            },
        },
        e.node);
  }

  Judgement op(const ex::Op& x, const SourceLoc& loc) {
    std::vector<SliceType> ts;
    Usage used;
    for (const auto& a : x.args) {
      auto j = check(*a);
      ts.push_back(j.type);
      used = disjoint_union(used, j.used);
    }
    auto want = [&](std::size_t n) {
      if (ts.size() != n)
        throw TypeError(TypeErrorKind::ArityMismatch, "operator arity at " + where(loc));
    };
    auto all = [&](K k) {
      return std::all_of(ts.begin(), ts.end(), [&](const SliceType& t) { return is(t, k); });
    };
    SliceType result;
    switch (x.op) {
      case OpKind::And:
      case OpKind::Or:
        want(2);
        if (!all(K::Bool)) signature("boolean operator on non-Bool", loc);
        result = SliceType::base(K::Bool);
        break;
      case OpKind::Not:
        want(1);
        if (!all(K::Bool)) signature("'not' on non-Bool", loc);
        result = SliceType::base(K::Bool);
        break;
      case OpKind::Geq:
      case OpKind::Eq:
        want(2);
        if (!all(K::Point) && !all(K::Vltn)) signature("comparison of mismatched sorts", loc);
        result = SliceType::base(K::Bool);
        break;
      case OpKind::Add:
        want(2);
        if (!all(K::Vltn)) signature("'+' on non-valuations", loc);
        result = SliceType::base(K::Vltn);
        break;
      case OpKind::Scale:
        want(1);
        if (!all(K::Vltn)) signature("scalar multiple of a non-valuation", loc);
        result = SliceType::base(K::Vltn);
        break;
    }
    return {result, used};
  }

  std::vector<Binding> scope_;
  std::map<int, std::string> names_;
  int next_id_ = 0;
};

void forbidden_points(const Expr& e, std::vector<Violation>& out) {
  if (e.is<ex::Lit>()) {
    std::vector<Rational> pts;
    const Value& v = e.as<ex::Lit>().value;
    std::function<void(const Value&)> walk = [&](const Value& w) {
      if (w.is<PointVal>()) {
        const auto& r = w.as<PointVal>().at;
        if (r != 0 && r != 1)
          out.push_back({"forbidden point constant",
                         to_string(r) + "#Pt at " + where(e.loc)});
      } else if (w.is<TupleVal>()) {
        for (const auto& c : w.as<TupleVal>().elems) walk(c);
      }
    };
    walk(v);
  }
  for (const auto& c : children(e)) forbidden_points(*c, out);
}

void mark_ids(const Expr& e, std::map<MarkId, int>& seen) {
  if (e.is<ex::Mark>()) ++seen[e.as<ex::Mark>().id];
  for (const auto& c : children(e)) mark_ids(*c, seen);
}

}  // namespace

SliceType typecheck(const Expr& e) {
  Checker c;
  return c.run(e);
}

std::vector<Violation> check_wellformed(const Expr& e, int agents) {
  std::vector<Violation> out;
  try {
    auto t = typecheck(e);
    if (agents > 0 && !(t == allocation_type(agents)))
      out.push_back({"wrong type", "expected " + to_string(allocation_type(agents)) +
                                       " but the program has type " + to_string(t)});
  } catch (const TypeError& err) {
    out.push_back({"type error", err.what()});
  }
  if (!is_disjoint(e)) out.push_back({"expression not disjoint", "I(e) has overlapping intervals"});
  forbidden_points(e, out);
  std::map<MarkId, int> ids;
  mark_ids(e, ids);
  for (const auto& [id, n] : ids) {
    if (id == kNoMark) out.push_back({"unassigned mark id", std::to_string(n) + " mark(s)"});
    else if (n > 1) out.push_back({"duplicate mark id", "#" + std::to_string(id)});
  }
  return out;
}

}  // namespace slice
