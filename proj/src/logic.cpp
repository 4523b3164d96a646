#include "slice/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace slice::logic {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

namespace {

TermPtr make(TermKind k, std::vector<TermPtr> args = {}, int a = 0, int b = 0, Rational num = 0,
             bool flag = false) {
  return std::make_shared<const Term>(Term{k, std::move(num), flag, a, b, std::move(args)});
}

FormulaPtr makef(FormulaKind k, TermPtr l = nullptr, TermPtr r = nullptr,
                 std::vector<FormulaPtr> args = {}) {
  return std::make_shared<const Formula>(Formula{k, std::move(l), std::move(r), std::move(args)});
}

}  // namespace

namespace t {
TermPtr num(Rational r) { return make(TermKind::Num, {}, 0, 0, std::move(r)); }
TermPtr pt(Rational r) { return make(TermKind::Num, {}, 0, 0, std::move(r), true); }
TermPtr boolean(bool v) { return make(TermKind::Bool, {}, 0, 0, 0, v); }
TermPtr y(MarkId id) { return make(TermKind::YVar, {}, id); }
TermPtr z(AgentId a, PointRef y) { return make(TermKind::ZVar, {}, a, y); }
TermPtr interval(TermPtr lo, TermPtr hi) { return make(TermKind::Interval, {lo, hi}); }
TermPtr piece(std::vector<TermPtr> parts) { return make(TermKind::Piece, std::move(parts)); }
TermPtr tuple(std::vector<TermPtr> elems) { return make(TermKind::Tuple, std::move(elems)); }
TermPtr proj(int k, TermPtr x) { return make(TermKind::Proj, {x}, k); }
TermPtr left(TermPtr x) { return make(TermKind::Left, {x}); }
TermPtr right(TermPtr x) { return make(TermKind::Right, {x}); }
TermPtr val(AgentId a, TermPtr x) { return make(TermKind::Val, {x}, a); }
TermPtr sum(std::vector<TermPtr> ts) { return make(TermKind::Sum, std::move(ts)); }
TermPtr scale(Rational r, TermPtr x) { return make(TermKind::Scale, {x}, 0, 0, std::move(r)); }
TermPtr op(TermKind k, std::vector<TermPtr> args) { return make(k, std::move(args)); }
TermPtr point_ref(PointRef p) {
  if (p == kZero) return pt(0);
  if (p == kOne) return pt(1);
  return y(p);
}
}  // namespace t

namespace f {
FormulaPtr truth() { return makef(FormulaKind::True); }
FormulaPtr falsity() { return makef(FormulaKind::False); }
FormulaPtr geq(TermPtr l, TermPtr r) { return makef(FormulaKind::Geq, l, r); }
FormulaPtr eq(TermPtr l, TermPtr r) { return makef(FormulaKind::Eq, l, r); }
FormulaPtr is_true(TermPtr x) { return makef(FormulaKind::IsTrue, x); }
FormulaPtr not_(FormulaPtr x) { return makef(FormulaKind::Not, nullptr, nullptr, {x}); }
FormulaPtr and_(std::vector<FormulaPtr> xs) {
  return makef(FormulaKind::And, nullptr, nullptr, std::move(xs));
}
FormulaPtr or_(std::vector<FormulaPtr> xs) {
  return makef(FormulaKind::Or, nullptr, nullptr, std::move(xs));
}
FormulaPtr implies(FormulaPtr l, FormulaPtr r) {
  return makef(FormulaKind::Implies, nullptr, nullptr, {l, r});
}
}  // namespace f

// ---------------------------------------------------------------- printing

std::string y_name(MarkId id) { return "y#" + std::to_string(id); }

std::string z_name(AgentId a, PointRef y) {
  return "z#" + std::to_string(a) + "#" + (y == kOne ? std::string("one") : std::to_string(y));
}

namespace {

std::string join(const std::vector<TermPtr>& ts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? sep : "") + to_string(ts[i]);
  return out;
}

}  // namespace

std::string to_string(const TermPtr& x) {
  const auto& a = x->args;
  switch (x->kind) {
    case TermKind::Num: return slice::to_string(x->num);
    case TermKind::Bool: return x->flag ? "true" : "false";
    case TermKind::YVar: return y_name(x->a);
    case TermKind::ZVar: return z_name(x->a, x->b);
    case TermKind::Interval: return "[" + to_string(a[0]) + ", " + to_string(a[1]) + "]";
    case TermKind::Piece: return "U(" + join(a, ", ") + ")";
    case TermKind::Tuple: return "(" + join(a, ", ") + ")";
    case TermKind::Proj: return "pi" + std::to_string(x->a) + "(" + to_string(a[0]) + ")";
    case TermKind::Left: return "l(" + to_string(a[0]) + ")";
    case TermKind::Right: return "r(" + to_string(a[0]) + ")";
    case TermKind::Val: return "val" + std::to_string(x->a) + "(" + to_string(a[0]) + ")";
    case TermKind::Sum: return a.empty() ? "0" : "(" + join(a, " + ") + ")";
    case TermKind::Scale: return slice::to_string(x->num) + " * " + to_string(a[0]);
    case TermKind::And: return "(" + join(a, " and ") + ")";
    case TermKind::Or: return "(" + join(a, " or ") + ")";
    case TermKind::Not: return "not " + to_string(a[0]);
    case TermKind::Geq: return "(" + join(a, " >= ") + ")";
    case TermKind::Eq: return "(" + join(a, " == ") + ")";
  }
  return "?";
}

std::string to_string(const FormulaPtr& x) {
  auto sub = [](const FormulaPtr& g) {
    bool atom = g->kind == FormulaKind::Geq || g->kind == FormulaKind::Eq ||
                g->kind == FormulaKind::True || g->kind == FormulaKind::False;
    return atom ? to_string(g) : "(" + to_string(g) + ")";
  };
  auto many = [&](const std::string& sep, const char* empty) {
    if (x->args.empty()) return std::string(empty);
    std::string out;
    for (std::size_t i = 0; i < x->args.size(); ++i) out += (i ? sep : "") + sub(x->args[i]);
    return out;
  };
  switch (x->kind) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Geq: return to_string(x->lhs) + " >= " + to_string(x->rhs);
    case FormulaKind::Eq: return to_string(x->lhs) + " = " + to_string(x->rhs);
    case FormulaKind::IsTrue: return to_string(x->lhs) + " = true";
    case FormulaKind::Not: return "not " + sub(x->args[0]);
    case FormulaKind::And: return many(" /\\ ", "true");
    case FormulaKind::Or: return many(" \\/ ", "false");
    case FormulaKind::Implies: return sub(x->args[0]) + " => " + sub(x->args[1]);
  }
  return "?";
}

std::string to_string(const Replacement& s) {
  std::string out;
  for (std::size_t i = 0; i < s.order.size(); ++i) {
    PointRef p = s.order[i];
    out += (i ? " < " : "") + (p == kZero ? std::string("0") : p == kOne ? "1" : y_name(p));
  }
  return out;
}

// ---------------------------------------------------------------- translation

namespace {

TermPtr embed_region(const Region& r) {
  if (auto* i = std::get_if<Interval>(&r)) return t::interval(t::pt(i->lo), t::pt(i->hi));
  std::vector<TermPtr> parts;
  for (const auto& i : std::get<PieceVal>(r).parts)
    parts.push_back(t::interval(t::pt(i.lo), t::pt(i.hi)));
  return t::piece(std::move(parts));
}

}  // namespace

TermPtr embed(const Value& v) {
  return std::visit(overloaded{
                        [](bool b) { return t::boolean(b); },
                        [](const PointVal& p) { return t::pt(p.at); },
                        [](const Interval& i) { return embed_region(i); },
                        [](const PieceVal& p) { return embed_region(p); },
                        [](const VltnVal& x) {
                          std::vector<TermPtr> terms;
                          for (const auto& term : x.terms)
                            terms.push_back(t::scale(term.coeff,
                                                     t::val(term.agent, embed_region(term.target))));
                          return t::sum(std::move(terms));
                        },
                        [](const TupleVal& x) {
                          std::vector<TermPtr> elems;
                          for (const auto& c : x.elems) elems.push_back(embed(c));
                          return t::tuple(std::move(elems));
                        },
                        [](const ReadOnlyVal& r) { return embed_region(r.inner); },
                    },
                    v.v);
}

namespace {

class Translator {
 public:
  TermPtr go(const Expr& e) {
    return std::visit(
        overloaded{
            [&](const ex::Lit& x) { return embed(x.value); },
            [&](const ex::Var& x) { return lookup(x.name); },
            [&](const ex::Tuple& x) {
              std::vector<TermPtr> elems;
              for (const auto& c : x.elems) elems.push_back(go(*c));
              return t::tuple(std::move(elems));
            },
            [&](const ex::Split& x) {
              TermPtr s = go(*x.scrutinee);
              std::size_t mark = env_.size();
              if (x.binders.size() == 1 && s->kind != TermKind::Tuple) {
                // Unary product: the binder is the scrutinee itself.
                env_.emplace_back(x.binders[0], s);
              } else {
                for (std::size_t i = 0; i < x.binders.size(); ++i)
                  env_.emplace_back(x.binders[i], t::proj(static_cast<int>(i) + 1, s));
              }
              TermPtr body = go(*x.body);
              env_.resize(mark);
              return body;
            },
            [&](const ex::If&) -> TermPtr {
              throw std::invalid_argument("translate expects a path without if");
            },
            [&](const ex::Assert& x) {
              TermPtr g = go(*x.cond);
              conj_.push_back(f::is_true(g));
              return go(*x.body);
            },
            [&](const ex::Op& x) {
              std::vector<TermPtr> args;
              for (const auto& c : x.args) args.push_back(go(*c));
              switch (x.op) {
                case OpKind::And: return t::op(TermKind::And, args);
                case OpKind::Or: return t::op(TermKind::Or, args);
                case OpKind::Not: return t::op(TermKind::Not, args);
                case OpKind::Geq: return t::op(TermKind::Geq, args);
                case OpKind::Eq: return t::op(TermKind::Eq, args);
                case OpKind::Add: return t::sum(args);
                case OpKind::Scale: return t::scale(x.scalar, args[0]);
              }
              throw std::logic_error("unknown operator");
            },
            [&](const ex::Cake&) { return t::interval(t::pt(0), t::pt(1)); },
            [&](const ex::Divide& x) {
              TermPtr i = go(*x.interval);
              TermPtr p = go(*x.at);
              conj_.push_back(f::geq(p, t::left(i)));
              conj_.push_back(f::geq(t::right(i), p));
              return t::tuple({t::interval(t::left(i), p), t::interval(p, t::right(i))});
            },
            [&](const ex::Piece& x) {
              std::vector<TermPtr> parts;
              for (const auto& c : x.parts) parts.push_back(go(*c));
              return t::piece(std::move(parts));
            },
            [&](const ex::Mark& x) {
              if (x.id == kNoMark) throw std::invalid_argument("mark without an id");
              TermPtr i = go(*x.interval);
              TermPtr target = go(*x.target);
              TermPtr y = t::y(x.id);
              conj_.push_back(f::eq(t::val(x.agent, t::interval(t::left(i), y)), target));
              return y;
            },
            [&](const ex::Eval& x) { return t::val(x.agent, go(*x.subject)); },
        },
        e.node);
  }

  std::vector<FormulaPtr> conj_;

 private:
  TermPtr lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == name) return it->second;
    throw std::invalid_argument("unbound variable '" + name + "' in translation");
  }

  std::vector<std::pair<std::string, TermPtr>> env_;
};

}  // namespace

Translation translate(const Expr& b) {
  Translator tr;
  TermPtr r = tr.go(b);
  return {r, f::and_(std::move(tr.conj_))};
}

FormulaPtr envy(const TermPtr& alloc, int agents) {
  auto share = [&](int k) { return agents == 1 ? alloc : t::proj(k, alloc); };
  std::vector<FormulaPtr> cs;
  for (int a = 1; a <= agents; ++a)
    for (int b = 1; b <= agents; ++b) cs.push_back(f::geq(t::val(a, share(a)), t::val(a, share(b))));
  return f::and_(std::move(cs));
}

// ---------------------------------------------------------------- simplify

namespace {

class Simplifier {
 public:
  TermPtr term(const TermPtr& x) {
    if (auto it = memo_.find(x.get()); it != memo_.end()) return it->second;
    TermPtr out;
    switch (x->kind) {
      case TermKind::Proj: {
        TermPtr s = term(x->args[0]);
        if (s->kind == TermKind::Tuple && x->a >= 1 && x->a <= static_cast<int>(s->args.size()))
          out = s->args[x->a - 1];
        else
          out = t::proj(x->a, s);
        break;
      }
      case TermKind::Left:
      case TermKind::Right: {
        TermPtr s = term(x->args[0]);
        if (s->kind == TermKind::Interval) out = s->args[x->kind == TermKind::Left ? 0 : 1];
        else out = make(x->kind, {s});
        break;
      }
      default: {
        std::vector<TermPtr> args;
        bool same = true;
        for (const auto& c : x->args) {
          args.push_back(term(c));
          same = same && args.back() == c;
        }
        out = same ? x : make(x->kind, std::move(args), x->a, x->b, x->num, x->flag);
      }
    }
    memo_[x.get()] = out;
    keep_.push_back(x);
    return out;
  }

  FormulaPtr formula(const FormulaPtr& x) {
    switch (x->kind) {
      case FormulaKind::True:
      case FormulaKind::False: return x;
      case FormulaKind::Geq: return f::geq(term(x->lhs), term(x->rhs));
      case FormulaKind::Eq: return f::eq(term(x->lhs), term(x->rhs));
      case FormulaKind::IsTrue: return lift(term(x->lhs));
      case FormulaKind::Not: return negate(formula(x->args[0]));
      case FormulaKind::And: {
        std::vector<FormulaPtr> xs;
        for (const auto& c : x->args) xs.push_back(formula(c));
        return conj(xs);
      }
      case FormulaKind::Or: {
        std::vector<FormulaPtr> xs;
        for (const auto& c : x->args) xs.push_back(formula(c));
        return disj(xs);
      }
      case FormulaKind::Implies: {
        auto l = formula(x->args[0]), r = formula(x->args[1]);
        if (l->kind == FormulaKind::False || r->kind == FormulaKind::True) return f::truth();
        if (l->kind == FormulaKind::True) return r;
        return f::implies(l, r);
      }
    }
    return x;
  }

 private:
  // A simplified Bool-sorted term as a formula.
  FormulaPtr lift(const TermPtr& s) {
    switch (s->kind) {
      case TermKind::Bool: return s->flag ? f::truth() : f::falsity();
      case TermKind::And: return conj({lift(s->args[0]), lift(s->args[1])});
      case TermKind::Or: return disj({lift(s->args[0]), lift(s->args[1])});
      case TermKind::Not: return negate(lift(s->args[0]));
      case TermKind::Geq: return f::geq(s->args[0], s->args[1]);
      case TermKind::Eq: return f::eq(s->args[0], s->args[1]);
      default: return f::is_true(s);
    }
  }

  static FormulaPtr negate(const FormulaPtr& x) {
    if (x->kind == FormulaKind::True) return f::falsity();
    if (x->kind == FormulaKind::False) return f::truth();
    return f::not_(x);
  }

  static FormulaPtr conj(const std::vector<FormulaPtr>& xs) {
    std::vector<FormulaPtr> out;
    for (const auto& x : xs) {
      if (x->kind == FormulaKind::False) return x;
      if (x->kind == FormulaKind::True) continue;
      if (x->kind == FormulaKind::And) out.insert(out.end(), x->args.begin(), x->args.end());
      else out.push_back(x);
    }
    if (out.empty()) return f::truth();
    if (out.size() == 1) return out[0];
    return f::and_(std::move(out));
  }

  static FormulaPtr disj(const std::vector<FormulaPtr>& xs) {
    std::vector<FormulaPtr> out;
    for (const auto& x : xs) {
      if (x->kind == FormulaKind::True) return x;
      if (x->kind == FormulaKind::False) continue;
      if (x->kind == FormulaKind::Or) out.insert(out.end(), x->args.begin(), x->args.end());
      else out.push_back(x);
    }
    if (out.empty()) return f::falsity();
    if (out.size() == 1) return out[0];
    return f::or_(std::move(out));
  }

  std::unordered_map<const Term*, TermPtr> memo_;
  std::vector<TermPtr> keep_;  // pins memo keys so their addresses stay unique
};

void collect_y(const TermPtr& x, std::set<MarkId>& out, std::set<const Term*>& seen) {
  if (!seen.insert(x.get()).second) return;
  if (x->kind == TermKind::YVar) out.insert(x->a);
  if (x->kind == TermKind::ZVar && x->b >= 0) out.insert(x->b);
  for (const auto& c : x->args) collect_y(c, out, seen);
}

void collect_y(const FormulaPtr& x, std::set<MarkId>& out, std::set<const Term*>& seen) {
  if (x->lhs) collect_y(x->lhs, out, seen);
  if (x->rhs) collect_y(x->rhs, out, seen);
  for (const auto& c : x->args) collect_y(c, out, seen);
}

}  // namespace

TermPtr simplify(const TermPtr& x) { return Simplifier().term(x); }
FormulaPtr simplify(const FormulaPtr& x) { return Simplifier().formula(x); }

std::set<MarkId> yvars(const TermPtr& x) {
  std::set<MarkId> out;
  std::set<const Term*> seen;
  collect_y(x, out, seen);
  return out;
}

std::set<MarkId> yvars(const FormulaPtr& x) {
  std::set<MarkId> out;
  std::set<const Term*> seen;
  collect_y(x, out, seen);
  return out;
}

// ---------------------------------------------------------------- replacements

namespace {

std::optional<PointRef> as_point_ref(const TermPtr& x) {
  if (x->kind == TermKind::YVar) return x->a;
  if (x->kind == TermKind::Num) {
    if (x->num == 0) return kZero;
    if (x->num == 1) return kOne;
  }
  return std::nullopt;
}

// Linear extensions of the partial order given by `ge` over ys (nodes
// 0..k-1; node k is 0 and node k+1 is 1). `ge` is transitively closed.
std::vector<Replacement> extensions(const std::vector<MarkId>& ys,
                                    const std::vector<std::vector<bool>>& ge) {
  std::size_t k = ys.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
  std::vector<Replacement> out;
  std::vector<bool> placed(k, false);
  std::vector<PointRef> cur{kZero};
  std::function<void()> rec = [&]() {
    if (cur.size() == k + 1) {
      Replacement s{cur};
      s.order.push_back(kOne);
      out.push_back(std::move(s));
      return;
    }
    for (std::size_t i : idx) {
      if (placed[i]) continue;
      bool ready = true;
      for (std::size_t q = 0; q < k && ready; ++q)
        if (q != i && !placed[q] && ge[i][q] && !ge[q][i]) ready = false;
      if (!ready) continue;
      placed[i] = true;
      cur.push_back(ys[i]);
      rec();
      cur.pop_back();
      placed[i] = false;
    }
  };
  rec();
  return out;
}

}  // namespace

std::vector<Replacement> enumerate_replacements(const std::vector<MarkId>& ys) {
  std::size_t n = ys.size() + 2;
  std::vector<std::vector<bool>> ge(n, std::vector<bool>(n, false));
  return extensions(ys, ge);
}

std::vector<Replacement> enumerate_replacements(const std::vector<MarkId>& ys,
                                                const FormulaPtr& c) {
  if (c->kind == FormulaKind::False) return {};
  std::size_t k = ys.size(), n = k + 2;
  auto node = [&](PointRef p) -> std::optional<std::size_t> {
    if (p == kZero) return k;
    if (p == kOne) return k + 1;
    auto it = std::find(ys.begin(), ys.end(), p);
    if (it == ys.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ys.begin());
  };
  std::vector<std::vector<bool>> ge(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    ge[i][i] = true;
    ge[k + 1][i] = true;  // 1 is above everything
    ge[i][k] = true;      // 0 is below everything
  }
  std::vector<FormulaPtr> top = c->kind == FormulaKind::And ? c->args : std::vector<FormulaPtr>{c};
  for (const auto& g : top) {
    if (g->kind != FormulaKind::Geq && g->kind != FormulaKind::Eq) continue;
    auto l = as_point_ref(g->lhs), r = as_point_ref(g->rhs);
    if (!l || !r) continue;
    auto nl = node(*l), nr = node(*r);
    if (!nl || !nr) continue;
    ge[*nl][*nr] = true;
    if (g->kind == FormulaKind::Eq) ge[*nr][*nl] = true;
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      if (ge[i][m])
        for (std::size_t j = 0; j < n; ++j)
          if (ge[m][j]) ge[i][j] = true;
  return extensions(ys, ge);
}

namespace {

class Replacer {
 public:
  explicit Replacer(const Replacement& s) : s_(s) {
    for (std::size_t i = 0; i < s.order.size(); ++i) pos_[s.order[i]] = i;
  }

  TermPtr term(const TermPtr& x) {
    if (auto it = memo_.find(x.get()); it != memo_.end()) return it->second;
    TermPtr out;
    if (x->kind == TermKind::Val) {
      std::set<std::size_t> window;
      const TermPtr& r = x->args[0];
      if (r->kind == TermKind::Interval) add_window(r, window);
      else if (r->kind == TermKind::Piece)
        for (const auto& part : r->args) add_window(part, window);
      else
        throw LogicError(LogicError::Kind::IllSorted, "val of a non-literal region: " + to_string(x));
      std::vector<TermPtr> parts;
      for (std::size_t i : window) {
        PointRef w = s_.order[i];
        parts.push_back(t::sum({t::point_ref(w), t::scale(-1, t::z(x->a, w))}));
      }
      out = parts.empty() ? t::num(0) : parts.size() == 1 ? parts[0] : t::sum(std::move(parts));
    } else {
      std::vector<TermPtr> args;
      bool same = true;
      for (const auto& c : x->args) {
        args.push_back(term(c));
        same = same && args.back() == c;
      }
      out = same ? x : make(x->kind, std::move(args), x->a, x->b, x->num, x->flag);
    }
    memo_[x.get()] = out;
    keep_.push_back(x);
    return out;
  }

  FormulaPtr formula(const FormulaPtr& x) {
    switch (x->kind) {
      case FormulaKind::Geq: return f::geq(term(x->lhs), term(x->rhs));
      case FormulaKind::Eq: return f::eq(term(x->lhs), term(x->rhs));
      case FormulaKind::IsTrue: return f::is_true(term(x->lhs));
      default: {
        if (x->args.empty()) return x;
        std::vector<FormulaPtr> args;
        for (const auto& c : x->args) args.push_back(formula(c));
        return makef(x->kind, nullptr, nullptr, std::move(args));
      }
    }
  }

 private:
  std::size_t position(const TermPtr& p) {
    auto ref = as_point_ref(p);
    if (!ref || !pos_.count(*ref))
      throw LogicError(LogicError::Kind::PointAtomNotInS,
                       "point " + to_string(p) + " is not in " + to_string(s_));
    return pos_.at(*ref);
  }

  void add_window(const TermPtr& i, std::set<std::size_t>& out) {
    if (i->kind != TermKind::Interval)
      throw LogicError(LogicError::Kind::IllSorted, "piece part is not an interval literal");
    std::size_t lo = position(i->args[0]), hi = position(i->args[1]);
    for (std::size_t k = lo + 1; k <= hi; ++k) out.insert(k);
  }

  const Replacement& s_;
  std::map<PointRef, std::size_t> pos_;
  std::unordered_map<const Term*, TermPtr> memo_;
  std::vector<TermPtr> keep_;
};

// sum over S \ {0} of (w - z_{a,w})
TermPtr window_mass(const Replacement& s, AgentId a) {
  std::vector<TermPtr> parts;
  for (std::size_t i = 1; i < s.order.size(); ++i)
    parts.push_back(t::sum({t::point_ref(s.order[i]), t::scale(-1, t::z(a, s.order[i]))}));
  return t::sum(std::move(parts));
}

}  // namespace

FormulaPtr apply_replacement(const Replacement& s, const FormulaPtr& x) {
  return Replacer(s).formula(x);
}

TermPtr apply_replacement(const Replacement& s, const TermPtr& x) { return Replacer(s).term(x); }

FormulaPtr psi(const Replacement& s, int agents) {
  std::vector<FormulaPtr> cs;
  const auto& o = s.order;
  for (AgentId a = 1; a <= agents; ++a) {
    cs.push_back(f::geq(t::z(a, o[1]), t::num(0)));
    for (std::size_t i = 1; i < o.size(); ++i) {
      cs.push_back(f::geq(t::point_ref(o[i]), t::z(a, o[i])));
      if (i + 1 < o.size()) cs.push_back(f::geq(t::z(a, o[i + 1]), t::point_ref(o[i])));
    }
  }
  for (AgentId a = 2; a <= agents; ++a) cs.push_back(f::eq(window_mass(s, 1), window_mass(s, a)));
  for (AgentId a = 1; a <= agents; ++a)
    cs.push_back(f::not_(f::geq(t::num(0), window_mass(s, a))));
  return f::and_(std::move(cs));
}

FormulaPtr VC::implication() const { return f::implies(hyp, goal); }

PathFormulas path_formulas(const Expr& b, int agents) {
  auto tr = translate(b);
  Simplifier simp;
  PathFormulas p;
  p.rho = simp.term(tr.rho);
  p.c = simp.formula(tr.c);
  p.e = simp.formula(envy(p.rho, agents));
  std::set<MarkId> ys = yvars(p.c);
  for (MarkId y : yvars(p.rho)) ys.insert(y);
  p.ys.assign(ys.begin(), ys.end());
  return p;
}

VC build_vc(const PathFormulas& p, const Replacement& s, int agents) {
  Replacer r(s);
  FormulaPtr c = r.formula(p.c);
  FormulaPtr hyp = c->kind == FormulaKind::True ? psi(s, agents) : f::and_({c, psi(s, agents)});
  return {hyp, r.formula(p.e)};
}

FormulaPtr build_vc(const Expr& b, const Replacement& s, int agents) {
  return build_vc(path_formulas(b, agents), s, agents).implication();
}

// ---------------------------------------------------------------- linear form

std::optional<LinExpr> linearize(const TermPtr& x) {
  LinExpr out;
  std::function<bool(const TermPtr&, const Rational&)> go = [&](const TermPtr& u,
                                                                const Rational& k) {
    switch (u->kind) {
      case TermKind::Num: out.constant += k * u->num; return true;
      case TermKind::YVar: out.coeffs[y_name(u->a)] += k; return true;
      case TermKind::ZVar: out.coeffs[z_name(u->a, u->b)] += k; return true;
      case TermKind::Sum:
        for (const auto& c : u->args)
          if (!go(c, k)) return false;
        return true;
      case TermKind::Scale: return go(u->args[0], k * u->num);
      default: return false;
    }
  };
  if (!go(x, 1)) return std::nullopt;
  std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == 0; });
  return out;
}

bool is_linear(const FormulaPtr& x) {
  switch (x->kind) {
    case FormulaKind::True:
    case FormulaKind::False: return true;
    case FormulaKind::Geq:
    case FormulaKind::Eq: return linearize(x->lhs) && linearize(x->rhs);
    case FormulaKind::IsTrue: return false;
    default:
      return std::all_of(x->args.begin(), x->args.end(),
                         [](const FormulaPtr& c) { return is_linear(c); });
  }
}

// ---------------------------------------------------------------- semantics

Rational Assignment::point(PointRef p) const {
  if (p == kZero) return 0;
  if (p == kOne) return 1;
  return y.at(p);
}

namespace {

class Semantics {
 public:
  Semantics(const ValuationSet* vs, const Assignment& alpha) : vs_(vs), alpha_(alpha) {}

  Rational number(const TermPtr& x) {
    switch (x->kind) {
      case TermKind::Num: return x->num;
      case TermKind::YVar: {
        auto it = alpha_.y.find(x->a);
        if (it == alpha_.y.end())
          throw std::invalid_argument("assignment has no value for " + y_name(x->a));
        return it->second;
      }
      case TermKind::ZVar: {
        auto it = alpha_.z.find({x->a, x->b});
        if (it == alpha_.z.end())
          throw std::invalid_argument("assignment has no value for " + z_name(x->a, x->b));
        return it->second;
      }
      case TermKind::Sum: {
        Rational s = 0;
        for (const auto& c : x->args) s += number(c);
        return s;
      }
      case TermKind::Scale: return x->num * number(x->args[0]);
      case TermKind::Val: {
        if (!vs_) throw std::invalid_argument("val needs a valuation set");
        Value r = value(x->args[0]);
        Region reg = r.is<Interval>() ? Region(r.as<Interval>()) : Region(r.as<PieceVal>());
        return val_eval(*vs_, x->a, reg);
      }
      case TermKind::Left:
      case TermKind::Right: {
        Interval i = value(x->args[0]).as<Interval>();
        return x->kind == TermKind::Left ? i.lo : i.hi;
      }
      case TermKind::Proj: return value(x).as<PointVal>().at;
      default: throw LogicError(LogicError::Kind::IllSorted, "not a number: " + to_string(x));
    }
  }

  Value value(const TermPtr& x) {
    switch (x->kind) {
      case TermKind::Interval: return Interval{number(x->args[0]), number(x->args[1])};
      case TermKind::Piece: {
        PieceVal p;
        for (const auto& c : x->args) p.parts.push_back(value(c).as<Interval>());
        return p;
      }
      case TermKind::Tuple: {
        std::vector<Value> elems;
        for (const auto& c : x->args) elems.push_back(value(c));
        return tuple(std::move(elems));
      }
      case TermKind::Proj: return value(x->args[0]).as<TupleVal>().elems.at(x->a - 1);
      case TermKind::Bool:
      case TermKind::And:
      case TermKind::Or:
      case TermKind::Not:
      case TermKind::Geq:
      case TermKind::Eq: return truth(x);
      default: return point(number(x));
    }
  }

  bool truth(const TermPtr& x) {
    const auto& a = x->args;
    switch (x->kind) {
      case TermKind::Bool: return x->flag;
      case TermKind::And: return truth(a[0]) && truth(a[1]);
      case TermKind::Or: return truth(a[0]) || truth(a[1]);
      case TermKind::Not: return !truth(a[0]);
      case TermKind::Geq: return number(a[0]) >= number(a[1]);
      case TermKind::Eq: return number(a[0]) == number(a[1]);
      default: return value(x).as<bool>();
    }
  }

  bool holds(const FormulaPtr& x) {
    const auto& a = x->args;
    switch (x->kind) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Geq: return number(x->lhs) >= number(x->rhs);
      case FormulaKind::Eq: return number(x->lhs) == number(x->rhs);
      case FormulaKind::IsTrue: return truth(x->lhs);
      case FormulaKind::Not: return !holds(a[0]);
      case FormulaKind::And:
        return std::all_of(a.begin(), a.end(), [&](const FormulaPtr& c) { return holds(c); });
      case FormulaKind::Or:
        return std::any_of(a.begin(), a.end(), [&](const FormulaPtr& c) { return holds(c); });
      case FormulaKind::Implies: return !holds(a[0]) || holds(a[1]);
    }
    return false;
  }

 private:
  const ValuationSet* vs_;
  const Assignment& alpha_;
};

}  // namespace

bool holds(const FormulaPtr& x, const ValuationSet& vs, const Assignment& alpha) {
  return Semantics(&vs, alpha).holds(x);
}

Rational number(const TermPtr& x, const ValuationSet& vs, const Assignment& alpha) {
  return Semantics(&vs, alpha).number(x);
}

Value value_of(const TermPtr& x, const ValuationSet& vs, const Assignment& alpha) {
  return Semantics(&vs, alpha).value(x);
}

std::vector<Rational> formula_points(const FormulaPtr& x, const Assignment& alpha) {
  Semantics sem(nullptr, alpha);
  std::set<Rational> out;
  std::set<const Term*> seen;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (!seen.insert(u.get()).second) return;
    if (u->kind == TermKind::Interval) {
      out.insert(sem.number(u->args[0]));
      out.insert(sem.number(u->args[1]));
    } else if (u->kind == TermKind::YVar || (u->kind == TermKind::Num && u->flag)) {
      out.insert(sem.number(u));
    }
    for (const auto& c : u->args) walk(c);
  };
  std::function<void(const FormulaPtr&)> walkf = [&](const FormulaPtr& g) {
    if (g->lhs) walk(g->lhs);
    if (g->rhs) walk(g->rhs);
    for (const auto& c : g->args) walkf(c);
  };
  walkf(x);
  return {out.begin(), out.end()};
}

}  // namespace slice::logic
