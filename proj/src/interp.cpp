#include "slice/interp.hpp"

#include <algorithm>
#include <set>

namespace slice {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

std::string to_string(Stuck::Kind k) {
  switch (k) {
    case Stuck::Kind::DivideOutOfRange: return "DivideOutOfRange";
    case Stuck::Kind::MarkInfeasible: return "MarkInfeasible";
    case Stuck::Kind::IrrationalMark: return "IrrationalMark";
    case Stuck::Kind::ReplayInvalid: return "ReplayInvalid";
    case Stuck::Kind::AssertFailed: return "AssertFailed";
  }
  return "?";
}

Rational vltn_number(const VltnVal& v, const ValuationSet& vs) {
  Rational total = 0;
  for (const auto& t : v.terms) total += t.coeff * val_eval(vs, t.agent, t.target);
  return total;
}

namespace {

Region region_of(const Value& v) {
  const Value& u = v.is<ReadOnlyVal>() ? unread(v) : v;
  if (u.is<Interval>()) return u.as<Interval>();
  return u.as<PieceVal>();
}

class Evaluator {
 public:
  Evaluator(const ValuationSet& vs, const EvalOptions& opt) : vs_(vs), opt_(opt) {}

  RunResult run(const Expr& e) {
    Value v = eval(e);
    RunResult r{std::move(v), std::move(trace_)};
    std::vector<Rational> pts(points_.begin(), points_.end());
    r.trace.points = std::move(pts);
    return r;
  }

 private:
  Value eval(const Expr& e) {
    Value v = step(e);
    std::vector<Rational> pts;
    collect_points(v, pts);
    points_.insert(pts.begin(), pts.end());
    return v;
  }

  const Value& lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == name) return it->second;
    throw std::logic_error("unbound variable '" + name + "' at run time");
  }

  Value step(const Expr& e) {
    return std::visit(
        overloaded{
            [&](const ex::Lit& x) -> Value { return x.value; },
            [&](const ex::Var& x) -> Value {
              const Value& v = lookup(x.name);
              return x.read_only ? read(v) : v;
            },
            [&](const ex::Tuple& x) -> Value {
              std::vector<Value> vs;
              for (const auto& c : x.elems) vs.push_back(eval(*c));
              return tuple(std::move(vs));
            },
            [&](const ex::Split& x) -> Value {
              Value s = eval(*x.scrutinee);
              std::vector<Value> comps;
              if (x.binders.size() == 1 && !s.is<TupleVal>()) comps.push_back(s);
              else comps = s.as<TupleVal>().elems;
              std::size_t mark = env_.size();
              for (std::size_t i = 0; i < x.binders.size(); ++i)
                env_.emplace_back(x.binders[i], comps.at(i));
              Value out = eval(*x.body);
              env_.resize(mark);
              return out;
            },
            [&](const ex::If& x) -> Value {
              bool c = eval(*x.cond).as<bool>();
              trace_.decisions.push_back(c);
              return eval(c ? *x.then_e : *x.else_e);
            },
            [&](const ex::Assert& x) -> Value {
              if (!eval(*x.cond).as<bool>())
                throw Stuck(Stuck::Kind::AssertFailed,
                            "assert guard is false at " + std::to_string(e.loc.line));
              return eval(*x.body);
            },
            [&](const ex::Op& x) -> Value { return op(x); },
            [&](const ex::Cake&) -> Value { return interval(0, 1); },
            [&](const ex::Divide& x) -> Value {
              Interval i = eval(*x.interval).as<Interval>();
              Rational r = eval(*x.at).as<PointVal>().at;
              if (r < i.lo || r > i.hi)
                throw Stuck(Stuck::Kind::DivideOutOfRange,
                            "divide point " + to_string(r) + " outside [" + to_string(i.lo) +
                                ", " + to_string(i.hi) + "]");
              return tuple({interval(i.lo, r), interval(r, i.hi)});
            },
            [&](const ex::Piece& x) -> Value {
              PieceVal p;
              for (const auto& c : x.parts) p.parts.push_back(eval(*c).as<Interval>());
              return p;
            },
            [&](const ex::Mark& x) -> Value { return mark(x); },
            [&](const ex::Eval& x) -> Value {
              Value s = eval(*x.subject);
              return VltnVal{{VltnTerm{1, x.agent, region_of(s)}}};
            },
        },
        e.node);
  }

  Value op(const ex::Op& x) {
    std::vector<Value> a;
    for (const auto& c : x.args) a.push_back(unread(eval(*c)));
    auto num = [&](const Value& v) {
      return v.is<PointVal>() ? v.as<PointVal>().at : vltn_number(v.as<VltnVal>(), vs_);
    };
    switch (x.op) {
      case OpKind::And: return a[0].as<bool>() && a[1].as<bool>();
      case OpKind::Or: return a[0].as<bool>() || a[1].as<bool>();
      case OpKind::Not: return !a[0].as<bool>();
      case OpKind::Geq: return num(a[0]) >= num(a[1]);
      case OpKind::Eq: return num(a[0]) == num(a[1]);
      case OpKind::Add: {
        VltnVal s = a[0].as<VltnVal>();
        for (const auto& t : a[1].as<VltnVal>().terms) s.terms.push_back(t);
        return s;
      }
      case OpKind::Scale: {
        VltnVal s = a[0].as<VltnVal>();
        for (auto& t : s.terms) t.coeff *= x.scalar;
        return s;
      }
    }
    throw std::logic_error("unknown operator");
  }

  Value mark(const ex::Mark& x) {
    Interval i = unread(eval(*x.interval)).as<Interval>();
    Rational target = vltn_number(eval(*x.target).as<VltnVal>(), vs_);
    const AnyValuation& v = vs_.at(x.agent);
    Rational r;
    if (opt_.replay && opt_.replay->count(x.id)) {
      r = opt_.replay->at(x.id);
      Rational got = val_eval(v, Interval{i.lo, r});
      if (r < i.lo || got != target)
        throw Stuck(Stuck::Kind::ReplayInvalid,
                    "replayed mark #" + std::to_string(x.id) + " = " + to_string(r) +
                        " gives " + to_string(got) + ", expected " + to_string(target));
    } else {
      try {
        r = val_mark(v, i.lo, i.hi, target);
      } catch (const ValuationError& err) {
        throw Stuck(err.kind == ValuationError::Kind::IrrationalMark
                        ? Stuck::Kind::IrrationalMark
                        : Stuck::Kind::MarkInfeasible,
                    err.what());
      }
    }
    trace_.mark_answers[x.id] = r;
    return point(r);
  }

  const ValuationSet& vs_;
  const EvalOptions& opt_;
  std::vector<std::pair<std::string, Value>> env_;
  EvalTrace trace_;
  std::set<Rational> points_;
};

}  // namespace

RunResult evaluate(const Expr& e, const ValuationSet& vs, const EvalOptions& opt) {
  Evaluator ev(vs, opt);
  return ev.run(e);
}

std::vector<PieceVal> allocation_pieces(const Value& allocation) {
  std::vector<PieceVal> out;
  const Value& a = unread(allocation);
  if (a.is<PieceVal>()) {
    out.push_back(a.as<PieceVal>());
    return out;
  }
  for (const auto& c : a.as<TupleVal>().elems) out.push_back(unread(c).as<PieceVal>());
  return out;
}

EnvyCheck check_envy_free(const Value& allocation, const ValuationSet& vs) {
  auto pieces = allocation_pieces(allocation);
  for (AgentId a = 1; a <= static_cast<int>(pieces.size()); ++a) {
    Rational own = val_eval(vs, a, pieces[a - 1]);
    for (AgentId b = 1; b <= static_cast<int>(pieces.size()); ++b) {
      Rational other = val_eval(vs, a, pieces[b - 1]);
      if (other > own) return {false, a, b, own, other};
    }
  }
  return {};
}

}  // namespace slice
