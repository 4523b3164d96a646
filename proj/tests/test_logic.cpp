#include "slice/interp.hpp"
#include "slice/logic.hpp"
#include "slice/paths.hpp"
#include "slice/syntax.hpp"
#include "generators.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace slice;
using namespace slice::logic;
using slice::testing::load_corpus;
using slice::testing::q;

namespace {

const char* kCutChoosePath =
    "let p = split cake in\n"
    "let p1, p2 = split divide(p, mark[1](@p, 1/2 * eval[1](@p))) in\n"
    "assert eval[2](@p1) >= eval[2](@p2) in (piece(p2), piece(p1))";

ExprPtr cut_choose_path() { return assign_mark_ids(parse_expr(kCutChoosePath, 2)); }

std::vector<std::string> conjuncts(const FormulaPtr& f) {
  std::vector<std::string> out;
  if (f->kind == FormulaKind::And)
    for (const auto& g : f->args) out.push_back(to_string(g));
  else
    out.push_back(to_string(f));
  std::sort(out.begin(), out.end());
  return out;
}

// lhs - rhs as a linear expression.
LinExpr difference(const FormulaPtr& atom) {
  auto l = linearize(atom->lhs), r = linearize(atom->rhs);
  EXPECT_TRUE(l && r) << to_string(atom);
  LinExpr d = *l;
  for (const auto& [v, c] : r->coeffs) {
    d.coeffs[v] -= c;
    if (d.coeffs[v] == 0) d.coeffs.erase(v);
  }
  d.constant -= r->constant;
  return d;
}

bool same_linear(const LinExpr& a, const LinExpr& b) { return a.coeffs == b.coeffs && a.constant == b.constant; }

LinExpr lin(std::map<std::string, Rational> coeffs, Rational constant = 0) { return {std::move(coeffs), constant}; }

const Replacement kOneMark{{kZero, 0, kOne}};

}  // namespace

TEST(Translate, CutChoosePathConstraintAndResult) {
  auto pf = path_formulas(*cut_choose_path(), 2);
  auto y = t::y(0);
  auto expect_rho = t::tuple({t::piece({t::interval(y, t::pt(1))}), t::piece({t::interval(t::pt(0), y)})});
  EXPECT_EQ(to_string(pf.rho), to_string(expect_rho));
  EXPECT_EQ(to_string(pf.rho), "(U([y#0, 1]), U([0, y#0]))");

  auto mark = f::eq(t::val(1, t::interval(t::pt(0), y)), t::scale(q(1, 2), t::val(1, t::interval(t::pt(0), t::pt(1)))));
  auto guard = f::geq(t::val(2, t::interval(t::pt(0), y)), t::val(2, t::interval(y, t::pt(1))));
  // The divide adds its two bounds next to the mark and the guard.
  auto expect = f::and_({mark, f::geq(y, t::pt(0)), f::geq(t::pt(1), y), guard});
  EXPECT_EQ(conjuncts(pf.c), conjuncts(expect));
  EXPECT_EQ(pf.ys, (std::vector<MarkId>{0}));
}

TEST(Translate, SmallCases) {
  auto tr = translate(*parse_expr("cake"));
  EXPECT_EQ(to_string(tr.rho), "[0, 1]");
  EXPECT_EQ(to_string(simplify(tr.c)), "true");
  tr = translate(*parse_expr("(1/2#Pt, rd([0, 1/4]))"));
  EXPECT_EQ(to_string(tr.rho), "(1/2, [0, 1/4])");
  tr = translate(*parse_expr("divide(cake, 0#Pt)"));
  EXPECT_EQ(to_string(simplify(tr.rho)), "([0, 0], [0, 1])");
  EXPECT_EQ(conjuncts(simplify(tr.c)), (std::vector<std::string>{"0 >= 0", "1 >= 0"}));
  // Unsimplified, the endpoints are still selectors over the cake.
  EXPECT_EQ(to_string(translate(*parse_expr("divide(cake, mark[1#0](rd([0, 1]), 0#Pt))")).rho),
            "([l([0, 1]), y#0], [y#0, r([0, 1])])");
}

TEST(Simplify, Examples) {
  auto y = t::y(0);
  auto pair = t::tuple({t::piece({t::interval(y, t::pt(1))}), t::piece({t::interval(t::pt(0), y)})});
  EXPECT_EQ(to_string(simplify(t::proj(2, pair))), "U([0, y#0])");
  EXPECT_EQ(to_string(simplify(t::left(t::interval(t::pt(0), y)))), "0");
  EXPECT_EQ(to_string(simplify(t::right(t::proj(1, t::tuple({t::interval(t::pt(0), y)}))))), "y#0");
  // Boolean terms under "= true" become formulas.
  auto b = f::is_true(t::op(TermKind::Not, {t::op(TermKind::Geq, {t::num(1), t::num(2)})}));
  EXPECT_EQ(to_string(simplify(b)), "not 1 >= 2");
  EXPECT_EQ(to_string(simplify(f::is_true(t::boolean(false)))), "false");
  EXPECT_EQ(simplify(f::and_({f::truth(), f::is_true(t::boolean(false))}))->kind, FormulaKind::False);
}

TEST(Simplify, KeepsTruthOnRandomFormulas) {
  Rng rng(21);
  std::vector<PointRef> pts = {kZero, kOne, 0, 1, 2};
  for (int i = 0; i < 300; ++i) {
    // Wrap random simplified material in projections and endpoint selectors.
    auto f0 = slice::testing::simplified_formula(rng, pts, 2, 2);
    auto wrap = [&](const TermPtr& x) { return t::proj(2, t::tuple({t::pt(0), x})); };
    auto iv = t::interval(t::y(0), t::y(1));
    auto extra = f::geq(t::left(wrap(iv)), t::right(t::proj(1, t::tuple({iv, t::pt(1)}))));
    auto f = f::and_({f::or_({f0, extra}), f::is_true(t::op(TermKind::Geq, {wrap(t::y(2)), t::y(0)}))});
    Assignment alpha;
    for (MarkId k : {0, 1, 2}) alpha.y[k] = random_unit(rng);
    auto vs = random_pu_set(rng, 2, 3);
    EXPECT_EQ(holds(f, vs, alpha), holds(simplify(f), vs, alpha)) << to_string(f);
  }
}

TEST(Envy, ConjunctCounts) {
  auto x2 = t::tuple({t::piece({}), t::piece({})});
  EXPECT_EQ(envy(x2, 2)->args.size(), 4u);
  auto x3 = t::tuple({t::piece({}), t::piece({}), t::piece({})});
  EXPECT_EQ(envy(x3, 3)->args.size(), 9u);
}

TEST(Replacements, Enumeration) {
  EXPECT_EQ(enumerate_replacements({}), (std::vector<Replacement>{{{kZero, kOne}}}));
  EXPECT_EQ(enumerate_replacements({4}), (std::vector<Replacement>{{{kZero, 4, kOne}}}));
  EXPECT_EQ(enumerate_replacements({1, 2}),
            (std::vector<Replacement>{{{kZero, 1, 2, kOne}}, {{kZero, 2, 1, kOne}}}));
  EXPECT_EQ(enumerate_replacements({0, 1, 2, 3}).size(), 24u);
}

TEST(Replacements, PruningKeepsOrdersAllowedByTheConstraint) {
  auto y0 = t::y(0), y1 = t::y(1), y2 = t::y(2);
  // y0 <= y1 and y2 unconstrained: 3 of the 6 orders survive.
  auto c = f::and_({f::geq(y1, y0), f::geq(t::val(1, t::interval(y0, y2)), t::num(0))});
  auto kept = enumerate_replacements({0, 1, 2}, c);
  EXPECT_EQ(kept.size(), 3u);
  for (const auto& s : kept) {
    auto at = [&](PointRef p) { return std::find(s.order.begin(), s.order.end(), p) - s.order.begin(); };
    EXPECT_LT(at(0), at(1));
  }
  // Forced equal: both orders stay.
  EXPECT_EQ(enumerate_replacements({0, 1}, f::eq(y0, y1)).size(), 2u);
  EXPECT_TRUE(enumerate_replacements({0}, f::falsity()).empty());
  // A chain pins the order down completely.
  auto chain = f::and_({f::geq(y1, y0), f::geq(y2, y1)});
  EXPECT_EQ(enumerate_replacements({0, 1, 2}, chain), (std::vector<Replacement>{{{kZero, 0, 1, 2, kOne}}}));
}

TEST(Replacements, ApplyOnIntervals) {
  auto y = t::y(0);
  auto a = apply_replacement(kOneMark, t::val(1, t::interval(t::pt(0), y)));
  EXPECT_TRUE(same_linear(*linearize(a), lin({{"y#0", 1}, {"z#1#0", -1}})));
  auto b = apply_replacement(kOneMark, t::val(2, t::interval(y, t::pt(1))));
  EXPECT_TRUE(same_linear(*linearize(b), lin({{"z#2#one", -1}}, 1)));
  EXPECT_EQ(to_string(apply_replacement(kOneMark, t::val(1, t::interval(y, y)))), "0");
  // Reversed windows are empty too.
  EXPECT_EQ(to_string(apply_replacement(kOneMark, t::val(1, t::interval(t::pt(1), y)))), "0");
  // A piece sums the windows of its parts.
  auto whole = apply_replacement(kOneMark, t::val(1, t::piece({t::interval(t::pt(0), y), t::interval(y, t::pt(1))})));
  EXPECT_TRUE(same_linear(*linearize(whole), lin({{"y#0", 1}, {"z#1#0", -1}, {"z#1#one", -1}}, 1)));
  try {
    apply_replacement(kOneMark, t::val(1, t::interval(t::pt(0), t::y(5))));
    FAIL();
  } catch (const LogicError& e) {
    EXPECT_EQ(e.kind, LogicError::Kind::PointAtomNotInS);
  }
  EXPECT_THROW(apply_replacement(kOneMark, t::val(1, t::interval(t::pt(0), t::pt(q(1, 2))))), LogicError);
}

TEST(Replacements, CutChoosePathUnderOneMark) {
  auto pf = path_formulas(*cut_choose_path(), 2);
  auto sc = apply_replacement(kOneMark, pf.c);
  ASSERT_EQ(sc->kind, FormulaKind::And);
  // y - z1y = 1/2 (y - z1y + 1 - z11), as lhs - rhs
  auto mark_diff = lin({{"y#0", q(1, 2)}, {"z#1#0", q(-1, 2)}, {"z#1#one", q(1, 2)}}, q(-1, 2));
  // y - z2y >= 1 - z21
  auto guard_diff = lin({{"y#0", 1}, {"z#2#0", -1}, {"z#2#one", 1}}, -1);
  int mark_seen = 0, guard_seen = 0;
  for (const auto& g : sc->args) {
    if (g->kind == FormulaKind::Eq && same_linear(difference(g), mark_diff)) ++mark_seen;
    if (g->kind == FormulaKind::Geq && same_linear(difference(g), guard_diff)) ++guard_seen;
  }
  EXPECT_EQ(mark_seen, 1);
  EXPECT_EQ(guard_seen, 1);

  // Envy-freeness: agent 2 keeps [0, y], agent 1 keeps [y, 1].
  auto goal = apply_replacement(kOneMark, pf.e);
  std::vector<LinExpr> nontrivial;
  for (const auto& g : goal->kind == FormulaKind::And ? goal->args : std::vector<FormulaPtr>{goal}) {
    ASSERT_EQ(g->kind, FormulaKind::Geq);
    auto d = difference(g);
    if (!d.coeffs.empty() || d.constant != 0) nontrivial.push_back(d);
  }
  ASSERT_EQ(nontrivial.size(), 2u);
  EXPECT_TRUE(same_linear(nontrivial[0], lin({{"y#0", -1}, {"z#1#0", 1}, {"z#1#one", -1}}, 1)));
  EXPECT_TRUE(same_linear(nontrivial[1], guard_diff));
}

TEST(Psi, Semantics) {
  // A compatible assignment for the uniform/ramp pair at d = 2.
  Rational d = 2;
  Assignment alpha;
  alpha.y[0] = q(1, 2);
  alpha.z[{1, 0}] = q(1, 2) - q(1, 2) / d;
  alpha.z[{1, kOne}] = 1 - q(1, 2) / d;
  alpha.z[{2, 0}] = q(1, 2) - q(1, 4) / d;
  alpha.z[{2, kOne}] = 1 - q(3, 4) / d;
  ValuationSet none;
  EXPECT_TRUE(holds(psi(kOneMark, 2), none, alpha));
  auto broken = alpha;
  broken.z[{2, kOne}] = q(1, 4);  // below y: chain fails
  EXPECT_FALSE(holds(psi(kOneMark, 2), none, broken));
  auto unequal = alpha;
  unequal.z[{2, 0}] = q(1, 2);  // agent 2 loses mass: sums differ
  EXPECT_FALSE(holds(psi(kOneMark, 2), none, unequal));
  auto empty = alpha;
  for (AgentId a : {1, 2}) empty.z[{a, 0}] = q(1, 2), empty.z[{a, kOne}] = 1;
  EXPECT_FALSE(holds(psi(kOneMark, 2), none, empty));  // zero support
  // One agent: only the chain and positivity.
  Assignment solo;
  solo.y[0] = q(1, 3);
  solo.z[{1, 0}] = 0;
  solo.z[{1, kOne}] = q(2, 3);
  EXPECT_TRUE(holds(psi(kOneMark, 1), none, solo));
  // Two marks: four z bounds per agent appear.
  auto p = psi(Replacement{{kZero, 0, 1, kOne}}, 1);
  EXPECT_TRUE(is_linear(p));
  std::set<std::string> zs;
  for (const auto& g : p->args)
    if (g->lhs)
      for (const auto& side : {g->lhs, g->rhs})
        if (auto l = linearize(side))
          for (const auto& [v, c] : l->coeffs)
            if (v[0] == 'z') zs.insert(v);
  EXPECT_EQ(zs, (std::set<std::string>{"z#1#0", "z#1#1", "z#1#one"}));
}

TEST(Replacements, KeepTruthOnCompatibleTriples) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    auto tr = slice::testing::compatible_triple(rng, 3, 2 + static_cast<int>(rng() % 2));
    auto f = slice::testing::simplified_formula(rng, tr.s.order, tr.u.size(), 3);
    EXPECT_EQ(holds(f, tr.u, tr.alpha), holds(apply_replacement(tr.s, f), tr.u, tr.alpha))
        << to_string(f) << " under " << to_string(tr.s);
  }
}

TEST(BuildVC, CorpusVCsAreLinear) {
  for (const auto& name : {"cut_choose.slice", "surplus.slice", "waste_makes_haste_3.slice",
                           "selfridge_conway_surplus.slice", "bad/scs_allocates_trimmings.slice"}) {
    auto src = load_corpus(name);
    for_each_path(src.body, [&](const Path& p) {
      auto pf = path_formulas(*p.expr, src.agents);
      for (const auto& s : enumerate_replacements(pf.ys, pf.c)) {
        auto vc = build_vc(pf, s, src.agents);
        EXPECT_TRUE(is_linear(vc.hyp) && is_linear(vc.goal)) << name << " path " << p.index;
      }
      return true;
    });
  }
  EXPECT_FALSE(is_linear(f::geq(t::val(1, t::interval(t::pt(0), t::pt(1))), t::num(0))));
  EXPECT_FALSE(is_linear(f::geq(t::left(t::interval(t::y(0), t::y(1))), t::num(0))));
}

TEST(BuildVC, ImplicationShape) {
  auto vc = build_vc(*cut_choose_path(), kOneMark, 2);
  ASSERT_EQ(vc->kind, FormulaKind::Implies);
  EXPECT_TRUE(is_linear(vc));
}
