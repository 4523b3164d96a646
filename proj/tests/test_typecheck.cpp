#include "slice/interp.hpp"
#include "slice/paths.hpp"
#include "slice/syntax.hpp"
#include "slice/typecheck.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace slice;
using slice::testing::load_corpus;
using K = SliceType::Kind;

namespace {

TypeError type_error_of(const std::string& text) {
  try {
    typecheck(*parse_expr(text));
  } catch (const TypeError& e) {
    return e;
  }
  ADD_FAILURE() << "no type error for " << text;
  return TypeError(TypeErrorKind::UnboundVariable, "");
}

}  // namespace

TEST(Typecheck, CutChooseAllocatesTwoPieces) {
  auto t = typecheck(*load_corpus("cut_choose.slice").body);
  EXPECT_EQ(t, SliceType::product({SliceType::base(K::Piece), SliceType::base(K::Piece)}));
}

TEST(Typecheck, SurplusDividingTheCakeTwiceIsRejected) {
  auto src = load_corpus("ill_typed/surplus_divides_twice.slice");
  try {
    typecheck(*src.body);
    FAIL();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.kind, TypeErrorKind::AffineViolation);
    EXPECT_EQ(e.variable, "p");
    ASSERT_EQ(e.sites.size(), 2u);
    EXPECT_EQ(e.sites[0].line, 8);
    EXPECT_EQ(e.sites[1].line, 9);
  }
  EXPECT_EQ(typecheck(*load_corpus("surplus.slice").body), allocation_type(2));
}

TEST(Typecheck, Errors) {
  auto e = type_error_of("let p = split cake in (piece(p), piece(p))");
  EXPECT_EQ(e.kind, TypeErrorKind::AffineViolation);
  EXPECT_EQ(e.variable, "p");
  EXPECT_EQ(type_error_of("let p = split cake in divide(@p, 0#Pt)").kind, TypeErrorKind::ReadOnlyMisuse);
  EXPECT_EQ(type_error_of("let p = split cake in piece(@p)").kind, TypeErrorKind::ReadOnlyMisuse);
  EXPECT_EQ(type_error_of("piece(q)").kind, TypeErrorKind::UnboundVariable);
  EXPECT_EQ(type_error_of("let a, b, c = split divide(cake, 0#Pt) in a").kind, TypeErrorKind::ArityMismatch);
  EXPECT_EQ(type_error_of("true >= false").kind, TypeErrorKind::OperatorSignatureMismatch);
  // @x looks only in the affine context, where a point binder never lands.
  EXPECT_EQ(type_error_of("let m = split 0#Pt in @m").kind, TypeErrorKind::UnboundVariable);
}

TEST(Typecheck, BranchesShareTheContext) {
  // Each branch may consume p once.
  auto t = typecheck(*parse_expr("let p = split cake in if true then piece(p) else piece(p)"));
  EXPECT_EQ(t, SliceType::base(K::Piece));
  // Unused affine variables are fine.
  EXPECT_EQ(typecheck(*parse_expr("let a, b = split divide(cake, 0#Pt) in piece(a)")),
            SliceType::base(K::Piece));
  // Read-only twins can be used any number of times next to the real one.
  EXPECT_EQ(typecheck(*parse_expr("let p = split cake in (eval[1](@p) >= eval[1](@p), piece(p))")),
            SliceType::product({SliceType::base(K::Bool), SliceType::base(K::Piece)}));
}

TEST(Wellformed, CorpusIsWellFormed) {
  for (const auto& name : slice::testing::all_protocols()) {
    auto src = load_corpus(name);
    EXPECT_TRUE(check_wellformed(*src.body, src.agents).empty()) << name;
  }
}

TEST(Wellformed, Violations) {
  auto has = [](const std::vector<Violation>& v, const std::string& needle) {
    for (const auto& x : v)
      if (x.kind.find(needle) != std::string::npos || x.message.find(needle) != std::string::npos)
        return true;
    return false;
  };
  auto v = check_wellformed(*parse_expr("let a, b = split divide(cake, 1/3#Pt) in (piece(a), piece(b))"), 2);
  EXPECT_TRUE(has(v, "forbidden point constant"));
  v = check_wellformed(*parse_expr("(piece(cake), piece(cake))"), 2);
  EXPECT_TRUE(has(v, "not disjoint"));
  v = check_wellformed(*parse_expr("piece(cake)"), 2);
  EXPECT_FALSE(v.empty());  // wrong allocation type
  EXPECT_TRUE(check_wellformed(*parse_expr("piece(cake)"), 1).empty());
}

// Every run ends in a value of the program's static type, and paths keep it.
TEST(Typecheck, RunsAndPathsKeepTheType) {
  Rng rng(3);
  for (const auto& name : {"cut_choose.slice", "surplus.slice", "waste_makes_haste_3.slice",
                           "selfridge_conway_surplus.slice", "bad/scs_agent2_not_forced.slice"}) {
    auto src = load_corpus(name);
    auto type = typecheck(*src.body);
    for (int i = 0; i < 100; ++i) {
      auto vs = i % 2 ? random_pu_set(rng, src.agents, 3) : random_valuation_set(rng, src.agents, 4, true);
      auto run = evaluate(*src.body, vs);
      EXPECT_EQ(type_of_value(run.value), type) << name;
      EXPECT_TRUE(is_disjoint(run.value)) << name;
    }
    if (path_count(*src.body) <= 216)
      for_each_path(src.body, [&](const Path& p) {
        EXPECT_EQ(typecheck(*p.expr), type) << name << " path " << p.index;
        return true;
      });
  }
}
