#include "slice/verify.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace slice;
using slice::testing::load_corpus;
using slice::testing::q;

namespace {

const logic::Replacement kOneMark{{logic::kZero, 0, logic::kOne}};

// Envy recomputed from the valuations alone.
bool someone_envies(const Value& alloc, const ValuationSet& vs) {
  auto ps = allocation_pieces(alloc);
  for (AgentId a = 1; a <= static_cast<AgentId>(ps.size()); ++a)
    for (AgentId b = 1; b <= static_cast<AgentId>(ps.size()); ++b)
      if (val_eval(vs, a, ps[b - 1]) > val_eval(vs, a, ps[a - 1])) return true;
  return false;
}

}  // namespace

TEST(Extract, ValuationSetFromModel) {
  std::map<std::string, Rational> model = {
      {"y#0", q(1, 2)}, {"z#1#0", q(1, 4)}, {"z#1#one", q(1, 2)}, {"z#2#0", q(0)}, {"z#2#one", q(3, 4)}};
  auto vs = extract_valuation_set(model, kOneMark, 2);
  ASSERT_EQ(vs.size(), 2u);
  // Agent 1: [1/4, 1/2] and [1/2, 1], density 4/3.
  EXPECT_EQ(val_eval(vs, 1, PieceVal{{{q(0), q(1, 4)}}}), q(0));
  EXPECT_EQ(val_eval(vs, 1, PieceVal{{{q(1, 4), q(1, 2)}}}), q(1, 3));
  EXPECT_EQ(val_eval(vs, 1, PieceVal{{{q(3, 4), q(1)}}}), q(1, 3));
  // Agent 2: [0, 1/2] and [3/4, 1], density 4/3.
  EXPECT_EQ(val_eval(vs, 2, PieceVal{{{q(0), q(1, 3)}}}), q(4, 9));
  EXPECT_EQ(val_eval(vs, 2, PieceVal{{{q(1, 2), q(3, 4)}}}), q(0));
  EXPECT_EQ(val_eval(vs, 2, PieceVal{{{q(3, 4), q(1)}}}), q(1, 3));
  auto alpha = assignment_from_model(model, kOneMark, 2);
  EXPECT_EQ(alpha.y.at(0), q(1, 2));
  EXPECT_EQ(alpha.z.at({2, logic::kOne}), q(3, 4));
  // Unequal masses break psi and are refused.
  model["z#2#one"] = q(1, 2);
  EXPECT_THROW(extract_valuation_set(model, kOneMark, 2), std::exception);
}

TEST(Verify, CutChooseIsValid) {
  auto r = verify_protocol(load_corpus("cut_choose.slice"));
  EXPECT_EQ(r.verdict, Verdict::Valid) << r.reason;
  EXPECT_EQ(r.paths, 2u);
  EXPECT_EQ(r.nonlinear_vcs, 0u);
  EXPECT_EQ(r.solver_warnings, 0u);
}

TEST(Verify, BuggyCutChooseIsInvalidAndReplays) {
  auto src = load_corpus("bad/cut_choose_wrong_branch.slice");
  auto r = verify_protocol(src);
  ASSERT_EQ(r.verdict, Verdict::Invalid);
  ASSERT_TRUE(r.counterexample);
  const auto& cex = *r.counterexample;
  EvalOptions opt;
  opt.replay = &cex.mark_table;
  auto run = evaluate(*src.body, cex.valuations, opt);
  EXPECT_EQ(run.value, cex.allocation);
  EXPECT_TRUE(someone_envies(run.value, cex.valuations));
  const auto& w = cex.witness;
  EXPECT_FALSE(w.envy_free);
  EXPECT_LT(w.own, w.other);
}

TEST(Verify, GreedyProtocolHasPlainWitness) {
  auto src = parse_source("agents 2;\nlet p = split cake in (piece(p), piece())");
  auto r = verify_protocol(src);
  ASSERT_EQ(r.verdict, Verdict::Invalid);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(r.counterexample->witness.envier, 2);
  EXPECT_EQ(r.counterexample->witness.envied, 1);
  EXPECT_EQ(r.counterexample->witness.own, 0);
  EXPECT_EQ(r.counterexample->witness.other, 1);
}

TEST(Verify, IllFormedIsRejectedBeforeSolving) {
  auto r = verify_protocol(load_corpus("ill_typed/surplus_divides_twice.slice"));
  EXPECT_EQ(r.verdict, Verdict::IllFormed);
  EXPECT_FALSE(r.violations.empty());
  EXPECT_EQ(r.queries, 0u);
}

TEST(Verify, MissingSolverIsAnError) {
  VerifyOptions opt;
  opt.solver = {"/nonexistent/solver"};
  auto r = verify_protocol(load_corpus("cut_choose.slice"), opt);
  EXPECT_EQ(r.verdict, Verdict::SolverError);
}

TEST(Verify, ParallelAgreesWithSerial) {
  VerifyOptions opt;
  opt.jobs = 4;
  EXPECT_EQ(verify_protocol(load_corpus("selfridge_conway_surplus.slice"), opt).verdict, Verdict::Valid);
  auto bad = verify_protocol(load_corpus("bad/scs_agent2_not_forced.slice"), opt);
  auto serial = verify_protocol(load_corpus("bad/scs_agent2_not_forced.slice"));
  ASSERT_EQ(bad.verdict, Verdict::Invalid);
  EXPECT_EQ(bad.failing_path, serial.failing_path);
}

TEST(Counterexample, JsonRoundTrip) {
  auto src = load_corpus("bad/surplus_unsafe_trim.slice");
  auto r = verify_protocol(src);
  ASSERT_TRUE(r.counterexample);
  auto j = to_json(*r.counterexample);
  auto back = counterexample_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.path_index, r.counterexample->path_index);
  EXPECT_EQ(back.replacement, r.counterexample->replacement);
  EXPECT_EQ(back.mark_table, r.counterexample->mark_table);
  EXPECT_EQ(back.allocation, r.counterexample->allocation);
  auto again = replay(*src.body, back.valuations, back.mark_table);
  EXPECT_TRUE(again.ok) << again.error;
  EXPECT_EQ(to_json(back).dump(), j.dump());
}
