// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "slice/interp.hpp"
#include "slice/logic.hpp"
#include "slice/paths.hpp"
#include "slice/smt.hpp"
#include "slice/typecheck.hpp"
#include "slice/verify.hpp"
#include "../generators.hpp"
#include "../support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

using namespace slice;
using namespace slice::testing;
namespace L = slice::logic;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects the first few problems of a criterion; any problem fails it.
struct Check {
  std::vector<std::string> problems;
  std::ostringstream info;
  void fail(const std::string& what) {
    if (problems.size() < 5) problems.push_back(what);
    else if (problems.size() == 5) problems.push_back("...");
  }
};

int failures = 0;

void criterion(int n, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.fail(std::string("exception: ") + e.what());
  }
  double took = since(t0);
  if (budget_s > 0 && took > budget_s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "over budget: %.1fs > %.0fs", took, budget_s);
    c.fail(buf);
  }
  bool ok = c.problems.empty();
  if (!ok) ++failures;
  std::printf("criterion %d: %s (%.2fs) %s\n", n, ok ? "PASS" : "FAIL", took, c.info.str().c_str());
  for (const auto& p : c.problems) std::printf("    %s\n", p.c_str());
  std::fflush(stdout);
}

std::string str(const Rational& r) { return to_string(r); }

// Envy of a over b recomputed from the valuations.
std::pair<Rational, Rational> values_of(const Value& alloc, const ValuationSet& vs, AgentId a, AgentId b) {
  auto ps = allocation_pieces(alloc);
  return {val_eval(vs, a, ps.at(a - 1)), val_eval(vs, a, ps.at(b - 1))};
}

// Pairwise check with no sorting: closed intervals may share an endpoint.
bool pairwise_disjoint(const IntervalList& l) {
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = i + 1; j < l.size(); ++j)
      if (std::max(l[i].lo, l[j].lo) < std::min(l[i].hi, l[j].hi)) return false;
  return true;
}

std::vector<Rational> random_points(Rng& rng, int max_n) {
  std::vector<Rational> m;
  int n = static_cast<int>(rng() % (max_n + 1));
  for (int i = 0; i < n; ++i) m.push_back(random_unit(rng, 12));
  return m;
}

}  // namespace

int main() {
  const std::vector<std::string> correct = correct_protocols();
  const std::vector<std::string> buggy = buggy_protocols();
  const std::vector<std::string> everything = all_protocols();
  std::map<std::string, SourceFile> src;
  for (const auto& name : everything) src.emplace(name, load_corpus(name));

  criterion(1, 0, [&](Check& c) {
    auto bad = load_corpus("ill_typed/surplus_divides_twice.slice");
    try {
      typecheck(*bad.body);
      c.fail("divide-twice surplus typechecked");
    } catch (const TypeError& e) {
      if (e.kind != TypeErrorKind::AffineViolation || e.variable != "p")
        c.fail("wrong error: " + to_string(e.kind) + " on " + e.variable);
    }
    auto good = typecheck(*src.at("surplus.slice").body);
    if (to_string(good) != "(Piece * Piece)") c.fail("surplus type " + to_string(good));
    double worst = 0;
    for (const auto& name : correct) {
      auto t0 = Clock::now();
      auto ty = typecheck(*src.at(name).body);
      auto v = check_wellformed(*src.at(name).body, src.at(name).agents);
      double took = since(t0);
      worst = std::max(worst, took);
      if (ty != allocation_type(src.at(name).agents)) c.fail(name + " has type " + to_string(ty));
      if (!v.empty()) c.fail(name + ": " + v[0].message);
      if (took >= 1) c.fail(name + " typecheck took " + std::to_string(took) + "s");
    }
    c.info << "surplus: " << to_string(good) << ", slowest typecheck " << worst << "s";
  });

  criterion(2, 0, [&](Check& c) {
    const std::vector<std::pair<std::string, std::uint64_t>> want = {
        {"cut_choose.slice", 2},
        {"surplus.slice", 2},
        {"waste_makes_haste_3.slice", 24},
        {"selfridge_conway_surplus.slice", 216},
        {"selfridge_conway_full.slice", 1800}};
    for (const auto& [name, n] : want) {
      auto got = path_count(*src.at(name).body);
      std::uint64_t listed = 0;
      for_each_path(src.at(name).body, [&](const Path&) { return ++listed, true; });
      c.info << got << " ";
      if (got != n || listed != n)
        c.fail(name + ": counted " + std::to_string(got) + ", listed " + std::to_string(listed));
    }
  });

  criterion(3, 0, [&](Check& c) {
    const std::map<std::string, double> budget = {{"cut_choose.slice", 10},
                                                  {"surplus.slice", 10},
                                                  {"waste_makes_haste_3.slice", 60},
                                                  {"selfridge_conway_surplus.slice", 300},
                                                  {"selfridge_conway_full.slice", 1800}};
    for (const auto& name : correct) {
      auto t0 = Clock::now();
      auto r = verify_protocol(src.at(name));
      double took = since(t0);
      c.info << name.substr(0, name.find('.')) << "=" << to_string(r.verdict) << "/" << took << "s ";
      if (r.verdict != Verdict::Valid) c.fail(name + ": " + to_string(r.verdict) + " " + r.reason);
      if (took >= budget.at(name)) c.fail(name + " over its budget");
    }
  });

  criterion(4, 120, [&](Check& c) {
    int exact = 0;
    for (const auto& name : buggy) {
      const auto& s = src.at(name);
      auto r = verify_protocol(s);
      if (r.verdict != Verdict::Invalid || !r.counterexample) {
        c.fail(name + ": " + to_string(r.verdict) + " " + r.reason);
        continue;
      }
      const auto& cex = *r.counterexample;
      EvalOptions opt;
      opt.replay = &cex.mark_table;
      auto run = evaluate(*s.body, cex.valuations, opt);
      auto [own, other] = values_of(run.value, cex.valuations, cex.witness.envier, cex.witness.envied);
      if (!(other > own)) c.fail(name + ": replay shows no envy");
      else if (own != cex.witness.own || other != cex.witness.other)
        c.fail(name + ": replay gives " + str(own) + " < " + str(other) + ", report says " +
               str(cex.witness.own) + " < " + str(cex.witness.other));
      else
        ++exact;
    }
    c.info << exact << "/" << buggy.size() << " counterexamples replay exactly";
  });

  criterion(5, 60, [&](Check& c) {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      int agents = 1 + static_cast<int>(rng() % 3);
      auto v = random_valuation_set(rng, agents, 4, rng() % 2 == 0);
      auto m = random_points(rng, 6);
      auto u = construct_agreeing_pu(v, m);
      if (!agree_exhaustively(u, v, m)) c.fail("disagreement on set " + std::to_string(i));
      if (!easily_replaceable_check(u, m)) c.fail("not easily replaceable on set " + std::to_string(i));
    }
    c.info << "200 sets";
  });

  criterion(6, 60, [&](Check& c) {
    Rng rng(6);
    int flips = 0;
    for (int i = 0; i < 500; ++i) {
      int agents = 1 + static_cast<int>(rng() % 3);
      auto tr = compatible_triple(rng, 4, agents);
      if (!L::holds(L::psi(tr.s, agents), tr.u, tr.alpha)) c.fail("triple " + std::to_string(i) + " not compatible");
      auto f = simplified_formula(rng, tr.s.order, agents, 3);
      if (L::holds(f, tr.u, tr.alpha) != L::holds(L::apply_replacement(tr.s, f), tr.u, tr.alpha)) {
        ++flips;
        c.fail("truth changed: " + L::to_string(f) + " under " + L::to_string(tr.s));
      }
    }
    c.info << "500 triples, " << flips << " changed";
  });

  criterion(7, 120, [&](Check& c) {
    Rng rng(7);
    int runs = 0, draws = 0;
    while (runs < 100 && draws < 1000) {
      ++draws;
      const auto& s = src.at(everything[rng() % everything.size()]);
      auto v = random_valuation_set(rng, s.agents, 4, rng() % 2 == 0);
      RunResult run;
      try {
        run = evaluate(*s.body, v);
      } catch (const Stuck&) {
        continue;  // irrational mark under a sloped density
      }
      auto u = construct_agreeing_pu(v, run.trace.points);
      EvalOptions opt;
      opt.replay = &run.trace.mark_answers;
      auto again = evaluate(*s.body, u, opt);
      if (again.value != run.value) c.fail("run " + std::to_string(runs) + " changed value");
      ++runs;
    }
    if (runs < 100) c.fail("only " + std::to_string(runs) + " runs completed");

    for (int i = 0; i < 200; ++i) {
      int agents = 1 + static_cast<int>(rng() % 3);
      L::Assignment alpha;
      std::vector<L::PointRef> pts = {L::kZero, L::kOne};
      int k = static_cast<int>(rng() % 4);
      for (int y = 0; y < k; ++y) {
        alpha.y[y] = random_unit(rng, 12);
        pts.push_back(y);
      }
      auto f = simplified_formula(rng, pts, agents, 3);
      auto v = random_valuation_set(rng, agents, 4, rng() % 2 == 0);
      auto u = construct_agreeing_pu(v, L::formula_points(f, alpha));
      if (L::holds(f, v, alpha) != L::holds(f, u, alpha)) c.fail("formula changed: " + L::to_string(f));
    }
    c.info << runs << " runs, 200 formulas";
  });

  criterion(8, 120, [&](Check& c) {
    Rng rng(8);
    int checked = 0;
    for (const auto& name : everything) {
      const auto& s = src.at(name);
      for (int i = 0; i < 100; ++i) {
        auto v = random_pu_set(rng, s.agents, 3);
        auto run = evaluate(*s.body, v);
        auto b = path_at(s.body, select_path(*s.body, run.trace.decisions));
        auto tr = L::translate(*b.expr);
        L::Assignment alpha;
        alpha.y = run.trace.mark_answers;
        if (!L::holds(tr.c, v, alpha)) c.fail(name + ": c(b) fails on run " + std::to_string(i));
        if (L::value_of(tr.rho, v, alpha) != unread(run.value))
          c.fail(name + ": rho(b) differs on run " + std::to_string(i));
        ++checked;
      }
    }
    c.info << checked << " runs over " << everything.size() << " protocols";
  });

  criterion(9, 60, [&](Check& c) {
    Rng rng(9);
    int runs = 0, draws = 0;
    while (runs < 1000 && draws < 5000) {
      ++draws;
      const auto& s = src.at(everything[rng() % everything.size()]);
      auto v = rng() % 2 ? random_pu_set(rng, s.agents, 3) : random_valuation_set(rng, s.agents, 4, true);
      RunResult run;
      try {
        run = evaluate(*s.body, v);
      } catch (const Stuck&) {
        continue;
      }
      if (!pairwise_disjoint(interval_list(run.value))) c.fail("overlap in run " + std::to_string(runs));
      ++runs;
    }
    if (runs < 1000) c.fail("only " + std::to_string(runs) + " runs completed");
    c.info << runs << " runs";
  });

  criterion(10, 0, [&](Check& c) {
    const std::vector<std::string> z3 = {"z3", "-in"};
    std::size_t scripts = 0;
    for (const auto& name : everything) {
      const auto& s = src.at(name);
      for_each_path(s.body, [&](const Path& p) {
        auto pf = L::path_formulas(*p.expr, s.agents);
        for (const auto& rep : L::enumerate_replacements(pf.ys, pf.c)) {
          auto vc = L::build_vc(pf, rep, s.agents);
          if (!L::is_linear(vc.hyp) || !L::is_linear(vc.goal))
            c.fail(name + " path " + std::to_string(p.index) + ": nonlinear VC");
          auto r = smt::check_script(z3, smt::emit_smt(vc, rep, s.agents), {}, std::chrono::seconds(60));
          if (r.status == smt::CheckResult::Status::Error || r.status == smt::CheckResult::Status::Unknown)
            c.fail(name + " path " + std::to_string(p.index) + ": " + r.reason);
          for (const auto& d : r.diagnostics) c.fail(name + " path " + std::to_string(p.index) + ": " + d);
          ++scripts;
        }
        return true;
      });
    }
    c.info << scripts << " scripts";
  });

  return failures == 0 ? 0 : 1;
}
