#include "slice/verify.hpp"

#include "slice/paths.hpp"
#include "slice/typecheck.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace slice {

using logic::Replacement;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Invalid: return "Invalid";
    case Verdict::Unknown: return "Unknown";
    case Verdict::SolverError: return "SolverError";
    case Verdict::IllFormed: return "IllFormed";
  }
  return "?";
}

logic::Assignment assignment_from_model(const std::map<std::string, Rational>& model,
                                        const Replacement& s, int agents) {
  logic::Assignment alpha;
  auto get = [&](const std::string& name) {
    auto it = model.find(name);
    if (it == model.end())
      throw logic::LogicError(logic::LogicError::Kind::DegenerateModel, "model lacks " + name);
    return it->second;
  };
  for (std::size_t i = 1; i < s.order.size(); ++i) {
    logic::PointRef w = s.order[i];
    if (w >= 0) alpha.y[w] = get(logic::y_name(w));
    for (AgentId a = 1; a <= agents; ++a) alpha.z[{a, w}] = get(logic::z_name(a, w));
  }
  return alpha;
}

ValuationSet extract_valuation_set(const std::map<std::string, Rational>& model,
                                   const Replacement& s, int agents) {
  auto alpha = assignment_from_model(model, s, agents);
  if (!logic::holds(logic::psi(s, agents), ValuationSet{}, alpha))
    throw logic::LogicError(logic::LogicError::Kind::DegenerateModel,
                            "model does not satisfy psi(S)");
  std::vector<AnyValuation> out;
  for (AgentId a = 1; a <= agents; ++a) {
    std::vector<Interval> support;
    for (std::size_t i = 1; i < s.order.size(); ++i) {
      Rational lo = alpha.z.at({a, s.order[i]}), hi = alpha.point(s.order[i]);
      if (lo < hi) support.push_back({lo, hi});
    }
    Rational len = 0;
    for (const auto& i : support) len += i.hi - i.lo;
    if (len == 0)
      throw logic::LogicError(logic::LogicError::Kind::DegenerateModel,
                              "agent " + std::to_string(a) + " has an empty support");
    out.emplace_back(PUValuation(std::move(support)));
  }
  return ValuationSet(std::move(out));
}

ReplayResult replay(const Expr& protocol, const ValuationSet& vs, const MarkTable& marks) {
  ReplayResult r;
  try {
    EvalOptions opt;
    opt.replay = &marks;
    r.run = evaluate(protocol, vs, opt);
    r.witness = check_envy_free(r.run->value, vs);
    r.ok = !r.witness.envy_free;
    if (!r.ok) r.error = "replayed allocation is envy-free";
  } catch (const Stuck& e) {
    r.error = std::string("replay stuck: ") + e.what();
  }
  return r;
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const Counterexample& c) {
  nlohmann::json marks = nlohmann::json::object();
  for (const auto& [id, r] : c.mark_table) marks[std::to_string(id)] = to_string(r);
  nlohmann::json order = nlohmann::json::array();
  for (auto p : c.replacement.order)
    order.push_back(p == logic::kZero ? "0" : p == logic::kOne ? "1" : logic::y_name(p));
  nlohmann::json alloc = nlohmann::json::array();
  for (const auto& piece : allocation_pieces(c.allocation)) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& i : piece.parts) parts.push_back({to_string(i.lo), to_string(i.hi)});
    alloc.push_back(parts);
  }
  return {{"path", c.path_index},
          {"replacement", order},
          {"valuations", slice::to_json(c.valuations)},
          {"marks", marks},
          {"allocation", alloc},
          {"witness",
           {{"envier", c.witness.envier},
            {"envied", c.witness.envied},
            {"own", to_string(c.witness.own)},
            {"other", to_string(c.witness.other)}}}};
}

Counterexample counterexample_from_json(const nlohmann::json& j) {
  Counterexample c;
  c.path_index = j.value("path", std::uint64_t{0});
  if (j.contains("replacement"))
    for (const auto& p : j.at("replacement")) {
      auto s = p.get<std::string>();
      if (s == "0") c.replacement.order.push_back(logic::kZero);
      else if (s == "1") c.replacement.order.push_back(logic::kOne);
      else c.replacement.order.push_back(std::stoi(s.substr(2)));
    }
  c.valuations = valuation_set_from_json(j.at("valuations"));
  for (const auto& [k, v] : j.at("marks").items())
    c.mark_table[std::stoi(k)] = parse_rational(v.get<std::string>());
  if (j.contains("allocation")) {
    std::vector<Value> pieces;
    for (const auto& piece : j.at("allocation")) {
      PieceVal p;
      for (const auto& iv : piece)
        p.parts.push_back({parse_rational(iv.at(0).get<std::string>()), parse_rational(iv.at(1).get<std::string>())});
      pieces.push_back(Value(std::move(p)));
    }
    c.allocation = tuple(std::move(pieces));
  }
  if (j.contains("witness")) {
    const auto& w = j.at("witness");
    c.witness = {false, w.at("envier").get<int>(), w.at("envied").get<int>(),
                 parse_rational(w.at("own").get<std::string>()),
                 parse_rational(w.at("other").get<std::string>())};
  }
  return c;
}

// ---------------------------------------------------------------- verify

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct PathOutcome {
  enum class Kind { Pending, Valid, Invalid, Unknown, Error } kind = Kind::Pending;
  std::optional<Counterexample> cex;
  std::optional<Replacement> replacement;
  std::string reason;
  std::uint64_t queries = 0, nonlinear = 0, warnings = 0;
  std::vector<std::string> diagnostics;
  double compile = 0, solve = 0;
};

class Verifier {
 public:
  Verifier(const SourceFile& src, const VerifyOptions& opt) : src_(src), opt_(opt) {}

  VerifyReport run() {
    VerifyReport rep;
    rep.paths = path_count(*src_.body);
    outcomes_.resize(rep.paths);
    if (!opt_.dump_dir.empty()) std::filesystem::create_directories(opt_.dump_dir);
    int jobs = std::max(1, opt_.jobs);
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back([this] { work(); });
    for (auto& t : pool) t.join();

    std::optional<std::uint64_t> first_unknown, first_error;
    for (std::uint64_t i = 0; i < rep.paths; ++i) {
      const auto& o = outcomes_[i];
      if (o.kind == PathOutcome::Kind::Pending) continue;
      ++rep.paths_checked;
      rep.queries += o.queries;
      rep.nonlinear_vcs += o.nonlinear;
      rep.solver_warnings += o.warnings;
      rep.compile_seconds += o.compile;
      rep.solve_seconds += o.solve;
      for (const auto& d : o.diagnostics)
        if (rep.diagnostics.size() < 20) rep.diagnostics.push_back(d);
      if (o.kind == PathOutcome::Kind::Invalid && !rep.counterexample) {
        rep.counterexample = o.cex;
        rep.failing_path = i;
        rep.failing_replacement = o.replacement;
      }
      if (o.kind == PathOutcome::Kind::Unknown && !first_unknown) first_unknown = i;
      if (o.kind == PathOutcome::Kind::Error && !first_error) first_error = i;
    }
    if (rep.counterexample) {
      rep.verdict = Verdict::Invalid;
    } else if (first_error) {
      rep.verdict = Verdict::SolverError;
      rep.failing_path = first_error;
      rep.failing_replacement = outcomes_[*first_error].replacement;
      rep.reason = outcomes_[*first_error].reason;
    } else if (first_unknown) {
      rep.verdict = Verdict::Unknown;
      rep.failing_path = first_unknown;
      rep.failing_replacement = outcomes_[*first_unknown].replacement;
      rep.reason = outcomes_[*first_unknown].reason;
    }
    return rep;
  }

 private:
  void work() {
    smt::Solver solver(opt_.solver, std::chrono::milliseconds(
                                        static_cast<long long>(opt_.timeout_s * 1000)));
    for (;;) {
      std::uint64_t i = next_.fetch_add(1);
      if (i >= outcomes_.size()) return;
      if (!opt_.exhaustive && i > first_bad_.load()) return;
      outcomes_[i] = check_path(solver, i);
      if (outcomes_[i].kind == PathOutcome::Kind::Invalid) {
        std::uint64_t cur = first_bad_.load();
        while (i < cur && !first_bad_.compare_exchange_weak(cur, i)) {}
      }
      if (opt_.progress) {
        std::lock_guard<std::mutex> lock(progress_mu_);
        opt_.progress(++done_, outcomes_.size());
      }
    }
  }

  PathOutcome check_path(smt::Solver& solver, std::uint64_t index) {
    PathOutcome out;
    int agents = src_.agents;
    auto t0 = Clock::now();
    Path path = path_at(src_.body, index);
    auto pf = logic::path_formulas(*path.expr, agents);
    auto orders = opt_.prune ? logic::enumerate_replacements(pf.ys, pf.c)
                             : logic::enumerate_replacements(pf.ys);
    out.compile += seconds_since(t0);
    bool unknown = false;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const auto& s = orders[k];
      auto t1 = Clock::now();
      auto vc = logic::build_vc(pf, s, agents);
      if (!logic::is_linear(vc.hyp) || !logic::is_linear(vc.goal)) {
        ++out.nonlinear;
        out.kind = PathOutcome::Kind::Error;
        out.reason = "non-linear VC";
        out.replacement = s;
        return out;
      }
      auto q = smt::make_query(vc, s, agents);
      if (!opt_.dump_dir.empty()) {
        std::ofstream f(std::filesystem::path(opt_.dump_dir) /
                        ("path" + std::to_string(index) + "_s" + std::to_string(k) + ".smt2"));
        f << smt::emit_script(q);
      }
      out.compile += seconds_since(t1);
      auto t2 = Clock::now();
      auto res = solver.check(q);
      out.solve += seconds_since(t2);
      ++out.queries;
      out.warnings += res.diagnostics.size();
      for (const auto& d : res.diagnostics) out.diagnostics.push_back(d);
      using St = smt::CheckResult::Status;
      if (res.status == St::Unsat) continue;
      if (res.status == St::Error) {
        out.kind = PathOutcome::Kind::Error;
        out.reason = res.reason;
        out.replacement = s;
        return out;
      }
      if (res.status == St::Unknown) {
        if (!unknown) out.reason = res.reason, out.replacement = s;
        unknown = true;
        continue;
      }
      // sat: rebuild the valuation set and confirm by replay.
      std::string why;
      try {
        Counterexample c;
        c.path_index = index;
        c.replacement = s;
        c.valuations = extract_valuation_set(res.model, s, agents);
        auto alpha = assignment_from_model(res.model, s, agents);
        for (const auto& [id, r] : alpha.y) c.mark_table[id] = r;
        auto rr = replay(*src_.body, c.valuations, c.mark_table);
        if (rr.ok) {
          c.allocation = rr.run->value;
          c.witness = rr.witness;
          out.kind = PathOutcome::Kind::Invalid;
          out.cex = std::move(c);
          out.replacement = s;
          return out;
        }
        why = rr.error;
      } catch (const std::exception& e) {
        why = e.what();
      }
      if (!unknown) out.reason = "counterexample did not replay: " + why, out.replacement = s;
      unknown = true;
    }
    out.kind = unknown ? PathOutcome::Kind::Unknown : PathOutcome::Kind::Valid;
    return out;
  }

  const SourceFile& src_;
  const VerifyOptions& opt_;
  std::vector<PathOutcome> outcomes_;
  std::atomic<std::uint64_t> next_{0};
  std::atomic<std::uint64_t> first_bad_{std::numeric_limits<std::uint64_t>::max()};
  std::mutex progress_mu_;
  std::uint64_t done_ = 0;
};

}  // namespace

VerifyReport verify_protocol(const SourceFile& src, const VerifyOptions& opt) {
  auto violations = check_wellformed(*src.body, src.agents);
  if (!violations.empty()) {
    VerifyReport rep;
    rep.verdict = Verdict::IllFormed;
    for (const auto& v : violations) rep.violations.push_back(v.kind + ": " + v.message);
    return rep;
  }
  return Verifier(src, opt).run();
}

}  // namespace slice
