// Command-line front end: typecheck, paths, compile, verify, simulate, replay.

#include "slice/interp.hpp"
#include "slice/paths.hpp"
#include "slice/syntax.hpp"
#include "slice/typecheck.hpp"
#include "slice/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace slice;
using nlohmann::json;

namespace {

constexpr int kUsage = 64;

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kUsage, "cannot open " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SourceFile load(const std::string& path) {
  try {
    return parse_source(read_file(path));
  } catch (const ParseError& e) {
    throw Failure{1, path + ":" + e.what()};
  }
}

bool is_stretch(const std::string& path) {
  for (const auto& part : fs::path(path))
    if (part == "stretch") return true;
  return false;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string region_string(PieceVal p) {
  std::sort(p.parts.begin(), p.parts.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::string out = "{";
  for (std::size_t i = 0; i < p.parts.size(); ++i)
    out += (i ? ", [" : "[") + to_string(p.parts[i].lo) + ", " + to_string(p.parts[i].hi) + "]";
  return out + "}";
}

json allocation_json(const Value& alloc, const ValuationSet& vs) {
  json agents = json::array();
  auto pieces = allocation_pieces(alloc);
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    json parts = json::array();
    for (const auto& i : pieces[a].parts) parts.push_back({to_string(i.lo), to_string(i.hi)});
    json values = json::array();
    for (const auto& p : pieces) values.push_back(to_string(val_eval(vs, static_cast<int>(a) + 1, p)));
    agents.push_back({{"agent", a + 1}, {"piece", parts}, {"values", values}});
  }
  return agents;
}

void print_allocation(const Value& alloc, const ValuationSet& vs) {
  auto pieces = allocation_pieces(alloc);
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    std::cout << "  agent " << a + 1 << ": " << region_string(pieces[a]) << "  values";
    for (const auto& p : pieces) std::cout << " " << to_string(val_eval(vs, static_cast<int>(a) + 1, p));
    std::cout << "\n";
  }
}

void print_envy(const EnvyCheck& w) {
  if (w.envy_free) std::cout << "envy-free: yes\n";
  else
    std::cout << "envy-free: no (agent " << w.envier << " values its own piece at "
              << to_string(w.own) << " and agent " << w.envied << "'s at " << to_string(w.other)
              << ")\n";
}

// ---------------------------------------------------------------- commands

int cmd_typecheck(const std::string& file, bool as_json) {
  auto src = load(file);
  std::optional<SliceType> type;
  std::string error;
  try {
    type = typecheck(*src.body);
  } catch (const TypeError& e) {
    error = e.what();
  }
  auto violations = check_wellformed(*src.body, src.agents);
  if (as_json) {
    json v = json::array();
    for (const auto& x : violations) v.push_back({{"kind", x.kind}, {"message", x.message}});
    json out{{"file", file}, {"well_formed", violations.empty()}, {"violations", v}};
    if (type) out["type"] = to_string(*type);
    std::cout << out.dump(2) << "\n";
  } else {
    if (type) std::cout << "type: " << to_string(*type) << "\n";
    for (const auto& x : violations) std::cout << x.kind << ": " << x.message << "\n";
    if (violations.empty()) std::cout << "well-formed\n";
  }
  return violations.empty() ? 0 : 1;
}

int cmd_paths(const std::string& file, bool print, bool as_json) {
  auto src = load(file);
  std::uint64_t n = path_count(*src.body);
  if (as_json) {
    json out{{"file", file}, {"paths", n}};
    if (print) {
      json list = json::array();
      for_each_path(src.body, [&](const Path& p) {
        list.push_back(pretty(*p.expr));
        return true;
      });
      out["bodies"] = list;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << n << "\n";
  if (print)
    for_each_path(src.body, [&](const Path& p) {
      std::cout << "// path " << p.index << "\n" << pretty(*p.expr) << "\n";
      return true;
    });
  return 0;
}

int cmd_compile(const std::string& file, const std::string& out_dir, bool prune, bool as_json) {
  auto src = load(file);
  auto violations = check_wellformed(*src.body, src.agents);
  if (!violations.empty()) {
    for (const auto& x : violations) std::cerr << x.kind << ": " << x.message << "\n";
    return 1;
  }
  fs::create_directories(out_dir);
  std::uint64_t scripts = 0, nonlinear = 0;
  for_each_path(src.body, [&](const Path& p) {
    auto pf = logic::path_formulas(*p.expr, src.agents);
    auto orders = prune ? logic::enumerate_replacements(pf.ys, pf.c)
                        : logic::enumerate_replacements(pf.ys);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      auto vc = logic::build_vc(pf, orders[k], src.agents);
      if (!logic::is_linear(vc.hyp) || !logic::is_linear(vc.goal)) {
        ++nonlinear;
        continue;
      }
      std::ofstream f(fs::path(out_dir) /
                      ("path" + std::to_string(p.index) + "_s" + std::to_string(k) + ".smt2"));
      f << "; path " << p.index << ", S = " << logic::to_string(orders[k]) << "\n"
        << smt::emit_smt(vc, orders[k], src.agents);
      ++scripts;
    }
    return true;
  });
  if (as_json)
    std::cout << json{{"file", file}, {"paths", path_count(*src.body)}, {"scripts", scripts},
                      {"nonlinear", nonlinear}, {"dir", out_dir}}
                     .dump(2)
              << "\n";
  else
    std::cout << scripts << " scripts written to " << out_dir << "\n";
  return nonlinear ? 2 : 0;
}

int cmd_verify(const std::string& file, VerifyOptions opt, bool as_json, bool stretch,
               const std::string& cex_out) {
  if (is_stretch(file) && !stretch)
    throw Failure{kUsage, file + " is a stretch protocol; pass --stretch to verify it"};
  auto src = load(file);
  if (!as_json && !opt.progress && isatty(2))
    opt.progress = [](std::uint64_t done, std::uint64_t total) {
      if (done % 50 == 0 || done == total)
        std::cerr << "\r  " << done << "/" << total << " paths" << std::flush;
    };
  auto t0 = std::chrono::steady_clock::now();
  auto rep = verify_protocol(src, opt);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (opt.progress && !as_json) std::cerr << "\n";

  if (rep.counterexample && !cex_out.empty()) {
    std::ofstream f(cex_out);
    f << to_json(*rep.counterexample).dump(2) << "\n";
  }
  if (as_json) {
    json out{{"protocol", fs::path(file).stem().string()},
             {"verdict", to_string(rep.verdict)},
             {"paths", rep.paths},
             {"paths_checked", rep.paths_checked},
             {"replacements", rep.queries},
             {"nonlinear_vcs", rep.nonlinear_vcs},
             {"solver_warnings", rep.solver_warnings},
             {"timings", {{"compile", rep.compile_seconds}, {"solve", rep.solve_seconds}, {"wall", wall}}}};
    if (!rep.violations.empty()) out["violations"] = rep.violations;
    if (!rep.reason.empty()) out["reason"] = rep.reason;
    if (rep.failing_path) out["failing_path"] = *rep.failing_path;
    if (rep.counterexample) out["counterexample"] = to_json(*rep.counterexample);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "protocol: " << file << "\n";
    if (rep.verdict == Verdict::IllFormed) {
      for (const auto& v : rep.violations) std::cout << v << "\n";
      std::cout << "verdict: IllFormed\n";
      return 1;
    }
    std::cout << "paths: " << rep.paths << " (" << rep.paths_checked << " checked)\n"
              << "replacements: " << rep.queries << "\n";
    if (rep.solver_warnings) {
      std::cout << "solver warnings: " << rep.solver_warnings << "\n";
      for (const auto& d : rep.diagnostics) std::cout << "  " << d << "\n";
    }
    std::cout << "time: compile " << rep.compile_seconds << "s, solve " << rep.solve_seconds
              << "s, wall " << wall << "s\n";
    std::cout << "verdict: " << to_string(rep.verdict) << "\n";
    if (!rep.reason.empty()) std::cout << "reason: " << rep.reason << "\n";
    if (rep.failing_path && rep.failing_replacement)
      std::cout << "at path " << *rep.failing_path << ", S = "
                << logic::to_string(*rep.failing_replacement) << "\n";
    if (auto& c = rep.counterexample) {
      std::cout << "counterexample (replayed):\n";
      for (AgentId a = 1; a <= c->valuations.size(); ++a) {
        const auto& pu = std::get<PUValuation>(c->valuations.at(a));
        std::cout << "  V" << a << ": density " << to_string(pu.constant()) << " on "
                  << region_string(PieceVal{pu.support()}) << "\n";
      }
      for (const auto& [id, r] : c->mark_table)
        std::cout << "  mark #" << id << " = " << to_string(r) << "\n";
      print_allocation(c->allocation, c->valuations);
      print_envy(c->witness);
    }
  }
  switch (rep.verdict) {
    case Verdict::Valid: return 0;
    case Verdict::Invalid:
    case Verdict::IllFormed: return 1;
    default: return 2;
  }
}

int cmd_simulate(const std::string& file, const std::string& vs_file, std::uint64_t seed,
                 bool as_json) {
  auto src = load(file);
  if (auto v = check_wellformed(*src.body, src.agents); !v.empty()) {
    for (const auto& x : v) std::cerr << x.kind << ": " << x.message << "\n";
    return 1;
  }
  ValuationSet vs;
  if (!vs_file.empty()) {
    vs = valuation_set_from_json(json::parse(read_file(vs_file)));
  } else {
    Rng rng(seed);
    vs = random_valuation_set(rng, src.agents, 4, true);
  }
  if (vs.size() != src.agents) throw Failure{kUsage, "valuation set has the wrong number of agents"};
  try {
    auto run = evaluate(*src.body, vs);
    auto w = check_envy_free(run.value, vs);
    if (as_json) {
      json marks = json::object();
      for (const auto& [id, r] : run.trace.mark_answers) marks[std::to_string(id)] = to_string(r);
      std::cout << json{{"valuations", to_json(vs)},
                        {"allocation", allocation_json(run.value, vs)},
                        {"marks", marks},
                        {"envy_free", w.envy_free}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "allocation:\n";
      print_allocation(run.value, vs);
      for (const auto& [id, r] : run.trace.mark_answers)
        std::cout << "mark #" << id << " = " << to_string(r) << "\n";
      print_envy(w);
    }
    return w.envy_free ? 0 : 1;
  } catch (const Stuck& e) {
    std::cerr << "stuck (" << to_string(e.kind) << "): " << e.what() << "\n";
    return 2;
  }
}

int cmd_replay(const std::string& file, const std::string& cex_file, bool as_json) {
  auto src = load(file);
  Counterexample c;
  try {
    c = counterexample_from_json(json::parse(read_file(cex_file)));
  } catch (const json::exception& e) {
    throw Failure{kUsage, cex_file + ": " + e.what()};
  }
  auto r = replay(*src.body, c.valuations, c.mark_table);
  if (!r.run) {
    std::cerr << r.error << "\n";
    return 2;
  }
  if (as_json) {
    std::cout << json{{"allocation", allocation_json(r.run->value, c.valuations)},
                      {"envy_free", r.witness.envy_free},
                      {"witness",
                       {{"envier", r.witness.envier},
                        {"envied", r.witness.envied},
                        {"own", to_string(r.witness.own)},
                        {"other", to_string(r.witness.other)}}}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "allocation:\n";
    print_allocation(r.run->value, c.valuations);
    print_envy(r.witness);
  }
  // A reproduced violation is the expected outcome of a replay.
  return r.ok ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice protocol toolchain"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  std::string file, other, solver = "z3 -in", dump, cex_out, out_dir = "vcs";
  double timeout = 60;
  int jobs = 1;
  std::uint64_t seed = 1;
  bool exhaustive = false, stretch = false, print = false, no_prune = false;

  auto* tc = app.add_subcommand("typecheck", "typecheck and check well-formedness");
  tc->add_option("protocol", file)->required();

  auto* pa = app.add_subcommand("paths", "count the control paths");
  pa->add_option("protocol", file)->required();
  pa->add_flag("--print", print, "pretty-print every path");

  auto* co = app.add_subcommand("compile", "write one SMT-LIB2 script per (path, replacement)");
  co->add_option("protocol", file)->required();
  co->add_option("--out", out_dir, "output directory");
  co->add_flag("--no-prune", no_prune, "enumerate every order of the mark variables");

  auto* ve = app.add_subcommand("verify", "check envy-freeness");
  ve->add_option("protocol", file)->required();
  ve->add_option("--solver", solver, "solver command line");
  ve->add_option("--timeout", timeout, "per-query timeout in seconds");
  ve->add_option("--jobs", jobs, "worker count")->check(CLI::PositiveNumber);
  ve->add_flag("--exhaustive", exhaustive, "check every path even after a counterexample");
  ve->add_option("--dump-smt", dump, "directory for the emitted scripts");
  ve->add_flag("--stretch", stretch, "allow protocols under corpus/stretch");
  ve->add_flag("--no-prune", no_prune, "enumerate every order of the mark variables");
  ve->add_option("--cex-out", cex_out, "write the counterexample JSON here");

  auto* si = app.add_subcommand("simulate", "run the protocol on a valuation set");
  si->add_option("protocol", file)->required();
  si->add_option("--valuations", other, "valuation set JSON (default: random)");
  si->add_option("--seed", seed, "seed for the random valuation set");

  auto* re = app.add_subcommand("replay", "re-run a counterexample");
  re->add_option("protocol", file)->required();
  re->add_option("counterexample", other)->required();

  for (auto* sub : {tc, pa, co, ve, si, re}) sub->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*tc) return cmd_typecheck(file, as_json);
    if (*pa) return cmd_paths(file, print, as_json);
    if (*co) return cmd_compile(file, out_dir, !no_prune, as_json);
    if (*ve) {
      VerifyOptions opt;
      opt.solver = split_words(solver);
      opt.timeout_s = timeout;
      opt.jobs = jobs;
      opt.exhaustive = exhaustive;
      opt.prune = !no_prune;
      opt.dump_dir = dump;
      return cmd_verify(file, opt, as_json, stretch, cex_out);
    }
    if (*si) return cmd_simulate(file, other, seed, as_json);
    if (*re) return cmd_replay(file, other, as_json);
  } catch (const Failure& f) {
    std::cerr << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return kUsage;
}
