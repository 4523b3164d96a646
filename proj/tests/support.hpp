#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include "slice/syntax.hpp"
#include "slice/valuation.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace slice::testing {

inline std::string corpus_path(const std::string& rel) { return std::string(SLICE_CORPUS) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SourceFile load_corpus(const std::string& rel) { return parse_source(read_text(corpus_path(rel))); }

inline const std::vector<std::string>& correct_protocols() {
  static const std::vector<std::string> v = {
      "cut_choose.slice", "surplus.slice", "waste_makes_haste_3.slice",
      "selfridge_conway_surplus.slice", "selfridge_conway_full.slice"};
  return v;
}

inline const std::vector<std::string>& buggy_protocols() {
  static const std::vector<std::string> v = {
      "bad/cut_choose_agent1_chooses.slice",   "bad/cut_choose_wrong_branch.slice",
      "bad/surplus_unsafe_trim.slice",         "bad/scs_allocates_trimmings.slice",
      "bad/scs_agent2_not_forced.slice",       "bad/scf_trimmings_cut_by_taker.slice",
      "bad/aziz_mackenzie_3_no_favourite_check.slice"};
  return v;
}

inline std::vector<std::string> all_protocols() {
  auto v = correct_protocols();
  v.insert(v.end(), buggy_protocols().begin(), buggy_protocols().end());
  return v;
}

inline Rational q(long p, long d = 1) { return Rational(p, d); }

// Value of every piece built from the gaps of M, by brute force over all
// 2^(|M|-1) unions of adjacent gaps. Independent of agrees_on.
inline bool agree_exhaustively(const ValuationSet& u, const ValuationSet& v, std::vector<Rational> m) {
  m = with_endpoints(std::move(m));
  std::size_t gaps = m.size() - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << gaps); ++mask) {
    PieceVal p;
    for (std::size_t i = 0; i < gaps; ++i)
      if (mask >> i & 1) p.parts.push_back({m[i], m[i + 1]});
    for (AgentId a = 1; a <= v.size(); ++a)
      if (val_eval(u, a, p) != val_eval(v, a, p)) return false;
  }
  return true;
}

}  // namespace slice::testing
