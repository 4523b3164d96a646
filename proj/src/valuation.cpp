#include "slice/valuation.hpp"

#include <algorithm>

namespace slice {

namespace {

[[noreturn]] void malformed(const std::string& msg) {
  throw ValuationError(ValuationError::Kind::Malformed, msg);
}

Rational density_integral(const Segment& s, const Rational& a, const Rational& b) {
  // Integral of slope*x + intercept over [a, b].
  return s.slope * (b * b - a * a) / 2 + s.intercept * (b - a);
}

// Exact square root of a nonnegative rational, if it is rational.
std::optional<Rational> exact_sqrt(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  BigInt rn = boost::multiprecision::sqrt(num), rd = boost::multiprecision::sqrt(den);
  if (rn * rn != num || rd * rd != den) return std::nullopt;
  return Rational(rn, rd);
}

Rational length(const std::vector<Interval>& parts) {
  Rational total = 0;
  for (const auto& i : parts) total += i.hi - i.lo;
  return total;
}

// |A ∩ B| for sorted merged interval lists.
Rational overlap(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  Rational total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Rational lo = std::max(a[i].lo, b[j].lo), hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) total += hi - lo;
    if (a[i].hi < b[j].hi) ++i;
    else ++j;
  }
  return total;
}

std::vector<Interval> clip(const std::vector<Interval>& parts, const Rational& lo,
                           const Rational& hi) {
  std::vector<Interval> out;
  for (const auto& p : parts) {
    Rational a = std::max(p.lo, lo), b = std::min(p.hi, hi);
    if (a < b) out.push_back({a, b});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Valuation

Valuation::Valuation(std::vector<Segment> segments) : segs_(std::move(segments)) {
  if (segs_.empty()) malformed("valuation has no segments");
  Rational at = 0, total = 0;
  for (const auto& s : segs_) {
    if (s.lo != at || !(s.lo < s.hi)) malformed("segments must tile [0,1] in order");
    if (s.slope * s.lo + s.intercept < 0 || s.slope * s.hi + s.intercept < 0)
      malformed("negative density");
    total += density_integral(s, s.lo, s.hi);
    at = s.hi;
  }
  if (at != 1) malformed("segments must end at 1");
  if (total != 1) malformed("total mass is " + to_string(total) + ", not 1");
}

Valuation Valuation::uniform() { return Valuation({{0, 1, 0, 1}}); }

Valuation Valuation::steps(const std::vector<Rational>& breaks,
                           const std::vector<Rational>& weights) {
  if (breaks.size() != weights.size() + 1) malformed("steps: size mismatch");
  Rational mass = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) mass += weights[i] * (breaks[i + 1] - breaks[i]);
  if (mass <= 0) malformed("steps: zero mass");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < weights.size(); ++i)
    segs.push_back({breaks[i], breaks[i + 1], 0, weights[i] / mass});
  return Valuation(std::move(segs));
}

Rational Valuation::integral(const Rational& a, const Rational& b) const {
  Rational total = 0;
  for (const auto& s : segs_) {
    Rational lo = std::max(a, s.lo), hi = std::min(b, s.hi);
    if (lo < hi) total += density_integral(s, lo, hi);
  }
  return total;
}

// ---------------------------------------------------------------- PUValuation

PUValuation::PUValuation(std::vector<Interval> support) {
  support_ = normalize_region(PieceVal{std::move(support)});
  Rational len = length(support_);
  if (len <= 0) malformed("piecewise-uniform support has zero length");
  constant_ = 1 / len;
}

// ---------------------------------------------------------------- queries

std::vector<Interval> normalize_region(const Region& r) {
  std::vector<Interval> parts;
  if (auto* i = std::get_if<Interval>(&r)) parts.push_back(*i);
  else parts = std::get<PieceVal>(r).parts;
  std::erase_if(parts, [](const Interval& i) { return !(i.lo < i.hi); });
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& p : parts) {
    if (!merged.empty() && p.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, p.hi);
    else merged.push_back(p);
  }
  return merged;
}

Rational val_eval(const AnyValuation& v, const Region& r) {
  auto parts = normalize_region(r);
  if (auto* pu = std::get_if<PUValuation>(&v)) return pu->constant() * overlap(parts, pu->support());
  const auto& pl = std::get<Valuation>(v);
  Rational total = 0;
  for (const auto& p : parts) total += pl.integral(p.lo, p.hi);
  return total;
}

Rational val_eval(const ValuationSet& vs, AgentId a, const Region& r) {
  return val_eval(vs.at(a), r);
}

Rational val_mark(const AnyValuation& v, const Rational& lo, const Rational& hi,
                  const Rational& target) {
  if (target < 0 || target > val_eval(v, Interval{lo, hi}))
    throw ValuationError(ValuationError::Kind::TargetExceedsValue,
                         "mark target " + to_string(target) + " exceeds the value of [" +
                             to_string(lo) + ", " + to_string(hi) + "]");
  if (target == 0) return lo;
  Rational rest = target;
  if (auto* pu = std::get_if<PUValuation>(&v)) {
    for (const auto& p : clip(pu->support(), lo, hi)) {
      Rational mass = pu->constant() * (p.hi - p.lo);
      if (mass >= rest) return p.lo + rest / pu->constant();
      rest -= mass;
    }
  } else {
    for (const auto& s : std::get<Valuation>(v).segments()) {
      Rational a = std::max(lo, s.lo), b = std::min(hi, s.hi);
      if (!(a < b)) continue;
      Rational mass = density_integral(s, a, b);
      if (mass < rest) {
        rest -= mass;
        continue;
      }
      if (s.slope == 0) return a + rest / s.intercept;
      Rational da = s.slope * a + s.intercept;
      auto root = exact_sqrt(da * da + 2 * s.slope * rest);
      if (!root)
        throw ValuationError(ValuationError::Kind::IrrationalMark,
                             "mark target " + to_string(target) + " has an irrational answer");
      return a + (*root - da) / s.slope;
    }
  }
  // Unreachable when target <= V[lo, hi]; kept for exhaustiveness.
  throw ValuationError(ValuationError::Kind::TargetExceedsValue, "mark target not reached");
}

std::vector<Rational> with_endpoints(std::vector<Rational> M) {
  M.push_back(0);
  M.push_back(1);
  std::sort(M.begin(), M.end());
  M.erase(std::unique(M.begin(), M.end()), M.end());
  return M;
}

Rational maxdens(const AnyValuation& v, const std::vector<Rational>& M) {
  auto pts = with_endpoints(M);
  Rational best = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Rational d = val_eval(v, Interval{pts[i], pts[i + 1]}) / (pts[i + 1] - pts[i]);
    best = std::max(best, d);
  }
  return best;
}

Rational maxdens(const ValuationSet& vs, const std::vector<Rational>& M) {
  Rational best = 0;
  for (const auto& v : vs.all()) best = std::max(best, maxdens(v, M));
  return best;
}

ValuationSet construct_agreeing_pu(const ValuationSet& vs, const std::vector<Rational>& M) {
  return construct_agreeing_pu(vs, M, maxdens(vs, M));
}

ValuationSet construct_agreeing_pu(const ValuationSet& vs, const std::vector<Rational>& M,
                                   const Rational& d) {
  auto pts = with_endpoints(M);
  if (d < maxdens(vs, pts))
    throw ValuationError(ValuationError::Kind::DensityTooLow,
                         "density " + to_string(d) + " is below maxdens");
  std::vector<AnyValuation> out;
  for (const auto& v : vs.all()) {
    std::vector<Interval> support;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      Rational mass = val_eval(v, Interval{pts[i - 1], pts[i]});
      if (mass > 0) support.push_back({pts[i] - mass / d, pts[i]});
    }
    out.emplace_back(PUValuation(std::move(support)));
  }
  return ValuationSet(std::move(out));
}

bool agrees_on(const ValuationSet& u, const ValuationSet& v, const std::vector<Rational>& M) {
  if (u.size() != v.size()) return false;
  // Pieces with boundary points in M are unions of adjacent gaps (up to
  // measure zero), so additivity reduces the check to single gaps.
  auto pts = with_endpoints(M);
  for (AgentId a = 1; a <= u.size(); ++a)
    for (std::size_t i = 1; i < pts.size(); ++i) {
      Interval gap{pts[i - 1], pts[i]};
      if (val_eval(u.at(a), gap) != val_eval(v.at(a), gap)) return false;
    }
  return true;
}

bool easily_replaceable_check(const ValuationSet& u, const std::vector<Rational>& M) {
  auto pts = with_endpoints(M);
  std::optional<Rational> c;
  for (const auto& any : u.all()) {
    auto* pu = std::get_if<PUValuation>(&any);
    if (!pu) return false;
    if (c && *c != pu->constant()) return false;
    c = pu->constant();
    Rational covered = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      auto window = clip(pu->support(), pts[i - 1], pts[i]);
      if (window.empty()) continue;
      // One interval [l_a(m), m] ending exactly at m.
      if (window.size() != 1 || window.front().hi != pts[i]) return false;
      covered += window.front().hi - window.front().lo;
    }
    if (covered != length(pu->support())) return false;
  }
  return true;
}

// ---------------------------------------------------------------- random

Rational random_unit(Rng& rng, int den) {
  std::uniform_int_distribution<int> d(0, den);
  return Rational(d(rng), den);
}

namespace {

std::vector<Rational> random_breaks(Rng& rng, int max_parts) {
  std::uniform_int_distribution<int> count(1, std::max(1, max_parts));
  std::vector<Rational> b{0, 1};
  int inner = count(rng) - 1;
  for (int i = 0; i < inner; ++i) b.push_back(random_unit(rng));
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

Valuation random_valuation(Rng& rng, int max_segments, bool constant) {
  std::uniform_int_distribution<int> w(0, 6);
  for (;;) {
    auto b = random_breaks(rng, max_segments);
    std::vector<Rational> left, right;
    Rational mass = 0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      Rational l = w(rng), r = constant ? l : Rational(w(rng));
      left.push_back(l);
      right.push_back(r);
      mass += (l + r) * (b[i + 1] - b[i]) / 2;
    }
    if (mass == 0) continue;
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      Rational dl = left[i] / mass, dr = right[i] / mass;
      Rational slope = (dr - dl) / (b[i + 1] - b[i]);
      segs.push_back({b[i], b[i + 1], slope, dl - slope * b[i]});
    }
    return Valuation(std::move(segs));
  }
}

PUValuation random_pu_valuation(Rng& rng, int max_parts) {
  std::uniform_int_distribution<int> coin(0, 2);
  for (;;) {
    auto b = random_breaks(rng, 2 * max_parts);
    std::vector<Interval> support;
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      if (coin(rng)) support.push_back({b[i], b[i + 1]});
    if (!support.empty() && length(normalize_region(PieceVal{support})) > 0)
      return PUValuation(std::move(support));
  }
}

ValuationSet random_valuation_set(Rng& rng, int agents, int max_segments, bool constant) {
  std::vector<AnyValuation> vs;
  for (int a = 0; a < agents; ++a) vs.emplace_back(random_valuation(rng, max_segments, constant));
  return ValuationSet(std::move(vs));
}

ValuationSet random_pu_set(Rng& rng, int agents, int max_parts) {
  std::vector<AnyValuation> vs;
  for (int a = 0; a < agents; ++a) vs.emplace_back(random_pu_valuation(rng, max_parts));
  return ValuationSet(std::move(vs));
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const ValuationSet& vs) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& any : vs.all()) {
    if (auto* pu = std::get_if<PUValuation>(&any)) {
      nlohmann::json sup = nlohmann::json::array();
      for (const auto& i : pu->support()) sup.push_back({to_string(i.lo), to_string(i.hi)});
      agents.push_back({{"kind", "piecewise_uniform"},
                        {"support", sup},
                        {"constant", to_string(pu->constant())}});
    } else {
      nlohmann::json segs = nlohmann::json::array();
      for (const auto& s : std::get<Valuation>(any).segments())
        segs.push_back(
            {to_string(s.lo), to_string(s.hi), to_string(s.slope), to_string(s.intercept)});
      agents.push_back({{"kind", "piecewise_linear"}, {"segments", segs}});
    }
  }
  return {{"agents", agents}};
}

ValuationSet valuation_set_from_json(const nlohmann::json& j) {
  auto rat = [](const nlohmann::json& x) { return parse_rational(x.get<std::string>()); };
  std::vector<AnyValuation> out;
  for (const auto& a : j.at("agents")) {
    auto kind = a.at("kind").get<std::string>();
    if (kind == "piecewise_uniform") {
      std::vector<Interval> sup;
      for (const auto& i : a.at("support")) sup.push_back({rat(i.at(0)), rat(i.at(1))});
      PUValuation pu(std::move(sup));
      if (a.contains("constant") && rat(a.at("constant")) != pu.constant())
        malformed("stored constant disagrees with the support length");
      out.emplace_back(std::move(pu));
    } else if (kind == "piecewise_linear") {
      std::vector<Segment> segs;
      for (const auto& s : a.at("segments"))
        segs.push_back({rat(s.at(0)), rat(s.at(1)), rat(s.at(2)), rat(s.at(3))});
      out.emplace_back(Valuation(std::move(segs)));
    } else {
      malformed("unknown valuation kind '" + kind + "'");
    }
  }
  return ValuationSet(std::move(out));
}

}  // namespace slice
