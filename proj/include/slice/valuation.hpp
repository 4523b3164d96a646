#pragma once

#include "slice/core.hpp"

#include <nlohmann/json.hpp>

#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

namespace slice {

class ValuationError : public std::runtime_error {
 public:
  enum class Kind { TargetExceedsValue, IrrationalMark, DensityTooLow, Malformed };
  ValuationError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
  Kind kind;
};

// density(x) = slope * x + intercept on [lo, hi]
struct Segment {
  Rational lo, hi, slope, intercept;
  bool operator==(const Segment&) const = default;
};

// Piecewise-linear density on [0,1] with total mass exactly 1.
class Valuation {
 public:
  // Segments must tile [0,1] in order, with a nonnegative density and total
  // mass 1. Throws ValuationError(Malformed) otherwise.
  explicit Valuation(std::vector<Segment> segments);

  static Valuation uniform();
  // Piecewise-constant density from breakpoints 0 = b_0 < ... < b_k = 1 and
  // nonnegative weights; the result is normalized.
  static Valuation steps(const std::vector<Rational>& breaks, const std::vector<Rational>& weights);

  const std::vector<Segment>& segments() const { return segs_; }
  Rational integral(const Rational& a, const Rational& b) const;
  bool operator==(const Valuation&) const = default;

 private:
  std::vector<Segment> segs_;
};

// Constant density c on a support piece, zero elsewhere; c = 1 / |support|.
class PUValuation {
 public:
  // Support intervals are sorted and merged; zero-length parts dropped.
  explicit PUValuation(std::vector<Interval> support);

  const std::vector<Interval>& support() const { return support_; }
  const Rational& constant() const { return constant_; }
  bool operator==(const PUValuation&) const = default;

 private:
  std::vector<Interval> support_;
  Rational constant_;
};

using AnyValuation = std::variant<Valuation, PUValuation>;

// Agent a's valuation is at(a), a in 1..size().
class ValuationSet {
 public:
  ValuationSet() = default;
  explicit ValuationSet(std::vector<AnyValuation> vs) : vs_(std::move(vs)) {}
  int size() const { return static_cast<int>(vs_.size()); }
  const AnyValuation& at(AgentId a) const { return vs_.at(a - 1); }
  const std::vector<AnyValuation>& all() const { return vs_; }
  bool operator==(const ValuationSet&) const = default;

 private:
  std::vector<AnyValuation> vs_;
};

// Union of the region's parts as sorted, merged, positive-length intervals.
// Reversed intervals denote the empty set.
std::vector<Interval> normalize_region(const Region& r);

Rational val_eval(const AnyValuation& v, const Region& r);
Rational val_eval(const ValuationSet& vs, AgentId a, const Region& r);

// Leftmost r' in [lo, hi] with V[lo, r'] = target.
Rational val_mark(const AnyValuation& v, const Rational& lo, const Rational& hi,
                  const Rational& target);

// M is sorted and deduplicated internally; it must contain 0 and 1.
Rational maxdens(const AnyValuation& v, const std::vector<Rational>& M);
Rational maxdens(const ValuationSet& vs, const std::vector<Rational>& M);

// U_V(M, d); d defaults to maxdens(VS, M).
ValuationSet construct_agreeing_pu(const ValuationSet& vs, const std::vector<Rational>& M);
ValuationSet construct_agreeing_pu(const ValuationSet& vs, const std::vector<Rational>& M,
                                   const Rational& d);

bool agrees_on(const ValuationSet& u, const ValuationSet& v, const std::vector<Rational>& M);
bool easily_replaceable_check(const ValuationSet& u, const std::vector<Rational>& M);

// Sorted, deduplicated copy of M with 0 and 1 added.
std::vector<Rational> with_endpoints(std::vector<Rational> M);

// ---------------------------------------------------------------- random sets

using Rng = std::mt19937_64;

// Random rational in [0,1] with denominator dividing `den`.
Rational random_unit(Rng& rng, int den = 24);
// Up to `max_segments` pieces; `constant` restricts to step densities, whose
// marks are always rational.
Valuation random_valuation(Rng& rng, int max_segments, bool constant);
// Support made of up to `max_parts` intervals.
PUValuation random_pu_valuation(Rng& rng, int max_parts);
ValuationSet random_valuation_set(Rng& rng, int agents, int max_segments, bool constant);
ValuationSet random_pu_set(Rng& rng, int agents, int max_parts);

// ---------------------------------------------------------------- json

nlohmann::json to_json(const ValuationSet& vs);
ValuationSet valuation_set_from_json(const nlohmann::json& j);

}  // namespace slice
