#include "slice/rational.hpp"

#include <stdexcept>

namespace slice {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  bool neg = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational out;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("malformed rational: " + std::string(text));
    BigInt d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator");
    out = Rational(BigInt(std::string(num)), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto ip = text.substr(0, dot), fp = text.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
        (ip.empty() && fp.empty()))
      throw std::invalid_argument("malformed decimal: " + std::string(text));
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    BigInt whole = ip.empty() ? BigInt(0) : BigInt(std::string(ip));
    BigInt frac = fp.empty() ? BigInt(0) : BigInt(std::string(fp));
    out = Rational(whole * scale + frac, scale);
  } else {
    if (!all_digits(text))
      throw std::invalid_argument("malformed rational: " + std::string(text));
    out = Rational(BigInt(std::string(text)));
  }
  return neg ? Rational(-out) : out;
}

std::string to_string(const Rational& r) { return r.str(); }

}  // namespace slice
