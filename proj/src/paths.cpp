#include "slice/paths.hpp"

#include <stdexcept>
#include <unordered_map>

namespace slice {

namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("path count overflows 64 bits");
  return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("path count overflows 64 bits");
  return r;
}

// Same node kind with its children (in children() order) replaced.
ExprPtr rebuild(const Expr& e, const std::vector<ExprPtr>& c) {
  Expr::Node n = e.node;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::Tuple>) x.elems = c;
        else if constexpr (std::is_same_v<T, ex::Split>) x.scrutinee = c[0], x.body = c[1];
        else if constexpr (std::is_same_v<T, ex::Assert>) x.cond = c[0], x.body = c[1];
        else if constexpr (std::is_same_v<T, ex::Op>) x.args = c;
        else if constexpr (std::is_same_v<T, ex::Divide>) x.interval = c[0], x.at = c[1];
        else if constexpr (std::is_same_v<T, ex::Piece>) x.parts = c;
        else if constexpr (std::is_same_v<T, ex::Mark>) x.interval = c[0], x.target = c[1];
        else if constexpr (std::is_same_v<T, ex::Eval>) x.subject = c[0];
      },
      n);
  return make_expr(std::move(n), e.loc);
}

class Indexer {
 public:
  std::uint64_t count(const Expr& e) {
    if (auto it = memo_.find(&e); it != memo_.end()) return it->second;
    std::uint64_t n;
    if (e.is<ex::If>()) {
      const auto& x = e.as<ex::If>();
      n = mul(count(*x.cond), add(count(*x.then_e), count(*x.else_e)));
    } else {
      n = 1;
      for (const auto& c : children(e)) n = mul(n, count(*c));
    }
    memo_[&e] = n;
    return n;
  }

  ExprPtr at(const ExprPtr& e, std::uint64_t idx) {
    // Any If contributes at least two paths, so a count of one means no If.
    if (count(*e) == 1) return e;
    if (e->is<ex::If>()) {
      const auto& x = e->as<ex::If>();
      std::uint64_t c1 = count(*x.cond), c2 = count(*x.then_e), c3 = count(*x.else_e);
      if (idx < c1 * c2) return mk::assert_(at(x.cond, idx / c2), at(x.then_e, idx % c2));
      idx -= c1 * c2;
      return mk::assert_(mk::op(OpKind::Not, {at(x.cond, idx / c3)}), at(x.else_e, idx % c3));
    }
    auto kids = children(*e);
    std::vector<ExprPtr> out(kids.size());
    for (std::size_t k = kids.size(); k-- > 0;) {
      std::uint64_t n = count(*kids[k]);
      out[k] = at(kids[k], idx % n);
      idx /= n;
    }
    return rebuild(*e, out);
  }

  std::uint64_t select(const Expr& e, const std::vector<bool>& d, std::size_t& pos) {
    if (e.is<ex::If>()) {
      const auto& x = e.as<ex::If>();
      std::uint64_t c2 = count(*x.then_e), c3 = count(*x.else_e);
      std::uint64_t i1 = select(*x.cond, d, pos);
      if (pos >= d.size()) throw std::invalid_argument("decision trace too short");
      if (d[pos++]) return i1 * c2 + select(*x.then_e, d, pos);
      return count(*x.cond) * c2 + i1 * c3 + select(*x.else_e, d, pos);
    }
    std::uint64_t idx = 0;
    for (const auto& c : children(e)) idx = idx * count(*c) + select(*c, d, pos);
    return idx;
  }

 private:
  std::unordered_map<const Expr*, std::uint64_t> memo_;
};

}  // namespace

bool contains_if(const Expr& e) {
  if (e.is<ex::If>()) return true;
  for (const auto& c : children(e))
    if (contains_if(*c)) return true;
  return false;
}

std::uint64_t path_count(const Expr& e) { return Indexer().count(e); }

Path path_at(const ExprPtr& e, std::uint64_t index) {
  Indexer ix;
  if (index >= ix.count(*e)) throw std::out_of_range("path index out of range");
  return {ix.at(e, index), index};
}

void for_each_path(const ExprPtr& e, const std::function<bool(const Path&)>& f) {
  Indexer ix;
  std::uint64_t n = ix.count(*e);
  for (std::uint64_t i = 0; i < n; ++i)
    if (!f({ix.at(e, i), i})) return;
}

std::vector<Path> enumerate_paths(const ExprPtr& e) {
  std::vector<Path> out;
  for_each_path(e, [&](const Path& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

std::uint64_t select_path(const Expr& e, const std::vector<bool>& decisions) {
  Indexer ix;
  std::size_t pos = 0;
  std::uint64_t idx = ix.select(e, decisions, pos);
  if (pos != decisions.size()) throw std::invalid_argument("decision trace too long");
  return idx;
}

}  // namespace slice
