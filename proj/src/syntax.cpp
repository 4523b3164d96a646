#include "slice/syntax.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace slice {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

ParseError::ParseError(int line, int col, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line(line),
      col(col) {}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if ((c == '>' || c == '=') && i + 1 < src.size() && src[i + 1] == '=') {
      out.push_back({Tok::Punct, std::string(src.substr(i, 2)), l, cl});
      advance(2);
      continue;
    }
    if (std::string_view("()[]{},;=*+-/#@").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(l, cl, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::set<std::string> kKeywords = {"let",   "split", "in",    "if",   "then", "else",
                                         "assert", "cake", "divide", "piece", "mark", "eval",
                                         "true",  "false", "and",   "or",   "not",  "agents",
                                         "rd",    "vltn",  "V",     "Pt"};

class Parser {
 public:
  Parser(std::string_view src, int agents) : toks_(lex(src)), agents_(agents) {}

  SourceFile file() {
    expect_word("agents");
    auto n = expect(Tok::Number);
    int count = std::stoi(n.text);
    if (count < 1) throw ParseError(n.line, n.col, "agent count must be at least 1");
    agents_ = count;
    expect_punct(";");
    SourceFile f{count, expr()};
    expect(Tok::End);
    return f;
  }

  ExprPtr whole_expr() {
    auto e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.col, msg + (t.kind == Tok::End ? " at end of input"
                                                              : " near '" + t.text + "'"));
  }

  bool is_word(const std::string& w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  bool is_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  Token expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), "unexpected token");
    return next();
  }
  Token expect_word(const std::string& w) {
    if (!is_word(w)) fail(peek(), "expected '" + w + "'");
    return next();
  }
  Token expect_punct(const std::string& p) {
    if (!is_punct(p)) fail(peek(), "expected '" + p + "'");
    return next();
  }

  SourceLoc loc() const { return {peek().line, peek().col}; }

  AgentId agent_index() {
    auto t = expect(Tok::Number);
    if (t.text.find('.') != std::string::npos) fail(t, "agent index must be an integer");
    int a = std::stoi(t.text);
    if (a < 1 || (agents_ > 0 && a > agents_))
      throw ParseError(t.line, t.col, "agent index " + t.text + " out of range");
    return a;
  }

  bool at_rational() const {
    return peek().kind == Tok::Number || (is_punct("-") && peek(1).kind == Tok::Number);
  }

  Rational rational() {
    bool neg = false;
    if (is_punct("-")) {
      next();
      neg = true;
    }
    auto t = expect(Tok::Number);
    std::string text = t.text;
    if (is_punct("/")) {
      next();
      auto d = expect(Tok::Number);
      text += "/" + d.text;
    }
    try {
      Rational r = parse_rational(text);
      return neg ? Rational(-r) : r;
    } catch (const std::exception& e) {
      throw ParseError(t.line, t.col, e.what());
    }
  }

  std::string binder() {
    auto t = expect(Tok::Ident);
    if (kKeywords.count(t.text)) fail(t, "keyword used as variable name");
    return t.text;
  }

  ExprPtr expr() {
    auto l = loc();
    if (is_word("let")) {
      next();
      std::vector<std::string> names;
      std::set<std::string> seen;
      do {
        auto t = peek();
        auto n = binder();
        if (!seen.insert(n).second) throw ParseError(t.line, t.col, "duplicate binder '" + n + "'");
        names.push_back(n);
      } while (is_punct(",") && (next(), true));
      expect_punct("=");
      expect_word("split");
      auto scrut = expr();
      expect_word("in");
      auto body = expr();
      return make_expr(ex::Split{std::move(names), scrut, body}, l);
    }
    if (is_word("if")) {
      next();
      auto c = expr();
      expect_word("then");
      auto t = expr();
      expect_word("else");
      auto e = expr();
      return make_expr(ex::If{c, t, e}, l);
    }
    if (is_word("assert")) {
      next();
      auto c = expr();
      expect_word("in");
      auto b = expr();
      return make_expr(ex::Assert{c, b}, l);
    }
    return or_expr();
  }

  ExprPtr binary(ExprPtr (Parser::*sub)(), const std::string& word, OpKind k) {
    auto l = loc();
    auto lhs = (this->*sub)();
    while (is_word(word)) {
      next();
      auto rhs = (this->*sub)();
      lhs = make_expr(ex::Op{k, Rational(0), {lhs, rhs}}, l);
    }
    return lhs;
  }

  ExprPtr or_expr() { return binary(&Parser::and_expr, "or", OpKind::Or); }
  ExprPtr and_expr() { return binary(&Parser::not_expr, "and", OpKind::And); }

  ExprPtr not_expr() {
    auto l = loc();
    if (is_word("not")) {
      next();
      return make_expr(ex::Op{OpKind::Not, Rational(0), {not_expr()}}, l);
    }
    return cmp_expr();
  }

  ExprPtr cmp_expr() {
    auto l = loc();
    auto lhs = add_expr();
    if (is_punct(">=") || is_punct("==")) {
      OpKind k = next().text == ">=" ? OpKind::Geq : OpKind::Eq;
      auto rhs = add_expr();
      return make_expr(ex::Op{k, Rational(0), {lhs, rhs}}, l);
    }
    return lhs;
  }

  ExprPtr add_expr() {
    auto l = loc();
    auto lhs = scale_expr();
    while (is_punct("+")) {
      next();
      auto rhs = scale_expr();
      lhs = make_expr(ex::Op{OpKind::Add, Rational(0), {lhs, rhs}}, l);
    }
    return lhs;
  }

  ExprPtr scale_expr() {
    auto l = loc();
    if (at_rational()) {
      auto start = pos_;
      Rational r = rational();
      if (is_punct("*")) {
        next();
        return make_expr(ex::Op{OpKind::Scale, r, {scale_expr()}}, l);
      }
      pos_ = start;
    }
    return primary();
  }

  Interval interval_lit() {
    expect_punct("[");
    Rational lo = rational();
    expect_punct(",");
    Rational hi = rational();
    expect_punct("]");
    return {lo, hi};
  }

  PieceVal piece_lit() {
    expect_word("P");
    expect_punct("{");
    PieceVal p;
    if (!is_punct("}")) {
      p.parts.push_back(interval_lit());
      while (is_punct(",")) {
        next();
        p.parts.push_back(interval_lit());
      }
    }
    expect_punct("}");
    return p;
  }

  Region region_lit() {
    if (is_punct("[")) return interval_lit();
    if (is_word("P")) return piece_lit();
    fail(peek(), "expected interval or piece literal");
  }

  VltnVal vltn_lit() {
    expect_word("vltn");
    expect_punct("{");
    VltnVal v;
    while (!is_punct("}")) {
      if (!v.terms.empty()) expect_punct(",");
      Rational c = rational();
      expect_punct("*");
      expect_word("V");
      expect_punct("[");
      AgentId a = agent_index();
      expect_punct("]");
      expect_punct("(");
      Region r = region_lit();
      expect_punct(")");
      v.terms.push_back({c, a, r});
    }
    expect_punct("}");
    return v;
  }

  std::vector<ExprPtr> arg_list() {
    expect_punct("(");
    std::vector<ExprPtr> args;
    if (!is_punct(")")) {
      args.push_back(expr());
      while (is_punct(",")) {
        next();
        args.push_back(expr());
      }
    }
    expect_punct(")");
    return args;
  }

  ExprPtr primary() {
    auto l = loc();
    const Token& t = peek();
    if (at_rational()) {
      Rational r = rational();
      if (!is_punct("#")) fail(peek(), "expected '*' or '#Pt' after number");
      next();
      expect_word("Pt");
      return make_expr(ex::Lit{point(r)}, l);
    }
    if (is_punct("@")) {
      next();
      auto n = binder();
      return make_expr(ex::Var{n, true}, l);
    }
    if (is_punct("(")) {
      auto args = arg_list();
      if (args.empty()) fail(t, "empty tuple");
      if (args.size() == 1) return args.front();
      return make_expr(ex::Tuple{std::move(args)}, l);
    }
    if (is_punct("[")) return make_expr(ex::Lit{Value(interval_lit())}, l);
    if (t.kind != Tok::Ident) fail(t, "expected expression");
    if (t.text == "P" && is_punct("{", 1)) return make_expr(ex::Lit{Value(piece_lit())}, l);
    if (t.text == "vltn") return make_expr(ex::Lit{Value(vltn_lit())}, l);
    if (t.text == "rd") {
      next();
      expect_punct("(");
      Region r = region_lit();
      expect_punct(")");
      return make_expr(ex::Lit{Value(ReadOnlyVal{r})}, l);
    }
    if (t.text == "true" || t.text == "false") {
      bool b = next().text == "true";
      return make_expr(ex::Lit{Value(b)}, l);
    }
    if (t.text == "cake") {
      next();
      return make_expr(ex::Cake{}, l);
    }
    if (t.text == "divide") {
      next();
      auto args = arg_list();
      if (args.size() != 2) fail(t, "divide takes two arguments");
      return make_expr(ex::Divide{args[0], args[1]}, l);
    }
    if (t.text == "piece") {
      next();
      return make_expr(ex::Piece{arg_list()}, l);
    }
    if (t.text == "mark" || t.text == "eval") {
      bool is_mark = next().text == "mark";
      expect_punct("[");
      AgentId a = agent_index();
      MarkId id = kNoMark;
      if (is_mark && is_punct("#")) {
        next();
        id = std::stoi(expect(Tok::Number).text);
      }
      expect_punct("]");
      auto args = arg_list();
      if (is_mark) {
        if (args.size() != 2) fail(t, "mark takes two arguments");
        return make_expr(ex::Mark{a, args[0], args[1], id}, l);
      }
      if (args.size() != 1) fail(t, "eval takes one argument");
      return make_expr(ex::Eval{a, args[0]}, l);
    }
    if (kKeywords.count(t.text)) fail(t, "unexpected keyword");
    next();
    return make_expr(ex::Var{t.text, false}, l);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int agents_;
};

bool all_marks_numbered(const Expr& e, bool& any) {
  if (e.is<ex::Mark>()) {
    any = true;
    if (e.as<ex::Mark>().id == kNoMark) return false;
  }
  for (const auto& c : children(e))
    if (!all_marks_numbered(*c, any)) return false;
  return true;
}

}  // namespace

SourceFile parse_source(std::string_view text) {
  Parser p(text, 0);
  auto f = p.file();
  bool any = false;
  if (!all_marks_numbered(*f.body, any)) f.body = assign_mark_ids(f.body);
  return f;
}

ExprPtr parse_expr(std::string_view text, int agents) {
  Parser p(text, agents);
  return p.whole_expr();
}

// ---------------------------------------------------------------- mark ids

namespace {

ExprPtr renumber(const ExprPtr& e, int& next) {
  auto rebuild = [&](auto node) { return make_expr(std::move(node), e->loc); };
  auto list = [&](const std::vector<ExprPtr>& xs) {
    std::vector<ExprPtr> out;
    for (const auto& x : xs) out.push_back(renumber(x, next));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const ex::Lit&) { return e; },
          [&](const ex::Var&) { return e; },
          [&](const ex::Cake&) { return e; },
          [&](const ex::Tuple& x) { return rebuild(ex::Tuple{list(x.elems)}); },
          [&](const ex::Split& x) {
            auto s = renumber(x.scrutinee, next);
            auto b = renumber(x.body, next);
            return rebuild(ex::Split{x.binders, s, b});
          },
          [&](const ex::If& x) {
            auto c = renumber(x.cond, next);
            auto t = renumber(x.then_e, next);
            auto f = renumber(x.else_e, next);
            return rebuild(ex::If{c, t, f});
          },
          [&](const ex::Assert& x) {
            auto c = renumber(x.cond, next);
            auto b = renumber(x.body, next);
            return rebuild(ex::Assert{c, b});
          },
          [&](const ex::Op& x) { return rebuild(ex::Op{x.op, x.scalar, list(x.args)}); },
          [&](const ex::Divide& x) {
            auto i = renumber(x.interval, next);
            auto p = renumber(x.at, next);
            return rebuild(ex::Divide{i, p});
          },
          [&](const ex::Piece& x) { return rebuild(ex::Piece{list(x.parts)}); },
          [&](const ex::Mark& x) {
            int id = next++;
            auto i = renumber(x.interval, next);
            auto t = renumber(x.target, next);
            return rebuild(ex::Mark{x.agent, i, t, id});
          },
          [&](const ex::Eval& x) { return rebuild(ex::Eval{x.agent, renumber(x.subject, next)}); },
      },
      e->node);
}

}  // namespace

ExprPtr assign_mark_ids(const ExprPtr& e) {
  int next = 0;
  return renumber(e, next);
}

// ---------------------------------------------------------------- printing

namespace {

std::string interval_text(const Interval& i) {
  return "[" + to_string(i.lo) + ", " + to_string(i.hi) + "]";
}

std::string region_text(const Region& r) {
  if (auto* i = std::get_if<Interval>(&r)) return interval_text(*i);
  std::string s = "P{";
  const auto& parts = std::get<PieceVal>(r).parts;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) s += ", ";
    s += interval_text(parts[k]);
  }
  return s + "}";
}

// Precedence levels, loosest first.
enum Level { kTop = 0, kOr, kAnd, kNot, kCmp, kAdd, kScale, kPrimary };

class Printer {
 public:
  explicit Printer(const PrettyOptions& opt) : opt_(opt) {}

  std::string print(const Expr& e, int indent) {
    out_.str("");
    emit(e, kTop, indent);
    return out_.str();
  }

 private:
  void newline(int indent) { out_ << "\n" << std::string(indent * 2, ' '); }

  static int level_of(const Expr& e) {
    if (e.is<ex::Split>() || e.is<ex::If>() || e.is<ex::Assert>()) return kTop;
    if (e.is<ex::Op>()) {
      switch (e.as<ex::Op>().op) {
        case OpKind::Or: return kOr;
        case OpKind::And: return kAnd;
        case OpKind::Not: return kNot;
        case OpKind::Geq:
        case OpKind::Eq: return kCmp;
        case OpKind::Add: return kAdd;
        case OpKind::Scale: return kScale;
      }
    }
    return kPrimary;
  }

  // Prints e where the context demands at least precedence `min`.
  void emit(const Expr& e, int min, int indent) {
    if (level_of(e) < min) {
      out_ << "(";
      emit(e, kTop, indent);
      out_ << ")";
      return;
    }
    std::visit(
        overloaded{
            [&](const ex::Lit& x) { out_ << pretty_value(x.value); },
            [&](const ex::Var& x) { out_ << (x.read_only ? "@" : "") << x.name; },
            [&](const ex::Tuple& x) { args(x.elems, indent); },
            [&](const ex::Split& x) {
              out_ << "let ";
              for (std::size_t i = 0; i < x.binders.size(); ++i)
                out_ << (i ? ", " : "") << x.binders[i];
              out_ << " = split ";
              emit(*x.scrutinee, kTop, indent + 1);
              out_ << " in";
              newline(indent);
              emit(*x.body, kTop, indent);
            },
            [&](const ex::If& x) {
              out_ << "if ";
              emit(*x.cond, kTop, indent + 1);
              out_ << " then";
              newline(indent + 1);
              emit(*x.then_e, kTop, indent + 1);
              newline(indent);
              out_ << "else";
              newline(indent + 1);
              emit(*x.else_e, kTop, indent + 1);
            },
            [&](const ex::Assert& x) {
              out_ << "assert ";
              emit(*x.cond, kTop, indent + 1);
              out_ << " in";
              newline(indent);
              emit(*x.body, kTop, indent);
            },
            [&](const ex::Op& x) { op(x, indent); },
            [&](const ex::Cake&) { out_ << "cake"; },
            [&](const ex::Divide& x) {
              out_ << "divide";
              args({x.interval, x.at}, indent);
            },
            [&](const ex::Piece& x) {
              out_ << "piece";
              if (x.parts.empty()) out_ << "()";
              else args(x.parts, indent);
            },
            [&](const ex::Mark& x) {
              out_ << "mark[" << x.agent;
              if (opt_.mark_ids && x.id != kNoMark) out_ << "#" << x.id;
              out_ << "]";
              args({x.interval, x.target}, indent);
            },
            [&](const ex::Eval& x) {
              out_ << "eval[" << x.agent << "]";
              args({x.subject}, indent);
            },
        },
        e.node);
  }

  void args(const std::vector<ExprPtr>& xs, int indent) {
    out_ << "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out_ << ", ";
      emit(*xs[i], kTop, indent + 1);
    }
    out_ << ")";
  }

  void op(const ex::Op& x, int indent) {
    auto infix = [&](const char* sym, int lhs_min, int rhs_min) {
      emit(*x.args[0], lhs_min, indent);
      for (std::size_t i = 1; i < x.args.size(); ++i) {
        out_ << " " << sym << " ";
        emit(*x.args[i], rhs_min, indent);
      }
    };
    switch (x.op) {
      case OpKind::Or: infix("or", kOr, kAnd); break;
      case OpKind::And: infix("and", kAnd, kNot); break;
      case OpKind::Not:
        out_ << "not ";
        emit(*x.args[0], kNot, indent);
        break;
      case OpKind::Geq: infix(">=", kAdd, kAdd); break;
      case OpKind::Eq: infix("==", kAdd, kAdd); break;
      case OpKind::Add: infix("+", kAdd, kScale); break;
      case OpKind::Scale:
        out_ << to_string(x.scalar) << " * ";
        emit(*x.args[0], kScale, indent);
        break;
    }
  }

  const PrettyOptions& opt_;
  std::ostringstream out_;
};

}  // namespace

std::string pretty(const Expr& e, const PrettyOptions& opt) {
  Printer p(opt);
  return p.print(e, 0);
}

std::string pretty_source(const SourceFile& f, const PrettyOptions& opt) {
  return "agents " + std::to_string(f.agents) + ";\n" + pretty(*f.body, opt) + "\n";
}

std::string pretty_value(const Value& v) {
  return std::visit(
      overloaded{
          [](bool b) -> std::string { return b ? "true" : "false"; },
          [](const PointVal& p) { return to_string(p.at) + "#Pt"; },
          [](const Interval& i) { return interval_text(i); },
          [](const PieceVal& p) { return region_text(p); },
          [](const VltnVal& x) {
            std::string s = "vltn{";
            for (std::size_t i = 0; i < x.terms.size(); ++i) {
              const auto& t = x.terms[i];
              if (i) s += ", ";
              s += to_string(t.coeff) + " * V[" + std::to_string(t.agent) + "](" +
                   region_text(t.target) + ")";
            }
            return s + "}";
          },
          [](const TupleVal& t) {
            std::string s = "(";
            for (std::size_t i = 0; i < t.elems.size(); ++i) {
              if (i) s += ", ";
              s += pretty_value(t.elems[i]);
            }
            return s + ")";
          },
          [](const ReadOnlyVal& r) { return "rd(" + region_text(r.inner) + ")"; },
      },
      v.v);
}

std::string token_stream(std::string_view text) {
  std::string s;
  for (const auto& t : lex(text)) {
    if (t.kind == Tok::End) break;
    if (!s.empty()) s += ' ';
    s += t.text;
  }
  return s;
}

}  // namespace slice
