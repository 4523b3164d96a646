#include "slice/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <set>
#include <stdexcept>

namespace slice::smt {

using logic::FormulaKind;
using logic::FormulaPtr;

std::string quote(const std::string& name) { return "|" + name + "|"; }

std::string smt_rational(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string body = den == 1 ? num.str() : "(/ " + num.str() + " " + den.str() + ")";
  return neg ? "(- " + body + ")" : body;
}

namespace {

std::string smt_linear(const logic::TermPtr& t) {
  auto lin = logic::linearize(t);
  if (!lin) throw std::invalid_argument("non-linear term in VC: " + logic::to_string(t));
  std::vector<std::string> parts;
  for (const auto& [v, c] : lin->coeffs)
    parts.push_back(c == 1 ? quote(v) : "(* " + smt_rational(c) + " " + quote(v) + ")");
  if (lin->constant != 0 || parts.empty()) parts.push_back(smt_rational(lin->constant));
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

void formula_vars(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == FormulaKind::Geq || f->kind == FormulaKind::Eq) {
    for (const auto& side : {f->lhs, f->rhs})
      if (auto lin = logic::linearize(side))
        for (const auto& [v, c] : lin->coeffs) out.insert(v);
  }
  for (const auto& a : f->args) formula_vars(a, out);
}

}  // namespace

std::string smt_formula(const FormulaPtr& f) {
  auto many = [&](const char* op, const char* empty) {
    if (f->args.empty()) return std::string(empty);
    if (f->args.size() == 1) return smt_formula(f->args[0]);
    std::string out = std::string("(") + op;
    for (const auto& a : f->args) out += " " + smt_formula(a);
    return out + ")";
  };
  switch (f->kind) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Geq: return "(>= " + smt_linear(f->lhs) + " " + smt_linear(f->rhs) + ")";
    case FormulaKind::Eq: return "(= " + smt_linear(f->lhs) + " " + smt_linear(f->rhs) + ")";
    case FormulaKind::IsTrue:
      throw std::invalid_argument("unlifted boolean term in VC: " + logic::to_string(f));
    case FormulaKind::Not: return "(not " + smt_formula(f->args[0]) + ")";
    case FormulaKind::And: return many("and", "true");
    case FormulaKind::Or: return many("or", "false");
    case FormulaKind::Implies:
      return "(=> " + smt_formula(f->args[0]) + " " + smt_formula(f->args[1]) + ")";
  }
  return "?";
}

Query make_query(const logic::VC& vc, const logic::Replacement& s, int agents) {
  std::set<std::string> vars;
  for (std::size_t i = 1; i < s.order.size(); ++i) {
    if (s.order[i] >= 0) vars.insert(logic::y_name(s.order[i]));
    for (AgentId a = 1; a <= agents; ++a) vars.insert(logic::z_name(a, s.order[i]));
  }
  formula_vars(vc.hyp, vars);
  formula_vars(vc.goal, vars);
  Query q;
  q.vars.assign(vars.begin(), vars.end());
  for (const auto& v : q.vars) q.body += "(declare-fun " + quote(v) + " () Real)\n";
  q.body += "(assert " + smt_formula(vc.hyp) + ")\n";
  q.body += "(assert (not " + smt_formula(vc.goal) + "))\n";
  return q;
}

std::string emit_script(const Query& q) {
  return "(set-logic QF_LRA)\n(set-option :produce-models true)\n" + q.body + "(check-sat)\n";
}

// ---------------------------------------------------------------- s-expressions

namespace {

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

class SexpParser {
 public:
  explicit SexpParser(const std::string& s) : s_(s) {}

  Sexp parse() {
    skip();
    if (i_ >= s_.size()) throw std::invalid_argument("empty s-expression");
    Sexp out;
    if (s_[i_] == '(') {
      out.is_list = true;
      ++i_;
      for (skip(); i_ < s_.size() && s_[i_] != ')'; skip()) out.list.push_back(parse());
      if (i_ >= s_.size()) throw std::invalid_argument("unbalanced s-expression");
      ++i_;
    } else if (s_[i_] == '|') {
      std::size_t end = s_.find('|', i_ + 1);
      if (end == std::string::npos) throw std::invalid_argument("unterminated symbol");
      out.atom = s_.substr(i_ + 1, end - i_ - 1);
      i_ = end + 1;
    } else {
      std::size_t start = i_;
      while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' &&
             s_[i_] != ')')
        ++i_;
      out.atom = s_.substr(start, i_ - start);
    }
    return out;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  const std::string& s_;
  std::size_t i_ = 0;
};

Rational eval_value(const Sexp& e) {
  if (!e.is_list) return parse_rational(e.atom);
  if (e.list.empty() || e.list[0].is_list) throw std::invalid_argument("bad value expression");
  const std::string& op = e.list[0].atom;
  if (op != "-" && op != "+" && op != "*" && op != "/")
    throw std::invalid_argument("unknown operator '" + op + "' in value");
  std::vector<Rational> xs;
  for (std::size_t i = 1; i < e.list.size(); ++i) xs.push_back(eval_value(e.list[i]));
  if (op == "-" && xs.size() == 1) return -xs[0];
  if (xs.empty()) throw std::invalid_argument("operator without operands");
  Rational acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (op == "/") acc /= xs[i];
    else if (op == "-") acc -= xs[i];
    else if (op == "+") acc += xs[i];
    else acc *= xs[i];
  }
  return acc;
}

}  // namespace

Rational parse_smt_value(const std::string& text) { return eval_value(SexpParser(text).parse()); }

// ---------------------------------------------------------------- process

Solver::Solver(std::vector<std::string> command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

Solver::~Solver() { stop(); }

void Solver::start() {
  signal(SIGPIPE, SIG_IGN);
  int in[2], out[2], status[2];
  if (pipe(in) != 0 || pipe(out) != 0 || pipe2(status, O_CLOEXEC) != 0)
    throw std::runtime_error("pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    close(status[0]);
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(out[1], 2);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    // Only reached when exec failed; the status pipe tells the parent why.
    int err = errno;
    ssize_t ignored = ::write(status[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }
  close(status[1]);
  close(in[0]);
  close(out[1]);
  int err = 0;
  ssize_t got;
  do got = ::read(status[0], &err, sizeof err);
  while (got < 0 && errno == EINTR);
  close(status[0]);
  if (got == sizeof err) {
    close(in[1]);
    close(out[0]);
    waitpid(pid, nullptr, 0);
    throw std::runtime_error("cannot run solver '" + command_.front() + "': " + std::strerror(err));
  }
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  send("(set-logic QF_LRA)\n(set-option :produce-models true)\n");
}

void Solver::stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = to_child_ = from_child_ = -1;
}

void Solver::send(const std::string& text) {
  std::size_t done = 0;
  while (done < text.size()) {
    ssize_t n = ::write(to_child_, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("solver pipe closed");
    }
    done += static_cast<std::size_t>(n);
  }
}

Solver::ReadStatus Solver::read_response(std::string& out) {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    // Try to cut one complete response from the buffer.
    std::size_t i = 0;
    while (i < buffer_.size() && std::isspace(static_cast<unsigned char>(buffer_[i]))) ++i;
    if (i < buffer_.size()) {
      if (buffer_[i] == '(') {
        int depth = 0;
        bool in_bar = false, in_str = false;
        for (std::size_t j = i; j < buffer_.size(); ++j) {
          char c = buffer_[j];
          if (in_bar) { in_bar = c != '|'; continue; }
          if (in_str) { in_str = c != '"'; continue; }
          if (c == '|') in_bar = true;
          else if (c == '"') in_str = true;
          else if (c == '(') ++depth;
          else if (c == ')' && --depth == 0) {
            out = buffer_.substr(i, j + 1 - i);
            buffer_.erase(0, j + 1);
            return ReadStatus::Ok;
          }
        }
      } else if (auto nl = buffer_.find('\n', i); nl != std::string::npos) {
        out = buffer_.substr(i, nl - i);
        buffer_.erase(0, nl + 1);
        return ReadStatus::Ok;
      }
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return ReadStatus::Timeout;
    pollfd p{from_child_, POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) return ReadStatus::Timeout;
    if (r < 0) return ReadStatus::Closed;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return ReadStatus::Closed;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

CheckResult Solver::check(const Query& q) {
  CheckResult res;
  try {
    if (pid_ < 0) start();
    send("(push 1)\n" + q.body + "(check-sat)\n");
  } catch (const std::exception& e) {
    stop();
    res.reason = e.what();
    return res;
  }
  std::string line;
  for (;;) {
    if (auto st = read_response(line); st != ReadStatus::Ok) {
      stop();
      if (st == ReadStatus::Timeout) {
        res.status = CheckResult::Status::Unknown;
        res.reason = "timeout";
      } else {
        res.reason = "solver exited";
        if (!res.diagnostics.empty()) res.reason += ": " + res.diagnostics.back();
      }
      return res;
    }
    if (line == "sat" || line == "unsat" || line == "unknown") break;
    res.diagnostics.push_back(line);
  }
  if (line == "unsat") res.status = CheckResult::Status::Unsat;
  if (line == "unknown") {
    res.status = CheckResult::Status::Unknown;
    res.reason = "solver returned unknown";
  }
  if (line == "sat") res.status = CheckResult::Status::Sat;
  // An empty get-value is an error in SMT-LIB, so skip it when nothing is wanted.
  if (line == "sat" && !q.vars.empty()) {
    std::string names;
    for (const auto& v : q.vars) names += " " + quote(v);
    send("(get-value (" + names + "))\n");
    std::string resp;
    if (auto st = read_response(resp); st != ReadStatus::Ok) {
      stop();
      if (st == ReadStatus::Timeout) {
        res.status = CheckResult::Status::Unknown;
        res.reason = "timeout while reading the model";
      } else {
        res.status = CheckResult::Status::Error;
        res.reason = "solver exited while printing the model";
      }
      return res;
    }
    try {
      Sexp s = SexpParser(resp).parse();
      for (const auto& pair : s.list) {
        if (!pair.is_list || pair.list.size() != 2) throw std::invalid_argument("bad model entry");
        res.model[pair.list[0].atom] = eval_value(pair.list[1]);
      }
    } catch (const std::exception& e) {
      res.status = CheckResult::Status::Error;
      res.reason = std::string("unparsable model: ") + e.what();
      res.diagnostics.push_back(resp);
    }
  }
  send("(pop 1)\n");
  if (!res.diagnostics.empty() && res.status != CheckResult::Status::Sat &&
      res.status != CheckResult::Status::Unsat && res.reason.empty())
    res.reason = res.diagnostics.front();
  return res;
}

CheckResult check_script(const std::vector<std::string>& command, const std::string& script,
                         const std::vector<std::string>& vars, std::chrono::milliseconds timeout) {
  // The script carries its own header; strip it so the persistent header of
  // a fresh Solver is not repeated.
  std::string body = script;
  for (const char* h : {"(set-logic QF_LRA)\n", "(set-option :produce-models true)\n", "(check-sat)\n"})
    if (auto at = body.find(h); at != std::string::npos) body.erase(at, std::strlen(h));
  Solver s(command, timeout);
  return s.check({vars, body});
}

}  // namespace slice::smt
