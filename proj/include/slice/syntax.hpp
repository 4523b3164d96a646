#pragma once

#include "slice/core.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace slice {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg);
  int line, col;
};

struct SourceFile {
  int agents = 0;
  ExprPtr body;
};

// A whole `.slice` file: `agents N;` followed by one expression. Mark ids
// are assigned in pre-order unless every mark carries an explicit `#k`.
SourceFile parse_source(std::string_view text);

// A bare expression. Agent indices are checked against `agents` when it is
// positive.
ExprPtr parse_expr(std::string_view text, int agents = 0);

struct PrettyOptions {
  bool mark_ids = false;  // print mark[a#k]
};

std::string pretty(const Expr& e, const PrettyOptions& opt = {});
std::string pretty_source(const SourceFile& f, const PrettyOptions& opt = {});
std::string pretty_value(const Value& v);

// Renumbers every mark 0, 1, ... in pre-order (node before its children,
// children left to right).
ExprPtr assign_mark_ids(const ExprPtr& e);

// Lexes `text` and returns its tokens joined by single spaces, dropping
// whitespace and comments. Used to compare source against pretty output.
std::string token_stream(std::string_view text);

}  // namespace slice
