#pragma once

#include "slice/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace slice {

struct Path {
  ExprPtr expr;  // no If nodes
  std::uint64_t index = 0;
};

// |B(e)|. Throws std::overflow_error past 2^64 - 1.
std::uint64_t path_count(const Expr& e);

// The index-th element of B(e) in the fixed order: true branch before false
// branch, and for several children the first child varies slowest.
Path path_at(const ExprPtr& e, std::uint64_t index);

// Streams B(e) in index order; stop early by returning false.
void for_each_path(const ExprPtr& e, const std::function<bool(const Path&)>& f);
std::vector<Path> enumerate_paths(const ExprPtr& e);

// Index of the path taken by a run with the given if-decisions (in
// evaluation order, as recorded in EvalTrace::decisions).
std::uint64_t select_path(const Expr& e, const std::vector<bool>& decisions);

bool contains_if(const Expr& e);

}  // namespace slice
