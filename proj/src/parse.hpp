#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "formula.hpp"

namespace ppa {

// Parses the formula file format:
//   params <id>...
//   vars <id>...
//   formula:
//   <body>
// Body precedence: not > and > or; quantifiers bind maximally to the right.
// Atoms: <expr> (<=|<|>=|>|=|!=) <expr> and <poly> | <expr>. '#' starts a
// line comment. With `unordered` set, order atoms are rejected.
Formula parse_formula(const std::string& text, bool unordered = false);

// Polynomial over the given parameter names (no group variables).
Poly parse_poly(const std::string& text, std::span<const std::string> params);

// "t1=4,t2=-6" -> values in params order; every parameter must be assigned.
std::vector<Int> parse_assignment(const std::string& text, std::span<const std::string> params);

// Box text: either a bare range "lo..hi" (default for every variable) or
// per-variable entries "x=0..30,y=-5..5", optionally mixed with a bare
// default range first.
struct BoxSpec {
    std::optional<std::pair<Int, Int>> fallback;
    std::vector<std::pair<std::string, std::pair<Int, Int>>> entries;
};
BoxSpec parse_box_spec(const std::string& text);

}  // namespace ppa
