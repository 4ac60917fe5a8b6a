#pragma once

#include <string>

#include "flowlab/vector_field.hpp"

namespace flowlab {

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

// Canonical text form: terms in graded-lex order, e.g. "2*x1^2*x2 - 1/3*x2^3".
// Unit coefficients are omitted in front of variables; the zero polynomial
// prints as "0".
std::string to_string(const Polynomial& p);

// Fields print as a bracketed component list, e.g. "[-2*x1^2*x2, 2*x1*x2^2]".
std::string to_string(const VectorField& f);

// Parses the canonical polynomial form: a sum of signed terms, each a
// '*'-separated product of rational literals and powers "x<k>" / "x<k>^<e>"
// with 1-based variable indices bounded by `dimension`.
Polynomial parse_polynomial(const std::string& text, int dimension);

// Field expressions:
//   "(p1, p2, ...)" or "[p1, p2, ...]"  component list; dimension = count
//   "v:<poly>"                          2D rotated gradient of the potential
Polynomial parse_component(const std::string& text, int dimension, std::size_t offset);
VectorField parse_vector_field(const std::string& text);

}  // namespace flowlab
