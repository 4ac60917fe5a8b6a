#pragma once

#include <vector>

#include "flowlab/vector_field.hpp"

namespace flowlab::families {

// Basis fields of the 2D volume-preserving control system
//   dx1 = -u1 - 2 u3 x1^2 x2,   dx2 = u2 + 2 u3 x1 x2^2,
// i.e. { (-1, 0), (0, 1), curl2(x1^2 x2^2) }. Every element is divergence
// free, so all of its flows preserve area.
std::vector<VectorField> volume_preserving_basis();

// Curl-field generator set { curl2(x1), curl2(x2), curl2(x1^2 x2^2) } whose
// Lie closure is the full space of curl fields of polynomial potentials.
std::vector<VectorField> curl_generators();

// Basis fields of the componentwise cubic system
//   dx1 = u1 x1^3 + u2 x1^2 + u3 x2,   dx2 = u4 x2^3 + u5 x2^2 + u6 x1,
// in control order. Every field vanishes at the origin, so the origin is a
// fixed point of every flow.
std::vector<VectorField> origin_fixed_basis();

// The same six fields in closure-generator order:
//   (x1^2,0), (x1^3,0), (0,x2^2), (0,x2^3), (x2,0), (0,x1).
std::vector<VectorField> origin_fixed_generators();

// 1D family { x^3, x^2 } driving du = u1 x^3 + u2 x^2.
std::vector<VectorField> cubic_1d_basis();

// 1D closure generators { x^2, x^3 }.
std::vector<VectorField> closure_1d_generators();

}  // namespace flowlab::families
