#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace flowlab {

// A power product x1^e1 * ... * xd^ed. The exponent vector length is the
// ambient dimension; entries are non-negative.
struct Monomial {
    std::vector<int> exponents;

    Monomial() = default;
    explicit Monomial(std::vector<int> exps) : exponents(std::move(exps)) {}
    static Monomial constant(int dimension) { return Monomial(std::vector<int>(dimension, 0)); }
    // Unit monomial x_axis (0-based axis).
    static Monomial unit(int dimension, int axis) {
        std::vector<int> e(dimension, 0);
        e[axis] = 1;
        return Monomial(std::move(e));
    }

    int dimension() const { return static_cast<int>(exponents.size()); }
    int total_degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
    bool is_constant() const { return total_degree() == 0; }

    Monomial operator*(const Monomial& other) const {
        Monomial r = *this;
        for (std::size_t i = 0; i < exponents.size(); ++i) r.exponents[i] += other.exponents[i];
        return r;
    }

    bool operator==(const Monomial& other) const { return exponents == other.exponents; }
};

// Graded lexicographic order: higher total degree first, ties broken by
// lexicographically larger exponent vector first. This is the canonical term
// order used for serialization and echelon pivoting.
inline bool graded_lex_before(const Monomial& a, const Monomial& b) {
    const int da = a.total_degree();
    const int db = b.total_degree();
    if (da != db) return da > db;
    return a.exponents > b.exponents;
}

struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return graded_lex_before(a, b); }
};

}  // namespace flowlab
