#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowlab/monomial.hpp"
#include "flowlab/rational.hpp"

namespace flowlab {

// Exact multivariate polynomial over the rationals. Terms are kept in a map
// ordered by graded-lex so iteration order is canonical; zero coefficients
// are never stored. The zero polynomial has an empty term map and degree -1.
class Polynomial {
   public:
    using TermMap = std::map<Monomial, Rational, GradedLexLess>;

    explicit Polynomial(int dimension) : dimension_(dimension) {
        if (dimension < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
    }

    static Polynomial zero(int dimension) { return Polynomial(dimension); }

    static Polynomial constant(int dimension, const Rational& value) {
        Polynomial p(dimension);
        p.set_coefficient(Monomial::constant(dimension), value);
        return p;
    }

    // The coordinate polynomial x_axis (0-based).
    static Polynomial variable(int dimension, int axis) {
        Polynomial p(dimension);
        p.set_coefficient(Monomial::unit(dimension, axis), Rational(1));
        return p;
    }

    static Polynomial monomial(int dimension, const Monomial& m, const Rational& coeff) {
        Polynomial p(dimension);
        p.set_coefficient(m, coeff);
        return p;
    }

    int dimension() const { return dimension_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const { return terms_.empty() ? -1 : terms_.begin()->first.total_degree(); }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    Rational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void set_coefficient(const Monomial& m, const Rational& value) {
        if (m.dimension() != dimension_) throw std::invalid_argument("monomial dimension mismatch");
        if (value == 0) {
            terms_.erase(m);
        } else {
            terms_[m] = value;
        }
    }

    void add_term(const Monomial& m, const Rational& value) {
        if (m.dimension() != dimension_) throw std::invalid_argument("monomial dimension mismatch");
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (value != 0) terms_.emplace(m, value);
            return;
        }
        it->second += value;
        if (it->second == 0) terms_.erase(it);
    }

    Polynomial operator+(const Polynomial& other) const {
        require_same_dimension(other);
        Polynomial r = *this;
        for (const auto& [m, c] : other.terms_) r.add_term(m, c);
        return r;
    }

    Polynomial operator-(const Polynomial& other) const {
        require_same_dimension(other);
        Polynomial r = *this;
        for (const auto& [m, c] : other.terms_) r.add_term(m, -c);
        return r;
    }

    Polynomial operator-() const {
        Polynomial r(dimension_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    // Exact product: convolution of exponent vectors.
    Polynomial operator*(const Polynomial& other) const {
        require_same_dimension(other);
        Polynomial r(dimension_);
        for (const auto& [ma, ca] : terms_) {
            for (const auto& [mb, cb] : other.terms_) {
                r.add_term(ma * mb, ca * cb);
            }
        }
        return r;
    }

    Polynomial operator*(const Rational& scalar) const {
        Polynomial r(dimension_);
        if (scalar == 0) return r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * scalar);
        return r;
    }

    bool operator==(const Polynomial& other) const {
        return dimension_ == other.dimension_ && terms_ == other.terms_;
    }

    // Exact partial derivative with respect to coordinate `axis` (0-based).
    Polynomial partial(int axis) const {
        if (axis < 0 || axis >= dimension_) throw std::out_of_range("partial: axis out of range");
        Polynomial r(dimension_);
        for (const auto& [m, c] : terms_) {
            const int e = m.exponents[axis];
            if (e == 0) continue;
            Monomial dm = m;
            dm.exponents[axis] = e - 1;
            r.add_term(dm, c * e);
        }
        return r;
    }

    // Floating-point evaluation. Per-variable power tables are built by
    // repeated multiplication and terms are accumulated in canonical order,
    // so the result is deterministic for a given term map.
    double eval(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dimension_)
            throw std::invalid_argument("eval: point dimension mismatch");
        const int deg = degree();
        if (deg < 0) return 0.0;
        std::vector<double> powers(static_cast<std::size_t>(dimension_) * (deg + 1));
        for (int i = 0; i < dimension_; ++i) {
            powers[i * (deg + 1)] = 1.0;
            for (int e = 1; e <= deg; ++e) powers[i * (deg + 1) + e] = powers[i * (deg + 1) + e - 1] * x[i];
        }
        double acc = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = to_double(c);
            for (int i = 0; i < dimension_; ++i) t *= powers[i * (deg + 1) + m.exponents[i]];
            acc += t;
        }
        return acc;
    }

    // Exact evaluation at a rational point (test oracle for eval()).
    Rational eval_exact(std::span<const Rational> x) const {
        if (static_cast<int>(x.size()) != dimension_)
            throw std::invalid_argument("eval_exact: point dimension mismatch");
        Rational acc(0);
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < dimension_; ++i) {
                for (int e = 0; e < m.exponents[i]; ++e) t *= x[i];
            }
            acc += t;
        }
        return acc;
    }

   private:
    void require_same_dimension(const Polynomial& other) const {
        if (dimension_ != other.dimension_)
            throw std::invalid_argument("polynomial dimension mismatch");
    }

    int dimension_;
    TermMap terms_;
};

inline Polynomial operator*(const Rational& scalar, const Polynomial& p) { return p * scalar; }

}  // namespace flowlab
