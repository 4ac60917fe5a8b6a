#include "flowlab/poly_io.hpp"

#include <cctype>
#include <sstream>

namespace flowlab {

namespace {

std::string format_term(const Monomial& m, const Rational& coeff_abs) {
    std::ostringstream out;
    bool printed = false;
    if (coeff_abs != 1 || m.is_constant()) {
        out << format_rational(coeff_abs);
        printed = true;
    }
    for (int i = 0; i < m.dimension(); ++i) {
        const int e = m.exponents[i];
        if (e == 0) continue;
        if (printed) out << "*";
        out << "x" << (i + 1);
        if (e > 1) out << "^" << e;
        printed = true;
    }
    return out.str();
}

class Scanner {
   public:
    Scanner(const std::string& text, int dimension, std::size_t offset)
        : text_(text), dimension_(dimension), offset_(offset) {}

    Polynomial parse() {
        Polynomial p(dimension_);
        skip_space();
        if (done()) throw ParseError("empty polynomial expression", offset_ + pos_);
        bool first = true;
        while (true) {
            skip_space();
            if (done()) break;
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++pos_;
            } else if (!first) {
                throw ParseError("expected '+' or '-' between terms", offset_ + pos_);
            }
            skip_space();
            auto [m, c] = parse_term();
            p.add_term(m, sign > 0 ? c : -c);
            first = false;
        }
        return p;
    }

   private:
    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    void skip_space() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    std::pair<Monomial, Rational> parse_term() {
        Monomial m = Monomial::constant(dimension_);
        Rational coeff(1);
        bool saw_factor = false;
        while (true) {
            skip_space();
            if (done()) break;
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                coeff *= parse_rational_literal();
                saw_factor = true;
            } else if (c == 'x') {
                auto [axis, exp] = parse_power();
                m.exponents[axis] += exp;
                saw_factor = true;
            } else {
                break;
            }
            skip_space();
            if (!done() && peek() == '*') {
                ++pos_;
                continue;
            }
            break;
        }
        if (!saw_factor) throw ParseError("expected a coefficient or variable", offset_ + pos_);
        return {m, coeff};
    }

    Rational parse_rational_literal() {
        const std::string num = parse_digits("integer");
        if (!done() && peek() == '/') {
            ++pos_;
            const std::string den = parse_digits("denominator");
            const BigInt d{den};
            if (d == 0) throw ParseError("zero denominator", offset_ + pos_);
            return Rational{BigInt{num}, d};
        }
        return Rational{BigInt{num}};
    }

    std::pair<int, int> parse_power() {
        ++pos_;  // consume 'x'
        const std::size_t at = pos_;
        const std::string idx = parse_digits("variable index");
        const int axis = std::stoi(idx) - 1;
        if (axis < 0 || axis >= dimension_)
            throw ParseError("variable index out of range for dimension " +
                                 std::to_string(dimension_),
                             offset_ + at);
        int exp = 1;
        if (!done() && peek() == '^') {
            ++pos_;
            exp = std::stoi(parse_digits("exponent"));
            if (exp < 0) throw ParseError("negative exponent", offset_ + pos_);
        }
        return {axis, exp};
    }

    std::string parse_digits(const char* what) {
        const std::size_t start = pos_;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start)
            throw ParseError(std::string("expected ") + what, offset_ + start);
        return text_.substr(start, pos_ - start);
    }

    const std::string& text_;
    int dimension_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        const bool negative = c < 0;
        if (first) {
            if (negative) out << "-";
        } else {
            out << (negative ? " - " : " + ");
        }
        out << format_term(m, negative ? Rational(-c) : c);
        first = false;
    }
    return out.str();
}

std::string to_string(const VectorField& f) {
    std::ostringstream out;
    out << "[";
    for (int i = 0; i < f.dimension(); ++i) {
        if (i) out << ", ";
        out << to_string(f.component(i));
    }
    out << "]";
    return out.str();
}

Polynomial parse_polynomial(const std::string& text, int dimension) {
    return Scanner(text, dimension, 0).parse();
}

Polynomial parse_component(const std::string& text, int dimension, std::size_t offset) {
    return Scanner(text, dimension, offset).parse();
}

VectorField parse_vector_field(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin == end) throw ParseError("empty field expression", begin);

    if (text.compare(begin, 2, "v:") == 0) {
        const Polynomial potential = parse_component(text.substr(begin + 2, end - begin - 2), 2, begin + 2);
        return curl2(potential);
    }

    const char open = text[begin];
    if (open != '(' && open != '[')
        throw ParseError("expected '(', '[' or 'v:' at start of field expression", begin);
    const char close = open == '(' ? ')' : ']';
    if (text[end - 1] != close) throw ParseError("unterminated component list", end - 1);

    // Split on top-level commas; component expressions contain no nesting.
    std::vector<std::pair<std::string, std::size_t>> pieces;
    std::size_t item_start = begin + 1;
    for (std::size_t i = begin + 1; i < end; ++i) {
        if (text[i] == ',' || i == end - 1) {
            pieces.emplace_back(text.substr(item_start, i - item_start), item_start);
            item_start = i + 1;
        }
    }
    if (pieces.empty()) throw ParseError("empty component list", begin);

    const int d = static_cast<int>(pieces.size());
    std::vector<Polynomial> comps;
    comps.reserve(pieces.size());
    for (const auto& [piece, at] : pieces) comps.push_back(parse_component(piece, d, at));
    return VectorField(std::move(comps));
}

}  // namespace flowlab
