#include <doctest.h>

#include <random>

#include "flowlab/poly_io.hpp"
#include "support/generators.hpp"

using namespace flowlab;

TEST_CASE("canonical serialization orders terms graded-lex") {
    Polynomial p(2);
    p.add_term(Monomial(std::vector<int>{0, 3}), Rational(-1, 3));
    p.add_term(Monomial(std::vector<int>{2, 1}), Rational(2));
    CHECK(to_string(p) == "2*x1^2*x2 - 1/3*x2^3");

    CHECK(to_string(Polynomial::zero(2)) == "0");
    CHECK(to_string(Polynomial::constant(1, Rational(-7, 2))) == "-7/2");

    Polynomial q(2);
    q.add_term(Monomial(std::vector<int>{1, 0}), Rational(1));
    q.add_term(Monomial(std::vector<int>{0, 0}), Rational(-1));
    CHECK(to_string(q) == "x1 - 1");
}

TEST_CASE("field serialization uses a bracketed component list") {
    const VectorField f = curl2(parse_polynomial("x1^2*x2^2", 2));
    CHECK(to_string(f) == "[-2*x1^2*x2, 2*x1*x2^2]");
}

TEST_CASE("parser handles signs, rationals and powers") {
    const Polynomial p = parse_polynomial("-x1 + 3/4*x2^2 - 2", 2);
    CHECK(p.coefficient(Monomial(std::vector<int>{1, 0})) == Rational(-1));
    CHECK(p.coefficient(Monomial(std::vector<int>{0, 2})) == Rational(3, 4));
    CHECK(p.coefficient(Monomial(std::vector<int>{0, 0})) == Rational(-2));
}

TEST_CASE("round trip through the canonical form is exact") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Polynomial p = testgen::random_polynomial(rng, 3, 6, 5);
        CHECK(parse_polynomial(to_string(p), 3) == p);
    }
    for (int trial = 0; trial < 50; ++trial) {
        const VectorField f = testgen::random_field(rng, 2, 5);
        CHECK(parse_vector_field(to_string(f)) == f);
    }
}

TEST_CASE("field expressions support both list and potential forms") {
    const VectorField constant = parse_vector_field("(0,1)");
    CHECK(constant.dimension() == 2);
    CHECK(constant.component(0).is_zero());
    CHECK(constant.component(1) == Polynomial::constant(2, Rational(1)));

    const VectorField curl = parse_vector_field("v:x1^2*x2^2");
    CHECK(curl == curl2(parse_polynomial("x1^2*x2^2", 2)));

    const VectorField one_d = parse_vector_field("(x1^2)");
    CHECK(one_d.dimension() == 1);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_polynomial("x3", 2), ParseError);
    CHECK_THROWS_AS(parse_polynomial("", 2), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x1 + + x2", 2), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x1 x2", 2), ParseError);
    CHECK_THROWS_AS(parse_vector_field("(x1, x2"), ParseError);
    CHECK_THROWS_AS(parse_vector_field("{x1}"), ParseError);

    try {
        parse_polynomial("x1 + x9", 2);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position == 6);
    }
}
