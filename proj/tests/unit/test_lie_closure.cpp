#include <doctest.h>

#include <random>

#include "flowlab/families.hpp"
#include "flowlab/lie_closure.hpp"
#include "flowlab/poly_io.hpp"
#include "support/generators.hpp"

using namespace flowlab;

namespace {

VectorField mono_1d(int coeff, int degree) {
    Polynomial p(1);
    p.add_term(Monomial(std::vector<int>{degree}), Rational(coeff));
    return VectorField({p});
}

std::vector<Rational> coeff_vector_1d(const VectorField& f, int max_degree) {
    std::vector<Rational> v(max_degree + 1, Rational(0));
    for (const auto& [m, c] : f.component(0).terms()) v[m.exponents[0]] = c;
    return v;
}

// Brute-force span: bracket all pairs up to the requested depth with no
// echelon shortcuts, keeping every distinct field produced.
testgen::RationalSpan brute_force_span_1d(const std::vector<VectorField>& generators,
                                          int degree_cap, int depth) {
    std::vector<VectorField> pool = generators;
    for (int round = 0; round < depth; ++round) {
        const std::size_t sz = pool.size();
        for (std::size_t i = 0; i < sz; ++i) {
            for (std::size_t j = 0; j < sz; ++j) {
                VectorField br = lie_bracket(pool[i], pool[j]);
                if (br.is_zero() || br.degree() > degree_cap) continue;
                bool seen = false;
                for (const auto& existing : pool) {
                    if (existing == br) {
                        seen = true;
                        break;
                    }
                }
                if (!seen) pool.push_back(std::move(br));
            }
        }
    }
    testgen::RationalSpan span;
    for (const auto& f : pool) span.add(coeff_vector_1d(f, degree_cap));
    return span;
}

}  // namespace

TEST_CASE("1D closure of {x^2, x^3} equals the brute-force span") {
    const auto gens = families::closure_1d_generators();
    const ClosureBasis closure = lie_closure(gens, 7, 8);
    const auto oracle = brute_force_span_1d(gens, 7, 6);

    CHECK(closure.size() == oracle.rank());
    CHECK(closure.size() == 6);  // x^2 .. x^7
    CHECK(closure.reached_fixpoint());

    for (int k = 0; k <= 7; ++k) {
        const VectorField f = mono_1d(1, k);
        const bool in_closure = closure.contains(f).is_member();
        const bool in_oracle = oracle.contains(coeff_vector_1d(f, 7));
        CHECK(in_closure == in_oracle);
        CHECK(in_closure == (k >= 2));
    }
}

TEST_CASE("curl generator closure covers all curl monomial fields through potential degree 6") {
    const ClosureBasis closure = lie_closure(families::curl_generators(), 5, 8);
    CHECK(closure.reached_fixpoint());
    CHECK(closure.size() == 27);

    int members = 0;
    for (int total = 1; total <= 6; ++total) {
        for (int a = 0; a <= total; ++a) {
            const Polynomial pot = Polynomial::monomial(
                2, Monomial(std::vector<int>{a, total - a}), Rational(1));
            if (closure.contains(curl2(pot)).is_member()) ++members;
        }
    }
    CHECK(members == 27);

    // Brackets of divergence-free fields stay divergence free; all basis
    // elements must inherit that.
    for (const auto& b : closure.basis()) CHECK(divergence(b).is_zero());
}

TEST_CASE("constant fields commute so the closure is just their span") {
    std::vector<VectorField> gens;
    gens.push_back(VectorField({Polynomial::constant(2, Rational(1)), Polynomial::zero(2)}));
    gens.push_back(VectorField({Polynomial::zero(2), Polynomial::constant(2, Rational(1))}));
    const ClosureBasis closure = lie_closure(gens, 5, 8);
    CHECK(closure.size() == 2);
    CHECK(closure.reached_fixpoint());
}

TEST_CASE("membership certificates") {
    const ClosureBasis closure = lie_closure(families::closure_1d_generators(), 7, 8);

    SUBCASE("the coordinates reconstruct members exactly") {
        for (const auto& b : closure.basis()) {
            const auto cert = closure.contains(b);
            REQUIRE(cert.is_member());
            CHECK(closure.combine(cert.coordinates) == b);
        }
        // A random combination round-trips too.
        VectorField combo = mono_1d(3, 2) + mono_1d(-5, 5) + mono_1d(7, 7);
        const auto cert = closure.contains(combo);
        REQUIRE(cert.is_member());
        CHECK(closure.combine(cert.coordinates) == combo);
    }

    SUBCASE("x and constants are not members") {
        CHECK(!closure.contains(mono_1d(1, 1)).is_member());
        CHECK(!closure.contains(mono_1d(1, 0)).is_member());
    }

    SUBCASE("zero field is a member with all-zero coordinates") {
        const auto cert = closure.contains(VectorField::zero(1));
        REQUIRE(cert.is_member());
        for (const auto& c : cert.coordinates) CHECK(c == 0);
    }

    SUBCASE("fields over the degree cap are indeterminate") {
        const auto cert = closure.contains(mono_1d(1, 8));
        CHECK(cert.status == MembershipCertificate::Status::Indeterminate);
    }
}

TEST_CASE("raising caps never shrinks the decided membership set") {
    const auto gens = families::curl_generators();
    const ClosureBasis small = lie_closure(gens, 4, 8);
    const ClosureBasis big = lie_closure(gens, 6, 8);
    for (const auto& b : small.basis()) CHECK(big.contains(b).is_member());

    const ClosureBasis shallow = lie_closure(gens, 5, 2);
    const ClosureBasis deep = lie_closure(gens, 5, 8);
    for (const auto& b : shallow.basis()) CHECK(deep.contains(b).is_member());
}

TEST_CASE("closure construction is deterministic") {
    const auto run = [] {
        const ClosureBasis c = lie_closure(families::curl_generators(), 5, 8);
        std::string s;
        for (const auto& b : c.basis()) s += to_string(b) + "\n";
        return s;
    };
    CHECK(run() == run());
}

TEST_CASE("basis is closed under bracket within the caps") {
    const ClosureBasis closure = lie_closure(families::curl_generators(), 5, 8);
    for (const auto& a : closure.basis()) {
        for (const auto& b : closure.basis()) {
            const VectorField br = lie_bracket(a, b);
            if (br.is_zero() || br.degree() > closure.degree_cap()) continue;
            CHECK(closure.contains(br).is_member());
        }
    }
}

TEST_CASE("componentwise cubic generators reach all monomial fields") {
    CHECK(verify_origin_fixed_closure(4));

    // Dropping the (0, x1) coupling generator loses the cross terms.
    auto gens = families::origin_fixed_generators();
    gens.pop_back();
    CHECK(!verify_monomial_closure(gens, 3));

    CHECK_THROWS_AS(verify_origin_fixed_closure(2), std::invalid_argument);
}

TEST_CASE("closure input validation") {
    CHECK_THROWS_AS(lie_closure({}, 5, 5), std::invalid_argument);
    std::vector<VectorField> mixed;
    mixed.push_back(VectorField::zero(1));
    mixed.push_back(VectorField::zero(2));
    CHECK_THROWS_AS(lie_closure(mixed, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS(lie_closure(families::curl_generators(), 0, 5), std::invalid_argument);
}
