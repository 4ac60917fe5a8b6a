#include "flowlab/families.hpp"

namespace flowlab::families {

namespace {

Polynomial mono2(int e1, int e2, int coeff = 1) {
    return Polynomial::monomial(2, Monomial(std::vector<int>{e1, e2}), Rational(coeff));
}

VectorField field2(Polynomial c1, Polynomial c2) {
    std::vector<Polynomial> comps;
    comps.push_back(std::move(c1));
    comps.push_back(std::move(c2));
    return VectorField(std::move(comps));
}

}  // namespace

std::vector<VectorField> volume_preserving_basis() {
    std::vector<VectorField> basis;
    basis.push_back(field2(Polynomial::constant(2, Rational(-1)), Polynomial::zero(2)));
    basis.push_back(field2(Polynomial::zero(2), Polynomial::constant(2, Rational(1))));
    basis.push_back(curl2(mono2(2, 2)));
    return basis;
}

std::vector<VectorField> curl_generators() {
    std::vector<VectorField> gens;
    gens.push_back(curl2(mono2(1, 0)));
    gens.push_back(curl2(mono2(0, 1)));
    gens.push_back(curl2(mono2(2, 2)));
    return gens;
}

std::vector<VectorField> origin_fixed_basis() {
    std::vector<VectorField> basis;
    basis.push_back(field2(mono2(3, 0), Polynomial::zero(2)));
    basis.push_back(field2(mono2(2, 0), Polynomial::zero(2)));
    basis.push_back(field2(mono2(0, 1), Polynomial::zero(2)));
    basis.push_back(field2(Polynomial::zero(2), mono2(0, 3)));
    basis.push_back(field2(Polynomial::zero(2), mono2(0, 2)));
    basis.push_back(field2(Polynomial::zero(2), mono2(1, 0)));
    return basis;
}

std::vector<VectorField> origin_fixed_generators() {
    std::vector<VectorField> gens;
    gens.push_back(field2(mono2(2, 0), Polynomial::zero(2)));
    gens.push_back(field2(mono2(3, 0), Polynomial::zero(2)));
    gens.push_back(field2(Polynomial::zero(2), mono2(0, 2)));
    gens.push_back(field2(Polynomial::zero(2), mono2(0, 3)));
    gens.push_back(field2(mono2(0, 1), Polynomial::zero(2)));
    gens.push_back(field2(Polynomial::zero(2), mono2(1, 0)));
    return gens;
}

std::vector<VectorField> cubic_1d_basis() {
    std::vector<VectorField> basis;
    basis.push_back(VectorField({Polynomial::monomial(1, Monomial(std::vector<int>{3}), Rational(1))}));
    basis.push_back(VectorField({Polynomial::monomial(1, Monomial(std::vector<int>{2}), Rational(1))}));
    return basis;
}

std::vector<VectorField> closure_1d_generators() {
    std::vector<VectorField> gens;
    gens.push_back(VectorField({Polynomial::monomial(1, Monomial(std::vector<int>{2}), Rational(1))}));
    gens.push_back(VectorField({Polynomial::monomial(1, Monomial(std::vector<int>{3}), Rational(1))}));
    return gens;
}

}  // namespace flowlab::families
