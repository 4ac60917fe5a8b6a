#include "flowlab/vector_field.hpp"

namespace flowlab {

VectorField lie_bracket(const VectorField& f, const VectorField& g) {
    if (f.dimension() != g.dimension())
        throw std::invalid_argument("lie_bracket: dimension mismatch");
    const int d = f.dimension();
    std::vector<Polynomial> comps;
    comps.reserve(d);
    for (int i = 0; i < d; ++i) {
        Polynomial acc = Polynomial::zero(d);
        for (int j = 0; j < d; ++j) {
            acc = acc + g.component(i).partial(j) * f.component(j);
            acc = acc - f.component(i).partial(j) * g.component(j);
        }
        comps.push_back(std::move(acc));
    }
    return VectorField(std::move(comps));
}

Polynomial divergence(const VectorField& f) {
    const int d = f.dimension();
    Polynomial acc = Polynomial::zero(d);
    for (int i = 0; i < d; ++i) acc = acc + f.component(i).partial(i);
    return acc;
}

VectorField curl2(const Polynomial& f) {
    if (f.dimension() != 2) throw std::invalid_argument("curl2: potential must be 2-dimensional");
    std::vector<Polynomial> comps;
    comps.push_back(-f.partial(1));
    comps.push_back(f.partial(0));
    return VectorField(std::move(comps));
}

}  // namespace flowlab
