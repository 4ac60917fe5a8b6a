#include "flowlab/target.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowlab {

TargetFunction TargetFunction::constant(std::vector<double> value) {
    if (value.empty()) throw std::invalid_argument("constant target: empty value");
    TargetFunction t;
    t.kind_ = Kind::Constant;
    t.dimension_ = static_cast<int>(value.size());
    t.value_ = std::move(value);
    return t;
}

TargetFunction TargetFunction::coordinate_swap(int dimension) {
    if (dimension != 2) throw std::invalid_argument("coordinate_swap: defined for d = 2");
    TargetFunction t;
    t.kind_ = Kind::CoordinateSwap;
    t.dimension_ = dimension;
    return t;
}

TargetFunction TargetFunction::polynomial(VectorField components) {
    TargetFunction t;
    t.kind_ = Kind::PolynomialMap;
    t.dimension_ = components.dimension();
    t.poly_.push_back(std::move(components));
    return t;
}

TargetFunction TargetFunction::tabulated(std::vector<double> lo, std::vector<double> hi,
                                         std::vector<int> nodes_per_axis,
                                         std::vector<double> values) {
    const std::size_t d = lo.size();
    if (d == 0 || hi.size() != d || nodes_per_axis.size() != d)
        throw std::invalid_argument("tabulated target: inconsistent shapes");
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) {
        if (nodes_per_axis[a] < 2) throw std::invalid_argument("tabulated target: needs >= 2 nodes");
        if (!(lo[a] < hi[a])) throw std::invalid_argument("tabulated target: bad box");
        total *= nodes_per_axis[a];
    }
    if (values.size() != total * d)
        throw std::invalid_argument("tabulated target: value count mismatch");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("tabulated target: non-finite value");
    }
    TargetFunction t;
    t.kind_ = Kind::Tabulated;
    t.dimension_ = static_cast<int>(d);
    t.lo_ = std::move(lo);
    t.hi_ = std::move(hi);
    t.nodes_per_axis_ = std::move(nodes_per_axis);
    t.table_ = std::move(values);
    return t;
}

void TargetFunction::eval(std::span<const double> x, std::span<double> out) const {
    if (static_cast<int>(x.size()) != dimension_ || static_cast<int>(out.size()) != dimension_)
        throw std::invalid_argument("target eval: dimension mismatch");
    switch (kind_) {
        case Kind::Constant:
            std::copy(value_.begin(), value_.end(), out.begin());
            return;
        case Kind::CoordinateSwap:
            out[0] = x[1];
            out[1] = x[0];
            return;
        case Kind::PolynomialMap:
            poly_.front().eval(x, out);
            return;
        case Kind::Tabulated: break;
    }

    // Multilinear interpolation with clamping at the box boundary.
    const int d = dimension_;
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
        const int cells = nodes_per_axis_[a] - 1;
        double u = (x[a] - lo_[a]) / (hi_[a] - lo_[a]) * cells;
        u = std::clamp(u, 0.0, static_cast<double>(cells));
        base[a] = std::min(static_cast<int>(u), cells - 1);
        frac[a] = u - base[a];
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (int corner = 0; corner < (1 << d); ++corner) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            const bool high = corner & (1 << a);
            w *= high ? frac[a] : 1.0 - frac[a];
            flat = flat * nodes_per_axis_[a] + base[a] + (high ? 1 : 0);
        }
        if (w == 0.0) continue;
        for (int c = 0; c < d; ++c) out[c] += w * table_[flat * d + c];
    }
}

}  // namespace flowlab
