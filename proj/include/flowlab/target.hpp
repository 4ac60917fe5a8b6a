#pragma once

#include <span>
#include <vector>

#include "flowlab/vector_field.hpp"

namespace flowlab {

// Target map F: R^d -> R^d for approximation experiments.
class TargetFunction {
   public:
    enum class Kind { Constant, CoordinateSwap, PolynomialMap, Tabulated };

    static TargetFunction constant(std::vector<double> value);
    static TargetFunction coordinate_swap(int dimension = 2);
    static TargetFunction polynomial(VectorField components);
    // Values on a regular node grid over a box, queried with multilinear
    // interpolation; `values` is laid out node-major (row-major over the
    // grid), each node carrying d components.
    static TargetFunction tabulated(std::vector<double> lo, std::vector<double> hi,
                                    std::vector<int> nodes_per_axis, std::vector<double> values);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }

    void eval(std::span<const double> x, std::span<double> out) const;
    std::vector<double> eval(std::span<const double> x) const {
        std::vector<double> out(dimension_);
        eval(x, out);
        return out;
    }

   private:
    TargetFunction() = default;

    Kind kind_ = Kind::Constant;
    int dimension_ = 0;
    std::vector<double> value_;
    std::vector<VectorField> poly_;  // single entry when PolynomialMap
    std::vector<double> lo_, hi_;
    std::vector<int> nodes_per_axis_;
    std::vector<double> table_;
};

}  // namespace flowlab
