#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flowlab/activation.hpp"
#include "flowlab/vector_field.hpp"

namespace flowlab {

// Which entries of (W, A, b) a restricted resnet family exposes as controls.
// Restricted entries are structurally absent from the parameter vector, not
// zeroed: translation_only fixes W = A = I.
enum class WeightStructure { Full, DiagonalW, TranslationOnly, DiagonalWAndA };

const char* weight_structure_name(WeightStructure ws);
WeightStructure parse_weight_structure(const std::string& name);

// A parameterized right-hand side x -> f(x; theta). Two kinds:
//   affine  f(x; u) = sum_m u_m f_m(x) over fixed polynomial basis fields
//   resnet  f(x; theta) = W sigma(A x + b) with theta packing the free
//           entries of (W, A, b) row-major in that order
// One instance is immutable and shared freely across threads.
class ControlFamily {
   public:
    enum class Kind { Affine, Resnet };

    static ControlFamily affine(std::vector<VectorField> basis);
    static ControlFamily resnet(int dimension, Activation act, WeightStructure ws);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    int param_count() const { return param_count_; }
    bool is_affine() const { return kind_ == Kind::Affine; }
    Activation activation() const { return activation_; }
    WeightStructure weight_structure() const { return structure_; }
    // True when jacobians rely on an a.e. derivative convention.
    bool nonsmooth() const { return kind_ == Kind::Resnet && activation_ == Activation::Relu; }
    const std::vector<VectorField>& basis() const;

    // out = f(x; theta)
    void eval(std::span<const double> theta, std::span<const double> x,
              std::span<double> out) const;

    // jac (row-major d*d) = df/dx at (x; theta)
    void jacobian_x(std::span<const double> theta, std::span<const double> x,
                    std::span<double> jac) const;

    double divergence_at(std::span<const double> theta, std::span<const double> x) const;

    // Reverse-mode pullback of w through f: accumulates
    //   grad_x     += (df/dx)^T w        (skipped when grad_x is empty)
    //   grad_theta += (df/dtheta)^T w
    void vjp(std::span<const double> theta, std::span<const double> x, std::span<const double> w,
             std::span<double> grad_x, std::span<double> grad_theta) const;

    // Parameter draw for sampled rank certificates: W, A entries i.i.d.
    // normal with stddev 1/sqrt(d), b entries standard normal. Sample
    // `index` is independent of how many samples are requested.
    void sample_params(std::uint64_t seed, std::uint64_t index, std::span<double> theta) const;

    std::string describe() const;

   private:
    ControlFamily() = default;
    void check_theta(std::span<const double> theta) const;
    void check_x(std::span<const double> x) const;

    struct CompiledTerm {
        double coeff;
        std::vector<int> exponents;
    };
    struct CompiledPoly {
        std::vector<CompiledTerm> terms;
        double eval(std::span<const double> x) const;
    };
    struct CompiledField {
        std::vector<CompiledPoly> components;      // d entries
        std::vector<CompiledPoly> gradient;        // d*d entries, row-major d(comp_i)/dx_j
        CompiledPoly divergence;
    };

    Kind kind_ = Kind::Affine;
    int dimension_ = 0;
    int param_count_ = 0;
    Activation activation_ = Activation::Tanh;
    WeightStructure structure_ = WeightStructure::Full;
    std::vector<VectorField> basis_;
    std::vector<CompiledField> compiled_;
};

}  // namespace flowlab
