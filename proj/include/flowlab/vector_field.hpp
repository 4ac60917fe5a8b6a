#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "flowlab/polynomial.hpp"

namespace flowlab {

// Polynomial vector field on R^d: one polynomial per component.
class VectorField {
   public:
    explicit VectorField(std::vector<Polynomial> components) : components_(std::move(components)) {
        if (components_.empty()) throw std::invalid_argument("vector field needs >= 1 component");
        const int d = static_cast<int>(components_.size());
        for (const auto& p : components_) {
            if (p.dimension() != d)
                throw std::invalid_argument("component dimension must equal component count");
        }
    }

    static VectorField zero(int dimension) {
        return VectorField(std::vector<Polynomial>(dimension, Polynomial::zero(dimension)));
    }

    int dimension() const { return static_cast<int>(components_.size()); }
    const Polynomial& component(int i) const { return components_.at(i); }
    const std::vector<Polynomial>& components() const { return components_; }

    bool is_zero() const {
        for (const auto& p : components_)
            if (!p.is_zero()) return false;
        return true;
    }

    // Max component degree; -1 for the zero field.
    int degree() const {
        int deg = -1;
        for (const auto& p : components_) deg = std::max(deg, p.degree());
        return deg;
    }

    VectorField operator+(const VectorField& other) const {
        require_same_dimension(other);
        std::vector<Polynomial> comps;
        comps.reserve(components_.size());
        for (std::size_t i = 0; i < components_.size(); ++i)
            comps.push_back(components_[i] + other.components_[i]);
        return VectorField(std::move(comps));
    }

    VectorField operator-(const VectorField& other) const {
        require_same_dimension(other);
        std::vector<Polynomial> comps;
        comps.reserve(components_.size());
        for (std::size_t i = 0; i < components_.size(); ++i)
            comps.push_back(components_[i] - other.components_[i]);
        return VectorField(std::move(comps));
    }

    VectorField operator*(const Rational& scalar) const {
        std::vector<Polynomial> comps;
        comps.reserve(components_.size());
        for (const auto& p : components_) comps.push_back(p * scalar);
        return VectorField(std::move(comps));
    }

    bool operator==(const VectorField& other) const { return components_ == other.components_; }

    void eval(std::span<const double> x, std::span<double> out) const {
        if (x.size() != components_.size() || out.size() != components_.size())
            throw std::invalid_argument("eval: length mismatch");
        for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i].eval(x);
    }

    std::vector<double> eval(std::span<const double> x) const {
        std::vector<double> out(components_.size());
        eval(x, out);
        return out;
    }

   private:
    void require_same_dimension(const VectorField& other) const {
        if (dimension() != other.dimension())
            throw std::invalid_argument("vector field dimension mismatch");
    }

    std::vector<Polynomial> components_;
};

inline VectorField operator*(const Rational& scalar, const VectorField& f) { return f * scalar; }

// Lie bracket [f, g] = (grad g) f - (grad f) g, computed exactly:
//   [f, g]_i = sum_j (d g_i / d x_j) f_j - (d f_i / d x_j) g_j.
VectorField lie_bracket(const VectorField& f, const VectorField& g);

// sum_i d f_i / d x_i, exact.
Polynomial divergence(const VectorField& f);

// 2D rotated gradient (-df/dx2, df/dx1) of a scalar potential; always
// divergence free.
VectorField curl2(const Polynomial& f);

}  // namespace flowlab
