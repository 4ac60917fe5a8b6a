#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowlab {

enum class Activation { Tanh, Sigmoid, Relu, Identity };

inline double activate(Activation act, double z) {
    switch (act) {
        case Activation::Tanh: return std::tanh(z);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Identity: return z;
    }
    return z;
}

// Derivative; for relu the a.e. convention with sigma'(0) = 0.
inline double activate_deriv(Activation act, double z) {
    switch (act) {
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

inline const char* activation_name(Activation act) {
    switch (act) {
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Identity: return "identity";
    }
    return "?";
}

inline Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "relu") return Activation::Relu;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace flowlab
