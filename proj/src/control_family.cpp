#include "flowlab/control_family.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flowlab/rng.hpp"

namespace flowlab {

namespace {
constexpr int kMaxDim = 32;  // stack scratch bound; desk-scale systems are tiny
}

const char* weight_structure_name(WeightStructure ws) {
    switch (ws) {
        case WeightStructure::Full: return "full";
        case WeightStructure::DiagonalW: return "diagonal_W";
        case WeightStructure::TranslationOnly: return "translation_only";
        case WeightStructure::DiagonalWAndA: return "diagonal_W_and_A";
    }
    return "?";
}

WeightStructure parse_weight_structure(const std::string& name) {
    if (name == "full") return WeightStructure::Full;
    if (name == "diagonal_W") return WeightStructure::DiagonalW;
    if (name == "translation_only") return WeightStructure::TranslationOnly;
    if (name == "diagonal_W_and_A") return WeightStructure::DiagonalWAndA;
    throw std::invalid_argument("unknown weight structure: " + name);
}

double ControlFamily::CompiledPoly::eval(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& term : terms) {
        double t = term.coeff;
        for (std::size_t i = 0; i < term.exponents.size(); ++i) {
            for (int e = 0; e < term.exponents[i]; ++e) t *= x[i];
        }
        acc += t;
    }
    return acc;
}

ControlFamily ControlFamily::affine(std::vector<VectorField> basis) {
    if (basis.empty()) throw std::invalid_argument("affine family needs >= 1 basis field");
    const int d = basis.front().dimension();
    if (d > kMaxDim) throw std::invalid_argument("dimension too large");
    for (const auto& f : basis) {
        if (f.dimension() != d)
            throw std::invalid_argument("affine family: basis dimension mismatch");
    }

    auto compile_poly = [](const Polynomial& p) {
        CompiledPoly out;
        out.terms.reserve(p.term_count());
        for (const auto& [m, c] : p.terms()) {
            out.terms.push_back(CompiledTerm{to_double(c), m.exponents});
        }
        return out;
    };

    ControlFamily fam;
    fam.kind_ = Kind::Affine;
    fam.dimension_ = d;
    fam.param_count_ = static_cast<int>(basis.size());
    fam.compiled_.reserve(basis.size());
    for (const auto& f : basis) {
        CompiledField cf;
        cf.components.reserve(d);
        cf.gradient.reserve(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i) cf.components.push_back(compile_poly(f.component(i)));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) cf.gradient.push_back(compile_poly(f.component(i).partial(j)));
        }
        cf.divergence = compile_poly(divergence(f));
        fam.compiled_.push_back(std::move(cf));
    }
    fam.basis_ = std::move(basis);
    return fam;
}

ControlFamily ControlFamily::resnet(int dimension, Activation act, WeightStructure ws) {
    if (dimension < 1 || dimension > kMaxDim)
        throw std::invalid_argument("resnet family: bad dimension");
    ControlFamily fam;
    fam.kind_ = Kind::Resnet;
    fam.dimension_ = dimension;
    fam.activation_ = act;
    fam.structure_ = ws;
    const int d = dimension;
    switch (ws) {
        case WeightStructure::Full: fam.param_count_ = 2 * d * d + d; break;
        case WeightStructure::DiagonalW: fam.param_count_ = d * d + 2 * d; break;
        case WeightStructure::TranslationOnly: fam.param_count_ = d; break;
        case WeightStructure::DiagonalWAndA: fam.param_count_ = 3 * d; break;
    }
    return fam;
}

const std::vector<VectorField>& ControlFamily::basis() const {
    if (kind_ != Kind::Affine) throw std::logic_error("basis(): not an affine family");
    return basis_;
}

void ControlFamily::check_theta(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != param_count_)
        throw std::invalid_argument("parameter vector has wrong length: expected " +
                                    std::to_string(param_count_) + ", got " +
                                    std::to_string(theta.size()));
}

void ControlFamily::check_x(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension_)
        throw std::invalid_argument("state vector has wrong length");
}

namespace {

// Decoded views of the packed resnet parameter vector. W and A are either a
// full row-major block or a diagonal; absent blocks mean identity.
struct ResnetParams {
    std::span<const double> w;  // d*d or d (diagonal) or empty (identity)
    std::span<const double> a;
    std::span<const double> b;
    bool w_diag = false;
    bool a_diag = false;

    double W(int i, int j, int d) const {
        if (w.empty()) return i == j ? 1.0 : 0.0;
        if (w_diag) return i == j ? w[i] : 0.0;
        return w[i * d + j];
    }
    double A(int i, int j, int d) const {
        if (a.empty()) return i == j ? 1.0 : 0.0;
        if (a_diag) return i == j ? a[i] : 0.0;
        return a[i * d + j];
    }
};

ResnetParams decode(std::span<const double> theta, int d, WeightStructure ws) {
    ResnetParams p;
    switch (ws) {
        case WeightStructure::Full:
            p.w = theta.subspan(0, d * d);
            p.a = theta.subspan(d * d, d * d);
            p.b = theta.subspan(2 * d * d, d);
            break;
        case WeightStructure::DiagonalW:
            p.w = theta.subspan(0, d);
            p.w_diag = true;
            p.a = theta.subspan(d, d * d);
            p.b = theta.subspan(d + d * d, d);
            break;
        case WeightStructure::TranslationOnly:
            p.b = theta.subspan(0, d);
            break;
        case WeightStructure::DiagonalWAndA:
            p.w = theta.subspan(0, d);
            p.w_diag = true;
            p.a = theta.subspan(d, d);
            p.a_diag = true;
            p.b = theta.subspan(2 * d, d);
            break;
    }
    return p;
}

}  // namespace

void ControlFamily::eval(std::span<const double> theta, std::span<const double> x,
                         std::span<double> out) const {
    check_theta(theta);
    check_x(x);
    const int d = dimension_;
    if (kind_ == Kind::Affine) {
        for (int i = 0; i < d; ++i) out[i] = 0.0;
        for (int m = 0; m < param_count_; ++m) {
            if (theta[m] == 0.0) continue;
            for (int i = 0; i < d; ++i) out[i] += theta[m] * compiled_[m].components[i].eval(x);
        }
        return;
    }
    const ResnetParams p = decode(theta, d, structure_);
    std::array<double, kMaxDim> s{};
    for (int k = 0; k < d; ++k) {
        double z = p.b[k];
        for (int j = 0; j < d; ++j) z += p.A(k, j, d) * x[j];
        s[k] = activate(activation_, z);
    }
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += p.W(i, k, d) * s[k];
        out[i] = acc;
    }
}

void ControlFamily::jacobian_x(std::span<const double> theta, std::span<const double> x,
                               std::span<double> jac) const {
    check_theta(theta);
    check_x(x);
    const int d = dimension_;
    if (kind_ == Kind::Affine) {
        for (int ij = 0; ij < d * d; ++ij) jac[ij] = 0.0;
        for (int m = 0; m < param_count_; ++m) {
            if (theta[m] == 0.0) continue;
            for (int ij = 0; ij < d * d; ++ij)
                jac[ij] += theta[m] * compiled_[m].gradient[ij].eval(x);
        }
        return;
    }
    const ResnetParams p = decode(theta, d, structure_);
    std::array<double, kMaxDim> ds{};
    for (int k = 0; k < d; ++k) {
        double z = p.b[k];
        for (int j = 0; j < d; ++j) z += p.A(k, j, d) * x[j];
        ds[k] = activate_deriv(activation_, z);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k) acc += p.W(i, k, d) * ds[k] * p.A(k, j, d);
            jac[i * d + j] = acc;
        }
    }
}

double ControlFamily::divergence_at(std::span<const double> theta,
                                    std::span<const double> x) const {
    check_theta(theta);
    check_x(x);
    const int d = dimension_;
    if (kind_ == Kind::Affine) {
        double acc = 0.0;
        for (int m = 0; m < param_count_; ++m) {
            if (theta[m] == 0.0) continue;
            acc += theta[m] * compiled_[m].divergence.eval(x);
        }
        return acc;
    }
    const ResnetParams p = decode(theta, d, structure_);
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
        double z = p.b[k];
        for (int j = 0; j < d; ++j) z += p.A(k, j, d) * x[j];
        double wa = 0.0;
        for (int i = 0; i < d; ++i) wa += p.W(i, k, d) * p.A(k, i, d);
        acc += activate_deriv(activation_, z) * wa;
    }
    return acc;
}

void ControlFamily::vjp(std::span<const double> theta, std::span<const double> x,
                        std::span<const double> w, std::span<double> grad_x,
                        std::span<double> grad_theta) const {
    check_theta(theta);
    check_x(x);
    const int d = dimension_;
    if (kind_ == Kind::Affine) {
        for (int m = 0; m < param_count_; ++m) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += compiled_[m].components[i].eval(x) * w[i];
            grad_theta[m] += acc;
        }
        if (!grad_x.empty()) {
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (int m = 0; m < param_count_; ++m) {
                    if (theta[m] == 0.0) continue;
                    for (int i = 0; i < d; ++i)
                        acc += theta[m] * compiled_[m].gradient[i * d + j].eval(x) * w[i];
                }
                grad_x[j] += acc;
            }
        }
        return;
    }

    const ResnetParams p = decode(theta, d, structure_);
    std::array<double, kMaxDim> z{}, s{}, ds{}, u{}, v{};
    for (int k = 0; k < d; ++k) {
        double zz = p.b[k];
        for (int j = 0; j < d; ++j) zz += p.A(k, j, d) * x[j];
        z[k] = zz;
        s[k] = activate(activation_, zz);
        ds[k] = activate_deriv(activation_, zz);
    }
    // u = W^T w, v = sigma'(z) .* u
    for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += p.W(i, k, d) * w[i];
        u[k] = acc;
        v[k] = ds[k] * acc;
    }
    if (!grad_x.empty()) {
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k) acc += p.A(k, j, d) * v[k];
            grad_x[j] += acc;
        }
    }
    // Parameter blocks in packing order.
    std::size_t off = 0;
    switch (structure_) {
        case WeightStructure::Full:
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) grad_theta[off + i * d + k] += w[i] * s[k];
            off += d * d;
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) grad_theta[off + k * d + j] += v[k] * x[j];
            off += d * d;
            for (int k = 0; k < d; ++k) grad_theta[off + k] += v[k];
            break;
        case WeightStructure::DiagonalW:
            for (int k = 0; k < d; ++k) grad_theta[off + k] += w[k] * s[k];
            off += d;
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) grad_theta[off + k * d + j] += v[k] * x[j];
            off += d * d;
            for (int k = 0; k < d; ++k) grad_theta[off + k] += v[k];
            break;
        case WeightStructure::TranslationOnly:
            for (int k = 0; k < d; ++k) grad_theta[off + k] += v[k];
            break;
        case WeightStructure::DiagonalWAndA:
            for (int k = 0; k < d; ++k) grad_theta[off + k] += w[k] * s[k];
            off += d;
            for (int k = 0; k < d; ++k) grad_theta[off + k] += v[k] * x[k];
            off += d;
            for (int k = 0; k < d; ++k) grad_theta[off + k] += v[k];
            break;
    }
}

void ControlFamily::sample_params(std::uint64_t seed, std::uint64_t index,
                                  std::span<double> theta) const {
    if (kind_ != Kind::Resnet)
        throw std::logic_error("sample_params: only resnet families are sampled");
    check_theta(theta);
    const int d = dimension_;
    const double wa_std = 1.0 / std::sqrt(static_cast<double>(d));
    Rng rng(seed, index);
    std::size_t off = 0;
    auto fill = [&](std::size_t count, double stddev) {
        for (std::size_t i = 0; i < count; ++i) theta[off++] = rng.normal(stddev);
    };
    switch (structure_) {
        case WeightStructure::Full:
            fill(static_cast<std::size_t>(d) * d, wa_std);
            fill(static_cast<std::size_t>(d) * d, wa_std);
            fill(d, 1.0);
            break;
        case WeightStructure::DiagonalW:
            fill(d, wa_std);
            fill(static_cast<std::size_t>(d) * d, wa_std);
            fill(d, 1.0);
            break;
        case WeightStructure::TranslationOnly:
            fill(d, 1.0);
            break;
        case WeightStructure::DiagonalWAndA:
            fill(d, wa_std);
            fill(d, wa_std);
            fill(d, 1.0);
            break;
    }
}

std::string ControlFamily::describe() const {
    std::ostringstream out;
    if (kind_ == Kind::Affine) {
        out << "affine(d=" << dimension_ << ", k=" << param_count_ << ")";
    } else {
        out << "resnet(d=" << dimension_ << ", " << activation_name(activation_) << ", "
            << weight_structure_name(structure_) << ")";
    }
    return out.str();
}

}  // namespace flowlab
