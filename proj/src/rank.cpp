#include "flowlab/rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowlab/poly_io.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

namespace {

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * sv(0)) ++rank;
    }
    return rank;
}

// Indices of `rank` rows forming a full-rank submatrix, via column-pivoted
// QR on the transpose.
std::vector<int> independent_rows(const Eigen::MatrixXd& m, int rank) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m.transpose());
    const auto& perm = qr.colsPermutation().indices();
    std::vector<int> rows;
    rows.reserve(rank);
    for (int i = 0; i < rank && i < perm.size(); ++i) rows.push_back(perm(i));
    std::sort(rows.begin(), rows.end());
    return rows;
}

void check_ensemble(const ControlFamily& family, const Ensemble& points) {
    if (family.dimension() != points.dimension())
        throw std::invalid_argument("rank: family and ensemble dimension mismatch");
    if (points.min_separation_inf() <= kDistinctnessTol)
        throw std::invalid_argument("rank: degenerate ensemble");
}

}  // namespace

std::vector<double> lift_eval(const ControlFamily& family, std::span<const double> theta,
                              const Ensemble& points) {
    const int d = family.dimension();
    if (points.dimension() != d) throw std::invalid_argument("lift_eval: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(points.size()) * d);
    for (int i = 0; i < points.size(); ++i) {
        family.eval(theta, points.point(i),
                    std::span<double>(out.data() + static_cast<std::size_t>(i) * d, d));
    }
    return out;
}

RankReport span_rank(const ControlFamily& family, const Ensemble& points,
                     std::uint64_t sampler_seed, int num_samples, double svd_rel_tol) {
    check_ensemble(family, points);
    const int d = family.dimension();
    const int n = points.size();

    RankReport report;
    report.ensemble_size = n;
    report.dimension = d;
    report.target_rank = n * d;
    report.tolerance = svd_rel_tol;

    Eigen::MatrixXd rows;
    std::vector<std::vector<double>> row_params;
    if (family.is_affine()) {
        report.method = "span_exact";
        const int k = family.param_count();
        rows.resize(k, n * d);
        for (int m = 0; m < k; ++m) {
            std::vector<double> theta(k, 0.0);
            theta[m] = 1.0;
            const auto lifted = lift_eval(family, theta, points);
            for (int c = 0; c < n * d; ++c) rows(m, c) = lifted[c];
            row_params.push_back(std::move(theta));
        }
        report.samples_used = k;
    } else {
        if (num_samples < 1) throw std::invalid_argument("span_rank: num_samples must be >= 1");
        report.method = "span_sampled";
        const int l = family.param_count();
        rows.resize(num_samples, n * d);
        row_params.reserve(num_samples);
        for (int s = 0; s < num_samples; ++s) {
            std::vector<double> theta(l);
            family.sample_params(sampler_seed, static_cast<std::uint64_t>(s), theta);
            const auto lifted = lift_eval(family, theta, points);
            for (int c = 0; c < n * d; ++c) rows(s, c) = lifted[c];
            row_params.push_back(std::move(theta));
        }
        report.samples_used = num_samples;
    }

    report.achieved_rank = numerical_rank(rows, svd_rel_tol);
    for (int r : independent_rows(rows, report.achieved_rank))
        report.witness_params.push_back(row_params[r]);
    return report;
}

RankReport lie_rank(const ControlFamily& family, const Ensemble& points, int degree_cap,
                    int depth_cap, double svd_rel_tol) {
    if (!family.is_affine())
        throw std::invalid_argument("lie_rank: requires an affine polynomial family");
    check_ensemble(family, points);
    const int d = family.dimension();
    const int n = points.size();

    const ClosureBasis closure = lie_closure(family.basis(), degree_cap, depth_cap);

    RankReport report;
    report.ensemble_size = n;
    report.dimension = d;
    report.target_rank = n * d;
    report.tolerance = svd_rel_tol;
    report.method = "lie_exact";
    report.samples_used = static_cast<int>(closure.size());

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(closure.size()), n * d);
    std::vector<double> x(d), fx(d);
    for (std::size_t m = 0; m < closure.size(); ++m) {
        const VectorField& field = closure.basis()[m];
        for (int i = 0; i < n; ++i) {
            field.eval(points.point(i), fx);
            for (int c = 0; c < d; ++c) rows(static_cast<Eigen::Index>(m), i * d + c) = fx[c];
        }
    }

    report.achieved_rank = numerical_rank(rows, svd_rel_tol);
    for (int r : independent_rows(rows, report.achieved_rank))
        report.witness_fields.push_back(to_string(closure.basis()[r]));
    return report;
}

bool projection_separates(const Ensemble& points, double a) {
    const int n = points.size();
    std::vector<double> z(n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        z[i] = a * points.point(i)[0] - points.point(i)[1];
        scale = std::max(scale, std::abs(z[i]));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(z[i] - z[j]) <= 1e-9 * scale) return false;
        }
    }
    return true;
}

VandermondeCertificate vandermonde_certificate(const Ensemble& points,
                                               std::uint64_t direction_seed) {
    if (points.dimension() != 2)
        throw std::invalid_argument("vandermonde_certificate: ensemble must live in R^2");
    const int n = points.size();

    VandermondeCertificate cert;
    Rng rng(direction_seed);
    bool found = false;
    for (int draw = 1; draw <= 1000; ++draw) {
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        cert.draws_used = draw;
        if (std::abs(a - b) <= 1e-6) continue;
        if (!projection_separates(points, a) || !projection_separates(points, b)) continue;
        cert.a = a;
        cert.b = b;
        found = true;
        break;
    }
    if (!found)
        throw std::runtime_error(
            "vandermonde_certificate: no admissible direction pair in 1000 draws");

    // Row i (1-based power p = i+1) evaluates the curl field of
    // (a*x1 - x2)^p over the ensemble, with first components grouped before
    // second components; rows N.. use b instead of a.
    Eigen::MatrixXd m(2 * n, 2 * n);
    auto fill_block = [&](double dir, int row_offset) {
        for (int p = 1; p <= n; ++p) {
            for (int k = 0; k < n; ++k) {
                const double z = dir * points.point(k)[0] - points.point(k)[1];
                const double base = p * std::pow(z, p - 1);
                m(row_offset + p - 1, k) = base;              // -d/dx2 of potential
                m(row_offset + p - 1, n + k) = dir * base;    // d/dx1 of potential
            }
        }
    };
    fill_block(cert.a, 0);
    fill_block(cert.b, n);
    cert.matrix = m;

    // Column equilibration removes the huge power-scale spread before the
    // pivot-ratio test.
    Eigen::MatrixXd scaled = m;
    for (int c = 0; c < 2 * n; ++c) {
        const double colmax = scaled.col(c).cwiseAbs().maxCoeff();
        if (colmax > 0.0) scaled.col(c) /= colmax;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pmin = pivots.minCoeff();
    const double pmax = pivots.maxCoeff();
    cert.min_abs_det_scale = pmax > 0.0 ? pmin / pmax : 0.0;
    cert.invertible = pmin > 0.0 && cert.min_abs_det_scale > kCertificatePivotTol;
    return cert;
}

}  // namespace flowlab
