#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "flowlab/control_family.hpp"
#include "flowlab/ensemble.hpp"
#include "flowlab/lie_closure.hpp"

namespace flowlab {

inline constexpr double kDefaultSvdRelTol = 1e-8;

// Numerical rank certificate for the lifted control directions of an
// N-point ensemble. target_rank is N*d; achieved_rank counts singular values
// above tolerance * sigma_max. Sampled reports are lower bounds only.
struct RankReport {
    int ensemble_size = 0;
    int dimension = 0;
    int target_rank = 0;
    int achieved_rank = 0;
    std::string method;  // "span_exact" | "span_sampled" | "lie_exact"
    double tolerance = kDefaultSvdRelTol;
    int samples_used = 0;
    // Witnesses realizing the independent directions: parameter vectors for
    // the span methods, serialized closure fields for the Lie method.
    std::vector<std::vector<double>> witness_params;
    std::vector<std::string> witness_fields;

    bool full_rank() const { return achieved_rank == target_rank; }
};

// Stacks f(x_1; theta), ..., f(x_N; theta) into one R^{Nd} vector.
std::vector<double> lift_eval(const ControlFamily& family, std::span<const double> theta,
                              const Ensemble& points);

// Span rank of the lifted family directions. Affine families are assembled
// exactly from their basis; resnet families are sampled with num_samples
// seeded parameter draws (a lower-bound certificate, labeled span_sampled).
RankReport span_rank(const ControlFamily& family, const Ensemble& points,
                     std::uint64_t sampler_seed, int num_samples,
                     double svd_rel_tol = kDefaultSvdRelTol);

// Rank of the lifted Lie-closure slice of an affine polynomial family.
RankReport lie_rank(const ControlFamily& family, const Ensemble& points, int degree_cap,
                    int depth_cap, double svd_rel_tol = kDefaultSvdRelTol);

// Explicit 2N x 2N invertibility certificate for an ensemble in R^2, built
// from the curl fields of (a*x1 - x2)^i and (b*x1 - x2)^j. The direction
// pair (a, b) is searched with seeded draws until both projections separate
// the points.
struct VandermondeCertificate {
    double a = 0.0;
    double b = 0.0;
    Eigen::MatrixXd matrix;
    bool invertible = false;
    // Smallest-to-largest LU pivot magnitude ratio after column
    // equilibration; ~1 is perfectly conditioned, below the invertibility
    // threshold means numerically singular.
    double min_abs_det_scale = 0.0;
    int draws_used = 0;
};

inline constexpr double kCertificatePivotTol = 1e-10;

VandermondeCertificate vandermonde_certificate(const Ensemble& points,
                                               std::uint64_t direction_seed);

// True when a*x1 - x2 takes pairwise-distinct values over the ensemble
// (the admissibility filter used by the certificate search).
bool projection_separates(const Ensemble& points, double a);

}  // namespace flowlab
