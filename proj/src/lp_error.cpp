#include "flowlab/lp_error.hpp"

#include <cmath>
#include <numbers>

namespace flowlab {

namespace {

double lp_impl(const ControlFamily& family, const ControlSchedule& schedule,
               const TargetFunction& target, const DomainSpec& domain, double p,
               const LpOptions& options, bool parallel) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_error: p must be >= 1");
    if (family.dimension() != domain.dimension() || target.dimension() != domain.dimension())
        throw std::invalid_argument("lp_error: dimension mismatch");

    const Quadrature quad = domain.quadrature();
    if (quad.count == 0) throw std::invalid_argument("lp_error: empty quadrature");

    FlowOptions fopts;
    fopts.step = options.step;
    fopts.blowup_threshold = options.blowup_threshold;
    const BatchEndpoints batch =
        parallel ? endpoints_batch(family, schedule, quad.nodes, quad.count, fopts)
                 : endpoints_batch_serial(family, schedule, quad.nodes, quad.count, fopts);
    if (batch.any_blowup()) return std::numeric_limits<double>::infinity();

    const int d = domain.dimension();
    const double norm = options.normalized ? quad.measure : 1.0;
    std::vector<double> f(d);
    double acc = 0.0;
    for (int i = 0; i < quad.count; ++i) {
        target.eval(quad.node(i), f);
        double sq = 0.0;
        for (int c = 0; c < d; ++c) {
            const double diff = f[c] - batch.endpoints[i * d + c];
            sq += diff * diff;
        }
        acc += quad.weights[i] / norm * std::pow(std::sqrt(sq), p);
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_error(const ControlFamily& family, const ControlSchedule& schedule,
                const TargetFunction& target, const DomainSpec& domain, double p,
                const LpOptions& options) {
    return lp_impl(family, schedule, target, domain, p, options, true);
}

double lp_error_serial(const ControlFamily& family, const ControlSchedule& schedule,
                       const TargetFunction& target, const DomainSpec& domain, double p,
                       const LpOptions& options) {
    return lp_impl(family, schedule, target, domain, p, options, false);
}

VolumeFloorReport volume_floor_check(const ControlFamily& family,
                                     const ControlSchedule& schedule, double step) {
    if (family.dimension() != 2)
        throw std::invalid_argument("volume_floor_check: family must be two-dimensional");
    VolumeFloorReport report;
    report.floor = std::numbers::pi / 2.0;

    const DomainSpec disc = DomainSpec::disc({0.0, 0.0}, 1.0);
    LpOptions opts;
    opts.step = step;
    const double err =
        lp_error(family, schedule, TargetFunction::constant({0.0, 0.0}), disc, 2.0, opts);
    if (!std::isfinite(err)) {
        report.applicable = false;
        return report;
    }
    report.error_sq = err * err;
    report.floor_respected = report.error_sq >= report.floor - report.budget;
    return report;
}

FixedPointReport fixed_point_check(const ControlFamily& family, const ControlSchedule& schedule,
                                   double step) {
    FlowOptions opts;
    opts.step = step;
    const std::vector<double> origin(family.dimension(), 0.0);
    const FlowResult r = integrate(family, schedule, origin, opts);
    FixedPointReport report;
    double norm = 0.0;
    for (double v : r.endpoint) norm = std::max(norm, std::abs(v));
    report.origin_norm = norm;
    report.pinned = norm < 1e-8;
    return report;
}

}  // namespace flowlab
