#pragma once

#include "flowlab/domain.hpp"
#include "flowlab/parallel.hpp"
#include "flowlab/target.hpp"

namespace flowlab {

// Quantitative constants of the volume-floor check: the squared L2(disc)
// distance from any area-preserving image of the unit disc to the zero map
// is at least pi/2, and the polar-grid quadrature at the default resolution
// is accurate to well under this budget (midpoint error on the r^3 radial
// integrand is O(dr^2), about 1e-5 at 128 radial cells; the budget also
// absorbs RK4 transport error at step 1e-2).
inline constexpr double kVolumeFloorBudget = 0.02;

struct LpOptions {
    double step = kDefaultStep;
    double blowup_threshold = kDefaultBlowupThreshold;
    // Normalize weights to a probability measure (used for p-monotonicity).
    bool normalized = false;
};

// || F - phi ||_{L^p(K)} with the domain's quadrature rule and Euclidean
// norm on values; +infinity if any node trajectory blows up. Node flows run
// in parallel; the reduction order is fixed, so results do not depend on the
// worker count. lp_error_serial is the reference implementation.
double lp_error(const ControlFamily& family, const ControlSchedule& schedule,
                const TargetFunction& target, const DomainSpec& domain, double p,
                const LpOptions& options = {});
double lp_error_serial(const ControlFamily& family, const ControlSchedule& schedule,
                       const TargetFunction& target, const DomainSpec& domain, double p,
                       const LpOptions& options = {});

struct VolumeFloorReport {
    bool applicable = true;  // false when some node blew up
    double error_sq = 0.0;   // squared L2(unit disc) distance to the zero map
    double floor = 0.0;      // pi/2
    double budget = kVolumeFloorBudget;
    bool floor_respected = false;
};

// Squared L2 distance between the schedule's flow and F = 0 over the unit
// disc; for any area-preserving family this can never drop below pi/2 minus
// the quadrature budget.
VolumeFloorReport volume_floor_check(const ControlFamily& family, const ControlSchedule& schedule,
                                     double step);

struct FixedPointReport {
    double origin_norm = 0.0;
    bool pinned = false;  // origin_norm < 1e-8
};

// Flows the origin and reports how far it moved; families whose fields all
// vanish at 0 keep it pinned for every schedule.
FixedPointReport fixed_point_check(const ControlFamily& family, const ControlSchedule& schedule,
                                   double step);

}  // namespace flowlab
