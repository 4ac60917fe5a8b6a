#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/control_family.hpp"
#include "flowlab/schedule.hpp"

namespace flowlab {

inline constexpr double kDefaultStep = 1e-2;
inline constexpr double kDefaultBlowupThreshold = 1e8;

struct FlowOptions {
    double step = kDefaultStep;
    double blowup_threshold = kDefaultBlowupThreshold;
    bool with_jacobian = false;
    bool record_trajectory = false;
    int trajectory_stride = 10;
};

struct FlowResult {
    std::vector<double> endpoint;
    bool blew_up = false;
    double blowup_time = 0.0;
    std::string diagnostic;

    bool has_jacobian = false;
    std::vector<double> jacobian;  // d*d row-major
    double logdet = 0.0;
    // Accumulated from the divergence along the trajectory with the same RK4
    // grid, so it matches log|det jacobian| to integrator accuracy.
    bool has_logdet = false;
    bool nonsmooth = false;  // jacobian built with an a.e. derivative (relu)

    std::vector<double> trajectory_times;
    std::vector<std::vector<double>> trajectory_states;
    double step_used = 0.0;
};

// Fix-step substeps for one segment: full_steps of size `step`, then one
// truncated step landing exactly on the segment boundary.
struct StepPlan {
    int full_steps = 0;
    double last_step = 0.0;
    int total_steps() const { return full_steps + (last_step > 0.0 ? 1 : 0); }
    double step_size(int index, double step) const {
        return index < full_steps ? step : last_step;
    }
};

inline StepPlan plan_steps(double duration, double step) {
    StepPlan plan;
    plan.full_steps = static_cast<int>(std::floor(duration / step + 1e-9));
    const double rem = duration - plan.full_steps * step;
    plan.last_step = rem > 1e-9 * step ? rem : 0.0;
    return plan;
}

// Classical RK4 with fixed step inside each segment, segments composed in
// order. Exceeding the blow-up threshold (or producing a non-finite state)
// halts the run with blew_up set and blowup_time at the offending step's
// left endpoint.
FlowResult integrate(const ControlFamily& family, const ControlSchedule& schedule,
                     std::span<const double> x0, const FlowOptions& options = {});

// Augments the state with dJ/dt = (df/dx) J and dL/dt = div f, integrated on
// the same RK4 grid.
FlowResult integrate_with_jacobian(const ControlFamily& family, const ControlSchedule& schedule,
                                   std::span<const double> x0, FlowOptions options = {});

struct GronwallReport {
    bool applicable = true;  // false when a trajectory blew up
    bool bound_norm_ok = false;
    bool bound_lip_ok = false;
    // Minimum slack (bound - observed) over all checked times; negative
    // margins mean the bound was violated.
    double margin_norm = 0.0;
    double margin_lip = 0.0;
};

// Checks the a-priori estimates |x(t)|_1 <= (|x0|_1 + c1 t) e^(c2 t) and
// |x(t) - y(t)|_1 <= e^(L t) |x0 - y0|_1 along the discretized flow, the
// companion trajectories starting at x0 + delta e_j for each coordinate.
GronwallReport gronwall_check(const ControlFamily& family, const ControlSchedule& schedule,
                              std::span<const double> x0, double step, double c1, double c2,
                              double lipschitz, double delta = 1e-3);

enum class MonotoneResult { Increasing, NotIncreasing, Indeterminate };

// Flows every point of a strictly increasing 1D list under the same schedule
// and reports whether the outputs remain strictly increasing. Blow-up of any
// point makes the check indeterminate.
MonotoneResult monotone_1d_check(const ControlFamily& family, const ControlSchedule& schedule,
                                 std::span<const double> points, double step);

}  // namespace flowlab
