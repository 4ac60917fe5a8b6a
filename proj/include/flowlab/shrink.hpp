#pragma once

#include "flowlab/lp_error.hpp"
#include "flowlab/trainer.hpp"

namespace flowlab {

// Uniform cell decomposition of the square [lo, hi]^2.
struct ShrinkGrid {
    double lo = -1.0;
    double hi = 1.0;
    int cells_per_axis = 2;
};

struct ShrinkReport {
    bool ok = false;
    std::string failed_stage;  // "stage1" or "stage2" when a stage missed its target
    TrainReport stage1;        // coordinatewise 1D contraction
    TrainReport stage2;        // interpolation of cell centers
    bool targets_perturbed = false;
    std::vector<Segment> composite_segments;
    double lp_err = std::numeric_limits<double>::infinity();
    double p = 1.0;

    ControlSchedule composite() const { return ControlSchedule(composite_segments); }
};

// Pulse schedule for the 1D cubic/quadratic family that contracts every
// cell of the m-cell grid on [-half_width, half_width] toward a point while
// keeping the whole interval blow-up free (m even). Built in closed form
// from the two flow groups of the family; stage 1 of the shrink procedure
// polishes it further.
ControlSchedule plan_contraction_schedule(int cells_per_axis, double half_width);

// Two-stage approximation of a target map on a gridded square:
//   stage 1 trains a monotone 1D flow that contracts every grid interval
//   toward its center and applies it to both coordinates;
//   stage 2 trains the full family to steer the contracted cell centers to
//   the target values of the original centers.
// The family must be the componentwise cubic family (six controls: cubic,
// quadratic and coupling term per coordinate). Returns the composed schedule
// and its measured L^p error against the target over the square. When the
// target values of distinct centers collide (a constant target), stage-2
// targets get small deterministic offsets and the report says so.
ShrinkReport shrink_then_interpolate(const ControlFamily& family, const ShrinkGrid& grid,
                                     const TargetFunction& target, const TrainConfig& config,
                                     double p = 1.0);

}  // namespace flowlab
