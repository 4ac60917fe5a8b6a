#include <doctest.h>

#include <cmath>

#include "flowlab/families.hpp"
#include "flowlab/shrink.hpp"

using namespace flowlab;

namespace {

ControlFamily cubic_family() { return ControlFamily::affine(families::origin_fixed_basis()); }

TrainConfig shrink_config() {
    TrainConfig config;
    config.num_segments = 16;
    config.segment_duration = 0.5;
    config.seed = 5;
    config.step_size = 0.02;
    config.loss_target = 6e-2;
    config.optimizer.max_iters = 1500;
    config.optimizer.learning_rate = 1e-2;
    return config;
}

}  // namespace

TEST_CASE("contraction pulse squeezes every cell and keeps the box alive") {
    const auto fam_1d = ControlFamily::affine(families::cubic_1d_basis());
    for (int m : {2, 4}) {
        const auto schedule = plan_contraction_schedule(m, 1.0);
        const double w = 2.0 / m;
        FlowOptions fo;
        fo.step = 0.02;
        auto flow_to = [&](double x) {
            const auto r = integrate(fam_1d, schedule, std::span<const double>(&x, 1), fo);
            REQUIRE(!r.blew_up);
            return r.endpoint[0];
        };
        double prev = flow_to(-1.0);
        for (int i = 0; i < m; ++i) {
            const double c = -1.0 + (i + 0.5) * w;
            const double lo = flow_to(c - 0.3 * w);
            const double hi = flow_to(c + 0.3 * w);
            CHECK(lo > prev);
            CHECK(hi > lo);
            CHECK((hi - lo) / (0.6 * w) < 0.75);
            prev = hi;
        }
        CHECK(flow_to(1.0) > prev);
    }
    CHECK_THROWS_AS(plan_contraction_schedule(3, 1.0), std::invalid_argument);
}

TEST_CASE("shrink-then-interpolate reproduces the identity map to a coarse grid") {
    ShrinkGrid grid;
    grid.cells_per_axis = 2;
    const auto target = TargetFunction::polynomial(
        VectorField({Polynomial::variable(2, 0), Polynomial::variable(2, 1)}));
    const auto report = shrink_then_interpolate(cubic_family(), grid, target, shrink_config(), 1.0);
    REQUIRE(report.ok);
    // Every point lands inside its own cell's reach: mean L1 error below the
    // cell diameter.
    CHECK(report.lp_err <= std::sqrt(2.0));
    CHECK(report.lp_err < 0.5);  // observed ~0.29; generous headroom
    CHECK(!report.targets_perturbed);
}

TEST_CASE("constant targets are spread deterministically and flagged") {
    ShrinkGrid grid;
    grid.cells_per_axis = 2;
    TrainConfig config = shrink_config();
    config.optimizer.max_iters = 300;
    const auto report = shrink_then_interpolate(cubic_family(), grid,
                                                TargetFunction::constant({0.0, 0.0}), config, 2.0);
    CHECK(report.targets_perturbed);
}

TEST_CASE("shrink validates its inputs") {
    const auto target = TargetFunction::coordinate_swap();
    ShrinkGrid odd;
    odd.cells_per_axis = 3;
    CHECK_THROWS_AS(shrink_then_interpolate(cubic_family(), odd, target, shrink_config(), 1.0),
                    std::invalid_argument);

    ShrinkGrid asym;
    asym.lo = -0.5;
    asym.hi = 1.0;
    CHECK_THROWS_AS(shrink_then_interpolate(cubic_family(), asym, target, shrink_config(), 1.0),
                    std::invalid_argument);

    const auto wrong_family = ControlFamily::affine(families::volume_preserving_basis());
    ShrinkGrid grid;
    CHECK_THROWS_AS(shrink_then_interpolate(wrong_family, grid, target, shrink_config(), 1.0),
                    std::invalid_argument);
}
