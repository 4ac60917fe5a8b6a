#include <doctest.h>

#include <numbers>

#include "flowlab/families.hpp"
#include "flowlab/lp_error.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/trainer.hpp"

using namespace flowlab;

namespace {

ControlFamily volume_family() {
    return ControlFamily::affine(families::volume_preserving_basis());
}

ControlSchedule random_volume_schedule(std::uint64_t seed, double total_time = 2.0,
                                       double scale = 0.4) {
    Rng rng(seed);
    std::vector<Segment> segs(4);
    for (auto& s : segs) {
        s.duration = total_time / 4.0;
        s.params = {rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                    rng.uniform(-scale, scale)};
    }
    return ControlSchedule(std::move(segs));
}

VectorField identity_map_2d() {
    return VectorField({Polynomial::variable(2, 0), Polynomial::variable(2, 1)});
}

}  // namespace

TEST_CASE("error against the flow itself is zero") {
    const auto fam = volume_family();
    const auto box = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0}, {21, 21});

    // Zero schedule: the flow is the identity, which is a polynomial target.
    const auto zero_schedule = ControlSchedule::single(1.0, {0.0, 0.0, 0.0});
    CHECK(lp_error(fam, zero_schedule, TargetFunction::polynomial(identity_map_2d()), box, 2.0) <=
          1e-10);

    // Constant drift: the time-T flow is x + T*(-u1, u2), again polynomial.
    const auto drift = ControlSchedule::single(0.7, {0.3, -0.2, 0.0});
    VectorField shifted({Polynomial::variable(2, 0) + Polynomial::constant(2, Rational(-21, 100)),
                         Polynomial::variable(2, 1) + Polynomial::constant(2, Rational(-7, 50))});
    CHECK(lp_error(fam, drift, TargetFunction::polynomial(shifted), box, 1.0) <= 1e-10);
}

TEST_CASE("identity flow vs zero target on the unit disc gives sqrt(pi/2)") {
    const auto fam = volume_family();
    const auto disc = DomainSpec::disc({0.0, 0.0}, 1.0);
    const auto err = lp_error(fam, ControlSchedule::single(1.0, {0.0, 0.0, 0.0}),
                              TargetFunction::constant({0.0, 0.0}), disc, 2.0);
    CHECK(err == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-4));
}

TEST_CASE("grid and monte carlo quadrature agree on a smooth case") {
    const auto fam = volume_family();
    const auto schedule = random_volume_schedule(77, 1.0);
    const auto target = TargetFunction::coordinate_swap();
    const auto grid = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0});
    auto mc = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0});
    mc.with_monte_carlo(100000, 5);
    const double a = lp_error(fam, schedule, target, grid, 2.0);
    const double b = lp_error(fam, schedule, target, mc, 2.0);
    CHECK(std::abs(a - b) / a < 0.01);
}

TEST_CASE("error is zero iff flow and target agree on the nodes") {
    const auto fam = volume_family();
    const auto box = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0}, {11, 11});
    const auto zero_schedule = ControlSchedule::single(1.0, {0.0, 0.0, 0.0});
    const double zero = lp_error(fam, zero_schedule,
                                 TargetFunction::polynomial(identity_map_2d()), box, 1.0);
    CHECK(zero <= 1e-12);
    const double off = lp_error(fam, zero_schedule, TargetFunction::coordinate_swap(), box, 1.0);
    CHECK(off > 0.1);
}

TEST_CASE("normalized L1 never exceeds normalized L2") {
    const auto fam = volume_family();
    const auto target = TargetFunction::constant({0.0, 0.0});
    LpOptions opts;
    opts.normalized = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto schedule = random_volume_schedule(seed, 1.5);
        const auto box = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0}, {41, 41});
        const double l1 = lp_error(fam, schedule, target, box, 1.0, opts);
        const double l2 = lp_error(fam, schedule, target, box, 2.0, opts);
        REQUIRE(std::isfinite(l1));
        CHECK(l1 <= l2 + 1e-12);
    }
}

TEST_CASE("grid refinement changes the error by under 2 percent") {
    const auto fam = volume_family();
    const auto schedule = random_volume_schedule(13, 1.0);
    const auto target = TargetFunction::coordinate_swap();
    const double coarse =
        lp_error(fam, schedule, target, DomainSpec::box({-1, -1}, {1, 1}, {51, 51}), 1.0);
    const double fine =
        lp_error(fam, schedule, target, DomainSpec::box({-1, -1}, {1, 1}, {101, 101}), 1.0);
    CHECK(std::abs(coarse - fine) / fine < 0.02);
}

TEST_CASE("parallel and serial lp error agree bit for bit") {
    const auto fam = volume_family();
    const auto schedule = random_volume_schedule(99, 1.0);
    const auto target = TargetFunction::coordinate_swap();
    const auto box = DomainSpec::box({-1, -1}, {1, 1}, {31, 31});
    const double serial = lp_error_serial(fam, schedule, target, box, 2.0);
    set_thread_cap(3);
    const double parallel = lp_error(fam, schedule, target, box, 2.0);
    set_thread_cap(0);
    CHECK(serial == parallel);
}

TEST_CASE("volume floor: identity schedule sits exactly at the floor") {
    const auto fam = volume_family();
    const auto report =
        volume_floor_check(fam, ControlSchedule::single(1.0, {0.0, 0.0, 0.0}), 1e-2);
    REQUIRE(report.applicable);
    CHECK(report.error_sq == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-4));
    CHECK(report.floor_respected);
}

TEST_CASE("volume floor holds on seeded schedules") {
    const auto fam = volume_family();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto report = volume_floor_check(fam, random_volume_schedule(seed), 1e-2);
        REQUIRE(report.applicable);
        CHECK(report.floor_respected);
        CHECK(report.error_sq >= std::numbers::pi / 2.0 - kVolumeFloorBudget);
    }
}

TEST_CASE("fixed point check pins the origin of the componentwise cubic family") {
    const auto fam = ControlFamily::affine(families::origin_fixed_basis());

    const auto rest = fixed_point_check(fam, ControlSchedule::single(1.0, std::vector<double>(6, 0.0)), 1e-2);
    CHECK(rest.origin_norm == 0.0);
    CHECK(rest.pinned);

    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Segment> segs(3);
        for (auto& s : segs) {
            s.duration = 0.4;
            s.params.resize(6);
            for (auto& p : s.params) p = rng.uniform(-0.8, 0.8);
        }
        const auto report = fixed_point_check(fam, ControlSchedule(segs), 1e-2);
        CHECK(report.pinned);
    }
}

TEST_CASE("the trainer cannot move the pinned origin") {
    const auto fam = ControlFamily::affine(families::origin_fixed_basis());
    const Dataset data(Ensemble::from_rows({{0.0, 0.0}}), Ensemble::from_rows({{1.0, 1.0}}));
    TrainConfig config;
    config.num_segments = 4;
    config.segment_duration = 0.5;
    config.optimizer.max_iters = 120;
    const auto report = train(fam, config, data);
    CHECK(!report.converged);
    CHECK(report.final_max_error >= 1.0 - 1e-6);
}

TEST_CASE("input validation") {
    const auto fam = volume_family();
    const auto schedule = ControlSchedule::single(1.0, {0.0, 0.0, 0.0});
    const auto box = DomainSpec::box({-1, -1}, {1, 1}, {11, 11});
    CHECK_THROWS_AS(
        lp_error(fam, schedule, TargetFunction::constant({0.0, 0.0}), box, 0.5),
        std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::box({-1, -1}, {1, 1}, {1, 11}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::box({1, -1}, {1, 1}), std::invalid_argument);
}
