#include <doctest.h>

#include <random>

#include "flowlab/families.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/parallel.hpp"
#include "flowlab/rng.hpp"

using namespace flowlab;

namespace {

ControlFamily volume_family() {
    return ControlFamily::affine(families::volume_preserving_basis());
}

ControlFamily cubic_1d() { return ControlFamily::affine(families::cubic_1d_basis()); }

ControlSchedule random_schedule(std::uint64_t seed, int segments, double seg_duration,
                                int param_count, double scale) {
    Rng rng(seed);
    std::vector<Segment> segs(segments);
    for (auto& s : segs) {
        s.duration = seg_duration;
        s.params.resize(param_count);
        for (auto& p : s.params) p = rng.uniform(-scale, scale);
    }
    return ControlSchedule(std::move(segs));
}

}  // namespace

TEST_CASE("constant drift lands on the expected endpoint") {
    const auto fam = volume_family();
    const auto r = integrate(fam, ControlSchedule::single(1.0, {1.0, 0.0, 0.0}),
                             std::vector<double>{0.0, 0.0});
    CHECK(r.endpoint[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(r.endpoint[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(!r.blew_up);
}

TEST_CASE("zero resnet field is the identity flow") {
    const auto fam = ControlFamily::resnet(2, Activation::Identity, WeightStructure::Full);
    const std::vector<double> theta(10, 0.0);  // W = 0
    const auto r = integrate(fam, ControlSchedule::single(3.0, theta),
                             std::vector<double>{0.4, -1.2});
    CHECK(r.endpoint[0] == doctest::Approx(0.4));
    CHECK(r.endpoint[1] == doctest::Approx(-1.2));
}

TEST_CASE("x^2 blows up near t = 1 from x0 = 1") {
    // du = u^2 is the second basis slot of the 1D cubic family.
    const auto fam = cubic_1d();
    FlowOptions opts;
    opts.step = 1e-3;
    opts.blowup_threshold = 1e8;
    const double x0 = 1.0;
    const auto r = integrate(fam, ControlSchedule::single(2.0, {0.0, 1.0}),
                             std::span<const double>(&x0, 1), opts);
    CHECK(r.blew_up);
    CHECK(r.blowup_time == doctest::Approx(1.0).epsilon(0.05));
    CHECK(!r.diagnostic.empty());
}

TEST_CASE("divergence-free flows carry zero logdet") {
    const auto fam = volume_family();
    std::mt19937_64 mt(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto schedule = random_schedule(trial + 50, 4, 0.25, 3, 0.8);
        const auto r = integrate_with_jacobian(fam, schedule, std::vector<double>{0.3, -0.7});
        REQUIRE(!r.blew_up);
        REQUIRE(r.has_logdet);
        CHECK(std::abs(r.logdet) < 1e-6);
        // logdet also matches log|det J| computed from the propagated jacobian.
        const double det = r.jacobian[0] * r.jacobian[3] - r.jacobian[1] * r.jacobian[2];
        CHECK(std::abs(std::log(std::abs(det)) - r.logdet) < 1e-6);
    }
}

TEST_CASE("zero field has identity jacobian; linear 1D field has logdet theta*T") {
    const auto fam = volume_family();
    const auto zero = integrate_with_jacobian(fam, ControlSchedule::single(1.0, {0.0, 0.0, 0.0}),
                                              std::vector<double>{0.5, 0.5});
    CHECK(zero.jacobian[0] == doctest::Approx(1.0));
    CHECK(zero.jacobian[1] == doctest::Approx(0.0));
    CHECK(zero.jacobian[2] == doctest::Approx(0.0));
    CHECK(zero.jacobian[3] == doctest::Approx(1.0));
    CHECK(zero.logdet == doctest::Approx(0.0));

    // du = theta * u via an affine family with basis {x}.
    std::vector<VectorField> lin;
    lin.push_back(VectorField({Polynomial::variable(1, 0)}));
    const auto linear = ControlFamily::affine(lin);
    const double theta = 0.37;
    const double T = 1.7;
    const double x0 = 0.9;
    const auto r = integrate_with_jacobian(linear, ControlSchedule::single(T, {theta}),
                                           std::span<const double>(&x0, 1));
    CHECK(r.logdet == doctest::Approx(theta * T).epsilon(1e-8));
}

TEST_CASE("composition of schedules equals the concatenated schedule") {
    const auto fam = volume_family();
    const auto s1 = random_schedule(9, 3, 0.2, 3, 0.7);
    const auto s2 = random_schedule(10, 2, 0.3, 3, 0.7);
    const std::vector<double> x0{0.2, 0.4};

    const auto mid = integrate(fam, s1, x0);
    REQUIRE(!mid.blew_up);
    const auto end_two_stage = integrate(fam, s2, mid.endpoint);
    const auto end_joined = integrate(fam, s1.then(s2), x0);
    for (int i = 0; i < 2; ++i)
        CHECK(end_two_stage.endpoint[i] ==
              doctest::Approx(end_joined.endpoint[i]).epsilon(1e-10));
}

TEST_CASE("running a schedule forward then reversed-negated returns to start") {
    const auto fam = volume_family();
    const auto forward = random_schedule(21, 4, 0.25, 3, 0.6);
    const std::vector<double> x0{0.1, -0.5};
    const auto there = integrate(fam, forward, x0);
    REQUIRE(!there.blew_up);
    const auto back = integrate(fam, forward.reversed_negated(), there.endpoint);
    CHECK(back.endpoint[0] == doctest::Approx(x0[0]).epsilon(1e-6));
    CHECK(back.endpoint[1] == doctest::Approx(x0[1]).epsilon(1e-6));
}

TEST_CASE("variational jacobian matches central finite differences") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    Rng rng(33);
    std::vector<double> theta(10);
    for (auto& p : theta) p = rng.uniform(-0.8, 0.8);
    const auto schedule = ControlSchedule::single(1.0, theta);
    const std::vector<double> x0{0.3, -0.2};

    const auto base = integrate_with_jacobian(fam, schedule, x0);
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
        auto xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        const auto fp = integrate(fam, schedule, xp);
        const auto fm = integrate(fam, schedule, xm);
        for (int i = 0; i < 2; ++i) {
            const double fd = (fp.endpoint[i] - fm.endpoint[i]) / (2 * h);
            CHECK(base.jacobian[i * 2 + j] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("rk4 exhibits fourth-order convergence under step halving") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    Rng rng(44);
    std::vector<double> theta(10);
    for (auto& p : theta) p = rng.uniform(-1.0, 1.0);
    const auto schedule = ControlSchedule::single(1.0, theta);
    const std::vector<double> x0{0.2, 0.1};

    auto endpoint_err = [&](double step) {
        FlowOptions opts;
        opts.step = step;
        const auto r = integrate(fam, schedule, x0, opts);
        FlowOptions ref_opts;
        ref_opts.step = step / 16.0;
        const auto ref = integrate(fam, schedule, x0, ref_opts);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) err = std::max(err, std::abs(r.endpoint[i] - ref.endpoint[i]));
        return err;
    };

    const double coarse = endpoint_err(0.1);
    const double fine = endpoint_err(0.05);
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("gronwall bounds hold for bounded tanh fields") {
    const int d = 2;
    const auto fam = ControlFamily::resnet(d, Activation::Tanh, WeightStructure::Full);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed, 777);
        std::vector<Segment> segs(3);
        double max_w = 0.0, max_a = 0.0;
        for (auto& s : segs) {
            s.duration = 0.4;
            s.params.resize(fam.param_count());
            // W entries within [-1/d, 1/d] keep |f|_1 <= d; A, b within [-1, 1].
            for (int i = 0; i < d * d; ++i) {
                s.params[i] = rng.uniform(-1.0 / d, 1.0 / d);
                max_w = std::max(max_w, std::abs(s.params[i]));
            }
            for (int i = d * d; i < 2 * d * d; ++i) {
                s.params[i] = rng.uniform(-1.0, 1.0);
                max_a = std::max(max_a, std::abs(s.params[i]));
            }
            for (int i = 2 * d * d; i < fam.param_count(); ++i) s.params[i] = rng.uniform(-1.0, 1.0);
        }
        const double lip = d * max_w * (d * max_a);
        const auto report = gronwall_check(fam, ControlSchedule(segs),
                                           std::vector<double>{0.4, -0.6}, 1e-2, d, 0.0, lip);
        REQUIRE(report.applicable);
        CHECK(report.bound_norm_ok);
        CHECK(report.bound_lip_ok);
    }
}

TEST_CASE("gronwall equality cases") {
    // Zero field: both bounds hold with equality at t = 0.
    const auto fam = volume_family();
    const auto report = gronwall_check(fam, ControlSchedule::single(1.0, {0.0, 0.0, 0.0}),
                                       std::vector<double>{1.0, 2.0}, 1e-2, 0.0, 0.0, 0.0);
    REQUIRE(report.applicable);
    CHECK(report.bound_norm_ok);
    CHECK(report.bound_lip_ok);

    // du = u with L = 1: the ratio |dx(t)|/|dx(0)| stays within e^t to 1e-6.
    std::vector<VectorField> lin;
    lin.push_back(VectorField({Polynomial::variable(1, 0)}));
    const auto linear = ControlFamily::affine(lin);
    const double x0 = 1.0;
    const auto lin_report = gronwall_check(linear, ControlSchedule::single(1.0, {1.0}),
                                           std::span<const double>(&x0, 1), 1e-2, 1.0, 1.0, 1.0);
    REQUIRE(lin_report.applicable);
    CHECK(lin_report.bound_lip_ok);
    CHECK(lin_report.margin_lip > -1e-6);
}

TEST_CASE("gronwall is inapplicable after blow-up") {
    const auto fam = cubic_1d();
    const double x0 = 1.0;
    const auto report = gronwall_check(fam, ControlSchedule::single(2.0, {0.0, 1.0}),
                                       std::span<const double>(&x0, 1), 1e-3, 1.0, 1.0, 1.0);
    CHECK(!report.applicable);
}

TEST_CASE("1D flows preserve order") {
    const auto fam = cubic_1d();

    SUBCASE("cubic family schedule") {
        const auto schedule = random_schedule(3, 4, 0.2, 2, 0.5);
        const std::vector<double> pts{-1.0, 0.0, 0.5};
        CHECK(monotone_1d_check(fam, schedule, pts, 1e-2) == MonotoneResult::Increasing);
    }

    SUBCASE("identity map from the zero field") {
        const std::vector<double> pts{-2.0, -1.0, 3.0};
        CHECK(monotone_1d_check(fam, ControlSchedule::single(1.0, {0.0, 0.0}), pts, 1e-2) ==
              MonotoneResult::Increasing);
    }

    SUBCASE("100 seeded schedules on 10 sorted points") {
        std::vector<double> pts(10);
        for (int i = 0; i < 10; ++i) pts[i] = -0.9 + 0.2 * i;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto schedule = random_schedule(seed + 1000, 3, 0.25, 2, 0.6);
            CHECK(monotone_1d_check(fam, schedule, pts, 1e-2) == MonotoneResult::Increasing);
        }
    }

    SUBCASE("blow-up makes the check indeterminate") {
        const std::vector<double> pts{0.5, 1.0};
        CHECK(monotone_1d_check(fam, ControlSchedule::single(3.0, {0.0, 1.0}), pts, 1e-3) ==
              MonotoneResult::Indeterminate);
    }

    SUBCASE("unsorted points are rejected") {
        const std::vector<double> pts{1.0, 0.0};
        CHECK_THROWS_AS(monotone_1d_check(fam, ControlSchedule::single(1.0, {0.0, 0.0}), pts, 1e-2),
                        std::invalid_argument);
    }
}

TEST_CASE("trajectory recording is strided and capped") {
    const auto fam = volume_family();
    FlowOptions opts;
    opts.record_trajectory = true;
    opts.trajectory_stride = 10;
    const auto r = integrate(fam, ControlSchedule::single(1.0, {0.5, -0.2, 0.1}),
                             std::vector<double>{0.1, 0.1}, opts);
    REQUIRE(!r.trajectory_times.empty());
    CHECK(r.trajectory_times.front() == 0.0);
    CHECK(r.trajectory_times.back() == doctest::Approx(1.0));
    CHECK(r.trajectory_times.size() == 11);  // 100 steps / stride 10, plus t = 0
}

TEST_CASE("parallel batch endpoints agree bit for bit with the serial reference") {
    const auto fam = volume_family();
    const auto schedule = random_schedule(77, 3, 0.3, 3, 0.6);
    Rng rng(78);
    const int n = 257;
    std::vector<double> pts(2 * n);
    for (auto& v : pts) v = rng.uniform(-1.0, 1.0);

    const auto serial = endpoints_batch_serial(fam, schedule, pts, n);
    for (int threads : {0, 1, 2, 3}) {
        set_thread_cap(threads);
        const auto parallel = endpoints_batch(fam, schedule, pts, n);
        CHECK(parallel.endpoints == serial.endpoints);
        CHECK(parallel.blew_up == serial.blew_up);
    }
    set_thread_cap(0);
}
