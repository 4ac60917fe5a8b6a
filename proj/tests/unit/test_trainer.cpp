#include <doctest.h>

#include <Eigen/Dense>

#include "flowlab/families.hpp"
#include "flowlab/parallel.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/trainer.hpp"

namespace {

// Least-squares fit of an unrestricted affine map x -> M x + c; the floor
// for anything an identity-activation (hence affine) flow can achieve.
// Defined before the flowlab using-directive: the Rational scalar operators
// must stay out of overload resolution for Eigen expressions.
double affine_fit_residual(const flowlab::Dataset& data) {
    const int n = data.size();
    const int d = data.dimension();
    Eigen::MatrixXd design(n, d + 1);
    Eigen::MatrixXd rhs(n, d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) {
            design(i, c) = data.inputs().point(i)[c];
            rhs(i, c) = data.targets().point(i)[c];
        }
        design(i, d) = 1.0;
    }
    const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(rhs);
    return (design * sol - rhs).squaredNorm() / n;
}

}  // namespace

using namespace flowlab;

namespace {

ControlFamily volume_family() {
    return ControlFamily::affine(families::volume_preserving_basis());
}

Dataset pair_dataset(std::vector<std::vector<double>> ins, std::vector<std::vector<double>> outs) {
    return Dataset(Ensemble::from_rows(ins), Ensemble::from_rows(outs));
}

}  // namespace

TEST_CASE("loss on exact fits and known drifts") {
    const auto fam = volume_family();

    // Zero field, targets equal inputs: loss 0.
    const auto data_id = pair_dataset({{0.1, 0.2}, {-0.4, 0.5}}, {{0.1, 0.2}, {-0.4, 0.5}});
    const auto zero_schedule = ControlSchedule::single(1.0, {0.0, 0.0, 0.0});
    CHECK(dataset_loss(fam, zero_schedule, data_id, 1e-2) == doctest::Approx(0.0));

    // Zero field, single pair (0,0) -> (1,0): loss 1.
    const auto data_miss = pair_dataset({{0.0, 0.0}}, {{1.0, 0.0}});
    CHECK(dataset_loss(fam, zero_schedule, data_miss, 1e-2) == doctest::Approx(1.0));

    // Constant drift (-1, 0) over T = 1 maps (0,0) to (-1,0) exactly.
    const auto data_drift = pair_dataset({{0.0, 0.0}}, {{-1.0, 0.0}});
    const auto drift = ControlSchedule::single(1.0, {1.0, 0.0, 0.0});
    CHECK(dataset_loss(fam, drift, data_drift, 1e-2) == doctest::Approx(0.0));

    // Blow-up reports +infinity.
    const auto cubic = ControlFamily::affine(families::cubic_1d_basis());
    const auto data_1d = pair_dataset({{1.0}}, {{2.0}});
    CHECK(std::isinf(
        dataset_loss(cubic, ControlSchedule::single(2.0, {0.0, 1.0}), data_1d, 1e-3)));
}

TEST_CASE("adjoint gradient matches central finite differences") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    const int k = 4;
    const int l = fam.param_count();
    Rng rng(101);
    std::vector<std::vector<double>> ins, outs;
    for (int i = 0; i < 3; ++i) {
        ins.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        outs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    const Dataset data = pair_dataset(ins, outs);

    std::vector<double> flat(static_cast<std::size_t>(k) * l);
    for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
    const std::vector<double> durs(k, 0.5);
    const double step = 0.05;

    const auto lg = dataset_loss_grad(fam, flat, durs, data, step);
    REQUIRE(!lg.blew_up);

    const double h = 1e-6;
    for (std::size_t m = 0; m < flat.size(); ++m) {
        auto fp = flat, fm = flat;
        fp[m] += h;
        fm[m] -= h;
        const double lp =
            dataset_loss(fam, ControlSchedule::uniform(0.5, k, fp), data, step);
        const double lm =
            dataset_loss(fam, ControlSchedule::uniform(0.5, k, fm), data, step);
        const double fd = (lp - lm) / (2 * h);
        const double scale = std::max({1e-8, std::abs(fd), std::abs(lg.grad_params[m])});
        CHECK(std::abs(lg.grad_params[m] - fd) / scale < 1e-5);
    }
}

TEST_CASE("gradient matches the closed form for a linear 1D flow") {
    // du = theta * u, one segment of n equal RK4 steps of size h:
    //   endpoint = R(theta h)^n x0 with R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24,
    // so d(loss)/d(theta) has an explicit expression.
    std::vector<VectorField> lin;
    lin.push_back(VectorField({Polynomial::variable(1, 0)}));
    const auto fam = ControlFamily::affine(lin);

    const double x0 = 0.8, y = 1.9, theta = 0.6, T = 1.0, step = 0.1;
    const int n = 10;
    const Dataset data = pair_dataset({{x0}}, {{y}});
    const auto lg =
        dataset_loss_grad(fam, std::vector<double>{theta}, std::vector<double>{T}, data, step);

    const double z = theta * step;
    const double R = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
    const double dR = (1 + z + z * z / 2 + z * z * z / 6) * step;
    const double endpoint = std::pow(R, n) * x0;
    const double analytic = 2 * (endpoint - y) * x0 * n * std::pow(R, n - 1) * dR;
    CHECK(lg.grad_params[0] == doctest::Approx(analytic).epsilon(1e-8));
    CHECK(lg.loss == doctest::Approx((endpoint - y) * (endpoint - y)).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at an interior zero-loss point") {
    const auto fam = volume_family();
    const auto data = pair_dataset({{0.3, -0.2}, {0.6, 0.9}}, {{0.3, -0.2}, {0.6, 0.9}});
    const std::vector<double> flat(3 * 2, 0.0);
    const auto lg = dataset_loss_grad(fam, flat, std::vector<double>(2, 0.5), data, 1e-2);
    CHECK(lg.loss == doctest::Approx(0.0));
    for (double g : lg.grad_params) CHECK(std::abs(g) < 1e-8);
}

TEST_CASE("duration gradients match finite differences") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    const int k = 2;
    const int l = fam.param_count();
    Rng rng(55);
    const Dataset data = pair_dataset({{0.2, -0.1}}, {{-0.4, 0.3}});
    std::vector<double> flat(static_cast<std::size_t>(k) * l);
    for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
    std::vector<double> durs{0.73, 0.41};
    const double step = 0.05;

    const auto lg = dataset_loss_grad(fam, flat, durs, data, step, /*train_durations=*/true);
    const double h = 1e-6;
    for (int s = 0; s < k; ++s) {
        auto dp = durs, dm = durs;
        dp[s] += h;
        dm[s] -= h;
        const double lp = dataset_loss_grad(fam, flat, dp, data, step, true).loss;
        const double lm = dataset_loss_grad(fam, flat, dm, data, step, true).loss;
        const double fd = (lp - lm) / (2 * h);
        CHECK(lg.grad_durations[s] == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("training interpolates a small tanh dataset") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    TrainConfig config;
    config.num_segments = 6;
    config.segment_duration = 0.5;
    config.seed = 3;
    config.step_size = 0.02;
    config.loss_target = 1e-2;
    config.optimizer.max_iters = 2000;
    config.optimizer.learning_rate = 2e-2;

    Rng rng(9);
    std::vector<std::vector<double>> ins, outs;
    for (int i = 0; i < 4; ++i) {
        ins.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        outs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    const auto report = train(fam, config, pair_dataset(ins, outs));
    CHECK(!report.failed);
    CHECK(report.converged);
    CHECK(report.final_max_error < 1e-2);
    // The running best of the loss history is non-increasing.
    double running = std::numeric_limits<double>::infinity();
    for (double ell : report.loss_history) {
        const double next = std::min(running, ell);
        CHECK(next <= running);
        running = next;
    }
}

TEST_CASE("identity activation cannot beat the affine least-squares floor") {
    const auto fam = ControlFamily::resnet(2, Activation::Identity, WeightStructure::Full);
    // Four pairs no affine map can satisfy.
    const auto data = pair_dataset({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}},
                                   {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}});
    const double floor = affine_fit_residual(data);
    REQUIRE(floor > 1e-3);

    for (std::uint64_t seed : {1ULL, 2ULL}) {
        TrainConfig config;
        config.num_segments = 4;
        config.segment_duration = 0.5;
        config.seed = seed;
        config.step_size = 0.02;
        config.optimizer.max_iters = 800;
        const auto report = train(fam, config, data);
        CHECK(!report.converged);
        CHECK(report.final_loss >= floor - 1e-6);
    }
}

TEST_CASE("training is deterministic for a fixed seed across thread caps") {
    const auto fam = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
    const auto data = pair_dataset({{0.4, 0.1}, {-0.3, 0.6}}, {{-0.2, 0.5}, {0.7, -0.4}});
    TrainConfig config;
    config.num_segments = 3;
    config.segment_duration = 0.4;
    config.seed = 42;
    config.step_size = 0.05;
    config.optimizer.max_iters = 60;

    set_thread_cap(1);
    const auto a = train(fam, config, data);
    set_thread_cap(3);
    const auto b = train(fam, config, data);
    set_thread_cap(0);
    const auto c = train(fam, config, data);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.loss_history == c.loss_history);
    CHECK(a.final_params == b.final_params);
}

TEST_CASE("persistent blow-up at initialization yields a failure report") {
    const auto fam = ControlFamily::affine(families::cubic_1d_basis());
    const auto data = pair_dataset({{5e7}}, {{5.1e7}});
    TrainConfig config;
    config.num_segments = 2;
    config.segment_duration = 1.0;
    config.optimizer.max_iters = 10;
    const auto report = train(fam, config, data);
    CHECK(report.failed);
    CHECK(!report.failure_reason.empty());
    CHECK(!report.converged);
}

TEST_CASE("parallel and serial loss and gradient agree bit for bit") {
    const auto fam = ControlFamily::resnet(2, Activation::Sigmoid, WeightStructure::Full);
    Rng rng(31);
    std::vector<std::vector<double>> ins, outs;
    for (int i = 0; i < 7; ++i) {
        ins.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        outs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    const Dataset data = pair_dataset(ins, outs);
    std::vector<double> flat(static_cast<std::size_t>(3) * fam.param_count());
    for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
    const std::vector<double> durs(3, 0.5);

    const auto serial = dataset_loss_grad_serial(fam, flat, durs, data, 0.05);
    set_thread_cap(4);
    const auto parallel = dataset_loss_grad(fam, flat, durs, data, 0.05);
    set_thread_cap(0);
    CHECK(serial.loss == parallel.loss);
    CHECK(serial.grad_params == parallel.grad_params);

    const auto schedule = ControlSchedule::uniform(0.5, 3, flat);
    CHECK(dataset_loss(fam, schedule, data, 0.05) ==
          dataset_loss_serial(fam, schedule, data, 0.05));
}
