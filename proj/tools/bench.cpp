// Benchmark comparing the OpenMP kernels against their serial reference
// implementations: batch flow integration, quadrature error evaluation and
// the training gradient. The parallel results are asserted bit-identical to
// the serial ones before timing.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "flowlab/families.hpp"
#include "flowlab/lp_error.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/trainer.hpp"

using namespace flowlab;

namespace {

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(stop - start).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
    set_thread_cap(threads);

    const auto family = ControlFamily::affine(families::volume_preserving_basis());
    Rng rng(7);
    std::vector<Segment> segs(4);
    for (auto& s : segs) {
        s.duration = 0.5;
        s.params = {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    }
    const ControlSchedule schedule(segs);

    std::printf("flowlab benchmark (thread cap %d)\n", threads);

    {
        const int n = 20000;
        std::vector<double> pts(2 * n);
        for (auto& v : pts) v = rng.uniform(-1.0, 1.0);
        const auto serial_out = endpoints_batch_serial(family, schedule, pts, n);
        const auto parallel_out = endpoints_batch(family, schedule, pts, n);
        if (serial_out.endpoints != parallel_out.endpoints) {
            std::fprintf(stderr, "FATAL: parallel batch differs from serial reference\n");
            return 1;
        }
        const double ts = time_best_of(3, [&] { endpoints_batch_serial(family, schedule, pts, n); });
        const double tp = time_best_of(3, [&] { endpoints_batch(family, schedule, pts, n); });
        std::printf("batch endpoints   n=%-6d serial %.3fs  parallel %.3fs  speedup %.2fx\n", n,
                    ts, tp, ts / tp);
    }

    {
        const DomainSpec disc = DomainSpec::disc({0.0, 0.0}, 1.0);
        const auto target = TargetFunction::constant({0.0, 0.0});
        const double es = lp_error_serial(family, schedule, target, disc, 2.0);
        const double ep = lp_error(family, schedule, target, disc, 2.0);
        if (es != ep) {
            std::fprintf(stderr, "FATAL: parallel lp_error differs from serial reference\n");
            return 1;
        }
        const double ts =
            time_best_of(3, [&] { lp_error_serial(family, schedule, target, disc, 2.0); });
        const double tp = time_best_of(3, [&] { lp_error(family, schedule, target, disc, 2.0); });
        std::printf("lp disc quadratic nodes=%d serial %.3fs  parallel %.3fs  speedup %.2fx\n",
                    disc.quadrature().count, ts, tp, ts / tp);
    }

    {
        const auto resnet = ControlFamily::resnet(2, Activation::Tanh, WeightStructure::Full);
        const int n = 64;
        std::vector<std::vector<double>> ins, outs;
        for (int i = 0; i < n; ++i) {
            ins.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
            outs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        }
        const Dataset data(Ensemble::from_rows(ins), Ensemble::from_rows(outs));
        std::vector<double> flat(static_cast<std::size_t>(8) * resnet.param_count());
        for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
        const std::vector<double> durs(8, 0.5);
        const auto gs = dataset_loss_grad_serial(resnet, flat, durs, data, 0.01);
        const auto gp = dataset_loss_grad(resnet, flat, durs, data, 0.01);
        if (gs.grad_params != gp.grad_params) {
            std::fprintf(stderr, "FATAL: parallel gradient differs from serial reference\n");
            return 1;
        }
        const double ts = time_best_of(
            3, [&] { dataset_loss_grad_serial(resnet, flat, durs, data, 0.01); });
        const double tp =
            time_best_of(3, [&] { dataset_loss_grad(resnet, flat, durs, data, 0.01); });
        std::printf("training gradient N=%-4d  serial %.3fs  parallel %.3fs  speedup %.2fx\n", n,
                    ts, tp, ts / tp);
    }

    return 0;
}
