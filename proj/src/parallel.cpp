#include "flowlab/parallel.hpp"

#include <atomic>
#include <functional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flowlab {

namespace {
std::atomic<int> g_thread_cap{0};
}

void set_thread_cap(int threads) { g_thread_cap.store(threads < 0 ? 0 : threads); }
int thread_cap() { return g_thread_cap.load(); }

namespace detail {

void run_indexed(std::size_t count, const std::function<void(std::size_t)>& body, bool parallel) {
#ifdef _OPENMP
    if (parallel) {
        const int cap = thread_cap();
        const long n = static_cast<long>(count);
        if (cap > 0) {
#pragma omp parallel for schedule(static) num_threads(cap)
            for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace detail

namespace {

BatchEndpoints run_batch(const ControlFamily& family, const ControlSchedule& schedule,
                         const std::vector<double>& points, int count,
                         const FlowOptions& options, bool parallel) {
    const int d = family.dimension();
    if (points.size() != static_cast<std::size_t>(count) * d)
        throw std::invalid_argument("endpoints_batch: point buffer size mismatch");

    BatchEndpoints out;
    out.count = count;
    out.dimension = d;
    out.endpoints.resize(points.size());
    out.blew_up.assign(count, 0);

    FlowOptions opts = options;
    opts.with_jacobian = false;
    opts.record_trajectory = false;

    detail::run_indexed(
        static_cast<std::size_t>(count),
        [&](std::size_t i) {
            const std::span<const double> x0(points.data() + i * d, d);
            const FlowResult r = integrate(family, schedule, x0, opts);
            std::copy(r.endpoint.begin(), r.endpoint.end(), out.endpoints.begin() + i * d);
            out.blew_up[i] = r.blew_up ? 1 : 0;
        },
        parallel);
    return out;
}

}  // namespace

BatchEndpoints endpoints_batch(const ControlFamily& family, const ControlSchedule& schedule,
                               const std::vector<double>& points, int count,
                               const FlowOptions& options) {
    return run_batch(family, schedule, points, count, options, true);
}

BatchEndpoints endpoints_batch_serial(const ControlFamily& family,
                                      const ControlSchedule& schedule,
                                      const std::vector<double>& points, int count,
                                      const FlowOptions& options) {
    return run_batch(family, schedule, points, count, options, false);
}

}  // namespace flowlab
