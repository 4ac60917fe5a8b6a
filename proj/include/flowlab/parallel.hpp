#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "flowlab/flow.hpp"

namespace flowlab {

// Global worker cap for the OpenMP kernels; 0 means the OpenMP default.
// Results never depend on it: parallel loops write indexed slots and all
// reductions run serially in index order.
void set_thread_cap(int threads);
int thread_cap();

namespace detail {
void run_indexed(std::size_t count, const std::function<void(std::size_t)>& body, bool parallel);
}

struct BatchEndpoints {
    std::vector<double> endpoints;   // n x d row-major
    std::vector<unsigned char> blew_up;
    int count = 0;
    int dimension = 0;

    bool any_blowup() const {
        for (auto b : blew_up)
            if (b) return true;
        return false;
    }
};

// Flows every row of `points` (n x d row-major) through the schedule.
// endpoints_batch runs the points in parallel; endpoints_batch_serial is the
// reference implementation, and the two agree bit for bit.
BatchEndpoints endpoints_batch(const ControlFamily& family, const ControlSchedule& schedule,
                               const std::vector<double>& points, int count,
                               const FlowOptions& options = {});
BatchEndpoints endpoints_batch_serial(const ControlFamily& family,
                                      const ControlSchedule& schedule,
                                      const std::vector<double>& points, int count,
                                      const FlowOptions& options = {});

}  // namespace flowlab
