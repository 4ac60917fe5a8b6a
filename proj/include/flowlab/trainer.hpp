#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/ensemble.hpp"
#include "flowlab/flow.hpp"

namespace flowlab {

// Paired interpolation data: inputs and targets are each pairwise distinct.
class Dataset {
   public:
    Dataset(Ensemble inputs, Ensemble targets);

    const Ensemble& inputs() const { return inputs_; }
    const Ensemble& targets() const { return targets_; }
    int size() const { return inputs_.size(); }
    int dimension() const { return inputs_.dimension(); }

   private:
    Ensemble inputs_;
    Ensemble targets_;
};

struct OptimizerConfig {
    double learning_rate = 1e-2;
    int max_iters = 5000;
    double grad_tol = 1e-10;
    // L2 penalty on the segment parameters; keeps polynomial-family fields
    // tame so the trained flow stays integrable off the training points.
    double weight_decay = 0.0;
};

struct TrainConfig {
    int num_segments = 12;
    double segment_duration = 0.5;
    OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    double step_size = kDefaultStep;
    double loss_target = 1e-2;  // required max_i |phi(x_i) - y_i|_inf
    bool train_durations = false;
    double init_scale = 0.1;
    double blowup_threshold = kDefaultBlowupThreshold;
    // Warm start: explicit initial parameters (k * l flat) and, optionally,
    // per-segment durations overriding segment_duration. Random draws are
    // added around init_params on blow-up reseeds only.
    std::optional<std::vector<double>> init_params;
    std::optional<std::vector<double>> fixed_durations;
};

struct TrainReport {
    std::vector<double> final_params;        // k * l, row per segment
    std::vector<double> segment_durations;   // k entries
    int num_segments = 0;
    double final_loss = std::numeric_limits<double>::infinity();
    double final_max_error = std::numeric_limits<double>::infinity();
    std::vector<double> loss_history;
    int iterations_used = 0;
    bool converged = false;
    bool failed = false;  // persistent blow-up at initialization
    std::string failure_reason;

    ControlSchedule schedule() const;
};

// Mean squared flow-endpoint error (1/N) sum_i |phi(x_i) - y_i|_2^2;
// +infinity when any trajectory blows up. The parallel version and the
// serial reference agree bit for bit.
double dataset_loss(const ControlFamily& family, const ControlSchedule& schedule,
                    const Dataset& data, double step,
                    double blowup_threshold = kDefaultBlowupThreshold);
double dataset_loss_serial(const ControlFamily& family, const ControlSchedule& schedule,
                           const Dataset& data, double step,
                           double blowup_threshold = kDefaultBlowupThreshold);

struct LossGradResult {
    double loss = std::numeric_limits<double>::infinity();
    double max_error = std::numeric_limits<double>::infinity();
    std::vector<double> grad_params;     // d(loss)/d(flat segment params)
    std::vector<double> grad_durations;  // filled only when train_durations
    bool blew_up = false;
};

// Loss and its exact gradient through the discretized flow: reverse mode
// through every RK4 stage and segment. `flat_params` holds k consecutive
// parameter blocks; `durations` holds the k segment lengths. When
// train_durations is set, each segment uses equal substeps h = t/n so the
// duration derivative is smooth; otherwise substeps follow plan_steps and
// match flow::integrate exactly.
LossGradResult dataset_loss_grad(const ControlFamily& family,
                                 const std::vector<double>& flat_params,
                                 const std::vector<double>& durations, const Dataset& data,
                                 double step, bool train_durations = false,
                                 double blowup_threshold = kDefaultBlowupThreshold);
LossGradResult dataset_loss_grad_serial(const ControlFamily& family,
                                        const std::vector<double>& flat_params,
                                        const std::vector<double>& durations, const Dataset& data,
                                        double step, bool train_durations = false,
                                        double blowup_threshold = kDefaultBlowupThreshold);

// Adam search for a piecewise-constant control interpolating the dataset.
// Stops at the loss target (in max-error form), at grad_tol, or after
// max_iters; returns the best parameters seen. Initialization re-draws up to
// 10 times if every trajectory blows up immediately.
TrainReport train(const ControlFamily& family, const TrainConfig& config, const Dataset& data);

}  // namespace flowlab
