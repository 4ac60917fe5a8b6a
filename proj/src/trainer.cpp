#include "flowlab/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/parallel.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

Dataset::Dataset(Ensemble inputs, Ensemble targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
    if (inputs_.size() != targets_.size() || inputs_.dimension() != targets_.dimension())
        throw std::invalid_argument("dataset: inputs and targets must have matching shape");
    // Ensemble construction already enforces pairwise distinctness of each side.
}

ControlSchedule TrainReport::schedule() const {
    const std::size_t per = final_params.size() / num_segments;
    std::vector<Segment> segs(num_segments);
    for (int s = 0; s < num_segments; ++s) {
        segs[s].duration = segment_durations[s];
        segs[s].params.assign(final_params.begin() + s * per,
                              final_params.begin() + (s + 1) * per);
    }
    return ControlSchedule(std::move(segs));
}

namespace {

double loss_impl(const ControlFamily& family, const ControlSchedule& schedule,
                 const Dataset& data, double step, double blowup_threshold, bool parallel) {
    FlowOptions opts;
    opts.step = step;
    opts.blowup_threshold = blowup_threshold;
    const BatchEndpoints batch =
        parallel ? endpoints_batch(family, schedule, data.inputs().data(), data.size(), opts)
                 : endpoints_batch_serial(family, schedule, data.inputs().data(), data.size(),
                                          opts);
    if (batch.any_blowup()) return std::numeric_limits<double>::infinity();
    const int d = data.dimension();
    double acc = 0.0;
    for (int i = 0; i < data.size(); ++i) {
        for (int c = 0; c < d; ++c) {
            const double diff = batch.endpoints[i * d + c] - data.targets().point(i)[c];
            acc += diff * diff;
        }
    }
    return acc / data.size();
}

// Substep sizes of one segment under the two duration conventions.
std::vector<double> segment_substeps(double duration, double step, bool equal_steps) {
    std::vector<double> hs;
    if (equal_steps) {
        const int n = std::max(1, static_cast<int>(std::ceil(duration / step - 1e-9)));
        hs.assign(n, duration / n);
    } else {
        const StepPlan plan = plan_steps(duration, step);
        hs.assign(plan.full_steps, step);
        if (plan.last_step > 0.0) hs.push_back(plan.last_step);
    }
    return hs;
}

struct SampleAdjoint {
    double sq_error = 0.0;
    double max_abs_error = 0.0;
    std::vector<double> grad_params;
    std::vector<double> grad_durations;
    bool blew_up = false;
};

// Forward RK4 with per-step state storage, then reverse sweep accumulating
// d(sq_error)/d(theta) per segment (and d/d(h) when durations are trained).
SampleAdjoint sample_adjoint(const ControlFamily& family,
                             const std::vector<double>& flat_params,
                             const std::vector<std::vector<double>>& substeps,
                             std::span<const double> x0, std::span<const double> target,
                             double blowup_threshold, bool want_duration_grad) {
    const int d = family.dimension();
    const int l = family.param_count();
    const int k = static_cast<int>(substeps.size());

    SampleAdjoint out;
    out.grad_params.assign(flat_params.size(), 0.0);
    if (want_duration_grad) out.grad_durations.assign(k, 0.0);

    // Forward pass: record the state entering every substep.
    std::vector<std::vector<double>> states;
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> k1(d), k2(d), k3(d), k4(d), xs(d);
    auto eval_stage = [&](std::span<const double> theta, const std::vector<double>& at,
                          std::vector<double>& into) { family.eval(theta, at, into); };

    for (int seg = 0; seg < k; ++seg) {
        const std::span<const double> theta(flat_params.data() + static_cast<std::size_t>(seg) * l,
                                            l);
        for (double h : substeps[seg]) {
            states.push_back(x);
            eval_stage(theta, x, k1);
            for (int i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
            eval_stage(theta, xs, k2);
            for (int i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
            eval_stage(theta, xs, k3);
            for (int i = 0; i < d; ++i) xs[i] = x[i] + h * k3[i];
            eval_stage(theta, xs, k4);
            for (int i = 0; i < d; ++i)
                x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);

            double norm = 0.0;
            bool finite = true;
            for (double v : x) {
                if (!std::isfinite(v)) finite = false;
                norm = std::max(norm, std::abs(v));
            }
            if (!finite || norm > blowup_threshold) {
                out.blew_up = true;
                return out;
            }
        }
    }

    for (int c = 0; c < d; ++c) {
        const double diff = x[c] - target[c];
        out.sq_error += diff * diff;
        out.max_abs_error = std::max(out.max_abs_error, std::abs(diff));
    }

    // Reverse pass. lambda = d(sq_error)/dx at the current time.
    std::vector<double> lambda(d);
    for (int c = 0; c < d; ++c) lambda[c] = 2.0 * (x[c] - target[c]);

    std::vector<double> xi2(d), xi3(d), xi4(d);
    std::vector<double> kb1(d), kb2(d), kb3(d), kb4(d);
    std::vector<double> vx1(d), vx2(d), vx3(d), vx4(d);
    std::vector<double> jac(static_cast<std::size_t>(d) * d);
    std::vector<double> dk(d), tmp(d);

    std::size_t step_cursor = states.size();
    for (int seg = k - 1; seg >= 0; --seg) {
        const std::span<const double> theta(flat_params.data() + static_cast<std::size_t>(seg) * l,
                                            l);
        const std::span<double> gtheta(out.grad_params.data() + static_cast<std::size_t>(seg) * l,
                                       l);
        for (int s = static_cast<int>(substeps[seg].size()) - 1; s >= 0; --s) {
            const double h = substeps[seg][s];
            const std::vector<double>& xn = states[--step_cursor];

            // Recompute the stages.
            eval_stage(theta, xn, k1);
            for (int i = 0; i < d; ++i) xi2[i] = xn[i] + 0.5 * h * k1[i];
            eval_stage(theta, xi2, k2);
            for (int i = 0; i < d; ++i) xi3[i] = xn[i] + 0.5 * h * k2[i];
            eval_stage(theta, xi3, k3);
            for (int i = 0; i < d; ++i) xi4[i] = xn[i] + h * k3[i];
            eval_stage(theta, xi4, k4);

            if (want_duration_grad) {
                // dx'/dh via forward sensitivities of the stages in h.
                auto jvp = [&](const std::vector<double>& at, const std::vector<double>& v,
                               std::vector<double>& into) {
                    family.jacobian_x(theta, at, jac);
                    for (int i = 0; i < d; ++i) {
                        double acc = 0.0;
                        for (int j = 0; j < d; ++j) acc += jac[i * d + j] * v[j];
                        into[i] = acc;
                    }
                };
                std::vector<double> dk2(d), dk3(d), dk4(d);
                for (int i = 0; i < d; ++i) tmp[i] = 0.5 * k1[i];
                jvp(xi2, tmp, dk2);
                for (int i = 0; i < d; ++i) tmp[i] = 0.5 * k2[i] + 0.5 * h * dk2[i];
                jvp(xi3, tmp, dk3);
                for (int i = 0; i < d; ++i) tmp[i] = k3[i] + h * dk3[i];
                jvp(xi4, tmp, dk4);
                double dh_dot = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double dxdh = (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0 +
                                        h / 6.0 * (2 * dk2[i] + 2 * dk3[i] + dk4[i]);
                    dh_dot += lambda[i] * dxdh;
                }
                out.grad_durations[seg] += dh_dot / static_cast<double>(substeps[seg].size());
            }

            // Adjoint stage weights.
            std::fill(vx1.begin(), vx1.end(), 0.0);
            std::fill(vx2.begin(), vx2.end(), 0.0);
            std::fill(vx3.begin(), vx3.end(), 0.0);
            std::fill(vx4.begin(), vx4.end(), 0.0);

            for (int i = 0; i < d; ++i) kb4[i] = h / 6.0 * lambda[i];
            family.vjp(theta, xi4, kb4, vx4, gtheta);
            for (int i = 0; i < d; ++i) kb3[i] = h / 3.0 * lambda[i] + h * vx4[i];
            family.vjp(theta, xi3, kb3, vx3, gtheta);
            for (int i = 0; i < d; ++i) kb2[i] = h / 3.0 * lambda[i] + 0.5 * h * vx3[i];
            family.vjp(theta, xi2, kb2, vx2, gtheta);
            for (int i = 0; i < d; ++i) kb1[i] = h / 6.0 * lambda[i] + 0.5 * h * vx2[i];
            family.vjp(theta, xn, kb1, vx1, gtheta);

            for (int i = 0; i < d; ++i) lambda[i] += vx1[i] + vx2[i] + vx3[i] + vx4[i];
        }
    }
    return out;
}

LossGradResult loss_grad_impl(const ControlFamily& family, const std::vector<double>& flat_params,
                              const std::vector<double>& durations, const Dataset& data,
                              double step, bool train_durations, double blowup_threshold,
                              bool parallel) {
    const int l = family.param_count();
    const int k = static_cast<int>(durations.size());
    if (flat_params.size() != static_cast<std::size_t>(k) * l)
        throw std::invalid_argument("loss_grad: parameter block count mismatch");
    if (family.dimension() != data.dimension())
        throw std::invalid_argument("loss_grad: family and dataset dimension mismatch");

    std::vector<std::vector<double>> substeps(k);
    for (int s = 0; s < k; ++s) substeps[s] = segment_substeps(durations[s], step, train_durations);

    const int n = data.size();
    std::vector<SampleAdjoint> per_sample(n);
    detail::run_indexed(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            per_sample[i] =
                sample_adjoint(family, flat_params, substeps, data.inputs().point(i),
                               data.targets().point(i), blowup_threshold, train_durations);
        },
        parallel);

    LossGradResult out;
    out.grad_params.assign(flat_params.size(), 0.0);
    if (train_durations) out.grad_durations.assign(k, 0.0);
    double loss = 0.0;
    double max_err = 0.0;
    for (const auto& s : per_sample) {
        if (s.blew_up) {
            out.blew_up = true;
            return out;
        }
        loss += s.sq_error;
        max_err = std::max(max_err, s.max_abs_error);
        for (std::size_t i = 0; i < out.grad_params.size(); ++i)
            out.grad_params[i] += s.grad_params[i];
        if (train_durations) {
            for (int i = 0; i < k; ++i) out.grad_durations[i] += s.grad_durations[i];
        }
    }
    const double inv_n = 1.0 / n;
    out.loss = loss * inv_n;
    out.max_error = max_err;
    for (auto& g : out.grad_params) g *= inv_n;
    for (auto& g : out.grad_durations) g *= inv_n;
    return out;
}

}  // namespace

double dataset_loss(const ControlFamily& family, const ControlSchedule& schedule,
                    const Dataset& data, double step, double blowup_threshold) {
    return loss_impl(family, schedule, data, step, blowup_threshold, true);
}

double dataset_loss_serial(const ControlFamily& family, const ControlSchedule& schedule,
                           const Dataset& data, double step, double blowup_threshold) {
    return loss_impl(family, schedule, data, step, blowup_threshold, false);
}

LossGradResult dataset_loss_grad(const ControlFamily& family,
                                 const std::vector<double>& flat_params,
                                 const std::vector<double>& durations, const Dataset& data,
                                 double step, bool train_durations, double blowup_threshold) {
    return loss_grad_impl(family, flat_params, durations, data, step, train_durations,
                          blowup_threshold, true);
}

LossGradResult dataset_loss_grad_serial(const ControlFamily& family,
                                        const std::vector<double>& flat_params,
                                        const std::vector<double>& durations, const Dataset& data,
                                        double step, bool train_durations,
                                        double blowup_threshold) {
    return loss_grad_impl(family, flat_params, durations, data, step, train_durations,
                          blowup_threshold, false);
}

namespace {

double softplus(double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); }
double softplus_inv(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

TrainReport train(const ControlFamily& family, const TrainConfig& config, const Dataset& data) {
    if (config.num_segments < 1) throw std::invalid_argument("train: num_segments must be >= 1");
    if (!(config.segment_duration > 0.0) || !(config.step_size > 0.0) ||
        !(config.loss_target > 0.0) || !(config.optimizer.learning_rate > 0.0))
        throw std::invalid_argument("train: config values must be positive");

    const int l = family.param_count();
    const int k = config.num_segments;
    const std::size_t n_params = static_cast<std::size_t>(k) * l;

    TrainReport report;
    report.num_segments = k;

    // theta holds segment parameters, then k duration pre-images when
    // durations are trained (kept positive through softplus).
    const std::size_t n_total = n_params + (config.train_durations ? k : 0);
    std::vector<double> theta(n_total, 0.0);

    if (config.init_params && config.init_params->size() != n_params)
        throw std::invalid_argument("train: init_params size mismatch");
    if (config.fixed_durations && config.fixed_durations->size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("train: fixed_durations size mismatch");

    auto durations_of = [&](const std::vector<double>& th) {
        std::vector<double> durs(k, config.segment_duration);
        if (config.fixed_durations) durs = *config.fixed_durations;
        if (config.train_durations) {
            for (int s = 0; s < k; ++s) durs[s] = softplus(th[n_params + s]);
        }
        return durs;
    };

    auto init_params = [&](std::uint64_t attempt) {
        Rng rng(config.seed, attempt);
        for (std::size_t i = 0; i < n_params; ++i) {
            const double base = config.init_params ? (*config.init_params)[i] : 0.0;
            // A warm start is used verbatim on the first attempt.
            const double jitter = (config.init_params && attempt == 0)
                                      ? 0.0
                                      : rng.normal(config.init_scale);
            theta[i] = base + jitter;
        }
        if (config.train_durations) {
            for (int s = 0; s < k; ++s) {
                const double d0 = config.fixed_durations ? (*config.fixed_durations)[s]
                                                         : config.segment_duration;
                theta[n_params + s] = softplus_inv(d0);
            }
        }
    };

    auto evaluate = [&](const std::vector<double>& th) {
        const std::vector<double> params(th.begin(), th.begin() + n_params);
        return dataset_loss_grad(family, params, durations_of(th), data, config.step_size,
                                 config.train_durations, config.blowup_threshold);
    };

    // Re-seed until the initial forward pass survives.
    LossGradResult current;
    bool alive = false;
    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        init_params(attempt);
        current = evaluate(theta);
        if (!current.blew_up) {
            alive = true;
            break;
        }
    }
    if (!alive) {
        report.failed = true;
        report.failure_reason = "initialization blew up after 10 reseeds";
        return report;
    }

    // Adam.
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::vector<double> m(n_total, 0.0), v(n_total, 0.0);
    std::vector<double> best_theta = theta;
    double best_loss = current.loss;
    double best_max_error = current.max_error;
    double lr = config.optimizer.learning_rate;
    const double lr_floor = config.optimizer.learning_rate / 1024.0;
    int retreats = 0;

    int iters = 0;
    for (int t = 1; t <= config.optimizer.max_iters; ++t) {
        iters = t;
        report.loss_history.push_back(current.loss);

        if (current.loss < best_loss) {
            best_loss = current.loss;
            best_max_error = current.max_error;
            best_theta = theta;
        }
        if (current.max_error <= config.loss_target) {
            // The interpolation criterion is met by this iterate; adopt it
            // even if an earlier one had a lower mean-squared loss.
            best_loss = current.loss;
            best_max_error = current.max_error;
            best_theta = theta;
            break;
        }

        // Full gradient including duration pre-images.
        std::vector<double> grad(n_total, 0.0);
        std::copy(current.grad_params.begin(), current.grad_params.end(), grad.begin());
        if (config.optimizer.weight_decay > 0.0) {
            for (std::size_t i = 0; i < n_params; ++i)
                grad[i] += 2.0 * config.optimizer.weight_decay * theta[i];
        }
        if (config.train_durations) {
            for (int s = 0; s < k; ++s)
                grad[n_params + s] = current.grad_durations[s] * sigmoid(theta[n_params + s]);
        }
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax <= config.optimizer.grad_tol) break;

        for (std::size_t i = 0; i < n_total; ++i) {
            m[i] = b1 * m[i] + (1 - b1) * grad[i];
            v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
            const double mh = m[i] / (1 - std::pow(b1, t));
            const double vh = v[i] / (1 - std::pow(b2, t));
            theta[i] -= lr * mh / (std::sqrt(vh) + eps);
        }

        current = evaluate(theta);
        if (current.blew_up) {
            // Retreat to the best point and slow down (bounded below so a
            // rough patch cannot silently kill the run).
            theta = best_theta;
            std::fill(m.begin(), m.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
            lr = std::max(0.5 * lr, lr_floor);
            if (++retreats > 100) break;
            current = evaluate(theta);
            if (current.blew_up) break;  // best point no longer integrable; give up
        }
    }

    if (!current.blew_up && current.loss < best_loss) {
        best_loss = current.loss;
        best_max_error = current.max_error;
        best_theta = theta;
    }

    report.final_params.assign(best_theta.begin(), best_theta.begin() + n_params);
    report.segment_durations = durations_of(best_theta);
    report.final_loss = best_loss;
    report.final_max_error = best_max_error;
    report.iterations_used = iters;
    report.converged = best_max_error <= config.loss_target;
    return report;
}

}  // namespace flowlab
