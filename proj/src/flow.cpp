#include "flowlab/flow.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>

namespace flowlab {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double one_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += std::abs(x);
    return m;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Scratch for one augmented RK4 integration; sized once per call.
struct Rk4State {
    std::vector<double> x, jac, stage_x, stage_jac, fieldjac;
    std::array<std::vector<double>, 4> kx, kj;
    std::array<double, 4> kl{};
    double logdet = 0.0;

    Rk4State(int d, bool with_jac) {
        x.resize(d);
        for (auto& k : kx) k.resize(d);
        stage_x.resize(d);
        if (with_jac) {
            jac.assign(static_cast<std::size_t>(d) * d, 0.0);
            for (int i = 0; i < d; ++i) jac[i * d + i] = 1.0;
            for (auto& k : kj) k.resize(static_cast<std::size_t>(d) * d);
            stage_jac.resize(static_cast<std::size_t>(d) * d);
            fieldjac.resize(static_cast<std::size_t>(d) * d);
        }
    }
};

}  // namespace

FlowResult integrate(const ControlFamily& family, const ControlSchedule& schedule,
                     std::span<const double> x0, const FlowOptions& options) {
    const int d = family.dimension();
    if (static_cast<int>(x0.size()) != d)
        throw std::invalid_argument("integrate: initial state has wrong dimension");
    if (!(options.step > 0.0)) throw std::invalid_argument("integrate: step must be positive");
    for (const auto& seg : schedule.segments()) {
        if (static_cast<int>(seg.params.size()) != family.param_count())
            throw std::invalid_argument("integrate: segment parameter shape mismatch");
    }

    const bool with_jac = options.with_jacobian;
    Rk4State st(d, with_jac);
    std::copy(x0.begin(), x0.end(), st.x.begin());

    FlowResult result;
    result.step_used = options.step;
    result.nonsmooth = with_jac && family.nonsmooth();

    double t_global = 0.0;
    long step_index = 0;

    auto record = [&](double t) {
        result.trajectory_times.push_back(t);
        result.trajectory_states.push_back(st.x);
    };
    if (options.record_trajectory) record(0.0);

    auto stage = [&](std::span<const double> xs, std::span<const double> js, int slot,
                     std::span<const double> theta) {
        family.eval(theta, xs, st.kx[slot]);
        if (with_jac) {
            family.jacobian_x(theta, xs, st.fieldjac);
            // kj = (df/dx) * J
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    double acc = 0.0;
                    for (int m = 0; m < d; ++m) acc += st.fieldjac[i * d + m] * js[m * d + j];
                    st.kj[slot][i * d + j] = acc;
                }
            }
            st.kl[slot] = family.divergence_at(theta, xs);
        }
    };

    bool halted = false;
    for (const auto& seg : schedule.segments()) {
        if (halted) break;
        const StepPlan plan = plan_steps(seg.duration, options.step);
        for (int s = 0; s < plan.total_steps() && !halted; ++s) {
            const double h = plan.step_size(s, options.step);
            const double t_left = t_global;

            stage(st.x, st.jac, 0, seg.params);
            auto advance = [&](double factor, int from_slot) {
                for (int i = 0; i < d; ++i)
                    st.stage_x[i] = st.x[i] + factor * h * st.kx[from_slot][i];
                if (with_jac) {
                    for (std::size_t i = 0; i < st.jac.size(); ++i)
                        st.stage_jac[i] = st.jac[i] + factor * h * st.kj[from_slot][i];
                }
            };
            advance(0.5, 0);
            stage(st.stage_x, st.stage_jac, 1, seg.params);
            advance(0.5, 1);
            stage(st.stage_x, st.stage_jac, 2, seg.params);
            advance(1.0, 2);
            stage(st.stage_x, st.stage_jac, 3, seg.params);

            for (int i = 0; i < d; ++i) {
                st.x[i] += h / 6.0 *
                           (st.kx[0][i] + 2 * st.kx[1][i] + 2 * st.kx[2][i] + st.kx[3][i]);
            }
            if (with_jac) {
                for (std::size_t i = 0; i < st.jac.size(); ++i) {
                    st.jac[i] += h / 6.0 *
                                 (st.kj[0][i] + 2 * st.kj[1][i] + 2 * st.kj[2][i] + st.kj[3][i]);
                }
                st.logdet += h / 6.0 * (st.kl[0] + 2 * st.kl[1] + 2 * st.kl[2] + st.kl[3]);
            }
            t_global = t_left + h;
            ++step_index;

            if (!all_finite(st.x) || (with_jac && !all_finite(st.jac))) {
                result.blew_up = true;
                result.blowup_time = t_left;
                result.diagnostic = "non-finite state at t=" + std::to_string(t_left);
                halted = true;
            } else if (inf_norm(st.x) > options.blowup_threshold) {
                result.blew_up = true;
                result.blowup_time = t_left;
                std::ostringstream msg;
                msg << "state norm " << inf_norm(st.x) << " exceeded threshold "
                    << options.blowup_threshold << " during step starting at t=" << t_left;
                result.diagnostic = msg.str();
                halted = true;
            }

            if (options.record_trajectory && !halted &&
                step_index % std::max(1, options.trajectory_stride) == 0) {
                record(t_global);
            }
        }
    }

    if (options.record_trajectory && !halted &&
        (result.trajectory_times.empty() || result.trajectory_times.back() != t_global)) {
        record(t_global);
    }

    result.endpoint = st.x;
    if (with_jac && !result.blew_up) {
        result.has_jacobian = true;
        result.jacobian = st.jac;
        result.has_logdet = true;
        result.logdet = st.logdet;
    }
    return result;
}

FlowResult integrate_with_jacobian(const ControlFamily& family, const ControlSchedule& schedule,
                                   std::span<const double> x0, FlowOptions options) {
    options.with_jacobian = true;
    return integrate(family, schedule, x0, options);
}

GronwallReport gronwall_check(const ControlFamily& family, const ControlSchedule& schedule,
                              std::span<const double> x0, double step, double c1, double c2,
                              double lipschitz, double delta) {
    const int d = family.dimension();
    FlowOptions opts;
    opts.step = step;
    opts.record_trajectory = true;
    opts.trajectory_stride = 1;

    GronwallReport report;
    const FlowResult base = integrate(family, schedule, x0, opts);
    if (base.blew_up) {
        report.applicable = false;
        return report;
    }

    const double norm0 = one_norm(x0);
    double margin_norm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < base.trajectory_times.size(); ++i) {
        const double t = base.trajectory_times[i];
        const double bound = (norm0 + c1 * t) * std::exp(c2 * t);
        margin_norm = std::min(margin_norm, bound - one_norm(base.trajectory_states[i]));
    }

    double margin_lip = std::numeric_limits<double>::infinity();
    std::vector<double> y0(x0.begin(), x0.end());
    for (int j = 0; j < d; ++j) {
        y0[j] += delta;
        const FlowResult comp = integrate(family, schedule, y0, opts);
        y0[j] -= delta;
        if (comp.blew_up) {
            report.applicable = false;
            return report;
        }
        for (std::size_t i = 0; i < base.trajectory_times.size(); ++i) {
            const double t = base.trajectory_times[i];
            double diff = 0.0;
            for (int c = 0; c < d; ++c)
                diff += std::abs(base.trajectory_states[i][c] - comp.trajectory_states[i][c]);
            margin_lip = std::min(margin_lip, std::exp(lipschitz * t) * delta - diff);
        }
    }

    report.margin_norm = margin_norm;
    report.margin_lip = margin_lip;
    // Tiny slack absorbs integrator roundoff at equality cases (zero field,
    // exactly linear flows).
    const double slack = 1e-9 * (1.0 + norm0);
    report.bound_norm_ok = margin_norm >= -slack;
    report.bound_lip_ok = margin_lip >= -slack * delta;
    return report;
}

MonotoneResult monotone_1d_check(const ControlFamily& family, const ControlSchedule& schedule,
                                 std::span<const double> points, double step) {
    if (family.dimension() != 1)
        throw std::invalid_argument("monotone_1d_check: family must be one-dimensional");
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] < points[i + 1]))
            throw std::invalid_argument("monotone_1d_check: points must be strictly increasing");
    }
    FlowOptions opts;
    opts.step = step;
    std::vector<double> outputs;
    outputs.reserve(points.size());
    for (double p : points) {
        const FlowResult r = integrate(family, schedule, std::span<const double>(&p, 1), opts);
        if (r.blew_up) return MonotoneResult::Indeterminate;
        outputs.push_back(r.endpoint[0]);
    }
    for (std::size_t i = 0; i + 1 < outputs.size(); ++i) {
        if (!(outputs[i] < outputs[i + 1])) return MonotoneResult::NotIncreasing;
    }
    return MonotoneResult::Increasing;
}

}  // namespace flowlab
