// SPDX-License-Identifier: Apache-2.0
#include "lmk/schedule.hpp"

#include <algorithm>

namespace lmk {

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::linear_beta: return "linear_beta";
        case ScheduleKind::cosine: return "cosine";
    }
    throw ConfigError("unknown schedule kind");
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "linear_beta") return ScheduleKind::linear_beta;
    if (s == "cosine") return ScheduleKind::cosine;
    throw ConfigError("unknown schedule kind: " + s);
}

NoiseSchedule make_schedule(ScheduleKind kind, int num_train_steps) {
    if (num_train_steps < 2) throw ConfigError("schedule needs at least 2 train steps");

    const int T = num_train_steps;
    NoiseSchedule sched;
    sched.kind = kind;
    sched.num_train_steps = T;
    sched.alpha_bar = Eigen::ArrayXd::Ones(T + 1);

    switch (kind) {
        case ScheduleKind::linear_beta: {
            const Eigen::ArrayXd beta = Eigen::ArrayXd::LinSpaced(T, 1e-4, 0.02);
            double acc = 1.0;
            for (int t = 1; t <= T; ++t) {
                acc *= 1.0 - beta[t - 1];
                sched.alpha_bar[t] = acc;
            }
            break;
        }
        case ScheduleKind::cosine: {
            // squared-cosine profile, betas capped at 0.999 so alpha_bar
            // stays strictly decreasing and positive
            const double s = 0.008;
            auto f = [&](double t) {
                const double v = std::cos((t / T + s) / (1.0 + s) * M_PI / 2.0);
                return v * v;
            };
            const double f0 = f(0.0);
            double prev = 1.0;
            for (int t = 1; t <= T; ++t) {
                const double target = f(static_cast<double>(t)) / f0;
                const double beta = std::min(1.0 - target / prev, 0.999);
                prev *= 1.0 - beta;
                sched.alpha_bar[t] = prev;
            }
            break;
        }
        default:
            throw ConfigError("unknown schedule kind");
    }
    return sched;
}

std::vector<int> inference_timesteps(int num_train_steps, int steps) {
    if (steps < 0) throw ConfigError("negative inference step count");
    if (steps > num_train_steps) throw ConfigError("more inference steps than train steps");
    std::vector<int> ts;
    ts.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = steps; i >= 0; --i) {
        ts.push_back(static_cast<int>(std::lround(
            static_cast<double>(i) * num_train_steps / std::max(steps, 1))));
    }
    if (steps == 0) ts.assign({num_train_steps});  // degenerate grid, no transitions
    return ts;
}

}  // namespace lmk
