// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lmk/errors.hpp"

namespace lmk {

enum class ScheduleKind { linear_beta, cosine };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& s);

/// Cumulative signal coefficients of the diffusion process.
/// alpha_bar has T+1 entries, alpha_bar[0] = 1 exactly, monotone
/// non-increasing, and the noise level at step t is
/// sigma(t) = sqrt(1 - alpha_bar[t]).
struct NoiseSchedule {
    ScheduleKind kind = ScheduleKind::linear_beta;
    int num_train_steps = 0;
    Eigen::ArrayXd alpha_bar;

    double sigma(int t) const { return std::sqrt(1.0 - alpha_bar[t]); }

    void check_timestep(int t) const {
        if (t < 0 || t > num_train_steps)
            throw ContractError("timestep out of range [0, T]");
    }
};

/// Builds a schedule over T training steps.
///   linear_beta: beta linearly spaced 1e-4 .. 0.02 (the common DDPM grid)
///   cosine:      squared-cosine alpha_bar with offset s = 0.008
NoiseSchedule make_schedule(ScheduleKind kind, int num_train_steps);

/// Uniform-stride inference grid: `steps + 1` timesteps descending from T
/// to 0, t_i = round(i * T / steps). Used forward for sampling and in
/// reverse for inversion.
std::vector<int> inference_timesteps(int num_train_steps, int steps);

}  // namespace lmk
