// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "lmk/errors.hpp"
#include "lmk/schedule.hpp"
#include "lmk/tensor.hpp"

namespace lmk {

/// alpha_bar below this floor would make the x0 reconstruction divide by
/// (numerically) zero.
inline constexpr double kAlphaBarFloor = 1e-8;

// Expression-level DDIM algebra. These are scalar-generic and return Eigen
// expressions, so they compose without temporaries; the LatentTensor
// overloads below add shape/domain checks.

/// z_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps
template <typename D0, typename D1>
auto forward_diffuse_expr(const Eigen::ArrayBase<D0>& x0, const Eigen::ArrayBase<D1>& eps,
                          double abar_t) {
    using Scalar = typename D0::Scalar;
    const Scalar a = static_cast<Scalar>(std::sqrt(abar_t));
    const Scalar s = static_cast<Scalar>(std::sqrt(1.0 - abar_t));
    return a * x0 + s * eps.derived();
}

/// x0_hat = (x_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t)
template <typename D0, typename D1>
auto predict_x0_expr(const Eigen::ArrayBase<D0>& x_t, const Eigen::ArrayBase<D1>& eps_hat,
                     double abar_t) {
    using Scalar = typename D0::Scalar;
    const Scalar s = static_cast<Scalar>(std::sqrt(1.0 - abar_t));
    const Scalar inv_a = static_cast<Scalar>(1.0 / std::sqrt(abar_t));
    return (x_t.derived() - s * eps_hat.derived()) * inv_a;
}

/// One deterministic denoise step: x_prev = sqrt(abar_prev) x0_hat + sqrt(1 - abar_prev) eps_hat.
template <typename D0, typename D1>
auto ddim_step_expr(const Eigen::ArrayBase<D0>& x_t, const Eigen::ArrayBase<D1>& eps_hat,
                    double abar_t, double abar_prev) {
    using Scalar = typename D0::Scalar;
    const Scalar a = static_cast<Scalar>(std::sqrt(abar_prev));
    const Scalar s = static_cast<Scalar>(std::sqrt(1.0 - abar_prev));
    return a * predict_x0_expr(x_t, eps_hat, abar_t) + s * eps_hat.derived();
}

/// Blended guidance noise: eps_uncond + w (eps_cond - eps_uncond).
template <typename D0, typename D1>
auto cfg_noise_expr(const Eigen::ArrayBase<D0>& eps_cond, const Eigen::ArrayBase<D1>& eps_uncond,
                    double w) {
    using Scalar = typename D0::Scalar;
    const Scalar wf = static_cast<Scalar>(w);
    return eps_uncond.derived() + wf * (eps_cond.derived() - eps_uncond.derived());
}

// ---------------------------------------------------------------------------
// LatentTensor-level operations with contract checks.

namespace detail {
inline void require_same_shape(const LatentTensor& a, const LatentTensor& b, const char* ctx) {
    if (!(a.shape == b.shape)) throw ContractError(std::string("latent shape mismatch in ") + ctx);
}
inline double checked_alpha_bar(const NoiseSchedule& sched, int t, const char* ctx) {
    sched.check_timestep(t);
    const double abar = sched.alpha_bar[t];
    if (abar < kAlphaBarFloor)
        throw NumericDomainError(std::string("alpha_bar below numeric floor in ") + ctx);
    return abar;
}
}  // namespace detail

inline LatentTensor forward_diffuse(const LatentTensor& x0, int t, const LatentTensor& eps,
                                    const NoiseSchedule& sched) {
    detail::require_same_shape(x0, eps, "forward_diffuse");
    sched.check_timestep(t);
    return {x0.shape, forward_diffuse_expr(x0.data, eps.data, sched.alpha_bar[t])};
}

inline LatentTensor predict_x0(const LatentTensor& x_t, const LatentTensor& eps_hat, int t,
                               const NoiseSchedule& sched) {
    detail::require_same_shape(x_t, eps_hat, "predict_x0");
    const double abar = detail::checked_alpha_bar(sched, t, "predict_x0");
    return {x_t.shape, predict_x0_expr(x_t.data, eps_hat.data, abar)};
}

inline LatentTensor ddim_step(const LatentTensor& x_t, const LatentTensor& eps_hat, int t,
                              int t_prev, const NoiseSchedule& sched) {
    detail::require_same_shape(x_t, eps_hat, "ddim_step");
    if (t_prev >= t) throw ContractError("ddim_step requires t_prev < t");
    const double abar_t = detail::checked_alpha_bar(sched, t, "ddim_step");
    sched.check_timestep(t_prev);
    return {x_t.shape, ddim_step_expr(x_t.data, eps_hat.data, abar_t, sched.alpha_bar[t_prev])};
}

/// Inversion update under the fixed-eps assumption; exact inverse of
/// ddim_step when the same eps_hat is supplied on both sides.
inline LatentTensor ddim_invert_step(const LatentTensor& x_t, const LatentTensor& eps_hat, int t,
                                     int t_next, const NoiseSchedule& sched) {
    detail::require_same_shape(x_t, eps_hat, "ddim_invert_step");
    if (t_next <= t) throw ContractError("ddim_invert_step requires t_next > t");
    const double abar_t = detail::checked_alpha_bar(sched, t, "ddim_invert_step");
    sched.check_timestep(t_next);
    return {x_t.shape, ddim_step_expr(x_t.data, eps_hat.data, abar_t, sched.alpha_bar[t_next])};
}

inline LatentTensor cfg_noise(const LatentTensor& eps_cond, const LatentTensor& eps_uncond,
                              double w) {
    detail::require_same_shape(eps_cond, eps_uncond, "cfg_noise");
    if (w < 0.0) throw ContractError("guidance scale must be nonnegative");
    return {eps_cond.shape, cfg_noise_expr(eps_cond.data, eps_uncond.data, w)};
}

}  // namespace lmk
