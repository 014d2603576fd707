// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmk/bits.hpp"
#include "lmk/errors.hpp"

namespace lmk {

/// Outcome of a statistical watermark test on one image.
///
/// Under H0 (no watermark) the matched-bit count E(m, m') is Binomial(k, 1/2);
/// detection fires when matches >= threshold, with the threshold chosen so the
/// false-positive rate stays below alpha.
struct DetectionReport {
    int k = 0;                  // bits compared
    int matches = 0;            // E(m, m')
    int threshold = 0;          // tau*: detect iff matches >= tau*
    double p_value = 1.0;       // P(E >= matches | H0)
    bool detected = false;
    double alpha = 0.0;         // configured FPR bound
    bool paper_compat = false;  // threshold pinned to the published operating points
    BitMessage extracted_bits;
    std::optional<BitMessage> traced_payload;  // ECC-corrected identity, when configured
    std::optional<int> ecc_corrected_errors;
    std::optional<std::string> traced_user;  // registry match for traced_payload
    std::vector<std::string> attack_context;

    std::string to_json() const;
};

/// Number of positions where the two messages agree.
int match_count(const BitMessage& m, const BitMessage& m_prime);

/// Exact tail P(E > tau | H0) for E ~ Binomial(k, 1/2).
///
/// Evaluated two independent ways — the regularized incomplete beta
/// I_{1/2}(tau+1, k-tau) and direct summation of binomial terms, both in
/// extended precision — and cross-checked to 1e-12 on every call.
double fpr_exceed(int tau, int k);

/// The two routes individually, for calibration tests.
double fpr_exceed_beta(int tau, int k);
double fpr_exceed_direct(int tau, int k);

/// Inclusive tail P(E >= t | H0); the convention detection actually uses.
double fpr_at_least(int t, int k);

/// Smallest T with P(E >= T | H0) <= alpha.
int min_threshold(int k, double alpha);

/// Published operating points: 24/32 and 34/48 at alpha = 0.01. Falls back
/// to min_threshold for any other configuration.
int paper_compat_threshold(int k, double alpha);

/// Regularized incomplete beta I_x(a, b), extended precision continued
/// fraction. Exposed because the detector's dual-route contract names it.
long double regularized_incomplete_beta(long double a, long double b, long double x);

}  // namespace lmk
