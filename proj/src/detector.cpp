// SPDX-License-Identifier: Apache-2.0
#include "lmk/detector.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace lmk {

int match_count(const BitMessage& m, const BitMessage& m_prime) {
    if (m.size() != m_prime.size())
        throw ContractError("match_count requires equal message lengths");
    int matches = 0;
    for (int i = 0; i < m.size(); ++i) matches += (m[i] == m_prime[i]);
    return matches;
}

namespace {

// ln(i!) table, grown on demand; k <= 256 needs 258 entries but larger k
// works too.
const long double* lgamma_table(int n_max) {
    static std::vector<long double> table{0.0L};  // ln(0!) = 0
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(table.size()) <= n_max)
        table.push_back(table.back() + std::log(static_cast<long double>(table.size())));
    return table.data();
}

long double beta_continued_fraction(long double a, long double b, long double x) {
    // modified Lentz iteration for the incomplete-beta continued fraction
    constexpr long double tiny = 1e-30L;
    constexpr long double eps = 1e-18L;
    const long double qab = a + b;
    const long double qap = a + 1.0L;
    const long double qam = a - 1.0L;
    long double c = 1.0L;
    long double d = 1.0L - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0L / d;
    long double h = d;
    for (int m = 1; m <= 500; ++m) {
        const long double m2 = 2.0L * m;
        long double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0L + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0L + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0L + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0L + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0L) < eps) return h;
    }
    throw NumericDomainError("incomplete beta continued fraction did not converge");
}

void check_tau_k(int tau, int k) {
    if (k < 1) throw ContractError("fpr_exceed requires k >= 1");
    if (tau < 0 || tau > k) throw ContractError("fpr_exceed requires 0 <= tau <= k");
}

}  // namespace

long double regularized_incomplete_beta(long double a, long double b, long double x) {
    if (x < 0.0L || x > 1.0L) throw NumericDomainError("incomplete beta requires x in [0, 1]");
    if (x == 0.0L) return 0.0L;
    if (x == 1.0L) return 1.0L;
    const long double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                 a * std::log(x) + b * std::log(1.0L - x);
    const long double front = std::exp(ln_front);
    // use the continued fraction on whichever side converges fast
    if (x < (a + 1.0L) / (a + b + 2.0L))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0L - front * beta_continued_fraction(b, a, 1.0L - x) / b;
}

double fpr_exceed_beta(int tau, int k) {
    check_tau_k(tau, k);
    if (tau == k) return 0.0;
    return static_cast<double>(regularized_incomplete_beta(
        static_cast<long double>(tau) + 1.0L, static_cast<long double>(k - tau), 0.5L));
}

double fpr_exceed_direct(int tau, int k) {
    check_tau_k(tau, k);
    if (tau == k) return 0.0;
    const long double* lg = lgamma_table(k + 1);
    const long double ln_half_k = static_cast<long double>(k) * std::log(0.5L);
    // sum the shorter of the two tails; complement when the lower tail is shorter
    const bool complement = (tau + 1) < (k - tau);
    long double sum = 0.0L;
    if (!complement) {
        for (int i = k; i >= tau + 1; --i)  // ascending term size
            sum += std::exp(lg[k] - lg[i] - lg[k - i] + ln_half_k);
        return static_cast<double>(sum);
    }
    for (int i = 0; i <= tau; ++i)
        sum += std::exp(lg[k] - lg[i] - lg[k - i] + ln_half_k);
    return static_cast<double>(1.0L - sum);
}

double fpr_exceed(int tau, int k) {
    const double via_beta = fpr_exceed_beta(tau, k);
    const double via_sum = fpr_exceed_direct(tau, k);
    if (std::fabs(via_beta - via_sum) > 1e-12)
        throw NumericDomainError("binomial tail routes disagree beyond 1e-12");
    return via_beta;
}

double fpr_at_least(int t, int k) {
    if (t <= 0) return 1.0;
    return fpr_exceed(t - 1, k);
}

int min_threshold(int k, double alpha) {
    if (k < 1) throw ContractError("min_threshold requires k >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
    for (int t = 0; t <= k; ++t) {
        if (fpr_at_least(t, k) <= alpha) return t;
    }
    return k + 1;  // alpha below P(E = k); nothing detectable
}

int paper_compat_threshold(int k, double alpha) {
    if (alpha == 0.01) {
        if (k == 32) return 24;
        if (k == 48) return 34;
    }
    return min_threshold(k, alpha);
}

std::string DetectionReport::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["matches"] = matches;
    j["threshold"] = threshold;
    j["p_value"] = p_value;
    j["detected"] = detected;
    j["alpha"] = alpha;
    j["paper_compat"] = paper_compat;
    j["extracted_bits"] = extracted_bits.to_string();
    if (traced_payload) {
        j["traced_payload_hex"] = traced_payload->to_hex();
        j["traced_payload_bits"] = traced_payload->size();
    }
    if (ecc_corrected_errors) j["ecc_corrected_errors"] = *ecc_corrected_errors;
    if (traced_user) j["traced_user"] = *traced_user;
    if (!attack_context.empty()) j["attack_context"] = attack_context;
    return j.dump(2);
}

}  // namespace lmk
