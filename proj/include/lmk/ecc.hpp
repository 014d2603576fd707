// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "lmk/bits.hpp"
#include "lmk/errors.hpp"

namespace lmk {

/// Recursive systematic convolutional code, rate 1/n.
///
/// Polynomials are K-bit integers (octal in configs); the most significant
/// bit taps the current (feedback-combined) input, lower bits tap older
/// register cells. The encoder register starts at zero and is driven back
/// to zero by K-1 tail inputs, so the codeword is
/// n * (payload_length + K - 1) bits: the systematic stream first, then
/// each parity stream, concatenated.
struct RSCConfig {
    int n = 3;                  // 1/n code rate, n in {2, 3}
    int constraint_length = 7;  // K
    std::uint32_t feedback = 0171;
    std::vector<std::uint32_t> feedforward = {0133, 0145};  // n - 1 polynomials
    int payload_length = 0;

    int memory() const { return constraint_length - 1; }
    int trellis_steps() const { return payload_length + memory(); }
    int codeword_length() const { return n * trellis_steps(); }

    void validate() const;

    /// Default code of this build: rate 1/3, K = 7.
    static RSCConfig rate_third_k7(int payload_length) {
        RSCConfig cfg;
        cfg.payload_length = payload_length;
        return cfg;
    }

    /// Rate 1/2 companion with the same constraint length.
    static RSCConfig rate_half_k7(int payload_length) {
        RSCConfig cfg;
        cfg.n = 2;
        cfg.feedforward = {0133};
        cfg.payload_length = payload_length;
        return cfg;
    }
};

/// Encoded bitstream: systematic block followed by parity blocks.
struct Codeword {
    std::vector<std::uint8_t> bits;
    int size() const { return static_cast<int>(bits.size()); }

    BitMessage as_message() const { return BitMessage(bits); }
};

Codeword rsc_encode(const BitMessage& payload, const RSCConfig& cfg);

struct RSCDecodeResult {
    BitMessage payload;
    int corrected_errors = 0;  // Hamming(received, re-encoded decision)
};

/// Hard-decision Viterbi decoding (maximum likelihood under the Hamming
/// metric) with full traceback from the zero state.
RSCDecodeResult rsc_decode(const std::vector<std::uint8_t>& received, const RSCConfig& cfg);
inline RSCDecodeResult rsc_decode(const Codeword& received, const RSCConfig& cfg) {
    return rsc_decode(received.bits, cfg);
}
inline RSCDecodeResult rsc_decode(const BitMessage& received, const RSCConfig& cfg) {
    return rsc_decode(received.bits, cfg);
}

}  // namespace lmk
