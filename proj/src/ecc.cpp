// SPDX-License-Identifier: Apache-2.0
#include "lmk/ecc.hpp"

#include <bit>
#include <limits>

namespace lmk {

namespace {

inline int parity(std::uint32_t v) { return std::popcount(v) & 1; }

// Transition of the RSC register. State packs the K-1 memory cells with the
// newest cell in the top bit. `a` is the feedback-combined input that enters
// the register.
struct Step {
    int systematic;                        // emitted systematic bit (the raw input u)
    std::vector<std::uint8_t> parities;    // one bit per feedforward polynomial
    std::uint32_t next_state;
};

struct Trellis {
    int memory;
    std::uint32_t n_states;
    // indexed [state][a]
    std::vector<std::array<Step, 2>> steps;

    explicit Trellis(const RSCConfig& cfg) : memory(cfg.memory()), n_states(1u << cfg.memory()) {
        const int K = cfg.constraint_length;
        steps.resize(n_states);
        for (std::uint32_t s = 0; s < n_states; ++s) {
            // feedback over the memory cells (polynomial bits below the MSB)
            const int fb = parity(cfg.feedback & s);
            for (std::uint32_t a = 0; a <= 1; ++a) {
                Step& st = steps[s][a];
                st.systematic = static_cast<int>(a) ^ fb;  // u = a ^ fb
                const std::uint32_t reg = (a << (K - 1)) | s;  // [a, s_1..s_m]
                st.parities.resize(cfg.feedforward.size());
                for (std::size_t g = 0; g < cfg.feedforward.size(); ++g)
                    st.parities[g] = static_cast<std::uint8_t>(parity(cfg.feedforward[g] & reg));
                st.next_state = (s >> 1) | (a << (memory - 1));
            }
        }
    }
};

}  // namespace

void RSCConfig::validate() const {
    if (n != 2 && n != 3) throw ConfigError("RSC rate must be 1/2 or 1/3");
    if (constraint_length < 2 || constraint_length > 16)
        throw ConfigError("RSC constraint length out of supported range [2, 16]");
    if (static_cast<int>(feedforward.size()) != n - 1)
        throw ConfigError("RSC needs n - 1 feedforward polynomials");
    if (payload_length < 1) throw ConfigError("RSC payload length must be positive");
    const std::uint32_t mask = (1u << constraint_length) - 1;
    if ((feedback & ~mask) != 0) throw ConfigError("RSC feedback polynomial wider than K bits");
    if (!(feedback >> (constraint_length - 1)))
        throw ConfigError("RSC feedback polynomial must tap the current input");
    for (auto g : feedforward)
        if ((g & ~mask) != 0) throw ConfigError("RSC feedforward polynomial wider than K bits");
}

Codeword rsc_encode(const BitMessage& payload, const RSCConfig& cfg) {
    cfg.validate();
    if (payload.size() != cfg.payload_length)
        throw ContractError("payload length does not match RSC config");

    const Trellis trellis(cfg);
    const int steps = cfg.trellis_steps();

    std::vector<std::uint8_t> systematic(steps);
    std::vector<std::vector<std::uint8_t>> parities(cfg.feedforward.size(),
                                                    std::vector<std::uint8_t>(steps));
    std::uint32_t state = 0;
    for (int i = 0; i < steps; ++i) {
        std::uint32_t a;
        if (i < cfg.payload_length) {
            const int fb = parity(cfg.feedback & state);
            a = static_cast<std::uint32_t>(payload[i] ^ fb);
        } else {
            a = 0;  // tail input chosen so the register drains to zero
        }
        const Step& st = trellis.steps[state][a];
        systematic[i] = static_cast<std::uint8_t>(st.systematic);
        for (std::size_t g = 0; g < parities.size(); ++g) parities[g][i] = st.parities[g];
        state = st.next_state;
    }

    Codeword cw;
    cw.bits.reserve(static_cast<std::size_t>(cfg.codeword_length()));
    cw.bits.insert(cw.bits.end(), systematic.begin(), systematic.end());
    for (const auto& p : parities) cw.bits.insert(cw.bits.end(), p.begin(), p.end());
    return cw;
}

RSCDecodeResult rsc_decode(const std::vector<std::uint8_t>& received, const RSCConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(received.size()) != cfg.codeword_length())
        throw ContractError("received length does not match RSC config");

    const Trellis trellis(cfg);
    const int steps = cfg.trellis_steps();
    const std::uint32_t n_states = trellis.n_states;
    constexpr int inf = std::numeric_limits<int>::max() / 2;

    std::vector<int> metric(n_states, inf), next_metric(n_states, inf);
    metric[0] = 0;  // encoder starts in the zero state
    // survivors[t][state] = the `a` chosen entering `state` at step t
    std::vector<std::vector<std::uint8_t>> survivors(
        static_cast<std::size_t>(steps), std::vector<std::uint8_t>(n_states, 0));
    std::vector<std::uint32_t> pred(static_cast<std::size_t>(steps) * n_states, 0);

    for (int t = 0; t < steps; ++t) {
        std::fill(next_metric.begin(), next_metric.end(), inf);
        const int rx_sys = received[static_cast<std::size_t>(t)];
        for (std::uint32_t s = 0; s < n_states; ++s) {
            if (metric[s] >= inf) continue;
            for (std::uint32_t a = 0; a <= 1; ++a) {
                const Step& st = trellis.steps[s][a];
                int branch = (st.systematic != rx_sys);
                for (std::size_t g = 0; g < st.parities.size(); ++g) {
                    const int rx_par =
                        received[(g + 1) * static_cast<std::size_t>(steps) + t];
                    branch += (st.parities[g] != rx_par);
                }
                const int cand = metric[s] + branch;
                if (cand < next_metric[st.next_state]) {
                    next_metric[st.next_state] = cand;
                    survivors[static_cast<std::size_t>(t)][st.next_state] =
                        static_cast<std::uint8_t>(a);
                    pred[static_cast<std::size_t>(t) * n_states + st.next_state] = s;
                }
            }
        }
        metric.swap(next_metric);
    }

    // terminated trellis: trace back from state zero
    std::vector<std::uint8_t> a_path(static_cast<std::size_t>(steps));
    std::uint32_t state = 0;
    for (int t = steps - 1; t >= 0; --t) {
        const std::uint8_t a = survivors[static_cast<std::size_t>(t)][state];
        a_path[static_cast<std::size_t>(t)] = a;
        state = pred[static_cast<std::size_t>(t) * n_states + state];
    }

    // replay the path to recover the systematic inputs
    RSCDecodeResult result;
    result.payload = BitMessage::zeros(cfg.payload_length);
    state = 0;
    for (int t = 0; t < steps; ++t) {
        const Step& st = trellis.steps[state][a_path[static_cast<std::size_t>(t)]];
        if (t < cfg.payload_length)
            result.payload[t] = static_cast<std::uint8_t>(st.systematic);
        state = st.next_state;
    }

    const Codeword reencoded = rsc_encode(result.payload, cfg);
    int dist = 0;
    for (int i = 0; i < reencoded.size(); ++i)
        dist += (reencoded.bits[static_cast<std::size_t>(i)] !=
                 received[static_cast<std::size_t>(i)]);
    result.corrected_errors = dist;
    return result;
}

}  // namespace lmk
