// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmk/errors.hpp"
#include "lmk/rng.hpp"

namespace lmk {

/// Fixed-length binary payload. Values are stored one bit per byte (0/1).
/// 16/32/48 are the paper-parity watermark lengths; any positive length
/// is accepted by the library.
struct BitMessage {
    std::vector<std::uint8_t> bits;

    BitMessage() = default;
    explicit BitMessage(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    int size() const { return static_cast<int>(bits.size()); }
    bool empty() const { return bits.empty(); }
    std::uint8_t operator[](int i) const { return bits[static_cast<std::size_t>(i)]; }
    std::uint8_t& operator[](int i) { return bits[static_cast<std::size_t>(i)]; }

    bool operator==(const BitMessage&) const = default;

    static BitMessage zeros(int k) { return BitMessage(std::vector<std::uint8_t>(k, 0)); }

    static BitMessage random(Rng& rng, int k) {
        BitMessage m = zeros(k);
        for (auto& b : m.bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        return m;
    }

    /// Bit string like "10110", mainly for logs and tests.
    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    static BitMessage from_string(const std::string& s) {
        BitMessage m;
        m.bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw DataFormatError("bit string may contain only 0/1");
            m.bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return m;
    }

    /// Hex serialization: big-endian bit order (first bit = MSB of the first
    /// byte), zero-padded to a byte boundary. The bit length travels
    /// separately; see from_hex.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        const int nbytes = (size() + 7) / 8;
        out.reserve(2 * static_cast<std::size_t>(nbytes));
        for (int byte = 0; byte < nbytes; ++byte) {
            unsigned v = 0;
            for (int j = 0; j < 8; ++j) {
                const int idx = byte * 8 + j;
                v = (v << 1) | (idx < size() ? bits[static_cast<std::size_t>(idx)] : 0u);
            }
            out.push_back(digits[v >> 4]);
            out.push_back(digits[v & 0xf]);
        }
        return out;
    }

    static BitMessage from_hex(const std::string& hex, int bit_length) {
        if (bit_length < 0) throw DataFormatError("negative bit length");
        const int nbytes = (bit_length + 7) / 8;
        if (static_cast<int>(hex.size()) != 2 * nbytes)
            throw DataFormatError("hex string length does not match bit length");
        auto nibble = [](char c) -> unsigned {
            if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
            if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
            if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
            throw DataFormatError("invalid hex digit");
        };
        BitMessage m = zeros(bit_length);
        for (int i = 0; i < bit_length; ++i) {
            const unsigned byte = (nibble(hex[2 * (i / 8)]) << 4) | nibble(hex[2 * (i / 8) + 1]);
            m.bits[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>((byte >> (7 - i % 8)) & 1u);
        }
        return m;
    }

    BitMessage operator^(const BitMessage& other) const {
        if (other.size() != size()) throw ContractError("bit message length mismatch in xor");
        BitMessage out = *this;
        for (int i = 0; i < size(); ++i) out.bits[static_cast<std::size_t>(i)] ^= other[i];
        return out;
    }
};

inline int hamming_distance(const BitMessage& a, const BitMessage& b) {
    if (a.size() != b.size()) throw ContractError("bit message length mismatch in hamming_distance");
    int d = 0;
    for (int i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

}  // namespace lmk
