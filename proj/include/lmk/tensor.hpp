// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "lmk/errors.hpp"

namespace lmk {

struct LatentShape {
    int channels = 0;
    int height = 0;
    int width = 0;

    int size() const { return channels * height * width; }
    bool operator==(const LatentShape&) const = default;
};

/// Real-valued latent array, channel-major: data[c*h*w + y*w + x].
struct LatentTensor {
    LatentShape shape;
    Eigen::ArrayXf data;

    LatentTensor() = default;
    LatentTensor(LatentShape s, Eigen::ArrayXf d) : shape(s), data(std::move(d)) {
        if (data.size() != shape.size()) throw ContractError("latent data size does not match shape");
    }

    static LatentTensor zeros(LatentShape s) {
        return LatentTensor(s, Eigen::ArrayXf::Zero(s.size()));
    }

    bool all_finite() const { return data.isFinite().all(); }

    void require_finite(const char* ctx) const {
        if (!all_finite()) throw NumericDomainError(std::string("non-finite latent in ") + ctx);
    }

    Eigen::Map<Eigen::ArrayXf> channel(int c) {
        return {data.data() + static_cast<std::ptrdiff_t>(c) * shape.height * shape.width,
                static_cast<Eigen::Index>(shape.height) * shape.width};
    }
    Eigen::Map<const Eigen::ArrayXf> channel(int c) const {
        return {data.data() + static_cast<std::ptrdiff_t>(c) * shape.height * shape.width,
                static_cast<Eigen::Index>(shape.height) * shape.width};
    }
};

/// Pixel image, channel-major like LatentTensor, values expected in [0, 1].
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    Eigen::ArrayXf data;

    Image() = default;
    Image(int c, int h, int w) : channels(c), height(h), width(w), data(Eigen::ArrayXf::Zero(c * h * w)) {}
    Image(int c, int h, int w, Eigen::ArrayXf d) : channels(c), height(h), width(w), data(std::move(d)) {
        if (data.size() != static_cast<Eigen::Index>(c) * h * w)
            throw ContractError("image data size does not match shape");
    }

    int size() const { return channels * height * width; }

    float& at(int c, int y, int x) { return data[(static_cast<Eigen::Index>(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const {
        return data[(static_cast<Eigen::Index>(c) * height + y) * width + x];
    }

    Eigen::Map<Eigen::ArrayXf> channel(int c) {
        return {data.data() + static_cast<std::ptrdiff_t>(c) * height * width,
                static_cast<Eigen::Index>(height) * width};
    }
    Eigen::Map<const Eigen::ArrayXf> channel(int c) const {
        return {data.data() + static_cast<std::ptrdiff_t>(c) * height * width,
                static_cast<Eigen::Index>(height) * width};
    }

    void clamp01() { data = data.min(1.0f).max(0.0f); }

    bool same_shape(const Image& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

}  // namespace lmk
