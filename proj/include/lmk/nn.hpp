// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal dense/conv layer kit used by the watermark codec and the toy
// diffusion backend. Templated on scalar so gradient checks can run in
// double while training runs in float. Batches are matrices with one
// flattened sample per column; feature maps are channel-major.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lmk/errors.hpp"
#include "lmk/rng.hpp"

namespace lmk::nn {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using ArrX = Eigen::Array<S, Eigen::Dynamic, 1>;

template <class S>
struct Tensor {
    std::string name;
    std::vector<int> dims;
    ArrX<S> v;  // values
    ArrX<S> g;  // gradient accumulator

    void init(std::string n, std::vector<int> d) {
        name = std::move(n);
        dims = std::move(d);
        Eigen::Index total = 1;
        for (int x : dims) total *= x;
        v = ArrX<S>::Zero(total);
        g = ArrX<S>::Zero(total);
    }

    Eigen::Index size() const { return v.size(); }

    Eigen::Map<MatX<S>> mat(Eigen::Index rows, Eigen::Index cols) {
        return {v.data(), rows, cols};
    }
    Eigen::Map<const MatX<S>> mat(Eigen::Index rows, Eigen::Index cols) const {
        return {v.data(), rows, cols};
    }
    Eigen::Map<MatX<S>> grad_mat(Eigen::Index rows, Eigen::Index cols) {
        return {g.data(), rows, cols};
    }
};

template <class S>
void he_normal_init(Tensor<S>& t, int fan_in, Rng& rng) {
    const double stddev = std::sqrt(2.0 / fan_in);
    for (Eigen::Index i = 0; i < t.v.size(); ++i)
        t.v[i] = static_cast<S>(stddev * rng.gaussian());
}

// ---------------------------------------------------------------------------
// im2col / col2im (adjoint pair)

template <class S>
void im2col(const S* x, int C, int H, int W, int k, int stride, int pad, MatX<S>& cols) {
    const int OH = (H + 2 * pad - k) / stride + 1;
    const int OW = (W + 2 * pad - k) / stride + 1;
    cols.resize(static_cast<Eigen::Index>(C) * k * k, static_cast<Eigen::Index>(OH) * OW);
    for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * OW + ox;
            Eigen::Index row = 0;
            for (int c = 0; c < C; ++c)
                for (int ky = 0; ky < k; ++ky) {
                    const int y = oy * stride - pad + ky;
                    for (int kx = 0; kx < k; ++kx, ++row) {
                        const int xx = ox * stride - pad + kx;
                        cols(row, col) = (y >= 0 && y < H && xx >= 0 && xx < W)
                                             ? x[(static_cast<Eigen::Index>(c) * H + y) * W + xx]
                                             : S(0);
                    }
                }
        }
}

template <class S>
void col2im(const MatX<S>& cols, int C, int H, int W, int k, int stride, int pad, S* x) {
    const int OH = (H + 2 * pad - k) / stride + 1;
    const int OW = (W + 2 * pad - k) / stride + 1;
    std::fill(x, x + static_cast<std::size_t>(C) * H * W, S(0));
    for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * OW + ox;
            Eigen::Index row = 0;
            for (int c = 0; c < C; ++c)
                for (int ky = 0; ky < k; ++ky) {
                    const int y = oy * stride - pad + ky;
                    for (int kx = 0; kx < k; ++kx, ++row) {
                        const int xx = ox * stride - pad + kx;
                        if (y >= 0 && y < H && xx >= 0 && xx < W)
                            x[(static_cast<Eigen::Index>(c) * H + y) * W + xx] += cols(row, col);
                    }
                }
        }
}

// ---------------------------------------------------------------------------
// Layers

template <class S>
struct Dense {
    Tensor<S> W, b;
    bool use_bias = true;
    MatX<S> x_cache;

    void init(const std::string& name, int in, int out, Rng& rng, bool bias = true) {
        use_bias = bias;
        W.init(name + ".W", {out, in});
        he_normal_init(W, in, rng);
        b.init(name + ".b", {out});
    }

    int in_features() const { return W.dims[1]; }
    int out_features() const { return W.dims[0]; }

    MatX<S> forward(const MatX<S>& x) {
        x_cache = x;
        MatX<S> y = W.mat(out_features(), in_features()) * x;
        if (use_bias) y.colwise() += b.v.matrix();
        return y;
    }

    MatX<S> backward(const MatX<S>& dy) {
        W.grad_mat(out_features(), in_features()) += dy * x_cache.transpose();
        if (use_bias) b.g.matrix() += dy.rowwise().sum();
        return W.mat(out_features(), in_features()).transpose() * dy;
    }

    std::vector<Tensor<S>*> params() {
        if (use_bias) return {&W, &b};
        return {&W};
    }
};

template <class S>
struct Conv2d {
    int in_c = 0, in_h = 0, in_w = 0;
    int out_c = 0, k = 3, stride = 1, pad = 1;
    Tensor<S> W, b;
    MatX<S> x_cache;

    void init(const std::string& name, int ic, int ih, int iw, int oc, int kernel, int s, int p,
              Rng& rng) {
        in_c = ic;
        in_h = ih;
        in_w = iw;
        out_c = oc;
        k = kernel;
        stride = s;
        pad = p;
        W.init(name + ".W", {oc, ic * kernel * kernel});
        he_normal_init(W, ic * kernel * kernel, rng);
        b.init(name + ".b", {oc});
    }

    int out_h() const { return (in_h + 2 * pad - k) / stride + 1; }
    int out_w() const { return (in_w + 2 * pad - k) / stride + 1; }
    Eigen::Index in_size() const { return static_cast<Eigen::Index>(in_c) * in_h * in_w; }
    Eigen::Index out_size() const { return static_cast<Eigen::Index>(out_c) * out_h() * out_w(); }

    MatX<S> forward(const MatX<S>& x) {
        if (x.rows() != in_size()) throw ContractError("conv input size mismatch: " + W.name);
        x_cache = x;
        const Eigen::Index batch = x.cols();
        const Eigen::Index spatial = static_cast<Eigen::Index>(out_h()) * out_w();
        MatX<S> y(out_size(), batch);
        MatX<S> cols;
        const auto Wm = W.mat(out_c, static_cast<Eigen::Index>(in_c) * k * k);
        for (Eigen::Index n = 0; n < batch; ++n) {
            im2col(x.col(n).data(), in_c, in_h, in_w, k, stride, pad, cols);
            Eigen::Map<MatX<S>> ym(y.col(n).data(), out_c, spatial);
            ym.noalias() = Wm * cols;
            ym.colwise() += b.v.matrix();
        }
        return y;
    }

    MatX<S> backward(const MatX<S>& dy) {
        const Eigen::Index batch = dy.cols();
        const Eigen::Index spatial = static_cast<Eigen::Index>(out_h()) * out_w();
        MatX<S> dx(in_size(), batch);
        MatX<S> cols, dcols;
        auto dWm = W.grad_mat(out_c, static_cast<Eigen::Index>(in_c) * k * k);
        const auto Wm = W.mat(out_c, static_cast<Eigen::Index>(in_c) * k * k);
        for (Eigen::Index n = 0; n < batch; ++n) {
            Eigen::Map<const MatX<S>> dym(dy.col(n).data(), out_c, spatial);
            im2col(x_cache.col(n).data(), in_c, in_h, in_w, k, stride, pad, cols);
            dWm.noalias() += dym * cols.transpose();
            b.g.matrix() += dym.rowwise().sum();
            dcols.noalias() = Wm.transpose() * dym;
            col2im(dcols, in_c, in_h, in_w, k, stride, pad, dx.col(n).data());
        }
        return dx;
    }

    std::vector<Tensor<S>*> params() { return {&W, &b}; }
};

/// Transposed convolution, implemented as the adjoint of Conv2d: the weight
/// is laid out exactly like a Conv2d weight going out_c -> in_c, so
/// forward here is that conv's input-gradient and vice versa.
template <class S>
struct ConvT2d {
    int in_c = 0, in_h = 0, in_w = 0;
    int out_c = 0, k = 4, stride = 2, pad = 1;
    Tensor<S> W, b;
    MatX<S> x_cache;

    void init(const std::string& name, int ic, int ih, int iw, int oc, int kernel, int s, int p,
              Rng& rng) {
        in_c = ic;
        in_h = ih;
        in_w = iw;
        out_c = oc;
        k = kernel;
        stride = s;
        pad = p;
        W.init(name + ".W", {ic, oc * kernel * kernel});
        he_normal_init(W, ic * kernel * kernel, rng);
        b.init(name + ".b", {oc});
    }

    int out_h() const { return (in_h - 1) * stride - 2 * pad + k; }
    int out_w() const { return (in_w - 1) * stride - 2 * pad + k; }
    Eigen::Index in_size() const { return static_cast<Eigen::Index>(in_c) * in_h * in_w; }
    Eigen::Index out_size() const { return static_cast<Eigen::Index>(out_c) * out_h() * out_w(); }

    MatX<S> forward(const MatX<S>& x) {
        if (x.rows() != in_size()) throw ContractError("convT input size mismatch: " + W.name);
        x_cache = x;
        const Eigen::Index batch = x.cols();
        const Eigen::Index in_spatial = static_cast<Eigen::Index>(in_h) * in_w;
        MatX<S> y(out_size(), batch);
        MatX<S> dcols;
        const auto Wm = W.mat(in_c, static_cast<Eigen::Index>(out_c) * k * k);
        for (Eigen::Index n = 0; n < batch; ++n) {
            Eigen::Map<const MatX<S>> xm(x.col(n).data(), in_c, in_spatial);
            dcols.noalias() = Wm.transpose() * xm;
            col2im(dcols, out_c, out_h(), out_w(), k, stride, pad, y.col(n).data());
            // bias per output channel (y is channel-major: channel varies slowest)
            for (int c = 0; c < out_c; ++c)
                y.col(n).segment(static_cast<Eigen::Index>(c) * out_h() * out_w(),
                                 static_cast<Eigen::Index>(out_h()) * out_w()).array() += b.v[c];
        }
        return y;
    }

    MatX<S> backward(const MatX<S>& dy) {
        const Eigen::Index batch = dy.cols();
        const Eigen::Index in_spatial = static_cast<Eigen::Index>(in_h) * in_w;
        MatX<S> dx(in_size(), batch);
        MatX<S> cols;
        auto dWm = W.grad_mat(in_c, static_cast<Eigen::Index>(out_c) * k * k);
        const auto Wm = W.mat(in_c, static_cast<Eigen::Index>(out_c) * k * k);
        for (Eigen::Index n = 0; n < batch; ++n) {
            im2col(dy.col(n).data(), out_c, out_h(), out_w(), k, stride, pad, cols);
            Eigen::Map<const MatX<S>> xm(x_cache.col(n).data(), in_c, in_spatial);
            dWm.noalias() += xm * cols.transpose();
            Eigen::Map<MatX<S>> dxm(dx.col(n).data(), in_c, in_spatial);
            dxm.noalias() = Wm * cols;
            for (int c = 0; c < out_c; ++c)
                b.g[c] += dy.col(n)
                              .segment(static_cast<Eigen::Index>(c) * out_h() * out_w(),
                                       static_cast<Eigen::Index>(out_h()) * out_w())
                              .sum();
        }
        return dx;
    }

    std::vector<Tensor<S>*> params() { return {&W, &b}; }
};

template <class S>
struct ReLU {
    MatX<S> mask;
    MatX<S> forward(const MatX<S>& x) {
        mask = (x.array() > S(0)).template cast<S>().matrix();
        return x.cwiseProduct(mask);
    }
    MatX<S> backward(const MatX<S>& dy) { return dy.cwiseProduct(mask); }
};

template <class S>
struct Sigmoid {
    MatX<S> y_cache;
    MatX<S> forward(const MatX<S>& x) {
        y_cache = (S(1) / (S(1) + (-x.array()).exp())).matrix();
        return y_cache;
    }
    MatX<S> backward(const MatX<S>& dy) {
        return dy.cwiseProduct(
            y_cache.cwiseProduct((MatX<S>::Ones(y_cache.rows(), y_cache.cols()) - y_cache)));
    }
};

// ---------------------------------------------------------------------------
// Optimizer

template <class S>
struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // decoupled, applied to values directly
    long step_count = 0;

    std::vector<Tensor<S>*> tensors;
    std::vector<ArrX<S>> m, v;

    void attach(std::vector<Tensor<S>*> params) {
        tensors = std::move(params);
        m.clear();
        v.clear();
        for (auto* t : tensors) {
            m.push_back(ArrX<S>::Zero(t->size()));
            v.push_back(ArrX<S>::Zero(t->size()));
        }
    }

    void zero_grad() {
        for (auto* t : tensors) t->g.setZero();
    }

    void step() {
        ++step_count;
        const double bc1 = 1.0 - std::pow(beta1, step_count);
        const double bc2 = 1.0 - std::pow(beta2, step_count);
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            Tensor<S>& t = *tensors[i];
            m[i] = static_cast<S>(beta1) * m[i] + static_cast<S>(1.0 - beta1) * t.g;
            v[i] = static_cast<S>(beta2) * v[i] + static_cast<S>(1.0 - beta2) * t.g.square();
            const ArrX<S> mhat = m[i] / static_cast<S>(bc1);
            const ArrX<S> vhat = v[i] / static_cast<S>(bc2);
            if (weight_decay > 0.0)
                t.v -= static_cast<S>(lr * weight_decay) * t.v;
            t.v -= static_cast<S>(lr) * mhat / (vhat.sqrt() + static_cast<S>(eps));
        }
    }
};

// ---------------------------------------------------------------------------
// Parameter collection helpers

template <class S>
void append_params(std::vector<Tensor<S>*>& dst, std::vector<Tensor<S>*> src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

/// Sinusoidal features for an integer timestep, dim must be even.
template <class S>
ArrX<S> timestep_features(int t, int dim) {
    ArrX<S> f(dim);
    const int half = dim / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * i / std::max(1, half - 1));
        f[i] = static_cast<S>(std::sin(t * freq));
        f[half + i] = static_cast<S>(std::cos(t * freq));
    }
    return f;
}

}  // namespace lmk::nn
