// SPDX-License-Identifier: Apache-2.0
#include "lmk/codec.hpp"

#include <cmath>

namespace lmk {

namespace {
void require_quarterable(LatentShape s) {
    if (s.height % 4 != 0 || s.width % 4 != 0 || s.height < 4 || s.width < 4)
        throw ConfigError("codec nets need latent height/width divisible by 4");
}
}  // namespace

void CodecEncoderNet::init(int k_bits, LatentShape latent_shape, Rng& rng) {
    require_quarterable(latent_shape);
    k = k_bits;
    shape = latent_shape;
    const int bh = shape.height / 4, bw = shape.width / 4;
    fc1.init("enc.fc1", k, 128, rng);
    fc2.init("enc.fc2", 128, base_c * bh * bw, rng);
    up1.init("enc.up1", base_c, bh, bw, mid_c, 4, 2, 1, rng);
    up2.init("enc.up2", mid_c, 2 * bh, 2 * bw, mid_c, 4, 2, 1, rng);
    head.init("enc.head", mid_c, shape.height, shape.width, 2 * shape.channels, 3, 1, 1, rng);
    // start near (mu, logvar) = (0, 0): standard-normal latents before training
    head.W.v *= 0.1f;
}

void CodecEncoderNet::forward(const nn::MatX<float>& bits_pm, nn::MatX<float>& mu,
                              nn::MatX<float>& logvar) {
    if (bits_pm.rows() != k) throw ContractError("message length does not match codec k");
    auto h = act1.forward(fc1.forward(bits_pm));
    h = act2.forward(fc2.forward(h));
    h = act3.forward(up1.forward(h));
    h = act4.forward(up2.forward(h));
    head_out_ = head.forward(h);
    const Eigen::Index n = shape.size();
    mu = head_out_.topRows(n);
    logvar = head_out_.bottomRows(n);
}

void CodecEncoderNet::backward(const nn::MatX<float>& dmu, const nn::MatX<float>& dlogvar) {
    const Eigen::Index n = shape.size();
    nn::MatX<float> dhead(2 * n, dmu.cols());
    dhead.topRows(n) = dmu;
    dhead.bottomRows(n) = dlogvar;
    auto d = head.backward(dhead);
    d = up2.backward(act4.backward(d));
    d = up1.backward(act3.backward(d));
    d = fc2.backward(act2.backward(d));
    fc1.backward(act1.backward(d));
}

std::vector<nn::Tensor<float>*> CodecEncoderNet::params() {
    std::vector<nn::Tensor<float>*> p;
    nn::append_params(p, fc1.params());
    nn::append_params(p, fc2.params());
    nn::append_params(p, up1.params());
    nn::append_params(p, up2.params());
    nn::append_params(p, head.params());
    return p;
}

void CodecDecoderNet::init(int k_bits, LatentShape latent_shape, Rng& rng) {
    require_quarterable(latent_shape);
    k = k_bits;
    shape = latent_shape;
    conv1.init("dec.conv1", shape.channels, shape.height, shape.width, c1_c, 3, 1, 1, rng);
    conv2.init("dec.conv2", c1_c, shape.height, shape.width, c2_c, 4, 2, 1, rng);
    conv3.init("dec.conv3", c2_c, shape.height / 2, shape.width / 2, c3_c, 4, 2, 1, rng);
    const int flat = c3_c * (shape.height / 4) * (shape.width / 4);
    fc1.init("dec.fc1", flat, hidden, rng);
    fc2.init("dec.fc2", hidden, k, rng);
}

nn::MatX<float> CodecDecoderNet::forward(const nn::MatX<float>& z) {
    if (z.rows() != shape.size()) throw ContractError("latent shape does not match codec");
    auto h = act1.forward(conv1.forward(z));
    h = act2.forward(conv2.forward(h));
    h = act3.forward(conv3.forward(h));
    h = act4.forward(fc1.forward(h));
    return fc2.forward(h);
}

nn::MatX<float> CodecDecoderNet::backward(const nn::MatX<float>& dlogits) {
    auto d = fc1.backward(act4.backward(fc2.backward(dlogits)));
    d = conv3.backward(act3.backward(d));
    d = conv2.backward(act2.backward(d));
    return conv1.backward(act1.backward(d));
}

std::vector<nn::Tensor<float>*> CodecDecoderNet::params() {
    std::vector<nn::Tensor<float>*> p;
    nn::append_params(p, conv1.params());
    nn::append_params(p, conv2.params());
    nn::append_params(p, conv3.params());
    nn::append_params(p, fc1.params());
    nn::append_params(p, fc2.params());
    return p;
}

CodecParams CodecParams::create(int k, LatentShape shape, std::uint64_t seed) {
    if (k < 1) throw ConfigError("codec needs k >= 1");
    CodecParams p;
    p.k = k;
    p.latent_shape = shape;
    Rng rng(seed);
    p.encoder.init(k, shape, rng);
    p.decoder.init(k, shape, rng);
    return p;
}

std::vector<nn::Tensor<float>*> CodecParams::all_params() {
    auto p = encoder.params();
    nn::append_params(p, decoder.params());
    return p;
}

nn::MatX<float> bits_to_pm1(const BitMessage& m) {
    nn::MatX<float> x(m.size(), 1);
    for (int i = 0; i < m.size(); ++i) x(i, 0) = m[i] ? 1.0f : -1.0f;
    return x;
}

EncodeResult encode_message(const BitMessage& m, const LatentTensor& noise, CodecParams& params) {
    if (m.size() != params.k) throw ContractError("message length does not match codec k");
    if (!(noise.shape == params.latent_shape))
        throw ContractError("noise shape does not match codec latent shape");
    nn::MatX<float> mu, logvar;
    params.encoder.forward(bits_to_pm1(m), mu, logvar);
    EncodeResult r;
    r.mu = LatentTensor(params.latent_shape, mu.col(0).array());
    r.logvar = LatentTensor(params.latent_shape, logvar.col(0).array());
    r.z = LatentTensor(params.latent_shape,
                       r.mu.data + (r.logvar.data / 2.0f).exp() * noise.data);
    return r;
}

Eigen::ArrayXf decode_latent(const LatentTensor& z, CodecParams& params) {
    if (!(z.shape == params.latent_shape))
        throw ContractError("latent shape does not match codec");
    nn::MatX<float> zm(z.data.size(), 1);
    zm.col(0) = z.data.matrix();
    const auto logits = params.decoder.forward(zm);
    Eigen::ArrayXf out = logits.col(0).array();
    if (!out.isFinite().all()) throw NumericDomainError("decoder produced non-finite logits");
    return out;
}

BitMessage hard_bits(const Eigen::ArrayXf& logits) {
    BitMessage m = BitMessage::zeros(static_cast<int>(logits.size()));
    for (int i = 0; i < m.size(); ++i) m[i] = logits[i] > 0.0f ? 1 : 0;
    return m;
}

double kl_loss(const Eigen::ArrayXf& mu, const Eigen::ArrayXf& logvar) {
    if (mu.size() != logvar.size()) throw ContractError("kl_loss input size mismatch");
    const Eigen::ArrayXf lv = logvar.min(30.0f).max(-30.0f);
    const Eigen::ArrayXd mu_d = mu.cast<double>();
    const Eigen::ArrayXd lv_d = lv.cast<double>();
    return 0.5 * (mu_d.square() + lv_d.exp() - 1.0 - lv_d).mean();
}

double bce_loss(const BitMessage& m, const Eigen::ArrayXf& logits) {
    if (m.size() != static_cast<int>(logits.size()))
        throw ContractError("bce_loss length mismatch");
    double total = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double p =
            std::min(1.0 - 1e-7, std::max(1e-7, 1.0 / (1.0 + std::exp(-static_cast<double>(logits[i])))));
        total -= m[i] ? std::log(p) : std::log(1.0 - p);
    }
    return total;
}

double joint_loss(const BitMessage& m, const Eigen::ArrayXf& logits, const Eigen::ArrayXf& mu,
                  const Eigen::ArrayXf& logvar, const LossWeights& weights) {
    weights.validate();
    return weights.lambda1 * bce_loss(m, logits) + weights.lambda2 * kl_loss(mu, logvar);
}

}  // namespace lmk
