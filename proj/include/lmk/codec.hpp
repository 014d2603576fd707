// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lmk/bits.hpp"
#include "lmk/nn.hpp"
#include "lmk/tensor.hpp"

namespace lmk {

/// Proportion constants of the joint pretraining loss
/// (lambda1 * message loss + lambda2 * distribution loss).
struct LossWeights {
    double lambda1 = 1.0;
    double lambda2 = 0.5;

    void validate() const {
        if (lambda1 < 0.0 || lambda2 < 0.0) throw ConfigError("loss weights must be nonnegative");
        if (lambda1 + lambda2 <= 0.0) throw ConfigError("loss weights must not both be zero");
    }
};

/// Message -> (mu, logvar) over the latent shape. Bits enter as +-1.
struct CodecEncoderNet {
    int k = 0;
    LatentShape shape;
    int base_c = 32, mid_c = 16;
    nn::Dense<float> fc1, fc2;
    nn::ReLU<float> act1, act2, act3, act4;
    nn::ConvT2d<float> up1, up2;
    nn::Conv2d<float> head;

    void init(int k_bits, LatentShape latent_shape, Rng& rng);

    /// bits_pm: k x B in {-1,+1}. Returns mu and logvar, each N x B.
    void forward(const nn::MatX<float>& bits_pm, nn::MatX<float>& mu, nn::MatX<float>& logvar);
    void backward(const nn::MatX<float>& dmu, const nn::MatX<float>& dlogvar);
    std::vector<nn::Tensor<float>*> params();

private:
    nn::MatX<float> head_out_;  // cached split point
};

/// Latent -> k logits; mirrors the encoder with strided convolutions.
struct CodecDecoderNet {
    int k = 0;
    LatentShape shape;
    int c1_c = 16, c2_c = 32, c3_c = 64, hidden = 128;
    nn::Conv2d<float> conv1, conv2, conv3;
    nn::ReLU<float> act1, act2, act3, act4;
    nn::Dense<float> fc1, fc2;

    void init(int k_bits, LatentShape latent_shape, Rng& rng);

    nn::MatX<float> forward(const nn::MatX<float>& z);
    nn::MatX<float> backward(const nn::MatX<float>& dlogits);  // returns dz
    std::vector<nn::Tensor<float>*> params();
};

struct CodecParams {
    int k = 0;
    LatentShape latent_shape;
    std::string version = "codec-v1";
    CodecEncoderNet encoder;
    CodecDecoderNet decoder;

    static CodecParams create(int k, LatentShape shape, std::uint64_t seed);

    std::vector<nn::Tensor<float>*> encoder_params() { return encoder.params(); }
    std::vector<nn::Tensor<float>*> decoder_params() { return decoder.params(); }
    std::vector<nn::Tensor<float>*> all_params();
};

struct EncodeResult {
    LatentTensor z;
    LatentTensor mu;
    LatentTensor logvar;
};

/// Reparameterized embedding: z = mu + exp(logvar / 2) * noise. The noise is
/// caller-supplied so embeddings are reproducible under a seed.
EncodeResult encode_message(const BitMessage& m, const LatentTensor& noise, CodecParams& params);

/// Decoder logits; the hard decision is bit_i = [logit_i > 0].
Eigen::ArrayXf decode_latent(const LatentTensor& z, CodecParams& params);

BitMessage hard_bits(const Eigen::ArrayXf& logits);

/// {0,1} bits to a single +-1 column, the encoder's input convention.
nn::MatX<float> bits_to_pm1(const BitMessage& m);

// ---------------------------------------------------------------------------
// Losses (batch-free signatures over flat arrays; training uses the
// matching gradient helpers)

/// Mean over elements of 0.5 (mu^2 + sigma^2 - 1 - log sigma^2); logvar is
/// clamped to [-30, 30] first.
double kl_loss(const Eigen::ArrayXf& mu, const Eigen::ArrayXf& logvar);

/// Binary cross entropy against logits, summed (not averaged) over bits;
/// probabilities clamped to [1e-7, 1 - 1e-7].
double bce_loss(const BitMessage& m, const Eigen::ArrayXf& logits);

double joint_loss(const BitMessage& m, const Eigen::ArrayXf& logits, const Eigen::ArrayXf& mu,
                  const Eigen::ArrayXf& logvar, const LossWeights& weights);

}  // namespace lmk
