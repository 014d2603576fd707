// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "lmk/errors.hpp"
#include "lmk/rng.hpp"
#include "lmk/tensor.hpp"

namespace lmk {

enum class AttackKind {
    brightness,      // multiply by alpha, clip
    gaussian_noise,  // add N(0, sigma^2), clip
    contrast,        // scale around the image's gray mean, clip
    hue_shift,       // rotate hue; strength is a fraction of the full circle
    jpeg,            // baseline codec round trip at quality q
    gaussian_blur,   // odd kernel size {1,3,5,7,...}
    resize,          // bilinear down to scale s, then back up
    external,        // adapter-provided attacker (BM3D, VAE, regeneration)
};

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& s);

/// One image perturbation, fully determined by (kind, strength, seed).
struct AttackSpec {
    AttackKind kind = AttackKind::gaussian_noise;
    double strength = 0.0;
    std::uint64_t seed = 0;
    std::string external_name;  // adapter lookup key when kind == external

    void validate() const;
    std::string to_string() const;  // "kind:param" form used by the CLI
    static AttackSpec parse(const std::string& text, std::uint64_t seed);
};

/// image -> image attacker backed by a model this build does not ship.
struct ExternalAttackAdapter {
    std::string name;
    std::function<Image(const Image&)> attack;
};

/// Process-wide adapter registry; external attack specs resolve here.
void register_external_attack(ExternalAttackAdapter adapter);
bool has_external_attack(const std::string& name);
void clear_external_attacks();

/// Applies the perturbation. Pure in (image, spec); output shape and [0,1]
/// range always match the input.
Image apply_attack(const Image& image, const AttackSpec& spec);

/// Draws a spec from the adversarial-training pool:
///   gaussian_noise sigma in [0, 0.05], blur k in {3,5,7},
///   brightness/contrast alpha in [0.5, 2], hue delta in [-0.25, 0.25],
///   jpeg q in [50, 90], resize s in [0.3, 1].
AttackSpec sample_random_attack(std::uint64_t rng_seed);

/// Evaluation-gauntlet strengths from the attack table.
AttackSpec table_attack(AttackKind kind, std::uint64_t seed = 0);

}  // namespace lmk
