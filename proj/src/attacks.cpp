// SPDX-License-Identifier: Apache-2.0
#include "lmk/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "lmk/image_io.hpp"

namespace lmk {

std::string to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::brightness: return "brightness";
        case AttackKind::gaussian_noise: return "gaussian_noise";
        case AttackKind::contrast: return "contrast";
        case AttackKind::hue_shift: return "hue_shift";
        case AttackKind::jpeg: return "jpeg";
        case AttackKind::gaussian_blur: return "gaussian_blur";
        case AttackKind::resize: return "resize";
        case AttackKind::external: return "external";
    }
    throw ConfigError("unknown attack kind");
}

AttackKind attack_kind_from_string(const std::string& s) {
    if (s == "brightness") return AttackKind::brightness;
    if (s == "gaussian_noise" || s == "noise") return AttackKind::gaussian_noise;
    if (s == "contrast") return AttackKind::contrast;
    if (s == "hue_shift" || s == "hue") return AttackKind::hue_shift;
    if (s == "jpeg") return AttackKind::jpeg;
    if (s == "gaussian_blur" || s == "blur") return AttackKind::gaussian_blur;
    if (s == "resize") return AttackKind::resize;
    if (s == "external") return AttackKind::external;
    throw ConfigError("unknown attack kind: " + s);
}

void AttackSpec::validate() const {
    switch (kind) {
        case AttackKind::brightness:
        case AttackKind::contrast:
            if (strength < 0.0) throw ConfigError("brightness/contrast factor must be >= 0");
            break;
        case AttackKind::gaussian_noise:
            if (strength < 0.0) throw ConfigError("noise sigma must be >= 0");
            break;
        case AttackKind::hue_shift:
            if (strength < -0.5 || strength > 0.5)
                throw ConfigError("hue shift must lie in [-0.5, 0.5] turns");
            break;
        case AttackKind::jpeg:
            if (strength < 1.0 || strength > 100.0)
                throw ConfigError("jpeg quality must lie in [1, 100]");
            break;
        case AttackKind::gaussian_blur: {
            const int k = static_cast<int>(std::lround(strength));
            if (k < 1 || k % 2 == 0) throw ConfigError("blur kernel must be odd and >= 1");
            break;
        }
        case AttackKind::resize:
            if (!(strength > 0.0 && strength <= 1.0))
                throw ConfigError("resize scale must lie in (0, 1]");
            break;
        case AttackKind::external:
            if (external_name.empty()) throw ConfigError("external attack needs a name");
            break;
    }
}

std::string AttackSpec::to_string() const {
    if (kind == AttackKind::external) return "external:" + external_name;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s:%g", lmk::to_string(kind).c_str(), strength);
    return buf;
}

AttackSpec AttackSpec::parse(const std::string& text, std::uint64_t seed) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("attack spec must be KIND:PARAM");
    AttackSpec spec;
    spec.kind = attack_kind_from_string(text.substr(0, colon));
    spec.seed = seed;
    const std::string param = text.substr(colon + 1);
    if (spec.kind == AttackKind::external) {
        spec.external_name = param;
    } else {
        try {
            spec.strength = std::stod(param);
        } catch (const std::exception&) {
            throw ConfigError("attack parameter is not a number: " + param);
        }
    }
    spec.validate();
    return spec;
}

namespace {

std::map<std::string, ExternalAttackAdapter>& adapter_registry() {
    static std::map<std::string, ExternalAttackAdapter> registry;
    return registry;
}
std::mutex adapter_mutex;

float image_gray_mean(const Image& img) {
    if (img.channels == 3) {
        double acc = 0.0;
        const auto r = img.channel(0), g = img.channel(1), b = img.channel(2);
        for (Eigen::Index i = 0; i < r.size(); ++i)
            acc += 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
        return static_cast<float>(acc / static_cast<double>(r.size()));
    }
    return img.data.mean();
}

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) {
    const float mx = std::max({r, g, b});
    const float mn = std::min({r, g, b});
    const float d = mx - mn;
    v = mx;
    s = mx > 0.0f ? d / mx : 0.0f;
    if (d <= 0.0f) {
        h = 0.0f;
        return;
    }
    if (mx == r)
        h = 60.0f * std::fmod((g - b) / d, 6.0f);
    else if (mx == g)
        h = 60.0f * ((b - r) / d + 2.0f);
    else
        h = 60.0f * ((r - g) / d + 4.0f);
    if (h < 0.0f) h += 360.0f;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) {
    const float c = v * s;
    const float hp = h / 60.0f;
    const float x = c * (1.0f - std::fabs(std::fmod(hp, 2.0f) - 1.0f));
    float r1 = 0, g1 = 0, b1 = 0;
    if (hp < 1)      { r1 = c; g1 = x; }
    else if (hp < 2) { r1 = x; g1 = c; }
    else if (hp < 3) { g1 = c; b1 = x; }
    else if (hp < 4) { g1 = x; b1 = c; }
    else if (hp < 5) { r1 = x; b1 = c; }
    else             { r1 = c; b1 = x; }
    const float m = v - c;
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

Image shift_hue(const Image& img, double delta_turns) {
    if (img.channels != 3) return img;  // hue is undefined on grayscale
    Image out = img;
    const float delta_deg = static_cast<float>(delta_turns * 360.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float h, s, v;
            rgb_to_hsv(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x), h, s, v);
            h = std::fmod(h + delta_deg + 360.0f, 360.0f);
            hsv_to_rgb(h, s, v, out.at(0, y, x), out.at(1, y, x), out.at(2, y, x));
        }
    return out;
}

Image gaussian_blur(const Image& img, int kernel) {
    if (kernel <= 1) return img;
    const int radius = kernel / 2;
    // matches the usual auto-sigma rule for a given kernel size
    const double sigma = 0.3 * ((kernel - 1) * 0.5 - 1.0) + 0.8;
    Eigen::ArrayXd taps(kernel);
    for (int i = 0; i < kernel; ++i) {
        const double d = i - radius;
        taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    taps /= taps.sum();

    const auto clampi = [](int v, int lo, int hi) { return std::min(std::max(v, lo), hi); };
    Image tmp = img, out = img;
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < img.height; ++y)  // horizontal pass, replicate border
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += taps[i + radius] * img.at(c, y, clampi(x + i, 0, img.width - 1));
                tmp.at(c, y, x) = static_cast<float>(acc);
            }
        for (int y = 0; y < img.height; ++y)  // vertical pass
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += taps[i + radius] * tmp.at(c, clampi(y + i, 0, img.height - 1), x);
                out.at(c, y, x) = static_cast<float>(acc);
            }
    }
    return out;
}

Image bilinear_resize(const Image& img, int out_h, int out_w) {
    Image out(img.channels, out_h, out_w);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < out_h; ++y) {
            const double fy = std::max(0.0, std::min((y + 0.5) * sy - 0.5,
                                                     static_cast<double>(img.height - 1)));
            const int y0 = static_cast<int>(fy);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const double wy = fy - y0;
            for (int x = 0; x < out_w; ++x) {
                const double fx = std::max(0.0, std::min((x + 0.5) * sx - 0.5,
                                                         static_cast<double>(img.width - 1)));
                const int x0 = static_cast<int>(fx);
                const int x1 = std::min(x0 + 1, img.width - 1);
                const double wx = fx - x0;
                const double v = (1 - wy) * ((1 - wx) * img.at(c, y0, x0) + wx * img.at(c, y0, x1)) +
                                 wy * ((1 - wx) * img.at(c, y1, x0) + wx * img.at(c, y1, x1));
                out.at(c, y, x) = static_cast<float>(v);
            }
        }
    return out;
}

}  // namespace

void register_external_attack(ExternalAttackAdapter adapter) {
    std::lock_guard<std::mutex> lock(adapter_mutex);
    adapter_registry()[adapter.name] = std::move(adapter);
}

bool has_external_attack(const std::string& name) {
    std::lock_guard<std::mutex> lock(adapter_mutex);
    return adapter_registry().count(name) > 0;
}

void clear_external_attacks() {
    std::lock_guard<std::mutex> lock(adapter_mutex);
    adapter_registry().clear();
}

Image apply_attack(const Image& image, const AttackSpec& spec) {
    spec.validate();
    Image out;
    switch (spec.kind) {
        case AttackKind::brightness: {
            out = image;
            out.data *= static_cast<float>(spec.strength);
            break;
        }
        case AttackKind::contrast: {
            out = image;
            const float mean = image_gray_mean(image);
            out.data = mean + static_cast<float>(spec.strength) * (image.data - mean);
            break;
        }
        case AttackKind::gaussian_noise: {
            out = image;
            if (spec.strength > 0.0) {
                Rng rng(spec.seed);
                for (Eigen::Index i = 0; i < out.data.size(); ++i)
                    out.data[i] += static_cast<float>(spec.strength * rng.gaussian());
            }
            break;
        }
        case AttackKind::hue_shift:
            out = shift_hue(image, spec.strength);
            break;
        case AttackKind::jpeg:
            out = jpeg_roundtrip(image, static_cast<int>(std::lround(spec.strength)));
            break;
        case AttackKind::gaussian_blur:
            out = gaussian_blur(image, static_cast<int>(std::lround(spec.strength)));
            break;
        case AttackKind::resize: {
            const int h = std::max(1, static_cast<int>(std::lround(image.height * spec.strength)));
            const int w = std::max(1, static_cast<int>(std::lround(image.width * spec.strength)));
            if (h == image.height && w == image.width) {
                out = image;
            } else {
                out = bilinear_resize(bilinear_resize(image, h, w), image.height, image.width);
            }
            break;
        }
        case AttackKind::external: {
            std::lock_guard<std::mutex> lock(adapter_mutex);
            auto it = adapter_registry().find(spec.external_name);
            if (it == adapter_registry().end())
                throw AdapterMissingError("external attack not registered: " + spec.external_name);
            out = it->second.attack(image);
            break;
        }
    }
    out.clamp01();
    return out;
}

AttackSpec sample_random_attack(std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    AttackSpec spec;
    spec.seed = mix_seed(rng_seed, 0x41545441);  // independent stream for the attack's own noise
    switch (rng.uniform_int(0, 6)) {
        case 0:
            spec.kind = AttackKind::gaussian_noise;
            spec.strength = rng.uniform(0.0, 0.05);
            break;
        case 1:
            spec.kind = AttackKind::gaussian_blur;
            spec.strength = static_cast<double>(2 * rng.uniform_int(1, 3) + 1);  // {3,5,7}
            break;
        case 2:
            spec.kind = AttackKind::brightness;
            spec.strength = rng.uniform(0.5, 2.0);
            break;
        case 3:
            spec.kind = AttackKind::contrast;
            spec.strength = rng.uniform(0.5, 2.0);
            break;
        case 4:
            spec.kind = AttackKind::hue_shift;
            spec.strength = rng.uniform(-0.25, 0.25);
            break;
        case 5:
            spec.kind = AttackKind::jpeg;
            spec.strength = static_cast<double>(rng.uniform_int(50, 90));
            break;
        default:
            spec.kind = AttackKind::resize;
            spec.strength = rng.uniform(0.3, 1.0);
            break;
    }
    return spec;
}

AttackSpec table_attack(AttackKind kind, std::uint64_t seed) {
    AttackSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
        case AttackKind::brightness: spec.strength = 2.0; break;
        case AttackKind::gaussian_noise: spec.strength = 0.05; break;
        case AttackKind::contrast: spec.strength = 2.0; break;
        case AttackKind::hue_shift: spec.strength = 0.25; break;
        case AttackKind::jpeg: spec.strength = 50.0; break;
        case AttackKind::gaussian_blur: spec.strength = 7.0; break;
        case AttackKind::resize: spec.strength = 0.3; break;
        case AttackKind::external:
            spec.external_name = "bm3d";
            break;
    }
    return spec;
}

}  // namespace lmk
