// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmk/tensor.hpp"

namespace lmk {

/// Quantize [0,1] floats to 8-bit, interleaved RGB (or single channel).
std::vector<std::uint8_t> image_to_bytes(const Image& img);
Image image_from_bytes(const std::vector<std::uint8_t>& bytes, int channels, int height, int width);

/// Lossless PNG persistence (8-bit). Watermarked outputs are stored as PNG
/// so storage never confounds the JPEG attack results.
void save_png(const Image& img, const std::string& path);
Image load_png(const std::string& path);

/// Baseline JPEG round trip at the given quality, in memory. Grayscale
/// images compress as single-component JPEG, 3-channel as YCbCr.
Image jpeg_roundtrip(const Image& img, int quality);

}  // namespace lmk
