// SPDX-License-Identifier: Apache-2.0
#include "lmk/image_io.hpp"

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "lmk/errors.hpp"

namespace lmk {

std::vector<std::uint8_t> image_to_bytes(const Image& img) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(img.size()));
    std::size_t i = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                const float v = std::min(1.0f, std::max(0.0f, img.at(c, y, x)));
                bytes[i++] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
    return bytes;
}

Image image_from_bytes(const std::vector<std::uint8_t>& bytes, int channels, int height,
                       int width) {
    if (bytes.size() != static_cast<std::size_t>(channels) * height * width)
        throw ContractError("byte buffer size does not match image shape");
    Image img(channels, height, width);
    std::size_t i = 0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c)
                img.at(c, y, x) = static_cast<float>(bytes[i++]) / 255.0f;
    return img;
}

namespace {
struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_png(const Image& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw ContractError("PNG writer supports 1 or 3 channels");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw DataFormatError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataFormatError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataFormatError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataFormatError("libpng error while writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const auto bytes = image_to_bytes(img);
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(bytes.data() + y * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DataFormatError("cannot open for reading: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw DataFormatError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataFormatError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataFormatError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataFormatError("libpng error while reading " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // normalize everything to 8-bit gray or RGB
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataFormatError("unsupported PNG channel count");
    }

    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height * channels);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y) png_read_row(png, bytes.data() + y * stride, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image_from_bytes(bytes, channels, height, width);
}

namespace {
void jpeg_error_exit(j_common_ptr cinfo) {
    char msg[JMSG_LENGTH_MAX];
    (*cinfo->err->format_message)(cinfo, msg);
    throw DataFormatError(std::string("libjpeg: ") + msg);
}
}  // namespace

Image jpeg_roundtrip(const Image& img, int quality) {
    if (img.channels != 1 && img.channels != 3)
        throw ContractError("JPEG round trip supports 1 or 3 channels");
    if (quality < 1 || quality > 100) throw ContractError("JPEG quality must lie in [1, 100]");

    const auto src = image_to_bytes(img);

    jpeg_error_mgr jerr;
    unsigned char* buffer = nullptr;
    unsigned long buffer_size = 0;
    {
        jpeg_compress_struct cinfo;
        cinfo.err = jpeg_std_error(&jerr);
        jerr.error_exit = jpeg_error_exit;
        jpeg_create_compress(&cinfo);
        jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
        cinfo.image_width = static_cast<JDIMENSION>(img.width);
        cinfo.image_height = static_cast<JDIMENSION>(img.height);
        cinfo.input_components = img.channels;
        cinfo.in_color_space = img.channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
        jpeg_set_defaults(&cinfo);
        jpeg_set_quality(&cinfo, quality, TRUE);
        jpeg_start_compress(&cinfo, TRUE);
        const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
        while (cinfo.next_scanline < cinfo.image_height) {
            JSAMPROW row = const_cast<JSAMPROW>(src.data() + cinfo.next_scanline * stride);
            jpeg_write_scanlines(&cinfo, &row, 1);
        }
        jpeg_finish_compress(&cinfo);
        jpeg_destroy_compress(&cinfo);
    }

    Image out;
    {
        jpeg_decompress_struct dinfo;
        dinfo.err = jpeg_std_error(&jerr);
        jerr.error_exit = jpeg_error_exit;
        jpeg_create_decompress(&dinfo);
        jpeg_mem_src(&dinfo, buffer, buffer_size);
        jpeg_read_header(&dinfo, TRUE);
        jpeg_start_decompress(&dinfo);
        const int channels = static_cast<int>(dinfo.output_components);
        const int width = static_cast<int>(dinfo.output_width);
        const int height = static_cast<int>(dinfo.output_height);
        std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height * channels);
        const std::size_t stride = static_cast<std::size_t>(width) * channels;
        while (dinfo.output_scanline < dinfo.output_height) {
            JSAMPROW row = bytes.data() + dinfo.output_scanline * stride;
            jpeg_read_scanlines(&dinfo, &row, 1);
        }
        jpeg_finish_decompress(&dinfo);
        jpeg_destroy_decompress(&dinfo);
        out = image_from_bytes(bytes, channels, height, width);
    }
    std::free(buffer);
    return out;
}

}  // namespace lmk
