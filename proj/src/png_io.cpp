#include "rvms/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace rvms {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Decodes to packed 8-bit samples; channels is 1 (gray) or 3 (rgb).
std::vector<std::uint8_t> read_png8(const std::filesystem::path& path, int& width, int& height,
                                    int& channels) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(path, "unreadable file");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail(path, "not a PNG file");

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) fail(path, "png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(r.png))) fail(path, "corrupt PNG data");

    png_init_io(r.png, fp.get());
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    width = static_cast<int>(png_get_image_width(r.png, r.info));
    height = static_cast<int>(png_get_image_height(r.png, r.info));
    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);

    if (bit_depth != 8) fail(path, "unsupported bit depth " + std::to_string(bit_depth));

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    const int out_channels = static_cast<int>(png_get_channels(r.png, r.info));
    if (out_channels != 1 && out_channels != 3)
        fail(path, "unsupported channel count " + std::to_string(out_channels));
    channels = out_channels;

    std::vector<std::uint8_t> pixels(static_cast<size_t>(width) * height * channels);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = pixels.data() + static_cast<size_t>(y) * width * channels;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return pixels;
}

void write_png(const std::filesystem::path& path, const void* data, int width, int height,
               int bit_depth) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(path, "unwritable path");

    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) fail(path, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) fail(path, "PNG write error");

    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    if (bit_depth == 16) png_set_swap(w.png); // samples are host little-endian

    const size_t stride = static_cast<size_t>(width) * (bit_depth / 8);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(static_cast<const png_byte*>(data) + y * stride);
    png_write_image(w.png, rows.data());
    png_write_end(w.png, nullptr);
}

} // namespace

GrayImage load_image(const std::filesystem::path& path) {
    int width = 0, height = 0, channels = 0;
    const auto pixels = read_png8(path, width, height, channels);
    if (width < 3 || height < 3)
        fail(path, "image smaller than 3x3 (" + std::to_string(width) + "x" +
                       std::to_string(height) + ")");

    GrayImage img(width, height);
    const size_t n = img.pixel_count();
    if (channels == 1) {
        for (size_t i = 0; i < n; ++i)
            img.data[i] = static_cast<float>(pixels[i] / 255.0);
    } else {
        for (size_t i = 0; i < n; ++i) {
            const double sum = static_cast<double>(pixels[3 * i]) + pixels[3 * i + 1] +
                               pixels[3 * i + 2];
            img.data[i] = static_cast<float>(sum / (3.0 * 255.0));
        }
    }
    return img;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    validate(img);
    std::vector<std::uint8_t> bytes(img.pixel_count());
    for (size_t i = 0; i < bytes.size(); ++i) {
        const long q = std::lround(static_cast<double>(img.data[i]) * 255.0);
        bytes[i] = static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
    }
    write_png(path, bytes.data(), img.width, img.height, 8);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    int width = 0, height = 0, channels = 0;
    const auto pixels = read_png8(path, width, height, channels);
    BinaryMask mask(width, height);
    const size_t n = mask.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const std::uint8_t v = channels == 1 ? pixels[i] : pixels[3 * i];
        mask.data[i] = v >= 128 ? 1 : 0;
    }
    return mask;
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    validate(mask);
    std::vector<std::uint8_t> bytes(mask.pixel_count());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    write_png(path, bytes.data(), mask.width, mask.height, 8);
}

void save_png16(const std::vector<std::uint16_t>& data, int width, int height,
                const std::filesystem::path& path) {
    if (data.size() != static_cast<size_t>(width) * height)
        throw std::invalid_argument("save_png16: data length does not match dimensions");
    write_png(path, data.data(), width, height, 16);
}

std::vector<std::uint16_t> load_png16(const std::filesystem::path& path, int& width, int& height) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(path, "unreadable file");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail(path, "not a PNG file");

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) fail(path, "png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(r.png))) fail(path, "corrupt PNG data");

    png_init_io(r.png, fp.get());
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    width = static_cast<int>(png_get_image_width(r.png, r.info));
    height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_bit_depth(r.png, r.info) != 16 ||
        png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY)
        fail(path, "expected 16-bit grayscale PNG");
    png_set_swap(r.png);
    png_read_update_info(r.png, r.info);

    std::vector<std::uint16_t> data(static_cast<size_t>(width) * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(data.data() + static_cast<size_t>(y) * width);
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return data;
}

} // namespace rvms
