#include "oitk/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "oitk/builtin.hpp"
#include "oitk/error.hpp"

namespace oitk::io {

namespace {

using nlohmann::json;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open " + path);
    return f;
}

void write_bytes(const std::string& path, const void* data, std::size_t n) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!os) throw IoError("write failed: " + path);
}

std::vector<char> read_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot read " + path);
    return std::vector<char>((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

json grid_json(const Grid& g) { return json{{"nx", g.nx}, {"ny", g.ny}, {"Lx", g.Lx}, {"Ly", g.Ly}}; }

Grid grid_from_json(const json& j) {
    try {
        return make_grid(j.at("nx").get<int>(), j.at("ny").get<int>(), j.at("Lx").get<double>(),
                         j.at("Ly").get<double>());
    } catch (const json::exception& e) {
        throw InputError(std::string("bad grid header: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw InputError(std::string("bad grid header: ") + e.what());
    }
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
}

// Rows of 8-bit pixels with 1 (gray) or 3 (RGB) channels, top row first.
void write_png(const std::string& path, int width, int height, int channels, const std::vector<std::uint8_t>& px) {
    FilePtr fp = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < height; ++r) {
        png_write_row(png, const_cast<png_bytep>(px.data() + static_cast<std::size_t>(r) * width * channels));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Field (i, j) -> image pixel (row ny - 1 - j, column i).
template <int Channels, class ColorFn>
std::vector<std::uint8_t> rasterize(const ScalarField& f, ColorFn color) {
    const Grid& g = f.grid();
    std::vector<std::uint8_t> out(static_cast<std::size_t>(g.nx) * g.ny * Channels);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            int row = g.ny - 1 - j;
            std::uint8_t* px = out.data() + (static_cast<std::size_t>(row) * g.nx + i) * Channels;
            color(f(i, j), px);
        }
    }
    return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

GrayImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw InputError("cannot read " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("PNG decoding failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (depth < 8 && color == PNG_COLOR_TYPE_GRAY) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    GrayImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    int bytes = png_get_bit_depth(png, info) == 16 ? 2 : 1;
    std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> buf(rowbytes * img.height);
    std::vector<png_bytep> rows(img.height);
    for (int r = 0; r < img.height; ++r) rows[r] = buf.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double v;
            if (bytes == 2) {
                std::uint16_t s;
                std::memcpy(&s, rows[r] + 2 * c, 2);
                v = s / 65535.0;
            } else {
                v = rows[r][c] / 255.0;
            }
            img.pixels[static_cast<std::size_t>(r) * img.width + c] = v;
        }
    }
    return img;
}

GrayImage read_pgm(const std::string& path) {
    std::vector<char> bytes = read_bytes(path);
    std::size_t pos = 0;
    auto skip_space = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) throw InputError("malformed PGM header: " + path);
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
        throw InputError("not a PGM file: " + path);
    bool binary = bytes[1] == '5';
    pos = 2;
    GrayImage img;
    img.width = static_cast<int>(read_int());
    img.height = static_cast<int>(read_int());
    long maxval = read_int();
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) throw InputError("bad PGM header: " + path);
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (binary) {
        ++pos;
        int bpp = maxval > 255 ? 2 : 1;
        if (bytes.size() < pos + n * bpp) throw InputError("truncated PGM: " + path);
        for (std::size_t k = 0; k < n; ++k) {
            long v = bpp == 2 ? (static_cast<unsigned char>(bytes[pos + 2 * k]) << 8) |
                                    static_cast<unsigned char>(bytes[pos + 2 * k + 1])
                              : static_cast<unsigned char>(bytes[pos + k]);
            img.pixels[k] = static_cast<double>(v) / maxval;
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) img.pixels[k] = static_cast<double>(read_int()) / maxval;
    }
    return img;
}

GrayImage read_image(const std::string& path) {
    std::vector<char> head;
    {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw InputError("cannot read " + path);
        head.resize(8);
        is.read(head.data(), 8);
        head.resize(static_cast<std::size_t>(is.gcount()));
    }
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (head.size() == 8 && std::memcmp(head.data(), sig, 8) == 0) return read_png(path);
    if (head.size() >= 2 && head[0] == 'P' && (head[1] == '5' || head[1] == '2')) return read_pgm(path);
    throw InputError("unrecognized image format: " + path);
}

ScalarField image_to_field(const GrayImage& img, double Lx, double Ly) {
    Grid g;
    try {
        g = make_grid(img.width, img.height, Lx, Ly);
    } catch (const InvalidArgument& e) {
        throw InputError(std::string("image dimensions unusable: ") + e.what());
    }
    ScalarField f(g);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) f(c, g.ny - 1 - r) = img.pixels[static_cast<std::size_t>(r) * img.width + c];
    return f;
}

void write_raw_field(const std::string& path, const ScalarField& f) {
    write_bytes(path, f.data(), f.size() * sizeof(double));
    json meta = grid_json(f.grid());
    meta["dtype"] = "f64";
    meta["order"] = "C";
    write_text(path + ".json", meta.dump(2) + "\n");
}

ScalarField read_raw_field(const std::string& path) {
    Grid g = grid_from_json(read_json(path + ".json"));
    std::vector<char> bytes = read_bytes(path);
    if (bytes.size() != g.size() * sizeof(double)) throw InputError("raw field size does not match sidecar: " + path);
    std::vector<double> v(g.size());
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return ScalarField(g, std::move(v));
}

void write_warp(const std::string& path, const Warp& w) {
    const Grid& g = w.grid();
    std::size_t n = g.size();
    std::vector<double> buf;
    buf.reserve(5 * n);
    for (const ScalarField* f : {&w.fwd.x, &w.fwd.y, &w.inv.x, &w.inv.y, &w.inv_jac})
        buf.insert(buf.end(), f->values().begin(), f->values().end());
    write_bytes(path, buf.data(), buf.size() * sizeof(double));
    json meta = grid_json(g);
    meta["dtype"] = "f64";
    meta["order"] = "C";
    meta["arrays"] = {"fwd_x", "fwd_y", "inv_x", "inv_y", "inv_jac"};
    write_text(path + ".json", meta.dump(2) + "\n");
}

Warp read_warp(const std::string& path) {
    Grid g = grid_from_json(read_json(path + ".json"));
    std::vector<char> bytes = read_bytes(path);
    std::size_t n = g.size();
    if (bytes.size() != 5 * n * sizeof(double)) throw InputError("warp file size does not match header: " + path);
    const double* d = reinterpret_cast<const double*>(bytes.data());
    auto field = [&](int k) {
        std::vector<double> v(n);
        std::memcpy(v.data(), d + k * n, n * sizeof(double));
        return ScalarField(g, std::move(v));
    };
    return Warp{VectorField(field(0), field(1)), VectorField(field(2), field(3)), field(4)};
}

void write_diverging_png(const std::string& path, const ScalarField& f, double range) {
    double lr = std::log(range);
    auto rgb = rasterize<3>(f, [lr](double v, std::uint8_t* px) {
        double s = v > 0.0 ? std::clamp(std::log(v) / lr, -1.0, 1.0) : -1.0;
        // s = -1: green (0.1, 0.6, 0.3); s = 0: white; s = 1: pink (0.9, 0.2, 0.6).
        double r, gr, b;
        if (s < 0.0) {
            double a = -s;
            r = 1.0 - a * 0.9;
            gr = 1.0 - a * 0.4;
            b = 1.0 - a * 0.7;
        } else {
            r = 1.0 - s * 0.1;
            gr = 1.0 - s * 0.8;
            b = 1.0 - s * 0.4;
        }
        px[0] = to_byte(r);
        px[1] = to_byte(gr);
        px[2] = to_byte(b);
    });
    write_png(path, f.grid().nx, f.grid().ny, 3, rgb);
}

void write_gray_png(const std::string& path, const ScalarField& f, double lo, double hi) {
    double span = hi > lo ? hi - lo : 1.0;
    auto gray = rasterize<1>(f, [lo, span](double v, std::uint8_t* px) { px[0] = to_byte((v - lo) / span); });
    write_png(path, f.grid().nx, f.grid().ny, 1, gray);
}

void write_text(const std::string& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

std::string read_text(const std::string& path) {
    std::vector<char> b = read_bytes(path);
    return std::string(b.begin(), b.end());
}

Density load_density(const std::string& spec, double floor, bool strict, const Grid* grid_hint, double Lx,
                     double Ly) {
    if (floor < 0.0) throw InvalidArgument("floor must be nonnegative");
    ScalarField raw;
    if (spec.rfind("builtin:", 0) == 0) {
        if (!grid_hint) throw InvalidArgument("builtin densities need a grid");
        raw = builtin_intensity(spec.substr(8), *grid_hint);
    } else if (has_suffix(spec, ".f64") || has_suffix(spec, ".raw") || has_suffix(spec, ".bin")) {
        raw = read_raw_field(spec);
    } else {
        raw = image_to_field(read_image(spec), Lx, Ly);
    }
    if (grid_hint && raw.grid() != *grid_hint) throw InputError("density grid does not match the configured grid: " + spec);
    if (raw.min() < 0.0) throw InputError("density has negative values: " + spec);
    raw += floor;
    if (strict && !(raw.min() > 0.0)) throw InputError("density has zeros but a strict density is required: " + spec);
    try {
        return normalize_density(raw, raw.min() > 0.0);
    } catch (const Error& e) {
        throw InputError(std::string(e.what()) + ": " + spec);
    }
}

}  // namespace oitk::io
