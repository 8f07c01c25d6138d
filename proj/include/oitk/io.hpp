#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oitk/grid.hpp"
#include "oitk/warp.hpp"

namespace oitk::io {

// Grayscale image with values scaled to [0, 1]; row 0 is the top row.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;
};

// Color images are converted to luminance.
GrayImage read_png(const std::string& path);
GrayImage read_pgm(const std::string& path);
// Dispatches on the file signature.
GrayImage read_image(const std::string& path);

// Image column i -> x index i, image row r -> y index ny - 1 - r.
ScalarField image_to_field(const GrayImage& img, double Lx, double Ly);

// Raw little-endian f64 array in C order (nx, ny) plus a JSON sidecar
// {nx, ny, Lx, Ly} at path + ".json".
void write_raw_field(const std::string& path, const ScalarField& f);
ScalarField read_raw_field(const std::string& path);

// Five concatenated (nx, ny) f64 arrays: fwd_x, fwd_y, inv_x, inv_y, inv_jac,
// with a JSON header at path + ".json".
void write_warp(const std::string& path, const Warp& w);
Warp read_warp(const std::string& path);

// RGB8 PNG. log(value) in [-log r, log r] goes from green through white
// (value 1) to pink.
void write_diverging_png(const std::string& path, const ScalarField& f, double range = 4.0);
// 8-bit grayscale PNG of (f - lo) / (hi - lo).
void write_gray_png(const std::string& path, const ScalarField& f, double lo, double hi);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Loads "builtin:<name>", a PNG/PGM image, or a raw f64 field; adds floor and
// normalizes. Images use periods (Lx, Ly); raw files carry their own.
Density load_density(const std::string& spec, double floor, bool strict, const Grid* grid_hint, double Lx,
                     double Ly);

}  // namespace oitk::io
