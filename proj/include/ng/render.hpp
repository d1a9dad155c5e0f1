#pragma once
#include <array>
#include <string>
#include <vector>

#include "ng/dynamics.hpp"

namespace ng {

struct RenderSpec {
    int width = 512;
    int height = 512;
    double x0 = -2.0, y0 = -2.0;  // lower left corner of the viewport
    double x1 = 2.0, y1 = 2.0;    // upper right corner
    int max_iter = 200;
};

struct Image {
    int width = 0, height = 0;
    std::vector<unsigned char> rgb;  // rows top to bottom, three bytes per pixel
};

// Distinct fully saturated colors, one per root.
std::vector<std::array<unsigned char, 3>> basin_palette(int count);

// Color every pixel center by the root whose basin it falls in; points that
// stay undecided within the iteration budget are black. Optional polylines
// are rasterized on top in white. Rows are rendered in parallel bands.
Image render_basins(const RationalMap& f, const std::vector<Cx>& roots, const RenderSpec& spec,
                    const std::vector<RayPolyline>* overlay = nullptr, const Tolerances& tol = {});

void write_ppm(const std::string& path, const Image& img);

}  // namespace ng
