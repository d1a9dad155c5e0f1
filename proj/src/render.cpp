#include "ng/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

namespace ng {

namespace {

std::array<unsigned char, 3> hue_color(double h) {
    // piecewise hue wheel at full saturation, value 0.92
    double r = std::clamp(std::abs(6.0 * h - 3.0) - 1.0, 0.0, 1.0);
    double g = std::clamp(2.0 - std::abs(6.0 * h - 2.0), 0.0, 1.0);
    double b = std::clamp(2.0 - std::abs(6.0 * h - 4.0), 0.0, 1.0);
    auto byte = [](double x) { return static_cast<unsigned char>(std::lround(234.0 * x)); };
    return {byte(r), byte(g), byte(b)};
}

// Liang-Barsky segment clip against an axis-aligned box.
bool clip_segment(double& ax, double& ay, double& bx, double& by, double xmin, double xmax,
                  double ymin, double ymax) {
    double t0 = 0.0, t1 = 1.0, dx = bx - ax, dy = by - ay;
    auto pass = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
        return true;
    };
    if (!pass(-dx, ax - xmin) || !pass(dx, xmax - ax) || !pass(-dy, ay - ymin) ||
        !pass(dy, ymax - ay))
        return false;
    double nax = ax + t0 * dx, nay = ay + t0 * dy;
    double nbx = ax + t1 * dx, nby = ay + t1 * dy;
    ax = nax;
    ay = nay;
    bx = nbx;
    by = nby;
    return true;
}

}  // namespace

std::vector<std::array<unsigned char, 3>> basin_palette(int count) {
    std::vector<std::array<unsigned char, 3>> pal;
    for (int i = 0; i < count; ++i) pal.push_back(hue_color(double(i) / std::max(count, 1)));
    return pal;
}

Image render_basins(const RationalMap& f, const std::vector<Cx>& roots, const RenderSpec& spec,
                    const std::vector<RayPolyline>* overlay, const Tolerances& tol) {
    if (spec.width < 1 || spec.height < 1)
        throw invalid_spec_error("image dimensions must be positive");
    if (!(spec.x1 > spec.x0) || !(spec.y1 > spec.y0))
        throw invalid_spec_error("viewport is degenerate");

    Image img;
    img.width = spec.width;
    img.height = spec.height;
    img.rgb.assign(size_t(spec.width) * size_t(spec.height) * 3, 0);
    std::vector<std::array<unsigned char, 3>> pal = basin_palette(int(roots.size()));
    double dx = (spec.x1 - spec.x0) / spec.width;
    double dy = (spec.y1 - spec.y0) / spec.height;

    auto band = [&](int row_begin, int row_end) {
        for (int r = row_begin; r < row_end; ++r) {
            double im = spec.y1 - (r + 0.5) * dy;
            for (int c = 0; c < spec.width; ++c) {
                double re = spec.x0 + (c + 0.5) * dx;
                BasinVerdict v = basin_index(f, roots, Cx{re, im}, spec.max_iter, tol);
                if (v.outcome == BasinVerdict::Outcome::Converges && v.root_index >= 0) {
                    const auto& p = pal[v.root_index];
                    size_t o = (size_t(r) * size_t(spec.width) + size_t(c)) * 3;
                    img.rgb[o] = p[0];
                    img.rgb[o + 1] = p[1];
                    img.rgb[o + 2] = p[2];
                }
            }
        }
    };

    int workers = int(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
    workers = std::min(workers, spec.height);
    int per = (spec.height + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int b = 0; b < workers; ++b) {
        int lo = b * per, hi = std::min(spec.height, lo + per);
        if (lo < hi) pool.emplace_back(band, lo, hi);
    }
    for (std::thread& t : pool) t.join();

    if (overlay) {
        auto put = [&](double col, double row) {
            int c = int(std::lround(col)), r = int(std::lround(row));
            if (c < 0 || c >= spec.width || r < 0 || r >= spec.height) return;
            size_t o = (size_t(r) * size_t(spec.width) + size_t(c)) * 3;
            img.rgb[o] = img.rgb[o + 1] = img.rgb[o + 2] = 255;
        };
        for (const RayPolyline& ray : *overlay) {
            for (size_t i = 0; i + 1 < ray.points.size(); ++i) {
                double ax = (ray.points[i].real() - spec.x0) / dx - 0.5;
                double ay = (spec.y1 - ray.points[i].imag()) / dy - 0.5;
                double bx = (ray.points[i + 1].real() - spec.x0) / dx - 0.5;
                double by = (spec.y1 - ray.points[i + 1].imag()) / dy - 0.5;
                if (!clip_segment(ax, ay, bx, by, -1.0, spec.width + 0.0, -1.0, spec.height + 0.0))
                    continue;
                int steps = 1 + int(std::ceil(2.0 * std::max(std::abs(bx - ax), std::abs(by - ay))));
                for (int s = 0; s <= steps; ++s) {
                    double t = double(s) / steps;
                    put(ax + t * (bx - ax), ay + t * (by - ay));
                }
            }
        }
    }
    return img;
}

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
    if (!out.good()) throw io_error("write failed on " + path);
}

}  // namespace ng
