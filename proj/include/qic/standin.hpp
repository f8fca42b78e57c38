#pragma once

/**
 * @file
 * Deterministic procedural stand-ins for the benchmark images. The
 * reference files are not redistributable, so when a manifest entry is
 * missing the sweep can substitute a synthetic raster of the same size whose
 * texture class roughly matches the original (fine texture for grass,
 * flat regions with edges for house, and so on).
 *
 * Output is bit-identical across platforms: only std::mt19937 raw output and
 * IEEE arithmetic are used, no library distributions.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "qic/image.hpp"

namespace qic {

struct StandinProfile {
    std::uint32_t seed = 1;
    double base = 128.0;         ///< mean intensity
    double gradient = 0.0;       ///< vertical ramp amplitude
    double texture_amp = 0.0;    ///< fractal noise amplitude
    double texture_scale = 16.0; ///< largest noise cell in pixels
    int octaves = 3;
    int shapes = 0;              ///< flat rectangles / ellipses
    double shape_amp = 0.0;
    double grain = 0.0;          ///< per-pixel white noise amplitude
};

namespace detail {

inline std::uint32_t fnv1a(std::string_view s) {
    std::uint32_t h = 2166136261u;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 16777619u;
    }
    return h;
}

inline double unit(std::mt19937 &rng) { return static_cast<double>(rng() >> 8) / 16777216.0; }

class ValueNoise {
  public:
    ValueNoise(std::size_t width, std::size_t height, double cell, std::mt19937 &rng)
        : cell_(std::max(cell, 1.0)), gw_(static_cast<std::size_t>(static_cast<double>(width) / cell_) + 2),
          gh_(static_cast<std::size_t>(static_cast<double>(height) / cell_) + 2), lattice_(gw_ * gh_) {
        for (auto &v : lattice_) {
            v = unit(rng) * 2.0 - 1.0;
        }
    }

    [[nodiscard]] double at(std::size_t x, std::size_t y) const {
        const double fx = static_cast<double>(x) / cell_;
        const double fy = static_cast<double>(y) / cell_;
        const auto ix = static_cast<std::size_t>(fx);
        const auto iy = static_cast<std::size_t>(fy);
        const double tx = smooth(fx - static_cast<double>(ix));
        const double ty = smooth(fy - static_cast<double>(iy));
        const double a = lattice_[iy * gw_ + ix];
        const double b = lattice_[iy * gw_ + ix + 1];
        const double c = lattice_[(iy + 1) * gw_ + ix];
        const double d = lattice_[(iy + 1) * gw_ + ix + 1];
        return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
    }

  private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

    double cell_;
    std::size_t gw_;
    std::size_t gh_;
    std::vector<double> lattice_;
};

} // namespace detail

/// Texture profile for one of the benchmark names; other names get a
/// generic mixed profile seeded from the name.
inline StandinProfile standin_profile(std::string_view name) {
    if (name == "grass") return {101, 120, 10, 70, 6, 4, 0, 0, 18};
    if (name == "baboon") return {102, 125, 20, 55, 12, 4, 6, 25, 10};
    if (name == "house") return {103, 140, 30, 10, 64, 2, 14, 60, 1.5};
    if (name == "building") return {104, 130, 40, 14, 48, 2, 40, 50, 3};
    if (name == "peppers") return {105, 115, 20, 45, 96, 3, 10, 30, 2};
    if (name == "scenery") return {106, 135, 60, 35, 40, 4, 4, 30, 4};
    if (name == "deer") return {107, 110, 30, 40, 32, 4, 8, 35, 5};
    if (name == "airport") return {108, 125, 20, 30, 24, 4, 60, 40, 6};
    return {detail::fnv1a(name), 128, 20, 40, 24, 3, 8, 30, 5};
}

inline GrayImage make_standin(const StandinProfile &p, std::size_t width, std::size_t height) {
    std::mt19937 rng(p.seed);
    std::vector<double> field(width * height, p.base);

    for (std::size_t y = 0; y < height; ++y) {
        const double ramp = p.gradient * (static_cast<double>(y) / static_cast<double>(height) - 0.5);
        for (std::size_t x = 0; x < width; ++x) {
            field[y * width + x] += ramp;
        }
    }

    double amp = p.texture_amp;
    double cell = p.texture_scale;
    for (int o = 0; o < p.octaves; ++o) {
        const detail::ValueNoise noise(width, height, cell, rng);
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                field[y * width + x] += amp * noise.at(x, y);
            }
        }
        amp *= 0.55;
        cell /= 2.0;
    }

    for (int s = 0; s < p.shapes; ++s) {
        const double cx = detail::unit(rng) * static_cast<double>(width);
        const double cy = detail::unit(rng) * static_cast<double>(height);
        const double rx = (0.03 + 0.2 * detail::unit(rng)) * static_cast<double>(width);
        const double ry = (0.03 + 0.2 * detail::unit(rng)) * static_cast<double>(height);
        const double level = (detail::unit(rng) * 2.0 - 1.0) * p.shape_amp;
        const bool ellipse = (rng() & 1u) != 0;
        const auto x0 = static_cast<std::size_t>(std::max(0.0, cx - rx));
        const auto x1 = static_cast<std::size_t>(std::min(static_cast<double>(width), cx + rx));
        const auto y0 = static_cast<std::size_t>(std::max(0.0, cy - ry));
        const auto y1 = static_cast<std::size_t>(std::min(static_cast<double>(height), cy + ry));
        for (std::size_t y = y0; y < y1; ++y) {
            for (std::size_t x = x0; x < x1; ++x) {
                const double dx = (static_cast<double>(x) - cx) / rx;
                const double dy = (static_cast<double>(y) - cy) / ry;
                if (!ellipse || dx * dx + dy * dy <= 1.0) {
                    field[y * width + x] += level;
                }
            }
        }
    }

    GrayImage img(width, height);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double v = field[i] + p.grain * (detail::unit(rng) * 2.0 - 1.0);
        img.pixels()[i] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
    return img;
}

inline GrayImage make_standin(std::string_view name, std::size_t width, std::size_t height) {
    return make_standin(standin_profile(name), width, height);
}

} // namespace qic
