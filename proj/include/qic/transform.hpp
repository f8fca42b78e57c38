#pragma once

/**
 * @file
 * 8x8 block DCT-II / DCT-III pair, scalar quantization with sign planes, and
 * the block grid used to move between rasters and per-block coefficients.
 *
 * Coefficients are indexed F(x, y) with x the horizontal frequency and y the
 * vertical one; pixels are indexed P(x, y) with x the column. Blocks store
 * both row-major (index y * 8 + x).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qic/error.hpp"
#include "qic/image.hpp"

namespace qic {

inline constexpr std::size_t kBlockSize = 8;
inline constexpr std::size_t kBlockArea = kBlockSize * kBlockSize;

template <class T> struct Block {
    std::array<T, kBlockArea> values{};

    [[nodiscard]] constexpr const T &at(std::size_t x, std::size_t y) const { return values[y * kBlockSize + x]; }
    constexpr T &at(std::size_t x, std::size_t y) { return values[y * kBlockSize + x]; }

    friend bool operator==(const Block &, const Block &) = default;
};

using PixelBlock = Block<std::uint8_t>;
using CoeffBlock = Block<double>;

struct QuantizedBlock {
    Block<int> magnitudes;
    Block<std::int8_t> signs;
    int q_factor = 1;

    friend bool operator==(const QuantizedBlock &, const QuantizedBlock &) = default;
};

struct TransformOptions {
    /// Subtract 128 before the forward transform and add it back after the
    /// inverse. Off by default.
    bool level_shift = false;
};

/// Normalization: 1/(2*sqrt(2)) for the DC index, 1/2 otherwise.
constexpr double dct_norm(std::size_t k) noexcept {
    return k == 0 ? 1.0 / (2.0 * std::numbers::sqrt2) : 0.5;
}

namespace detail {

// basis[u][i] = C(u) * cos((2i + 1) u pi / 16)
inline const std::array<std::array<double, kBlockSize>, kBlockSize> &dct_basis() {
    static const auto table = [] {
        std::array<std::array<double, kBlockSize>, kBlockSize> t{};
        for (std::size_t u = 0; u < kBlockSize; ++u) {
            for (std::size_t i = 0; i < kBlockSize; ++i) {
                t[u][i] = dct_norm(u) * std::cos(static_cast<double>((2 * i + 1) * u) * std::numbers::pi / 16.0);
            }
        }
        return t;
    }();
    return table;
}

// Separable form of the 2-D kernel: out(u, v) = sum_{i,j} B[u][i] B[v][j] in(i, j),
// or its transpose when `inverse` is set.
inline Block<double> separable_pass(const Block<double> &in, bool inverse) {
    const auto &basis = dct_basis();
    Block<double> tmp;
    for (std::size_t y = 0; y < kBlockSize; ++y) {
        for (std::size_t u = 0; u < kBlockSize; ++u) {
            double acc = 0.0;
            for (std::size_t i = 0; i < kBlockSize; ++i) {
                acc += (inverse ? basis[i][u] : basis[u][i]) * in.at(i, y);
            }
            tmp.at(u, y) = acc;
        }
    }
    Block<double> out;
    for (std::size_t u = 0; u < kBlockSize; ++u) {
        for (std::size_t v = 0; v < kBlockSize; ++v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < kBlockSize; ++j) {
                acc += (inverse ? basis[j][v] : basis[v][j]) * tmp.at(u, j);
            }
            out.at(u, v) = acc;
        }
    }
    return out;
}

} // namespace detail

inline CoeffBlock dct_forward(const PixelBlock &block, const TransformOptions &opts = {}) {
    Block<double> in;
    const double shift = opts.level_shift ? 128.0 : 0.0;
    for (std::size_t k = 0; k < kBlockArea; ++k) {
        in.values[k] = static_cast<double>(block.values[k]) - shift;
    }
    return detail::separable_pass(in, false);
}

/// Inverse transform without rounding (the level shift, if any, is applied).
inline Block<double> dct_inverse_real(const CoeffBlock &coeffs, const TransformOptions &opts = {}) {
    Block<double> out = detail::separable_pass(coeffs, true);
    if (opts.level_shift) {
        for (auto &v : out.values) {
            v += 128.0;
        }
    }
    return out;
}

/// Distance from a half within which a value counts as an exact tie. Several
/// coefficients (DC, and frequencies 0/4 on both axes) are pixel sums over 8
/// or 16 and hit k + 0.5 exactly; the cosine sums only get there to ~1e-13.
inline constexpr double kTieTolerance = 1e-9;

/// Rounds half away from zero, treating near-halves as ties.
inline double round_half_away(double v) noexcept {
    double mag = std::abs(v);
    const double below = std::floor(mag);
    if (std::abs(mag - below - 0.5) < kTieTolerance) {
        mag = below + 1.0;
    } else {
        mag = std::round(mag);
    }
    return std::copysign(mag, v);
}

/// Inverse transform, rounded half away from zero and clamped to [0, 255].
inline PixelBlock dct_inverse(const CoeffBlock &coeffs, const TransformOptions &opts = {}) {
    const Block<double> real = dct_inverse_real(coeffs, opts);
    PixelBlock out;
    for (std::size_t k = 0; k < kBlockArea; ++k) {
        out.values[k] = static_cast<std::uint8_t>(std::clamp(round_half_away(real.values[k]), 0.0, 255.0));
    }
    return out;
}

inline QuantizedBlock quantize(const CoeffBlock &coeffs, int q) {
    if (q < 1) {
        throw Error(ErrorCode::QOutOfRange, "quantization factor must be >= 1, got " + std::to_string(q));
    }
    QuantizedBlock out;
    out.q_factor = q;
    for (std::size_t k = 0; k < kBlockArea; ++k) {
        const double r = round_half_away(coeffs.values[k] / static_cast<double>(q));
        out.magnitudes.values[k] = static_cast<int>(std::abs(r));
        out.signs.values[k] = static_cast<std::int8_t>(r > 0.0 ? 1 : (r < 0.0 ? -1 : 0));
    }
    return out;
}

inline CoeffBlock dequantize(const QuantizedBlock &qb) {
    CoeffBlock out;
    for (std::size_t k = 0; k < kBlockArea; ++k) {
        out.values[k] = static_cast<double>(qb.signs.values[k]) * static_cast<double>(qb.magnitudes.values[k]) *
                        static_cast<double>(qb.q_factor);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block grids

/// Row-major grid of per-block values covering a padded raster.
template <class T> struct BlockGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> blocks;

    BlockGrid() = default;
    BlockGrid(std::size_t r, std::size_t c) : rows(r), cols(c), blocks(r * c) {}

    [[nodiscard]] const T &at(std::size_t row, std::size_t col) const { return blocks[row * cols + col]; }
    T &at(std::size_t row, std::size_t col) { return blocks[row * cols + col]; }
};

/// Block-grid dimensions (rows, cols) covering a width x height raster.
inline std::pair<std::size_t, std::size_t> block_grid_dims(std::size_t width, std::size_t height) {
    return {round_up(height, kBlockSize) / kBlockSize, round_up(width, kBlockSize) / kBlockSize};
}

/// Pads to a block multiple and splits into 8x8 blocks.
inline BlockGrid<PixelBlock> split_blocks(const GrayImage &img) {
    const GrayImage padded = pad_to_block_multiple(img, kBlockSize);
    BlockGrid<PixelBlock> grid(padded.height() / kBlockSize, padded.width() / kBlockSize);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            PixelBlock &b = grid.at(r, c);
            for (std::size_t y = 0; y < kBlockSize; ++y) {
                for (std::size_t x = 0; x < kBlockSize; ++x) {
                    b.at(x, y) = padded.at(c * kBlockSize + x, r * kBlockSize + y);
                }
            }
        }
    }
    return grid;
}

/// Assembles blocks into a raster and crops it to width x height.
inline GrayImage assemble_blocks(const BlockGrid<PixelBlock> &grid, std::size_t width, std::size_t height) {
    if (width > grid.cols * kBlockSize || height > grid.rows * kBlockSize) {
        throw Error(ErrorCode::DimensionMismatch, "requested size exceeds block grid");
    }
    GrayImage out(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            out.at(x, y) = grid.at(y / kBlockSize, x / kBlockSize).at(x % kBlockSize, y % kBlockSize);
        }
    }
    return out;
}

/// Step 1 over a whole raster: pad, transform and quantize every block.
inline BlockGrid<QuantizedBlock> quantize_image(const GrayImage &img, int q, const TransformOptions &opts = {}) {
    if (q < 1) {
        throw Error(ErrorCode::QOutOfRange, "quantization factor must be >= 1, got " + std::to_string(q));
    }
    const auto pixels = split_blocks(img);
    BlockGrid<QuantizedBlock> out(pixels.rows, pixels.cols);
    for (std::size_t k = 0; k < pixels.blocks.size(); ++k) {
        out.blocks[k] = quantize(dct_forward(pixels.blocks[k], opts), q);
    }
    return out;
}

} // namespace qic
