#pragma once

// Independent reference computations and generators shared by the tests.
// Nothing here calls into the library's transform or counting code.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qic/encoders.hpp"
#include "qic/transform.hpp"

namespace oracle {

inline double c_norm(int k) { return k == 0 ? 1.0 / (2.0 * std::numbers::sqrt2) : 0.5; }

// F(x,y) = C(x)C(y) sum_{i,j} P(i,j) cos((2i+1)x pi/16) cos((2j+1)y pi/16), i the column.
inline std::array<double, 64> dct(const std::array<double, 64> &p) {
    std::array<double, 64> f{};
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int j = 0; j < 8; ++j) {
                for (int i = 0; i < 8; ++i) {
                    s += p[j * 8 + i] * std::cos((2 * i + 1) * x * std::numbers::pi / 16.0) *
                         std::cos((2 * j + 1) * y * std::numbers::pi / 16.0);
                }
            }
            f[y * 8 + x] = c_norm(x) * c_norm(y) * s;
        }
    }
    return f;
}

inline std::array<double, 64> idct(const std::array<double, 64> &f) {
    std::array<double, 64> p{};
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    s += c_norm(x) * c_norm(y) * f[y * 8 + x] * std::cos((2 * i + 1) * x * std::numbers::pi / 16.0) *
                         std::cos((2 * j + 1) * y * std::numbers::pi / 16.0);
                }
            }
            p[j * 8 + i] = s;
        }
    }
    return p;
}

inline std::array<double, 64> to_array(const qic::PixelBlock &b) {
    std::array<double, 64> out{};
    for (unsigned y = 0; y < 8; ++y) {
        for (unsigned x = 0; x < 8; ++x) {
            out[y * 8 + x] = b.at(x, y);
        }
    }
    return out;
}

inline int ones(unsigned v) {
    int n = 0;
    for (; v != 0; v >>= 1) {
        n += static_cast<int>(v & 1u);
    }
    return n;
}

inline qic::PixelBlock random_block(std::mt19937 &rng) {
    std::uniform_int_distribution<int> d(0, 255);
    qic::PixelBlock b;
    for (auto &v : b.values) {
        v = static_cast<std::uint8_t>(d(rng));
    }
    return b;
}

// Random coefficient list over a few blocks, magnitudes up to `max_mag`.
inline std::vector<qic::SparseCoefficient> random_coeffs(std::mt19937 &rng, int max_mag = 255,
                                                         std::size_t max_len = 40) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> pos(0, 7);
    std::uniform_int_distribution<int> mag(1, max_mag);
    std::uniform_int_distribution<int> blk(0, 3);
    std::bernoulli_distribution neg(0.4);
    std::vector<qic::SparseCoefficient> out(len(rng));
    for (auto &k : out) {
        k.block_row = static_cast<std::size_t>(blk(rng));
        k.block_col = static_cast<std::size_t>(blk(rng));
        k.x = static_cast<unsigned>(pos(rng));
        k.y = static_cast<unsigned>(pos(rng));
        k.magnitude = mag(rng);
        k.sign = neg(rng) ? -1 : 1;
    }
    return out;
}

// Five-coefficient worked example of the reset-closed baseline.
inline std::vector<qic::SparseCoefficient> scm_example() {
    return {{0, 0, 0, 0, 125, 1}, {0, 0, 1, 0, 1, 1}, {0, 0, 4, 0, 1, 1}, {0, 0, 0, 1, 4, 1}, {0, 0, 0, 3, 16, 1}};
}

// 16x16 deer list with positions folded into 8x8 blocks.
inline std::vector<qic::SparseCoefficient> deer_example() {
    struct Raw {
        int value;
        unsigned x;
        unsigned y;
    };
    const Raw raw[] = {{126, 1, 1}, {1, 1, 0}, {1, 4, 0},  {126, 8, 0}, {4, 0, 1},  {1, 8, 1},  {1, 9, 1}, {1, 8, 1},
                       {1, 8, 5},   {138, 0, 8}, {140, 8, 8}, {1, 12, 8}, {2, 0, 9}, {2, 8, 9}, {1, 2, 11}};
    std::vector<qic::SparseCoefficient> out;
    for (const Raw &r : raw) {
        out.push_back({r.y / 8, r.x / 8, r.x % 8, r.y % 8, r.value, 1});
    }
    return out;
}

inline std::filesystem::path tmp_dir(const std::string &name) {
#ifdef QIC_TEST_TMP
    const std::filesystem::path base = QIC_TEST_TMP;
#else
    const std::filesystem::path base = std::filesystem::temp_directory_path() / "qic-tests";
#endif
    const auto dir = base / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace oracle
