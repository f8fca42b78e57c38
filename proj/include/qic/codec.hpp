#pragma once

/**
 * @file
 * Deterministic decode from circuit structure back to coefficients and
 * images, plus MSE/PSNR quality metrics.
 */

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qic/circuit.hpp"
#include "qic/encoders.hpp"
#include "qic/error.hpp"
#include "qic/image.hpp"
#include "qic/transform.hpp"

namespace qic {

namespace detail {

[[noreturn]] inline void malformed(std::size_t gate, const std::string &what) {
    throw Error(ErrorCode::MalformedGroup, "gate " + std::to_string(gate) + ": " + what);
}

// A 1 digit needs an on-one line; position lines either absent or on-zero read as 0.
inline void decode_position(const QubitRegister &reg, const ControlSet &controls, unsigned &x, unsigned &y) {
    x = 0;
    y = 0;
    for (unsigned b = 0; b < reg.pos_x; ++b) {
        if ((controls.ones() >> reg.pos_x_qubit(b)) & 1u) {
            x |= 1u << b;
        }
    }
    for (unsigned b = 0; b < reg.pos_y; ++b) {
        if ((controls.ones() >> reg.pos_y_qubit(b)) & 1u) {
            y |= 1u << b;
        }
    }
}

enum class Closing { Unknown, Reset, Trigger };

inline std::vector<SparseCoefficient> parse_aux_groups(const Circuit &c) {
    const QubitRegister &reg = c.reg;
    const auto &gates = c.gates;
    const ControlSet from_aux(std::uint64_t{1} << reg.aux_qubit(), 0);
    std::vector<SparseCoefficient> out;
    Closing family = Closing::Unknown;

    std::size_t i = 0;
    while (i < gates.size() && (gates[i].kind == GateKind::Hadamard || gates[i].kind == GateKind::Identity)) {
        ++i;
    }
    while (i < gates.size()) {
        if (gates[i].kind == GateKind::Identity) {
            ++i;
            continue;
        }
        const Gate trigger = gates[i];
        if (!is_trigger(trigger, reg)) {
            malformed(i, "expected an auxiliary trigger");
        }
        const std::size_t open = i++;
        unsigned magnitude = 0;
        int sign = 1;
        std::uint64_t seen = 0;
        for (; i < gates.size(); ++i) {
            const Gate &g = gates[i];
            if (g.kind == GateKind::Identity) {
                continue;
            }
            if (g.kind != GateKind::ControlledNot || g.controls != from_aux || !reg.is_coeff(g.target)) {
                break;
            }
            if ((seen >> g.target) & 1u) {
                malformed(i, "coefficient qubit written twice in one group");
            }
            seen |= std::uint64_t{1} << g.target;
            if (g.target == reg.sign_qubit()) {
                sign = -1;
            } else {
                magnitude |= 1u << g.target;
            }
        }
        if (i >= gates.size()) {
            malformed(open, "unterminated group");
        }
        const Gate &close = gates[i];
        Closing kind;
        if (close.kind == GateKind::Reset && close.target == reg.aux_qubit()) {
            kind = Closing::Reset;
        } else if (close == trigger) {
            kind = Closing::Trigger;
        } else {
            malformed(i, "group is neither reset- nor trigger-closed");
        }
        if (family != Closing::Unknown && family != kind) {
            malformed(i, "groups mix reset and trigger closing");
        }
        family = kind;
        if (magnitude == 0) {
            malformed(open, "group encodes a zero magnitude");
        }
        SparseCoefficient k;
        decode_position(reg, trigger.controls, k.x, k.y);
        k.magnitude = static_cast<int>(magnitude);
        k.sign = sign;
        out.push_back(k);
        ++i;
    }
    return out;
}

inline std::vector<SparseCoefficient> parse_direct_groups(const Circuit &c) {
    const QubitRegister &reg = c.reg;
    const auto &gates = c.gates;
    std::vector<SparseCoefficient> out;
    std::size_t i = 0;
    while (i < gates.size() && (gates[i].kind == GateKind::Hadamard || gates[i].kind == GateKind::Identity)) {
        ++i;
    }
    bool open = false;
    ControlSet current;
    std::uint64_t seen = 0;
    for (; i < gates.size(); ++i) {
        const Gate &g = gates[i];
        if (g.kind == GateKind::Identity) {
            continue;
        }
        if (!g.is_not() || !reg.is_coeff(g.target) || (g.controls.mask() & ~reg.position_mask()) != 0) {
            malformed(i, "direct mapping expects position-controlled NOTs onto coefficient qubits");
        }
        if (!open || g.controls != current || ((seen >> g.target) & 1u) != 0) {
            SparseCoefficient k;
            decode_position(reg, g.controls, k.x, k.y);
            k.magnitude = 0;
            out.push_back(k);
            current = g.controls;
            seen = 0;
            open = true;
        }
        seen |= std::uint64_t{1} << g.target;
        out.back().magnitude |= 1 << g.target;
    }
    return out;
}

} // namespace detail

/**
 * Re-derives the encoded coefficients from the gate list alone. Block
 * addresses have no gate realization and are taken from the group metadata
 * in order (all (0, 0) when the circuit carries none); the metadata count
 * must match the parsed group count.
 */
inline std::vector<SparseCoefficient> decode_circuit(const Circuit &c) {
    if (c.reg.total() > kMaxQubits || c.reg.aux > 1) {
        throw Error(ErrorCode::MalformedGroup, "unsupported register layout");
    }
    if (c.reg.has_aux() && c.reg.coeff < 2) {
        throw Error(ErrorCode::MalformedGroup, "auxiliary layout needs a sign and a magnitude qubit");
    }
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate &g = c.gates[i];
        if (g.target >= c.reg.total() || (g.controls.mask() >> c.reg.total()) != 0) {
            detail::malformed(i, "qubit index out of range");
        }
    }
    std::vector<SparseCoefficient> out =
        c.reg.has_aux() ? detail::parse_aux_groups(c) : detail::parse_direct_groups(c);
    if (!c.groups.empty()) {
        if (c.groups.size() != out.size()) {
            throw Error(ErrorCode::MalformedGroup, "metadata lists " + std::to_string(c.groups.size()) +
                                                       " groups but the gates encode " + std::to_string(out.size()));
        }
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k].block_row = c.groups[k].block_row;
            out[k].block_col = c.groups[k].block_col;
        }
    }
    return out;
}

/// True when the stored group metadata matches what the gates encode.
inline bool metadata_agrees(const Circuit &c) {
    const auto decoded = decode_circuit(c);
    if (decoded.size() != c.groups.size()) {
        return false;
    }
    for (std::size_t k = 0; k < decoded.size(); ++k) {
        const auto &g = c.groups[k];
        const auto &d = decoded[k];
        if (d.x != g.x || d.y != g.y || d.magnitude != g.magnitude || d.sign != g.sign) {
            return false;
        }
    }
    return true;
}

/// Densify per block, dequantize, inverse transform, assemble and crop.
inline GrayImage reconstruct(const std::vector<SparseCoefficient> &coeffs, std::size_t width, std::size_t height,
                             int q, const TransformOptions &opts = {}) {
    if (q < 1) {
        throw Error(ErrorCode::QOutOfRange, "quantization factor must be >= 1");
    }
    const auto [rows, cols] = block_grid_dims(width, height);
    BlockGrid<QuantizedBlock> grid(rows, cols);
    for (auto &b : grid.blocks) {
        b.q_factor = q;
    }
    for (const auto &k : coeffs) {
        if (k.block_row >= rows || k.block_col >= cols || k.x >= kBlockSize || k.y >= kBlockSize) {
            throw Error(ErrorCode::CoefficientOutOfBounds,
                        "coefficient at block (" + std::to_string(k.block_row) + "," + std::to_string(k.block_col) +
                            ") position (" + std::to_string(k.x) + "," + std::to_string(k.y) + ") is outside " +
                            std::to_string(width) + "x" + std::to_string(height));
        }
        QuantizedBlock &qb = grid.at(k.block_row, k.block_col);
        qb.magnitudes.at(k.x, k.y) = k.magnitude;
        qb.signs.at(k.x, k.y) = static_cast<std::int8_t>(k.sign < 0 ? -1 : 1);
    }
    BlockGrid<PixelBlock> pixels(rows, cols);
    for (std::size_t i = 0; i < grid.blocks.size(); ++i) {
        pixels.blocks[i] = dct_inverse(dequantize(grid.blocks[i]), opts);
    }
    return assemble_blocks(pixels, width, height);
}

struct QualityReport {
    double mse = 0.0;
    double psnr = std::numeric_limits<double>::infinity(); ///< dB; +inf for identical images
    std::string image_name;
    std::string scheme;
    int q_factor = 0;
};

/// MSE and PSNR with a fixed peak of 255.
inline QualityReport psnr(const GrayImage &original, const GrayImage &reconstructed) {
    if (original.width() != reconstructed.width() || original.height() != reconstructed.height()) {
        throw Error(ErrorCode::DimensionMismatch, "images differ in size");
    }
    double sse = 0.0;
    const auto &a = original.pixels();
    const auto &b = reconstructed.pixels();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sse += d * d;
    }
    QualityReport r;
    r.mse = sse / static_cast<double>(a.size());
    r.psnr = r.mse > 0.0 ? 10.0 * std::log10(255.0 * 255.0 / r.mse) : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace qic
