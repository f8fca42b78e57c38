#pragma once

/**
 * @file
 * Circuit builders for the four encoding schemes and the gate accounting
 * used to compare them.
 *
 * All DCT-based schemes share one layout per non-zero coefficient: an
 * auxiliary trigger conditioned on the coefficient's in-block position,
 * one aux-controlled NOT per 1-bit of the magnitude, one aux-controlled NOT
 * onto the sign qubit for negative values, and a closing operation. They
 * differ only in the trigger's controls and the closing gate:
 *
 *   scheme     trigger controls                   closing
 *   MTGSC      on-one lines for 1 digits only     Reset on aux
 *   SCMNEQR    every position line, mixed         Reset on aux
 *   DCTEFRQI   every position line, mixed         repeat of the trigger
 *
 * NEQR has no auxiliary qubit and maps every pixel bit with its own
 * fully-controlled NOT.
 */

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qic/circuit.hpp"
#include "qic/error.hpp"
#include "qic/image.hpp"
#include "qic/transform.hpp"

namespace qic {

enum class Scheme { Mtgsc, Scmneqr, Dctefrqi, Neqr };

inline constexpr std::string_view to_string(Scheme s) noexcept {
    switch (s) {
    case Scheme::Mtgsc: return "mtgsc";
    case Scheme::Scmneqr: return "scmneqr";
    case Scheme::Dctefrqi: return "dctefrqi";
    case Scheme::Neqr: return "neqr";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
    for (Scheme k : {Scheme::Mtgsc, Scheme::Scmneqr, Scheme::Dctefrqi, Scheme::Neqr}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

/// The three schemes that encode quantized transform coefficients.
inline constexpr std::array<Scheme, 3> kDctSchemes = {Scheme::Mtgsc, Scheme::Scmneqr, Scheme::Dctefrqi};

struct SparseCoefficient {
    std::size_t block_row = 0;
    std::size_t block_col = 0;
    unsigned x = 0;
    unsigned y = 0;
    int magnitude = 1;
    int sign = 1;

    friend bool operator==(const SparseCoefficient &, const SparseCoefficient &) = default;
};

inline constexpr int kMaxMagnitude = 255;

struct SparsifyStats {
    std::size_t clamped = 0; ///< coefficients whose magnitude exceeded 255
};

/**
 * Lists the non-zero coefficients of a quantized block grid in raster order
 * (block_row, block_col, y, x). Magnitudes above 255 are clamped to 255 and
 * counted in `stats`; a warning goes to stderr unless `stats` is given.
 */
inline std::vector<SparseCoefficient> sparsify(const BlockGrid<QuantizedBlock> &grid,
                                               SparsifyStats *stats = nullptr) {
    std::vector<SparseCoefficient> out;
    std::size_t clamped = 0;
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const QuantizedBlock &qb = grid.at(r, c);
            for (unsigned y = 0; y < kBlockSize; ++y) {
                for (unsigned x = 0; x < kBlockSize; ++x) {
                    const int mag = qb.magnitudes.at(x, y);
                    if (mag == 0) {
                        continue;
                    }
                    if (mag > kMaxMagnitude) {
                        ++clamped;
                    }
                    out.push_back({r, c, x, y, std::min(mag, kMaxMagnitude), qb.signs.at(x, y) < 0 ? -1 : 1});
                }
            }
        }
    }
    if (stats != nullptr) {
        stats->clamped += clamped;
    } else if (clamped > 0) {
        std::cerr << "warning: " << clamped << " coefficient magnitude(s) above " << kMaxMagnitude
                  << " clamped\n";
    }
    return out;
}

/// Smallest default-shaped register (3+3 position bits, one aux) whose
/// magnitude qubits hold every coefficient: 15 qubits when all magnitudes
/// are <= 127, one more otherwise.
inline QubitRegister register_for(const std::vector<SparseCoefficient> &coeffs) {
    int max_mag = 0;
    for (const auto &c : coeffs) {
        max_mag = std::max(max_mag, c.magnitude);
    }
    const auto bits = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(max_mag)));
    return QubitRegister{std::max(8u, bits + 1), 1, 3, 3};
}

namespace detail {

inline void check_coefficients(const std::vector<SparseCoefficient> &coeffs, const QubitRegister &reg) {
    if (!reg.has_aux() || reg.coeff < 2) {
        throw Error(ErrorCode::RegisterTooSmall, "coefficient schemes need an auxiliary and a sign qubit");
    }
    if (reg.total() > kMaxQubits) {
        throw Error(ErrorCode::InvalidArgument, "register wider than 64 qubits");
    }
    for (const auto &c : coeffs) {
        if (c.magnitude < 1) {
            throw Error(ErrorCode::InvalidArgument, "zero magnitude coefficients are not encoded");
        }
        if (c.sign != 1 && c.sign != -1) {
            throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
        }
        if (std::bit_width(static_cast<unsigned>(c.magnitude)) > reg.magnitude_bits()) {
            throw Error(ErrorCode::RegisterTooSmall, "magnitude " + std::to_string(c.magnitude) + " needs more than " +
                                                         std::to_string(reg.magnitude_bits()) + " bits");
        }
        if ((c.x >> reg.pos_x) != 0 || (c.y >> reg.pos_y) != 0) {
            throw Error(ErrorCode::RegisterTooSmall, "position (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                                                         ") does not fit the position register");
        }
    }
}

inline void append_preparation(Circuit &c) {
    for (unsigned b = 0; b < c.reg.pos_x; ++b) {
        c.gates.push_back(Gate::hadamard(c.reg.pos_x_qubit(b)));
    }
    for (unsigned b = 0; b < c.reg.pos_y; ++b) {
        c.gates.push_back(Gate::hadamard(c.reg.pos_y_qubit(b)));
    }
}

/// Position controls with the 0 digits dropped.
inline ControlSet one_digit_controls(const QubitRegister &reg, unsigned x, unsigned y) {
    const ControlSet full = reg.full_position_controls(x, y);
    return {full.ones(), 0};
}

inline Circuit build_dct_scheme(Scheme scheme, const std::vector<SparseCoefficient> &coeffs,
                                const QubitRegister &reg) {
    check_coefficients(coeffs, reg);
    Circuit c;
    c.reg = reg;
    c.gates.reserve(reg.positions() + coeffs.size() * 8);
    c.groups.reserve(coeffs.size());
    append_preparation(c);

    const unsigned aux = reg.aux_qubit();
    const ControlSet from_aux(std::uint64_t{1} << aux, 0);
    for (const auto &k : coeffs) {
        CoefficientGroup grp{k.block_row, k.block_col, k.x, k.y, k.magnitude, k.sign, c.gates.size(), 0};
        const ControlSet trigger_controls = scheme == Scheme::Mtgsc ? one_digit_controls(reg, k.x, k.y)
                                                                    : reg.full_position_controls(k.x, k.y);
        const Gate trigger = Gate::cnot(trigger_controls, aux);
        c.gates.push_back(trigger);
        for (unsigned b = 0; b < reg.magnitude_bits(); ++b) {
            if ((static_cast<unsigned>(k.magnitude) >> b) & 1u) {
                c.gates.push_back(Gate::cnot(from_aux, reg.coeff_qubit(b)));
            }
        }
        if (k.sign < 0) {
            c.gates.push_back(Gate::cnot(from_aux, reg.sign_qubit()));
        }
        c.gates.push_back(scheme == Scheme::Dctefrqi ? trigger : Gate::reset(aux));
        grp.last = c.gates.size() - 1;
        c.groups.push_back(grp);
    }
    return c;
}

} // namespace detail

/// Zero-discarding scheme: the trigger keeps only the on-one position lines.
inline Circuit build_mtgsc(const std::vector<SparseCoefficient> &coeffs, const QubitRegister &reg) {
    return detail::build_dct_scheme(Scheme::Mtgsc, coeffs, reg);
}
inline Circuit build_mtgsc(const std::vector<SparseCoefficient> &coeffs) {
    return build_mtgsc(coeffs, register_for(coeffs));
}

/// Fully controlled trigger closed by a Reset.
inline Circuit build_scmneqr(const std::vector<SparseCoefficient> &coeffs, const QubitRegister &reg) {
    return detail::build_dct_scheme(Scheme::Scmneqr, coeffs, reg);
}
inline Circuit build_scmneqr(const std::vector<SparseCoefficient> &coeffs) {
    return build_scmneqr(coeffs, register_for(coeffs));
}

/// Fully controlled trigger closed by a second identical trigger.
inline Circuit build_dctefrqi(const std::vector<SparseCoefficient> &coeffs, const QubitRegister &reg) {
    return detail::build_dct_scheme(Scheme::Dctefrqi, coeffs, reg);
}
inline Circuit build_dctefrqi(const std::vector<SparseCoefficient> &coeffs) {
    return build_dctefrqi(coeffs, register_for(coeffs));
}

inline unsigned ceil_log2(std::size_t n) noexcept {
    return n <= 1 ? 0u : static_cast<unsigned>(std::bit_width(n - 1));
}

/// Register for the direct pixel mapping of an image of at most 8x8.
inline QubitRegister neqr_register(const GrayImage &img) {
    return QubitRegister{8, 0, ceil_log2(img.width()), ceil_log2(img.height())};
}

/**
 * Direct pixel mapping: for every pixel and every 1-bit of its value, one NOT
 * onto that coefficient qubit controlled by all position lines.
 */
inline Circuit build_neqr(const GrayImage &img, const QubitRegister &reg) {
    if (img.width() > kBlockSize || img.height() > kBlockSize) {
        throw Error(ErrorCode::ImageTooLarge, "direct mapping is limited to 8x8 inputs");
    }
    if (reg.has_aux() || reg.coeff < 8 || (std::size_t{1} << reg.pos_x) < img.width() ||
        (std::size_t{1} << reg.pos_y) < img.height()) {
        throw Error(ErrorCode::RegisterTooSmall, "register cannot hold the image");
    }
    Circuit c;
    c.reg = reg;
    detail::append_preparation(c);
    for (unsigned y = 0; y < img.height(); ++y) {
        for (unsigned x = 0; x < img.width(); ++x) {
            const unsigned value = img.at(x, y);
            if (value == 0) {
                continue;
            }
            CoefficientGroup grp{0, 0, x, y, static_cast<int>(value), 1, c.gates.size(), 0};
            const ControlSet controls = reg.full_position_controls(x, y);
            for (unsigned b = 0; b < 8; ++b) {
                if ((value >> b) & 1u) {
                    c.gates.push_back(Gate::cnot(controls, reg.coeff_qubit(b)));
                }
            }
            grp.last = c.gates.size() - 1;
            c.groups.push_back(grp);
        }
    }
    return c;
}
inline Circuit build_neqr(const GrayImage &img) { return build_neqr(img, neqr_register(img)); }

/// Dispatch over the three coefficient schemes.
inline Circuit build(Scheme scheme, const std::vector<SparseCoefficient> &coeffs, const QubitRegister &reg) {
    if (scheme == Scheme::Neqr) {
        throw Error(ErrorCode::InvalidArgument, "the direct mapping encodes pixels, not coefficients");
    }
    return detail::build_dct_scheme(scheme, coeffs, reg);
}
inline Circuit build(Scheme scheme, const std::vector<SparseCoefficient> &coeffs) {
    return build(scheme, coeffs, register_for(coeffs));
}

// ---------------------------------------------------------------------------
// Gate accounting

struct GateStats {
    std::size_t n_tcn = 0;  ///< non-zero coefficients
    std::size_t q_o = 0;    ///< 1-bits across magnitudes
    std::size_t s_bit = 0;  ///< sign gates
    std::size_t a_bit = 0;  ///< auxiliary connections
    std::size_t b_t = 0;    ///< Toffoli connections
    std::size_t b_rg = 0;   ///< reset gates
    std::size_t b_z = 0;    ///< discarded zero controls
    std::size_t b_s0 = 0;   ///< b_t + b_rg - b_z
    std::size_t bpe = 0;    ///< block-position term
    std::size_t prep_gates = 0;
    std::size_t total_gates = 0;
    double gates_per_pixel = 0.0;

    friend bool operator==(const GateStats &, const GateStats &) = default;
};

/// Per-group connection counts; summing them over a circuit's groups gives
/// q_o + s_bit + b_s0 + a_bit.
struct GroupCost {
    std::size_t trigger_controls = 0; ///< control lines actually on the opening trigger
    std::size_t magnitude_bits = 0;
    std::size_t sign_gates = 0;
    std::size_t b_t = 0;
    std::size_t b_rg = 0;
    std::size_t b_z = 0;
    std::size_t a_bit = 0;

    [[nodiscard]] std::size_t connections() const noexcept {
        return magnitude_bits + sign_gates + (b_t + b_rg - b_z) + a_bit;
    }
};

namespace detail {

[[noreturn]] inline void scheme_mismatch(std::size_t gi, Scheme scheme, const std::string &what) {
    throw Error(ErrorCode::SchemeMismatch,
                "group " + std::to_string(gi) + " is not a " + std::string(to_string(scheme)) + " group: " + what);
}

} // namespace detail

inline GroupCost group_cost(const Circuit &c, std::size_t gi, Scheme scheme) {
    const CoefficientGroup &grp = c.groups.at(gi);
    const QubitRegister &reg = c.reg;
    if (grp.last >= c.gates.size() || grp.first > grp.last) {
        throw Error(ErrorCode::InvalidCircuit, "group span out of range");
    }
    GroupCost cost;
    const std::size_t full = reg.positions();

    if (scheme == Scheme::Neqr) {
        if (reg.has_aux()) {
            detail::scheme_mismatch(gi, scheme, "register has an auxiliary qubit");
        }
        for (std::size_t i = grp.first; i <= grp.last; ++i) {
            cost.b_t += c.gates[i].controls.size();
            ++cost.magnitude_bits;
        }
        cost.trigger_controls = c.gates[grp.first].controls.size();
        return cost;
    }
    if (!reg.has_aux()) {
        detail::scheme_mismatch(gi, scheme, "register has no auxiliary qubit");
    }

    const Gate &trigger = c.gates[grp.first];
    const Gate &tail = c.gates[grp.last];
    if (!detail::is_trigger(trigger, reg)) {
        detail::scheme_mismatch(gi, scheme, "missing auxiliary trigger");
    }
    cost.trigger_controls = trigger.controls.size();
    for (std::size_t i = grp.first + 1; i < grp.last; ++i) {
        const Gate &g = c.gates[i];
        if (g.kind != GateKind::ControlledNot) {
            continue;
        }
        if (g.target == reg.sign_qubit()) {
            ++cost.sign_gates;
        } else {
            ++cost.magnitude_bits;
        }
    }
    cost.a_bit = 1;

    switch (scheme) {
    case Scheme::Mtgsc:
    case Scheme::Scmneqr:
        if (tail.kind != GateKind::Reset) {
            detail::scheme_mismatch(gi, scheme, "group is not closed by a Reset");
        }
        if (scheme == Scheme::Mtgsc && trigger.controls.zeros() != 0) {
            detail::scheme_mismatch(gi, scheme, "trigger carries anti-controls");
        }
        if (scheme == Scheme::Scmneqr && cost.trigger_controls != full) {
            detail::scheme_mismatch(gi, scheme, "trigger is not fully controlled");
        }
        cost.b_t = full + 1; // C_T = 1
        cost.b_rg = 1;       // R_N = 1
        cost.b_z = full - cost.trigger_controls;
        break;
    case Scheme::Dctefrqi:
        if (!(tail == trigger) || grp.last == grp.first) {
            detail::scheme_mismatch(gi, scheme, "group is not closed by a repeated trigger");
        }
        if (cost.trigger_controls != full) {
            detail::scheme_mismatch(gi, scheme, "trigger is not fully controlled");
        }
        cost.b_t = full + (full + 1); // C_T = closing Toffoli: its controls plus its target
        break;
    case Scheme::Neqr: break;
    }
    return cost;
}

/**
 * Gate accounting over a built circuit. `width` x `height` is the original
 * (unpadded) image size; the block grid used for the block-position term is
 * derived from it.
 *
 *   b_t   = sum over groups of (pos_x + pos_y + C_T)
 *   b_rg  = R_N * n_tcn, R_N = 1 for Reset-closed schemes
 *   b_z   = position lines dropped from the triggers
 *   b_s0  = b_t + b_rg - b_z
 *   bpe   = N_rb * N_cb * (ceil(log2 max(N_cb,2)) + ceil(log2 max(N_rb,2))), 0 for an empty circuit
 *   total = q_o + s_bit + b_s0 + a_bit + prep + bpe;  gates_per_pixel = total / (width * height)
 */
inline GateStats count_gates(const Circuit &c, std::size_t width, std::size_t height, Scheme scheme) {
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    GateStats s;
    const std::size_t prep_end = c.preparation_size();
    for (std::size_t i = 0; i < prep_end; ++i) {
        const GateKind k = c.gates[i].kind;
        if (k == GateKind::Hadamard) {
            ++s.prep_gates;
        } else if (k != GateKind::Identity) {
            throw Error(ErrorCode::MissingGroupMetadata, "encoding gates present without coefficient groups");
        }
    }
    for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
        const GroupCost g = group_cost(c, gi, scheme);
        ++s.n_tcn;
        s.q_o += g.magnitude_bits;
        s.s_bit += g.sign_gates;
        s.a_bit += g.a_bit;
        s.b_t += g.b_t;
        s.b_rg += g.b_rg;
        s.b_z += g.b_z;
    }
    s.b_s0 = s.b_t + s.b_rg - s.b_z;
    if (scheme != Scheme::Neqr && s.n_tcn > 0) {
        const auto [rows, cols] = block_grid_dims(width, height);
        const std::size_t b_rbc = ceil_log2(std::max<std::size_t>(cols, 2));
        const std::size_t b_rbr = ceil_log2(std::max<std::size_t>(rows, 2));
        s.bpe = rows * cols * (b_rbc + b_rbr);
    }
    s.total_gates = s.q_o + s.s_bit + s.b_s0 + s.a_bit + s.prep_gates + s.bpe;
    s.gates_per_pixel = static_cast<double>(s.total_gates) / static_cast<double>(width * height);
    return s;
}

/// Scheme-level connection count per block: (block_row, block_col) -> sum of
/// group connections.
inline std::map<std::pair<std::size_t, std::size_t>, std::size_t> block_connections(const Circuit &c,
                                                                                     Scheme scheme) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> out;
    for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
        out[{c.groups[gi].block_row, c.groups[gi].block_col}] += group_cost(c, gi, scheme).connections();
    }
    return out;
}

/// 3q + log2(s_x) + log2(s_y) + q * s_x * s_y.
inline std::size_t complexity_bound(std::size_t q, std::size_t s_x, std::size_t s_y) {
    if (!std::has_single_bit(s_x) || !std::has_single_bit(s_y)) {
        throw Error(ErrorCode::NotPowerOfTwo, "block dimensions must be powers of two");
    }
    const auto lx = static_cast<std::size_t>(std::countr_zero(s_x));
    const auto ly = static_cast<std::size_t>(std::countr_zero(s_y));
    return 3 * q + lx + ly + q * s_x * s_y;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal text that round-trips the double.
inline std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(std::begin(buf), std::end(buf), v);
    return {buf, res.ptr};
}

inline constexpr std::string_view kStatsCsvHeader =
    "scheme,image,Q,n_tcn,q_o,s_bit,a_bit,b_t,b_rg,b_z,b_s0,bpe,total,gates_per_pixel";

inline std::string stats_csv_row(const GateStats &s, Scheme scheme, std::string_view image, int q) {
    std::string row;
    row += to_string(scheme);
    row += ',';
    row += image;
    row += ',' + std::to_string(q);
    for (std::size_t v : {s.n_tcn, s.q_o, s.s_bit, s.a_bit, s.b_t, s.b_rg, s.b_z, s.b_s0, s.bpe, s.total_gates}) {
        row += ',' + std::to_string(v);
    }
    row += ',' + format_double(s.gates_per_pixel);
    return row;
}

} // namespace qic
