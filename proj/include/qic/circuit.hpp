#pragma once

/**
 * @file
 * Role-tagged qubit register and gate-list representation of coefficient
 * encoding circuits, with structural validation, canonical JSON
 * serialization and a column layout for drag-and-drop circuit tools.
 *
 * Qubit layout, lowest index first:
 *   [0, coeff)                    coefficient qubits, bit k of the magnitude on qubit k;
 *                                 when an auxiliary qubit is present the top
 *                                 coefficient qubit carries the sign instead
 *   coeff                         auxiliary qubit (if aux == 1)
 *   next pos_x qubits             X position, LSB first
 *   next pos_y qubits             Y position, LSB first
 */

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qic/error.hpp"

namespace qic {

enum class GateKind : std::uint8_t { Hadamard, Identity, NotGate, ControlledNot, Reset };

enum class Polarity : std::uint8_t { OnOne, OnZero };

struct Control {
    unsigned qubit = 0;
    Polarity polarity = Polarity::OnOne;

    friend bool operator==(const Control &, const Control &) = default;
};

inline constexpr unsigned kMaxQubits = 64;

/// Set of control lines with polarity, stored as two disjoint bit masks.
/// Iteration is in ascending qubit order.
class ControlSet {
  public:
    constexpr ControlSet() = default;
    constexpr ControlSet(std::uint64_t ones, std::uint64_t zeros) : ones_(ones), zeros_(zeros) {}

    constexpr void add(unsigned qubit, Polarity p) {
        const std::uint64_t bit = std::uint64_t{1} << qubit;
        (p == Polarity::OnOne ? ones_ : zeros_) |= bit;
    }
    constexpr void add(const Control &c) { add(c.qubit, c.polarity); }

    [[nodiscard]] constexpr std::uint64_t ones() const noexcept { return ones_; }
    [[nodiscard]] constexpr std::uint64_t zeros() const noexcept { return zeros_; }
    [[nodiscard]] constexpr std::uint64_t mask() const noexcept { return ones_ | zeros_; }
    [[nodiscard]] constexpr bool empty() const noexcept { return mask() == 0; }
    [[nodiscard]] constexpr unsigned size() const noexcept {
        return static_cast<unsigned>(std::popcount(ones_) + std::popcount(zeros_));
    }
    [[nodiscard]] constexpr bool contains(unsigned qubit) const noexcept { return ((mask() >> qubit) & 1u) != 0; }

    /// True if some qubit is listed with both polarities.
    [[nodiscard]] constexpr bool conflicting() const noexcept { return (ones_ & zeros_) != 0; }

    /// True iff the controls fire on computational basis state `basis`.
    [[nodiscard]] constexpr bool satisfied_by(std::uint64_t basis) const noexcept {
        return (basis & ones_) == ones_ && (basis & zeros_) == 0;
    }

    [[nodiscard]] std::vector<Control> to_vector() const {
        std::vector<Control> out;
        for (unsigned q = 0; q < kMaxQubits; ++q) {
            if ((ones_ >> q) & 1u) {
                out.push_back({q, Polarity::OnOne});
            }
            if ((zeros_ >> q) & 1u) {
                out.push_back({q, Polarity::OnZero});
            }
        }
        return out;
    }

    friend constexpr bool operator==(const ControlSet &, const ControlSet &) = default;

  private:
    std::uint64_t ones_ = 0;
    std::uint64_t zeros_ = 0;
};

struct Gate {
    GateKind kind = GateKind::Identity;
    unsigned target = 0;
    ControlSet controls;

    static constexpr Gate hadamard(unsigned q) { return {GateKind::Hadamard, q, {}}; }
    static constexpr Gate identity(unsigned q) { return {GateKind::Identity, q, {}}; }
    static constexpr Gate x(unsigned q) { return {GateKind::NotGate, q, {}}; }
    static constexpr Gate reset(unsigned q) { return {GateKind::Reset, q, {}}; }

    /// Controlled NOT; with no controls this collapses to a plain NotGate.
    static constexpr Gate cnot(ControlSet controls, unsigned target) {
        if (controls.empty()) {
            return x(target);
        }
        return {GateKind::ControlledNot, target, controls};
    }

    /// NotGate or ControlledNot.
    [[nodiscard]] constexpr bool is_not() const noexcept {
        return kind == GateKind::NotGate || kind == GateKind::ControlledNot;
    }

    friend constexpr bool operator==(const Gate &, const Gate &) = default;
};

struct QubitRegister {
    unsigned coeff = 8;
    unsigned aux = 1;
    unsigned pos_x = 3;
    unsigned pos_y = 3;

    [[nodiscard]] constexpr unsigned positions() const noexcept { return pos_x + pos_y; }
    [[nodiscard]] constexpr unsigned total() const noexcept { return coeff + aux + pos_x + pos_y; }
    [[nodiscard]] constexpr bool has_aux() const noexcept { return aux == 1; }

    /// Coefficient qubits available for magnitude bits.
    [[nodiscard]] constexpr unsigned magnitude_bits() const noexcept {
        return has_aux() && coeff > 0 ? coeff - 1 : coeff;
    }
    [[nodiscard]] constexpr unsigned coeff_qubit(unsigned bit) const noexcept { return bit; }
    [[nodiscard]] constexpr unsigned sign_qubit() const noexcept { return coeff - 1; }
    [[nodiscard]] constexpr unsigned aux_qubit() const noexcept { return coeff; }
    [[nodiscard]] constexpr unsigned pos_x_qubit(unsigned bit) const noexcept { return coeff + aux + bit; }
    [[nodiscard]] constexpr unsigned pos_y_qubit(unsigned bit) const noexcept { return coeff + aux + pos_x + bit; }

    [[nodiscard]] constexpr bool is_coeff(unsigned q) const noexcept { return q < coeff; }
    [[nodiscard]] constexpr bool is_position(unsigned q) const noexcept {
        return q >= coeff + aux && q < total();
    }
    [[nodiscard]] constexpr std::uint64_t position_mask() const noexcept {
        std::uint64_t m = 0;
        for (unsigned q = coeff + aux; q < total(); ++q) {
            m |= std::uint64_t{1} << q;
        }
        return m;
    }

    /// Controls selecting position (x, y): one line per position qubit,
    /// on-one for 1 digits and on-zero for 0 digits.
    [[nodiscard]] constexpr ControlSet full_position_controls(unsigned x, unsigned y) const {
        ControlSet c;
        for (unsigned b = 0; b < pos_x; ++b) {
            c.add(pos_x_qubit(b), ((x >> b) & 1u) ? Polarity::OnOne : Polarity::OnZero);
        }
        for (unsigned b = 0; b < pos_y; ++b) {
            c.add(pos_y_qubit(b), ((y >> b) & 1u) ? Polarity::OnOne : Polarity::OnZero);
        }
        return c;
    }

    friend constexpr bool operator==(const QubitRegister &, const QubitRegister &) = default;
};

/// Metadata naming which gate span encodes which coefficient.
struct CoefficientGroup {
    std::size_t block_row = 0;
    std::size_t block_col = 0;
    unsigned x = 0;
    unsigned y = 0;
    int magnitude = 0;
    int sign = 1;
    std::size_t first = 0; ///< index of the first gate in the span
    std::size_t last = 0;  ///< index of the last gate in the span (inclusive)

    friend bool operator==(const CoefficientGroup &, const CoefficientGroup &) = default;
};

struct Circuit {
    QubitRegister reg;
    std::vector<Gate> gates;
    std::vector<CoefficientGroup> groups;

    /// Number of leading gates before the first coefficient group.
    [[nodiscard]] std::size_t preparation_size() const noexcept {
        return groups.empty() ? gates.size() : groups.front().first;
    }

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string kind;
    std::size_t index = 0; ///< gate or group index the violation refers to
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool has(std::string_view kind) const {
        for (const auto &v : violations) {
            if (v.kind == kind) {
                return true;
            }
        }
        return false;
    }
    [[nodiscard]] std::string summary() const {
        std::ostringstream os;
        for (const auto &v : violations) {
            os << v.kind << " [" << v.index << "]: " << v.detail << '\n';
        }
        return os.str();
    }
};

namespace detail {

inline bool is_trigger(const Gate &g, const QubitRegister &reg) {
    return reg.has_aux() && g.is_not() && g.target == reg.aux_qubit() &&
           (g.controls.mask() & ~reg.position_mask()) == 0;
}

inline void check_group(const Circuit &c, std::size_t gi, ValidationReport &report) {
    const CoefficientGroup &grp = c.groups[gi];
    const QubitRegister &reg = c.reg;
    auto flag = [&](std::string kind, std::string detail) {
        report.violations.push_back({std::move(kind), gi, std::move(detail)});
    };
    if (grp.magnitude < 1) {
        flag("group-magnitude", "encoded magnitude must be >= 1");
    }
    if (grp.sign != 1 && grp.sign != -1) {
        flag("group-sign", "sign must be +1 or -1");
    }
    if ((grp.x >> reg.pos_x) != 0 || (grp.y >> reg.pos_y) != 0) {
        flag("group-position", "position does not fit the position register");
    }
    if (grp.first > grp.last || grp.last >= c.gates.size()) {
        return; // reported as group-span
    }

    if (!reg.has_aux()) {
        const ControlSet controls = c.gates[grp.first].controls;
        for (std::size_t i = grp.first; i <= grp.last; ++i) {
            const Gate &g = c.gates[i];
            if (!g.is_not() || !reg.is_coeff(g.target) || g.controls != controls) {
                flag("malformed group", "direct-mapping group must hold same-control NOTs onto coefficient qubits");
                return;
            }
        }
        return;
    }

    std::size_t triggers = 0;
    std::size_t resets = 0;
    for (std::size_t i = grp.first; i <= grp.last; ++i) {
        const Gate &g = c.gates[i];
        if (is_trigger(g, reg)) {
            ++triggers;
        } else if (g.kind == GateKind::Reset) {
            if (g.target != reg.aux_qubit()) {
                flag("malformed group", "reset on a non-auxiliary qubit");
                return;
            }
            ++resets;
        } else if (!(g.kind == GateKind::ControlledNot && reg.is_coeff(g.target) &&
                     g.controls == ControlSet(std::uint64_t{1} << reg.aux_qubit(), 0)) &&
                   g.kind != GateKind::Identity) {
            flag("malformed group", "unexpected gate inside group at index " + std::to_string(i));
            return;
        }
    }
    const Gate &head = c.gates[grp.first];
    const Gate &tail = c.gates[grp.last];
    if (!is_trigger(head, reg)) {
        flag("malformed group", "group does not open with an auxiliary trigger");
        return;
    }
    const bool reset_closed = triggers == 1 && resets == 1 && tail.kind == GateKind::Reset;
    const bool toffoli_closed = triggers == 2 && resets == 0 && is_trigger(tail, reg) && tail == head;
    if (reset_closed || toffoli_closed) {
        return;
    }
    if (triggers == 1 && resets == 0) {
        flag("unterminated group", "group opens the auxiliary but never closes it");
    } else {
        flag("malformed group", "expected trigger..reset or trigger..trigger");
    }
}

} // namespace detail

/// Lists every structural problem; an empty report means well-formed.
/// A circuit without group metadata is checked at gate level only.
inline ValidationReport validate(const Circuit &c) {
    ValidationReport report;
    const QubitRegister &reg = c.reg;
    const unsigned total = reg.total();
    if (total > kMaxQubits) {
        report.violations.push_back({"register-too-wide", 0, "register exceeds " + std::to_string(kMaxQubits)});
        return report;
    }
    if (reg.aux > 1) {
        report.violations.push_back({"register", 0, "at most one auxiliary qubit"});
    }
    if (reg.has_aux() && reg.coeff < 2) {
        report.violations.push_back({"register", 0, "auxiliary layout needs a sign and a magnitude qubit"});
    }

    const std::uint64_t valid_mask = total == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total) - 1;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate &g = c.gates[i];
        if (g.target >= total || (g.controls.mask() & ~valid_mask) != 0) {
            report.violations.push_back({"index-out-of-range", i, "qubit index >= " + std::to_string(total)});
            continue;
        }
        if (g.controls.contains(g.target)) {
            report.violations.push_back({"self-control", i, "target is also a control"});
        }
        if (g.controls.conflicting()) {
            report.violations.push_back({"duplicate-control", i, "qubit listed as both control and anti-control"});
        }
        if (g.kind != GateKind::ControlledNot && !g.controls.empty()) {
            report.violations.push_back({"unexpected-controls", i, "only ControlledNot carries controls"});
        }
        if (g.kind == GateKind::ControlledNot && g.controls.empty()) {
            report.violations.push_back({"missing-controls", i, "ControlledNot without controls"});
        }
    }
    if (!report.ok() || c.groups.empty()) {
        return report;
    }

    for (std::size_t i = 0; i < c.preparation_size(); ++i) {
        const GateKind k = c.gates[i].kind;
        if (k != GateKind::Hadamard && k != GateKind::Identity) {
            report.violations.push_back({"prep-gate", i, "preparation may only hold Hadamard/Identity gates"});
        }
    }
    std::size_t expected = c.preparation_size();
    for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
        const auto &grp = c.groups[gi];
        if (grp.first != expected || grp.last < grp.first || grp.last >= c.gates.size()) {
            report.violations.push_back({"group-span", gi, "group spans must be ordered, disjoint and contiguous"});
            return report;
        }
        expected = grp.last + 1;
        detail::check_group(c, gi, report);
    }
    if (expected != c.gates.size()) {
        report.violations.push_back({"group-span", c.groups.size() - 1, "gates after the last group"});
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline std::string_view kind_name(GateKind k) {
    switch (k) {
    case GateKind::Hadamard: return "h";
    case GateKind::Identity: return "id";
    case GateKind::NotGate: return "x";
    case GateKind::ControlledNot: return "cx";
    case GateKind::Reset: return "reset";
    }
    return "?";
}

inline GateKind kind_from_name(const std::string &s) {
    if (s == "h") return GateKind::Hadamard;
    if (s == "id") return GateKind::Identity;
    if (s == "x") return GateKind::NotGate;
    if (s == "cx") return GateKind::ControlledNot;
    if (s == "reset") return GateKind::Reset;
    throw Error(ErrorCode::MalformedGroup, "unknown gate kind '" + s + "'");
}

inline nlohmann::ordered_json gate_json(const Gate &g) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(g.kind);
    j["target"] = g.target;
    auto controls = nlohmann::ordered_json::array();
    for (const Control &c : g.controls.to_vector()) {
        controls.push_back({c.qubit, c.polarity == Polarity::OnOne ? "one" : "zero"});
    }
    j["controls"] = std::move(controls);
    return j;
}

inline nlohmann::ordered_json group_json(const CoefficientGroup &g) {
    nlohmann::ordered_json j;
    j["block"] = {g.block_row, g.block_col};
    j["x"] = g.x;
    j["y"] = g.y;
    j["mag"] = g.magnitude;
    j["sign"] = g.sign;
    j["span"] = {g.first, g.last};
    return j;
}

} // namespace detail

/**
 * Canonical JSON text: fixed field order, integers only, one gate and one
 * group per line. Output is byte-stable for equal circuits.
 */
inline std::string serialize(const Circuit &c) {
    nlohmann::ordered_json reg;
    reg["coeff"] = c.reg.coeff;
    reg["aux"] = c.reg.aux;
    reg["pos_x"] = c.reg.pos_x;
    reg["pos_y"] = c.reg.pos_y;

    std::string out;
    out.reserve(64 + c.gates.size() * 48 + c.groups.size() * 64);
    out += "{\"register\":";
    out += reg.dump();
    out += ",\n\"gates\":[";
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += detail::gate_json(c.gates[i]).dump();
    }
    out += c.gates.empty() ? "]" : "\n]";
    out += ",\n\"groups\":[";
    for (std::size_t i = 0; i < c.groups.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += detail::group_json(c.groups[i]).dump();
    }
    out += c.groups.empty() ? "]" : "\n]";
    out += "}\n";
    return out;
}

/// Parses a circuit document. Any syntax or schema problem raises
/// MalformedGroup; structural checks are left to validate().
inline Circuit deserialize(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::MalformedGroup, std::string("circuit document does not parse: ") + e.what());
    }
    try {
        Circuit c;
        const auto &reg = doc.at("register");
        c.reg.coeff = reg.at("coeff").get<unsigned>();
        c.reg.aux = reg.at("aux").get<unsigned>();
        c.reg.pos_x = reg.at("pos_x").get<unsigned>();
        c.reg.pos_y = reg.at("pos_y").get<unsigned>();
        if (c.reg.total() > kMaxQubits) {
            throw Error(ErrorCode::MalformedGroup, "register wider than " + std::to_string(kMaxQubits) + " qubits");
        }
        for (const auto &jg : doc.at("gates")) {
            Gate g;
            g.kind = detail::kind_from_name(jg.at("kind").get<std::string>());
            g.target = jg.at("target").get<unsigned>();
            for (const auto &jc : jg.at("controls")) {
                const auto q = jc.at(0).get<unsigned>();
                const auto pol = jc.at(1).get<std::string>();
                if (q >= kMaxQubits) {
                    throw Error(ErrorCode::MalformedGroup, "control index out of range");
                }
                if (pol != "one" && pol != "zero") {
                    throw Error(ErrorCode::MalformedGroup, "control polarity must be 'one' or 'zero'");
                }
                const Polarity p = pol == "one" ? Polarity::OnOne : Polarity::OnZero;
                const std::uint64_t bit = std::uint64_t{1} << q;
                if (((p == Polarity::OnOne ? g.controls.ones() : g.controls.zeros()) & bit) != 0) {
                    throw Error(ErrorCode::MalformedGroup, "duplicate control on qubit " + std::to_string(q));
                }
                g.controls.add(q, p);
            }
            c.gates.push_back(g);
        }
        for (const auto &jg : doc.at("groups")) {
            CoefficientGroup g;
            g.block_row = jg.at("block").at(0).get<std::size_t>();
            g.block_col = jg.at("block").at(1).get<std::size_t>();
            g.x = jg.at("x").get<unsigned>();
            g.y = jg.at("y").get<unsigned>();
            g.magnitude = jg.at("mag").get<int>();
            g.sign = jg.at("sign").get<int>();
            g.first = jg.at("span").at(0).get<std::size_t>();
            g.last = jg.at("span").at(1).get<std::size_t>();
            c.groups.push_back(g);
        }
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::MalformedGroup, std::string("circuit document schema: ") + e.what());
    }
}

/**
 * Column layout for the common drag-and-drop circuit simulator URL format
 * ({"cols": [...]}, one column per gate, one row per qubit). Anti-controls
 * map to the hollow-circle symbol and Reset to the |0><0| post-selection
 * symbol. Identity gates are drawn as spacers.
 */
inline std::string export_visual(const Circuit &c) {
    const unsigned total = c.reg.total();
    if (total > 16) {
        throw Error(ErrorCode::TooManyQubits, "visual export supports at most 16 qubits, circuit has " +
                                                  std::to_string(total));
    }
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const Gate &g : c.gates) {
        std::vector<nlohmann::ordered_json> col(total, 1);
        for (const Control &ctl : g.controls.to_vector()) {
            col[ctl.qubit] = ctl.polarity == Polarity::OnOne ? "•" : "◦";
        }
        switch (g.kind) {
        case GateKind::Hadamard: col[g.target] = "H"; break;
        case GateKind::Identity: col[g.target] = "…"; break;
        case GateKind::NotGate:
        case GateKind::ControlledNot: col[g.target] = "X"; break;
        case GateKind::Reset: col[g.target] = "|0⟩⟨0|"; break;
        }
        cols.push_back(col);
    }
    nlohmann::ordered_json doc;
    doc["cols"] = std::move(cols);
    return doc.dump();
}

} // namespace qic
