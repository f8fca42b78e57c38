#pragma once

/**
 * @file
 * Exact statevector simulation for circuit-ir circuits of up to 20 qubits.
 *
 * Two engines share the gate semantics:
 *  - StateVector / run(): dense amplitudes. Reset must act on a qubit that is
 *    classical (probability of |1> exactly 0 or 1) unless sampling is
 *    explicitly requested.
 *  - Mixture / run_mixed(): an ensemble of unnormalized sparse branches.
 *    A Reset on a superposed qubit splits every branch into its |0> and |1>
 *    parts and returns the latter to |0>, which reproduces the exact
 *    measurement statistics of the non-unitary circuit.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "qic/circuit.hpp"
#include "qic/error.hpp"

namespace qic {

using Amplitude = std::complex<double>;

inline constexpr unsigned kMaxSimQubits = 20;

/// Probability below which a Reset treats a qubit as classical.
inline constexpr double kClassicalTolerance = 1e-12;

class StateVector {
  public:
    explicit StateVector(unsigned num_qubits, std::uint64_t basis = 0) : num_qubits_(num_qubits) {
        if (num_qubits > kMaxSimQubits) {
            throw Error(ErrorCode::TooManyQubits, std::to_string(num_qubits) + " qubits exceeds the simulator limit of " +
                                                      std::to_string(kMaxSimQubits));
        }
        amps_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
        if (basis >= amps_.size()) {
            throw Error(ErrorCode::InvalidArgument, "initial basis state out of range");
        }
        amps_[basis] = 1.0;
    }

    [[nodiscard]] unsigned num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<Amplitude> &amplitudes() const noexcept { return amps_; }
    [[nodiscard]] Amplitude operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    [[nodiscard]] double probability_one(unsigned q) const {
        const std::uint64_t bit = std::uint64_t{1} << q;
        double p = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) != 0) {
                p += std::norm(amps_[i]);
            }
        }
        return p;
    }

    void apply_hadamard(unsigned q) {
        const std::size_t bit = std::size_t{1} << q;
        const double r = std::numbers::sqrt2 / 2.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0) {
                const Amplitude a0 = amps_[i];
                const Amplitude a1 = amps_[i | bit];
                amps_[i] = r * (a0 + a1);
                amps_[i | bit] = r * (a0 - a1);
            }
        }
    }

    /// Multi-controlled NOT; an empty control set is a plain NOT.
    void apply_not(const ControlSet &controls, unsigned target) {
        const std::size_t bit = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0 && controls.satisfied_by(i)) {
                std::swap(amps_[i], amps_[i | bit]);
            }
        }
    }

    /// Returns qubit `q` to |0>. With `rng` null the qubit must be classical;
    /// otherwise the outcome is sampled with Born probabilities.
    void apply_reset(unsigned q, std::mt19937_64 *rng = nullptr) {
        const double p1 = probability_one(q);
        bool outcome_one;
        if (p1 <= kClassicalTolerance) {
            outcome_one = false;
        } else if (p1 >= 1.0 - kClassicalTolerance) {
            outcome_one = true;
        } else if (rng == nullptr) {
            throw Error(ErrorCode::NondeterministicReset,
                        "reset of qubit " + std::to_string(q) + " with P(1) = " + std::to_string(p1));
        } else {
            outcome_one = std::generate_canonical<double, 53>(*rng) < p1;
        }
        const std::size_t bit = std::size_t{1} << q;
        const double keep = outcome_one ? p1 : 1.0 - p1;
        const double scale = keep > 0.0 ? 1.0 / std::sqrt(keep) : 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0) {
                const Amplitude kept = outcome_one ? amps_[i | bit] : amps_[i];
                amps_[i] = kept * scale;
                amps_[i | bit] = 0.0;
            }
        }
    }

  private:
    unsigned num_qubits_;
    std::vector<Amplitude> amps_;
};

struct RunOptions {
    std::uint64_t initial_basis = 0;
    /// Sample non-classical resets instead of raising NondeterministicReset.
    bool sample_resets = false;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_runnable(const Circuit &c) {
    if (c.reg.total() > kMaxSimQubits) {
        throw Error(ErrorCode::TooManyQubits, std::to_string(c.reg.total()) + " qubits exceeds the simulator limit of " +
                                                  std::to_string(kMaxSimQubits));
    }
    const ValidationReport report = validate(c);
    if (!report.ok()) {
        throw Error(ErrorCode::InvalidCircuit, report.summary());
    }
}

} // namespace detail

inline StateVector run(const Circuit &c, const RunOptions &opts = {}) {
    detail::check_runnable(c);
    StateVector sv(c.reg.total(), opts.initial_basis);
    std::mt19937_64 rng(opts.seed);
    for (const Gate &g : c.gates) {
        switch (g.kind) {
        case GateKind::Hadamard: sv.apply_hadamard(g.target); break;
        case GateKind::Identity: break;
        case GateKind::NotGate:
        case GateKind::ControlledNot: sv.apply_not(g.controls, g.target); break;
        case GateKind::Reset: sv.apply_reset(g.target, opts.sample_resets ? &rng : nullptr); break;
        }
    }
    return sv;
}

// ---------------------------------------------------------------------------
// Mixtures

/// One unnormalized pure branch; its squared norm is its probability.
struct Branch {
    std::unordered_map<std::uint64_t, Amplitude> amps;

    [[nodiscard]] double weight() const noexcept {
        double s = 0.0;
        for (const auto &[i, a] : amps) {
            s += std::norm(a);
        }
        return s;
    }
};

struct Mixture {
    unsigned num_qubits = 0;
    std::vector<Branch> branches;
    std::size_t branching_resets = 0; ///< resets that acted on a superposed qubit

    [[nodiscard]] double total_weight() const noexcept {
        double s = 0.0;
        for (const auto &b : branches) {
            s += b.weight();
        }
        return s;
    }
    [[nodiscard]] bool pure() const noexcept { return branches.size() == 1; }
};

namespace detail {

inline constexpr double kPruneNorm = 1e-30;

inline void mixture_hadamard(Branch &b, unsigned q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    const double r = std::numbers::sqrt2 / 2.0;
    std::unordered_map<std::uint64_t, Amplitude> out;
    out.reserve(b.amps.size() * 2);
    for (const auto &[i, a] : b.amps) {
        out[i & ~bit] += r * a;
        out[i | bit] += (i & bit) != 0 ? -r * a : r * a;
    }
    std::erase_if(out, [](const auto &kv) { return std::norm(kv.second) < kPruneNorm; });
    b.amps = std::move(out);
}

inline void mixture_not(Branch &b, const ControlSet &controls, unsigned target) {
    const std::uint64_t bit = std::uint64_t{1} << target;
    std::unordered_map<std::uint64_t, Amplitude> out;
    out.reserve(b.amps.size());
    for (const auto &[i, a] : b.amps) {
        out[controls.satisfied_by(i) ? (i ^ bit) : i] += a;
    }
    b.amps = std::move(out);
}

} // namespace detail

/// Exact ensemble simulation; never raises NondeterministicReset.
inline Mixture run_mixed(const Circuit &c, std::uint64_t initial_basis = 0) {
    detail::check_runnable(c);
    Mixture m;
    m.num_qubits = c.reg.total();
    if (initial_basis >> m.num_qubits != 0) {
        throw Error(ErrorCode::InvalidArgument, "initial basis state out of range");
    }
    m.branches.emplace_back();
    m.branches.back().amps[initial_basis] = 1.0;

    for (const Gate &g : c.gates) {
        switch (g.kind) {
        case GateKind::Identity: break;
        case GateKind::Hadamard:
            for (auto &b : m.branches) {
                detail::mixture_hadamard(b, g.target);
            }
            break;
        case GateKind::NotGate:
        case GateKind::ControlledNot:
            for (auto &b : m.branches) {
                detail::mixture_not(b, g.controls, g.target);
            }
            break;
        case GateKind::Reset: {
            const std::uint64_t bit = std::uint64_t{1} << g.target;
            std::vector<Branch> next;
            next.reserve(m.branches.size() * 2);
            bool split = false;
            for (auto &b : m.branches) {
                Branch zero;
                Branch one;
                for (const auto &[i, a] : b.amps) {
                    if ((i & bit) != 0) {
                        one.amps[i & ~bit] += a;
                    } else {
                        zero.amps[i] += a;
                    }
                }
                const double w0 = zero.weight();
                const double w1 = one.weight();
                const double w = w0 + w1;
                if (w1 <= kClassicalTolerance * w) {
                    next.push_back(std::move(zero));
                } else if (w0 <= kClassicalTolerance * w) {
                    next.push_back(std::move(one));
                } else {
                    split = true;
                    next.push_back(std::move(zero));
                    next.push_back(std::move(one));
                }
            }
            m.branches = std::move(next);
            if (split) {
                ++m.branching_resets;
            }
            break;
        }
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Measurement

/// Exact marginal over a qubit subset: bit k of each key is the value of
/// qubit subset[k].
struct Distribution {
    std::map<std::uint64_t, double> probabilities;

    [[nodiscard]] double at(std::uint64_t key) const {
        const auto it = probabilities.find(key);
        return it == probabilities.end() ? 0.0 : it->second;
    }
    [[nodiscard]] double sum() const noexcept {
        double s = 0.0;
        for (const auto &[k, p] : probabilities) {
            s += p;
        }
        return s;
    }
};

namespace detail {

inline void check_subset(const std::vector<unsigned> &subset, unsigned num_qubits) {
    std::uint64_t seen = 0;
    for (unsigned q : subset) {
        if (q >= num_qubits || ((seen >> q) & 1u) != 0) {
            throw Error(ErrorCode::InvalidArgument, "measurement subset must list distinct valid qubits");
        }
        seen |= std::uint64_t{1} << q;
    }
}

inline std::uint64_t project(std::uint64_t basis, const std::vector<unsigned> &subset) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        key |= ((basis >> subset[k]) & 1u) << k;
    }
    return key;
}

} // namespace detail

inline Distribution measure_distribution(const StateVector &state, const std::vector<unsigned> &subset) {
    detail::check_subset(subset, state.num_qubits());
    Distribution d;
    const auto &amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p > 0.0) {
            d.probabilities[detail::project(i, subset)] += p;
        }
    }
    return d;
}

inline Distribution measure_distribution(const Mixture &m, const std::vector<unsigned> &subset) {
    detail::check_subset(subset, m.num_qubits);
    Distribution d;
    for (const auto &b : m.branches) {
        for (const auto &[i, a] : b.amps) {
            const double p = std::norm(a);
            if (p > 0.0) {
                d.probabilities[detail::project(i, subset)] += p;
            }
        }
    }
    return d;
}

inline std::vector<unsigned> all_qubits(unsigned n) {
    std::vector<unsigned> v(n);
    for (unsigned i = 0; i < n; ++i) {
        v[i] = i;
    }
    return v;
}

inline double total_variation(const Distribution &a, const Distribution &b) {
    double tv = 0.0;
    auto ia = a.probabilities.begin();
    auto ib = b.probabilities.begin();
    while (ia != a.probabilities.end() || ib != b.probabilities.end()) {
        if (ib == b.probabilities.end() || (ia != a.probabilities.end() && ia->first < ib->first)) {
            tv += ia->second;
            ++ia;
        } else if (ia == a.probabilities.end() || ib->first < ia->first) {
            tv += ib->second;
            ++ib;
        } else {
            tv += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * tv;
}

// ---------------------------------------------------------------------------
// Equivalence

inline constexpr double kEquivalenceTolerance = 1e-9;

struct EquivalenceReport {
    double tv_distance = 0.0;
    /// Largest complex amplitude difference when both runs stay pure;
    /// otherwise the largest |sqrt(p_a) - sqrt(p_b)| over full basis states.
    double max_amp_dev = 0.0;
    bool equivalent = true;
    std::vector<unsigned> subset;
};

inline EquivalenceReport compare_circuits(const Circuit &a, const Circuit &b, const std::vector<unsigned> &subset) {
    if (!(a.reg == b.reg)) {
        throw Error(ErrorCode::RegisterMismatch, "circuits act on different registers");
    }
    const Mixture ma = run_mixed(a);
    const Mixture mb = run_mixed(b);

    EquivalenceReport r;
    r.subset = subset;
    r.tv_distance = total_variation(measure_distribution(ma, subset), measure_distribution(mb, subset));

    if (ma.pure() && mb.pure()) {
        const auto &pa = ma.branches.front().amps;
        const auto &pb = mb.branches.front().amps;
        for (const auto &[i, amp] : pa) {
            const auto it = pb.find(i);
            r.max_amp_dev = std::max(r.max_amp_dev, std::abs(amp - (it == pb.end() ? Amplitude{} : it->second)));
        }
        for (const auto &[i, amp] : pb) {
            if (!pa.contains(i)) {
                r.max_amp_dev = std::max(r.max_amp_dev, std::abs(amp));
            }
        }
    } else {
        const auto full = all_qubits(a.reg.total());
        const Distribution da = measure_distribution(ma, full);
        const Distribution db = measure_distribution(mb, full);
        for (const auto &[k, p] : da.probabilities) {
            r.max_amp_dev = std::max(r.max_amp_dev, std::abs(std::sqrt(p) - std::sqrt(db.at(k))));
        }
        for (const auto &[k, p] : db.probabilities) {
            if (!da.probabilities.contains(k)) {
                r.max_amp_dev = std::max(r.max_amp_dev, std::sqrt(p));
            }
        }
    }
    r.equivalent = r.tv_distance <= kEquivalenceTolerance;
    return r;
}

inline nlohmann::ordered_json to_json(const EquivalenceReport &r) {
    nlohmann::ordered_json j;
    j["tv_distance"] = r.tv_distance;
    j["max_amp_dev"] = r.max_amp_dev;
    j["equivalent"] = r.equivalent;
    j["subset"] = r.subset;
    return j;
}

/// Copy of `c` with the leading preparation gates removed and group spans
/// shifted to match. Used to drive encode circuits with classical positions.
inline Circuit without_preparation(const Circuit &c) {
    const std::size_t prep = c.preparation_size();
    Circuit out;
    out.reg = c.reg;
    out.gates.assign(c.gates.begin() + static_cast<std::ptrdiff_t>(prep), c.gates.end());
    out.groups = c.groups;
    for (auto &g : out.groups) {
        g.first -= prep;
        g.last -= prep;
    }
    return out;
}

/// Basis index with the position register holding (x, y) and all else |0>.
inline std::uint64_t position_basis(const QubitRegister &reg, unsigned x, unsigned y) {
    std::uint64_t idx = 0;
    for (unsigned b = 0; b < reg.pos_x; ++b) {
        idx |= std::uint64_t{(x >> b) & 1u} << reg.pos_x_qubit(b);
    }
    for (unsigned b = 0; b < reg.pos_y; ++b) {
        idx |= std::uint64_t{(y >> b) & 1u} << reg.pos_y_qubit(b);
    }
    return idx;
}

} // namespace qic
