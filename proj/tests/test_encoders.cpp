#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qic/encoders.hpp"

using namespace qic;

namespace {

BlockGrid<QuantizedBlock> grid_from(const std::vector<SparseCoefficient> &list, std::size_t rows, std::size_t cols) {
    BlockGrid<QuantizedBlock> g(rows, cols);
    for (const auto &k : list) {
        auto &b = g.at(k.block_row, k.block_col);
        b.magnitudes.at(k.x, k.y) = k.magnitude;
        b.signs.at(k.x, k.y) = static_cast<std::int8_t>(k.sign);
    }
    return g;
}

std::size_t count_kind(const Circuit &c, GateKind kind) {
    std::size_t n = 0;
    for (const auto &g : c.gates) {
        n += g.kind == kind ? 1 : 0;
    }
    return n;
}

// Hand oracle for the accounting, computed from the list alone.
GateStats expected_stats(const std::vector<SparseCoefficient> &list, Scheme scheme, std::size_t w, std::size_t h) {
    GateStats s;
    const std::size_t full = 6;
    for (const auto &k : list) {
        ++s.n_tcn;
        s.q_o += static_cast<std::size_t>(oracle::ones(static_cast<unsigned>(k.magnitude)));
        s.s_bit += k.sign < 0 ? 1 : 0;
        ++s.a_bit;
        if (scheme == Scheme::Dctefrqi) {
            s.b_t += full + full + 1;
        } else {
            s.b_t += full + 1;
            ++s.b_rg;
        }
        if (scheme == Scheme::Mtgsc) {
            s.b_z += full - static_cast<std::size_t>(oracle::ones(k.x) + oracle::ones(k.y));
        }
    }
    s.b_s0 = s.b_t + s.b_rg - s.b_z;
    s.prep_gates = 6;
    if (!list.empty()) {
        const std::size_t rows = (h + 7) / 8;
        const std::size_t cols = (w + 7) / 8;
        const auto lg = [](std::size_t n) {
            std::size_t b = 0;
            while ((std::size_t{1} << b) < std::max<std::size_t>(n, 2)) ++b;
            return b;
        };
        s.bpe = rows * cols * (lg(cols) + lg(rows));
    }
    s.total_gates = s.q_o + s.s_bit + s.b_s0 + s.a_bit + s.prep_gates + s.bpe;
    s.gates_per_pixel = static_cast<double>(s.total_gates) / static_cast<double>(w * h);
    return s;
}

template <class F> ErrorCode code_of(F &&f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected qic::Error";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Sparsify, AllZeroGridIsEmpty) {
    EXPECT_TRUE(sparsify(quantize_image(GrayImage(16, 16, 0), 8)).empty());
}

TEST(Sparsify, RasterOrderOfWorkedExample) {
    auto shuffled = oracle::scm_example();
    std::swap(shuffled[0], shuffled[4]);
    EXPECT_EQ(sparsify(grid_from(shuffled, 1, 1)), oracle::scm_example());
}

TEST(Sparsify, BlocksBeforePositions) {
    const std::vector<SparseCoefficient> list{
        {0, 0, 7, 7, 3, -1}, {0, 1, 0, 0, 9, 1}, {1, 0, 2, 0, 1, 1}, {1, 0, 1, 5, 2, -1}};
    EXPECT_EQ(sparsify(grid_from(list, 2, 2)), list);
}

TEST(Sparsify, ClampsLargeMagnitudes) {
    // Uniform 255 block at Q=1: DC = 2040.
    SparsifyStats stats;
    const auto list = sparsify(quantize_image(GrayImage(8, 8, 255), 1), &stats);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].magnitude, 255);
    EXPECT_EQ(stats.clamped, 1u);
}

TEST(RegisterFor, WidensForLargeMagnitudes) {
    EXPECT_EQ(register_for({{0, 0, 0, 0, 127, 1}}).total(), 15u);
    EXPECT_EQ(register_for({{0, 0, 0, 0, 128, 1}}).total(), 16u);
    EXPECT_EQ(register_for({}).total(), 15u);
}

TEST(BuildMtgsc, SingleCoefficientDemo) {
    const Circuit c = build_mtgsc({{0, 0, 3, 2, 62, 1}});
    ASSERT_EQ(c.groups.size(), 1u);
    EXPECT_EQ(c.preparation_size(), 6u);
    EXPECT_EQ(count_kind(c, GateKind::Hadamard), 6u);
    const Gate &trigger = c.gates[c.groups[0].first];
    EXPECT_EQ(trigger.target, c.reg.aux_qubit());
    EXPECT_EQ(trigger.controls.size(), 3u);
    EXPECT_EQ(trigger.controls.zeros(), 0u);
    EXPECT_EQ(trigger.controls.ones(),
              (1ull << c.reg.pos_x_qubit(0)) | (1ull << c.reg.pos_x_qubit(1)) | (1ull << c.reg.pos_y_qubit(1)));
    std::size_t fanout = 0;
    for (std::size_t i = c.groups[0].first + 1; i < c.groups[0].last; ++i) {
        EXPECT_EQ(c.gates[i].controls, ControlSet(1ull << c.reg.aux_qubit(), 0));
        EXPECT_NE(c.gates[i].target, c.reg.sign_qubit());
        ++fanout;
    }
    EXPECT_EQ(fanout, 5u);
    EXPECT_EQ(count_kind(c, GateKind::Reset), 1u);
    EXPECT_EQ(c.gates.back(), Gate::reset(c.reg.aux_qubit()));
    const GroupCost cost = group_cost(c, 0, Scheme::Mtgsc);
    EXPECT_EQ(cost.b_z, 3u);
}

TEST(BuildMtgsc, OriginTriggerIsUnconditional) {
    const Circuit c = build_mtgsc({{0, 0, 0, 0, 125, 1}});
    const Gate &trigger = c.gates[c.groups[0].first];
    EXPECT_EQ(trigger.kind, GateKind::NotGate);
    EXPECT_TRUE(trigger.controls.empty());
    EXPECT_EQ(trigger.target, c.reg.aux_qubit());
}

TEST(BuildMtgsc, AllOnesPositionMatchesBaseline) {
    const std::vector<SparseCoefficient> list{{0, 0, 7, 7, 99, -1}, {2, 1, 7, 7, 5, 1}};
    EXPECT_EQ(build_mtgsc(list), build_scmneqr(list));
}

TEST(BuildMtgsc, NegativeSignUsesSignQubit) {
    const Circuit c = build_mtgsc({{0, 0, 1, 1, 6, -1}});
    const auto &g = c.groups[0];
    const Gate &sign = c.gates[g.last - 1];
    EXPECT_EQ(sign.target, c.reg.sign_qubit());
    EXPECT_EQ(sign.controls, ControlSet(1ull << c.reg.aux_qubit(), 0));
}

TEST(BuildScmneqr, FullyControlledTrigger) {
    const Circuit c = build_scmneqr({{0, 0, 3, 2, 62, 1}});
    const Gate &trigger = c.gates[c.groups[0].first];
    EXPECT_EQ(trigger.controls.size(), 6u);
    EXPECT_EQ(std::popcount(trigger.controls.ones()), 3);
    EXPECT_EQ(std::popcount(trigger.controls.zeros()), 3);
}

TEST(BuildScmneqr, WorkedListHasFiveResets) {
    const Circuit c = build_scmneqr(oracle::scm_example());
    EXPECT_EQ(c.groups.size(), 5u);
    EXPECT_EQ(count_kind(c, GateKind::Reset), 5u);
}

TEST(BuildDctefrqi, ClosingTriggerReplacesReset) {
    const std::vector<SparseCoefficient> one{{0, 0, 5, 1, 77, -1}};
    const Circuit a = build_scmneqr(one);
    const Circuit b = build_dctefrqi(one);
    EXPECT_EQ(a.gates.size(), b.gates.size());
    EXPECT_EQ(count_kind(b, GateKind::Reset), 0u);
    EXPECT_EQ(b.gates[b.groups[0].last], b.gates[b.groups[0].first]);
}

TEST(BuildDctefrqi, WorkedPixelsUseTwoTriggersEach) {
    const std::vector<SparseCoefficient> list{{0, 0, 1, 0, 205, 1}, {0, 0, 0, 1, 49, 1}, {0, 0, 1, 1, 255, 1}};
    const Circuit c = build_dctefrqi(list);
    ASSERT_EQ(c.groups.size(), 3u);
    for (const auto &g : c.groups) {
        std::size_t triggers = 0;
        for (std::size_t i = g.first; i <= g.last; ++i) {
            triggers += detail::is_trigger(c.gates[i], c.reg) ? 1 : 0;
        }
        EXPECT_EQ(triggers, 2u);
    }
}

TEST(Builders, RejectInvalidCoefficients) {
    EXPECT_EQ(code_of([] { build_dctefrqi({{0, 0, 1, 1, 0, 1}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { build_mtgsc({{0, 0, 1, 1, 5, 0}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { build_mtgsc({{0, 0, 1, 1, 200, 1}}, QubitRegister{}); }), ErrorCode::RegisterTooSmall);
    EXPECT_EQ(code_of([] { build_scmneqr({{0, 0, 9, 1, 5, 1}}); }), ErrorCode::RegisterTooSmall);
    EXPECT_EQ(code_of([] { build_mtgsc({{0, 0, 1, 1, 5, 1}}, QubitRegister{8, 0, 3, 3}); }),
              ErrorCode::RegisterTooSmall);
    EXPECT_EQ(code_of([] { build(Scheme::Neqr, {}); }), ErrorCode::InvalidArgument);
}

TEST(BuildNeqr, TwoByTwoExample) {
    const Circuit c = build_neqr(GrayImage(2, 2, {0, 100, 200, 255}));
    EXPECT_EQ(c.reg.total(), 10u);
    ASSERT_EQ(c.groups.size(), 3u);
    EXPECT_EQ(c.groups[0].magnitude, 100);
    const auto &g255 = c.groups[2];
    EXPECT_EQ(g255.last - g255.first + 1, 8u);
    for (std::size_t i = g255.first; i <= g255.last; ++i) {
        EXPECT_EQ(c.gates[i].controls.size(), 2u);
        EXPECT_EQ(c.gates[i].controls.ones(), c.reg.position_mask());
    }
    EXPECT_EQ(c.gates.size(), 2u + 3 + 3 + 8);
}

TEST(BuildNeqr, EdgeCases) {
    const Circuit zero = build_neqr(GrayImage(4, 4, 0));
    EXPECT_EQ(zero.gates.size(), 4u);
    EXPECT_TRUE(zero.groups.empty());

    const Circuit one = build_neqr(GrayImage(1, 1, 1));
    ASSERT_EQ(one.gates.size(), 1u);
    EXPECT_EQ(one.gates[0], Gate::x(0));

    EXPECT_EQ(code_of([] { build_neqr(GrayImage(9, 8)); }), ErrorCode::ImageTooLarge);
    EXPECT_EQ(code_of([] { build_neqr(GrayImage(4, 4), QubitRegister{8, 0, 1, 2}); }), ErrorCode::RegisterTooSmall);
}

TEST(CountGates, WorkedListUnderResetBaseline) {
    const GateStats s = count_gates(build_scmneqr(oracle::scm_example()), 64, 64, Scheme::Scmneqr);
    EXPECT_EQ(s.b_t, 35u);
    EXPECT_EQ(s.b_rg, 5u);
    EXPECT_EQ(s.b_z, 0u);
    EXPECT_EQ(s.b_s0, 40u);
    EXPECT_EQ(s.bpe, 64u * 6u);
    EXPECT_EQ(s, expected_stats(oracle::scm_example(), Scheme::Scmneqr, 64, 64));
}

TEST(CountGates, WorkedListUnderMtgsc) {
    const GateStats s = count_gates(build_mtgsc(oracle::scm_example()), 64, 64, Scheme::Mtgsc);
    EXPECT_EQ(s.b_z, 25u);
    EXPECT_EQ(s.b_s0, 15u);
    EXPECT_EQ(s, expected_stats(oracle::scm_example(), Scheme::Mtgsc, 64, 64));
}

TEST(CountGates, WorkedListUnderDctefrqi) {
    const GateStats s = count_gates(build_dctefrqi(oracle::scm_example()), 64, 64, Scheme::Dctefrqi);
    EXPECT_EQ(s.b_t, 65u);
    EXPECT_EQ(s.b_rg, 0u);
    EXPECT_EQ(s, expected_stats(oracle::scm_example(), Scheme::Dctefrqi, 64, 64));
}

TEST(CountGates, EmptyListCountsOnlyPreparation) {
    for (Scheme k : kDctSchemes) {
        const GateStats s = count_gates(build(k, {}), 64, 64, k);
        EXPECT_EQ(s.prep_gates, 6u);
        EXPECT_EQ(s.total_gates, 6u);
        EXPECT_EQ(s.n_tcn + s.q_o + s.b_t + s.b_rg + s.b_z + s.b_s0 + s.bpe, 0u);
    }
}

TEST(CountGates, NeqrCountsControlLines) {
    const GateStats s = count_gates(build_neqr(GrayImage(2, 2, {0, 100, 200, 255})), 2, 2, Scheme::Neqr);
    EXPECT_EQ(s.n_tcn, 3u);
    EXPECT_EQ(s.q_o, 3u + 3 + 8);
    EXPECT_EQ(s.b_t, 2u * 14);
    EXPECT_EQ(s.bpe, 0u);
    EXPECT_EQ(s.prep_gates, 2u);
}

TEST(CountGates, Errors) {
    Circuit stripped = build_mtgsc(oracle::scm_example());
    stripped.groups.clear();
    EXPECT_EQ(code_of([&] { count_gates(stripped, 64, 64, Scheme::Mtgsc); }), ErrorCode::MissingGroupMetadata);
    const Circuit m = build_mtgsc(oracle::scm_example());
    EXPECT_EQ(code_of([&] { count_gates(m, 64, 64, Scheme::Dctefrqi); }), ErrorCode::SchemeMismatch);
    EXPECT_EQ(code_of([&] { count_gates(build_dctefrqi(oracle::scm_example()), 64, 64, Scheme::Mtgsc); }),
              ErrorCode::SchemeMismatch);
    EXPECT_EQ(code_of([&] { count_gates(m, 64, 64, Scheme::Scmneqr); }), ErrorCode::SchemeMismatch);
    EXPECT_EQ(code_of([&] { count_gates(m, 64, 64, Scheme::Neqr); }), ErrorCode::SchemeMismatch);
}

TEST(CountGates, RandomListsMatchOracleAndOrdering) {
    std::mt19937 rng(99);
    for (int t = 0; t < 200; ++t) {
        const auto list = oracle::random_coeffs(rng, 127);
        const std::size_t w = 32;
        const std::size_t h = 32;
        GateStats s[3];
        for (int k = 0; k < 3; ++k) {
            const Scheme scheme = kDctSchemes[static_cast<std::size_t>(k)];
            s[k] = count_gates(build(scheme, list), w, h, scheme);
            ASSERT_EQ(s[k], expected_stats(list, scheme, w, h));
            ASSERT_EQ(s[k].b_s0, s[k].b_t + s[k].b_rg - s[k].b_z);
        }
        EXPECT_EQ(s[1].b_z, 0u);
        EXPECT_EQ(s[2].b_z, 0u);
        EXPECT_LE(s[0].gates_per_pixel, s[1].gates_per_pixel);
        const bool has_zero_digit =
            std::any_of(list.begin(), list.end(), [](const auto &k) { return k.x != 7 || k.y != 7; });
        if (has_zero_digit) {
            EXPECT_LT(s[0].gates_per_pixel, s[1].gates_per_pixel);
        }
        if (!list.empty()) {
            EXPECT_LT(s[1].gates_per_pixel, s[2].gates_per_pixel);
        }
    }
}

TEST(ComplexityBound, Examples) {
    EXPECT_EQ(complexity_bound(0, 8, 8), 6u);
    EXPECT_EQ(complexity_bound(5, 8, 8), 341u);
    EXPECT_EQ(complexity_bound(1, 2, 2), 9u);
    EXPECT_EQ(code_of([] { complexity_bound(1, 6, 8); }), ErrorCode::NotPowerOfTwo);
}

TEST(ComplexityBound, DominatesBlockConnections) {
    std::mt19937 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto list = oracle::random_coeffs(rng, 255, 64);
        const Circuit c = build_mtgsc(list);
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> per_block;
        for (const auto &k : list) {
            ++per_block[{k.block_row, k.block_col}];
        }
        for (const auto &[addr, conn] : block_connections(c, Scheme::Mtgsc)) {
            EXPECT_LE(conn, complexity_bound(per_block[addr], 8, 8));
        }
    }
}

TEST(StatsCsv, RowFormat) {
    const GateStats s = count_gates(build_scmneqr(oracle::scm_example()), 64, 64, Scheme::Scmneqr);
    EXPECT_EQ(stats_csv_row(s, Scheme::Scmneqr, "demo", 8),
              "scmneqr,demo,8,5,10,0,5,35,5,0,40,384,445," + format_double(445.0 / 4096.0));
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(std::count(kStatsCsvHeader.begin(), kStatsCsvHeader.end(), ','), 13);
}

TEST(Schemes, NamesRoundTrip) {
    for (Scheme k : {Scheme::Mtgsc, Scheme::Scmneqr, Scheme::Dctefrqi, Scheme::Neqr}) {
        EXPECT_EQ(parse_scheme(to_string(k)), k);
    }
    EXPECT_FALSE(parse_scheme("frqi").has_value());
}
