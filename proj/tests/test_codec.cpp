#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qic/codec.hpp"

using namespace qic;

namespace {

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

TEST(Decode, WorkedListRoundTripsUnderEveryScheme) {
    for (Scheme k : kDctSchemes) {
        EXPECT_EQ(decode_circuit(build(k, oracle::scm_example())), oracle::scm_example()) << to_string(k);
        const Circuit deer = build(k, oracle::deer_example());
        EXPECT_EQ(deer.reg.total(), 16u);
        EXPECT_EQ(decode_circuit(deer), oracle::deer_example()) << to_string(k);
        EXPECT_TRUE(metadata_agrees(deer));
    }
}

TEST(Decode, NegativeSignsSurvive) {
    const std::vector<SparseCoefficient> list{{0, 0, 0, 0, 3, -1}, {1, 2, 5, 6, 127, -1}, {1, 2, 7, 7, 1, 1}};
    for (Scheme k : kDctSchemes) {
        EXPECT_EQ(decode_circuit(build(k, list)), list);
    }
}

TEST(Decode, NeqrPixels) {
    const Circuit c = build_neqr(GrayImage(2, 2, {0, 100, 200, 255}));
    const auto got = decode_circuit(c);
    ASSERT_EQ(got.size(), 3u);
    EXPECT_EQ(got[0].magnitude, 100);
    EXPECT_EQ(got[0].x, 1u);
    EXPECT_EQ(got[2].magnitude, 255);
    EXPECT_EQ(got[2].y, 1u);
}

TEST(Decode, EmptyCircuit) {
    EXPECT_TRUE(decode_circuit(build_mtgsc({})).empty());
}

TEST(Decode, MissingResetIsMalformed) {
    Circuit c = build_mtgsc(oracle::scm_example());
    c.gates.erase(c.gates.begin() + static_cast<std::ptrdiff_t>(c.groups[1].last));
    EXPECT_EQ(code_of([&] { decode_circuit(c); }), ErrorCode::MalformedGroup);

    Circuit d = build_dctefrqi(oracle::scm_example());
    d.gates.pop_back();
    EXPECT_EQ(code_of([&] { decode_circuit(d); }), ErrorCode::MalformedGroup);
}

TEST(Decode, MetadataCountMustMatch) {
    Circuit c = build_scmneqr(oracle::scm_example());
    c.groups.pop_back();
    EXPECT_EQ(code_of([&] { decode_circuit(c); }), ErrorCode::MalformedGroup);
}

TEST(Decode, MetadataDisagreementIsReported) {
    Circuit c = build_scmneqr(oracle::scm_example());
    EXPECT_TRUE(metadata_agrees(c));
    c.groups[2].magnitude = 9;
    EXPECT_FALSE(metadata_agrees(c));
}

TEST(Reconstruct, EmptyListIsBlack) {
    EXPECT_EQ(reconstruct({}, 16, 8, 8), GrayImage(16, 8, 0));
}

TEST(Reconstruct, DcOnlyFillsOneBlock) {
    const GrayImage img = reconstruct({{0, 1, 0, 0, 128, 1}}, 16, 8, 8);
    for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 16; ++x) {
            EXPECT_EQ(img.at(x, y), x >= 8 ? 128 : 0);
        }
    }
}

TEST(Reconstruct, CropsToRequestedSize) {
    const GrayImage img = reconstruct({{1, 1, 0, 0, 128, 1}}, 10, 10, 8);
    EXPECT_EQ(img.width(), 10u);
    EXPECT_EQ(img.at(9, 9), 128);
    EXPECT_EQ(img.at(7, 7), 0);
}

TEST(Reconstruct, Errors) {
    EXPECT_EQ(code_of([] { reconstruct({{1, 0, 0, 0, 1, 1}}, 8, 8, 8); }), ErrorCode::CoefficientOutOfBounds);
    EXPECT_EQ(code_of([] { reconstruct({}, 8, 8, 0); }), ErrorCode::QOutOfRange);
}

TEST(Psnr, Examples) {
    const GrayImage a(4, 4, 10);
    const auto same = psnr(a, a);
    EXPECT_EQ(same.mse, 0.0);
    EXPECT_TRUE(std::isinf(same.psnr));

    const auto worst = psnr(GrayImage(2, 2, 0), GrayImage(2, 2, 255));
    EXPECT_DOUBLE_EQ(worst.mse, 255.0 * 255.0);
    EXPECT_NEAR(worst.psnr, 0.0, 1e-12);

    // One pixel off by 1 in 4: mse 0.25.
    const auto one = psnr(GrayImage(2, 2, {1, 2, 3, 4}), GrayImage(2, 2, {1, 2, 3, 5}));
    EXPECT_DOUBLE_EQ(one.mse, 0.25);
    EXPECT_NEAR(one.psnr, 10.0 * std::log10(65025.0 / 0.25), 1e-12);

    EXPECT_EQ(code_of([] { psnr(GrayImage(2, 2), GrayImage(2, 3)); }), ErrorCode::DimensionMismatch);
}

TEST(Codec, ReconstructionIndependentOfScheme) {
    std::mt19937 rng(1234);
    for (int t = 0; t < 50; ++t) {
        const auto list = oracle::random_coeffs(rng, 255, 30);
        GrayImage first(1, 1);
        for (Scheme k : kDctSchemes) {
            const GrayImage img = reconstruct(decode_circuit(build(k, list)), 32, 32, 16);
            if (k == Scheme::Mtgsc) {
                first = img;
            } else {
                ASSERT_EQ(img, first) << to_string(k);
            }
        }
        // Decoding by hand: listed coefficients straight into the grid.
        EXPECT_EQ(first, reconstruct(list, 32, 32, 16));
    }
}
