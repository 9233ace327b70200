#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rht/exact_inverse.hpp"
#include "rht/transform2d.hpp"

using namespace rht;

namespace {

GrayImage random_gray(std::size_t n, std::mt19937_64& rng) { return GrayImage(n, oracle::random_image(n, rng)); }

double max_diff(std::span<const double> a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(Flips, KeepFirstRowAndColumn) {
    GrayImage a(3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    EXPECT_EQ(flip_cols(a), GrayImage(3, std::vector<double>{1, 3, 2, 4, 6, 5, 7, 9, 8}));
    EXPECT_EQ(flip_rows(a), GrayImage(3, std::vector<double>{1, 2, 3, 7, 8, 9, 4, 5, 6}));
    EXPECT_EQ(flip_both(a), GrayImage(3, std::vector<double>{1, 3, 2, 7, 9, 8, 4, 6, 5}));
}

TEST(Flips, CombinationIsInvolution) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1u, 2u, 5u, 8u, 11u}) {
        const GrayImage a = random_gray(n, rng);
        EXPECT_LT(max_abs_difference(combine_flips(combine_flips(a)), a), 1e-12);
    }
}

TEST(Forward2d, MatchesProgramOneOracle) {
    std::mt19937_64 rng(41);
    for (std::size_t n = 1; n <= 64; n += (n < 16 ? 1 : 7)) {
        const std::vector<double> raw = oracle::random_image(n, rng);
        const oracle::Program1 ref = oracle::twodrht(raw, n);
        const GrayImage a(n, raw);
        const CoefficientGrid b = forward_2d(a);
        const GrayImage aa = weak_inverse_2d(b);
        EXPECT_LE(max_diff(b.values(), ref.B), 1e-9) << n;
        EXPECT_LE(max_diff(aa.values(), ref.AA), 1e-9) << n;
        const double p = psnr(a, aa);
        if (std::isinf(ref.PSNR))
            EXPECT_TRUE(std::isinf(p));
        else
            EXPECT_NEAR(p, ref.PSNR, 1e-9) << n;
    }
}

TEST(Forward2d, IntegerImagesGiveIntegerTemp) {
    std::mt19937_64 rng(6);
    const GrayImage a = random_gray(20, rng);
    const CoefficientGrid t = temp_matrix(a);
    for (double x : t.values()) EXPECT_EQ(x, std::round(x));
}

TEST(Forward2d, Linearity) {
    std::mt19937_64 rng(9);
    const std::size_t n = 24;
    const GrayImage a = random_gray(n, rng);
    const GrayImage b = random_gray(n, rng);
    std::vector<double> mix(n * n);
    for (std::size_t i = 0; i < n * n; ++i) mix[i] = 2 * a.values()[i] - 3 * b.values()[i];
    const CoefficientGrid fa = forward_2d(a), fb = forward_2d(b), fm = forward_2d(GrayImage(n, mix));
    for (std::size_t i = 0; i < n * n; ++i) EXPECT_NEAR(fm.values()[i], 2 * fa.values()[i] - 3 * fb.values()[i], 1e-9);
}

TEST(RoundTrip, ExactForDegenerateOrders) {
    std::mt19937_64 rng(10);
    for (std::size_t n : {1u, 2u, 4u}) {
        const RoundTrip r = roundtrip_report(random_gray(n, rng));
        EXPECT_TRUE(r.exact()) << n;
    }
}

TEST(RoundTrip, LossyOtherwise) {
    std::mt19937_64 rng(13);
    for (std::size_t n : {3u, 8u, 16u, 64u}) {
        const RoundTrip r = roundtrip_report(random_gray(n, rng));
        EXPECT_FALSE(r.exact()) << n;
        EXPECT_GT(r.psnr_db, 0.0);
    }
}

TEST(RoundTrip, PsnrTransposeInvariant) {
    std::mt19937_64 rng(14);
    for (std::size_t n : {5u, 16u, 32u}) {
        const GrayImage a = random_gray(n, rng);
        EXPECT_NEAR(roundtrip_report(a).psnr_db, roundtrip_report(a.transposed()).psnr_db, 1e-9) << n;
    }
}

TEST(ExactInverse2d, Reconstructs) {
    std::mt19937_64 rng(15);
    for (std::size_t n : {3u, 6u, 16u, 30u}) {
        const auto inv = exact_inverse(n);
        ASSERT_TRUE(inv.has_value()) << n;
        const GrayImage a = random_gray(n, rng);
        const GrayImage back = exact_inverse_2d(forward_2d(a), inv->to_real());
        EXPECT_LT(max_abs_difference(back, a), 1e-8) << n;
    }
}

TEST(Psnr, Values) {
    const GrayImage a(2, std::vector<double>{0, 0, 0, 0});
    EXPECT_TRUE(std::isinf(psnr(a, a)));
    const GrayImage b(2, std::vector<double>{255, 255, 255, 255});
    EXPECT_NEAR(psnr(a, b), 0.0, 1e-12);
    const GrayImage c(2, std::vector<double>{25.5, 25.5, 25.5, 25.5});
    EXPECT_NEAR(psnr(a, c), 20.0, 1e-12);
    EXPECT_THROW(psnr(a, GrayImage(3)), DimensionError);
}

TEST(Forward2d, OrderMismatch) {
    EXPECT_THROW(forward_2d(GrayImage(4), build_rht_matrix(5)), DimensionError);
}
