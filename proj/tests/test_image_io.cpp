#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rht/image_io.hpp"

using namespace rht;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::string field_of(const std::vector<std::uint8_t>& b) {
    try {
        parse_raster(b);
    } catch (const ParseError& e) {
        return e.field();
    }
    return "<no error>";
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("rht_test_" + name);
}

} // namespace

TEST(Pgm, AsciiWithComments) {
    const Raster r = parse_raster(bytes("P2\n# comment\n2 2 # inline\n255\n0 10\n200 255\n"));
    EXPECT_EQ(r.format, RasterFormat::PgmAscii);
    EXPECT_EQ(r.width, 2u);
    EXPECT_EQ(r.pixels, (std::vector<double>{0, 10, 200, 255}));
}

TEST(Pgm, Binary) {
    std::vector<std::uint8_t> b = bytes("P5 3 1 100\n");
    b.insert(b.end(), {0, 50, 100});
    const Raster r = parse_raster(b);
    EXPECT_EQ(r.format, RasterFormat::PgmBinary);
    EXPECT_EQ(r.height, 1u);
    EXPECT_EQ(r.maxval, 100u);
    EXPECT_EQ(r.pixels, (std::vector<double>{0, 50, 100}));
}

TEST(Pgm, MalformedNamesField) {
    EXPECT_EQ(field_of(bytes("P5\n")), "width");
    EXPECT_EQ(field_of(bytes("P5\nx 2 255\n")), "width");
    EXPECT_EQ(field_of(bytes("P5\n2\n")), "height");
    EXPECT_EQ(field_of(bytes("P5\n2 0 255\n")), "height");
    EXPECT_EQ(field_of(bytes("P5\n2 2\n")), "maxval");
    EXPECT_EQ(field_of(bytes("P5\n2 2 65535\n")), "maxval");
    EXPECT_EQ(field_of(bytes("P5\n2 2 255\n\x01\x02")), "pixel data");
    EXPECT_EQ(field_of(bytes("P2\n2 2 9\n1 2 3\n")), "pixel data");
    EXPECT_EQ(field_of(bytes("P2\n1 1 9\n10\n")), "pixel data");
    EXPECT_EQ(field_of(bytes("P2\n1 1 9\nz\n")), "pixel data");
    EXPECT_EQ(field_of(bytes("P6\n1 1 255\n")), "magic");
    EXPECT_EQ(field_of(bytes("P")), "magic");
}

TEST(Pgm, RoundTripBinaryAndAscii) {
    GrayImage img(3, std::vector<double>{0, 1, 2, 3, 4, 5, 253, 254, 255});
    for (PgmEncoding e : {PgmEncoding::Binary, PgmEncoding::Ascii}) {
        const GrayImage back = to_gray_image(parse_raster(encode_pgm(img, true, e)));
        EXPECT_EQ(back, img);
    }
}

TEST(Pgm, QuantizeAndRescale) {
    GrayImage img(2, std::vector<double>{-10, 0.5, 127.49, 300});
    EXPECT_EQ(to_bytes(img, true), (std::vector<std::uint8_t>{0, 1, 127, 255}));
    GrayImage lin(2, std::vector<double>{-1, 0, 1, 3});
    EXPECT_EQ(to_bytes(lin, false), (std::vector<std::uint8_t>{0, 64, 128, 255}));
    EXPECT_EQ(to_bytes(GrayImage(2, 7.0), false), (std::vector<std::uint8_t>{0, 0, 0, 0}));
}

TEST(Pgm, GoldenHeader) {
    const auto b = encode_pgm(GrayImage(2, std::vector<double>{1, 2, 3, 4}), true, PgmEncoding::Ascii);
    EXPECT_EQ(std::string(b.begin(), b.end()), "P2\n2 2\n255\n1 2\n3 4\n");
}

TEST(Bmp, RoundTripNonMultipleOfFourWidth) {
    std::vector<double> v(25);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i * 10);
    const GrayImage img(5, v);
    const Raster r = parse_raster(encode_bmp8(img));
    EXPECT_EQ(r.format, RasterFormat::Bmp8);
    EXPECT_EQ(to_gray_image(r), img);
}

TEST(Bmp, TopDownStorage) {
    auto b = encode_bmp8(GrayImage(2, std::vector<double>{1, 2, 3, 4}));
    // Flip the sign of height: same bytes now read top-down.
    const std::int32_t h = -2;
    for (int i = 0; i < 4; ++i) b[22 + i] = static_cast<std::uint8_t>(static_cast<std::uint32_t>(h) >> (8 * i));
    EXPECT_EQ(parse_raster(b).pixels, (std::vector<double>{3, 4, 1, 2}));
}

TEST(Bmp, MalformedNamesField) {
    const auto good = encode_bmp8(GrayImage(2, std::vector<double>{1, 2, 3, 4}));
    auto mutate = [&](std::size_t at, std::uint8_t v) {
        auto b = good;
        b[at] = v;
        return field_of(b);
    };
    EXPECT_EQ(field_of(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)), "file header");
    EXPECT_EQ(mutate(14, 12), "header size");
    EXPECT_EQ(field_of(std::vector<std::uint8_t>(good.begin(), good.begin() + 30)), "info header");
    EXPECT_EQ(mutate(21, 0x80), "width");
    EXPECT_EQ(mutate(26, 2), "planes");
    EXPECT_EQ(mutate(28, 24), "bits per pixel");
    EXPECT_EQ(mutate(30, 1), "compression");
    EXPECT_EQ(mutate(54 + 4 * 7, 99), "palette");
    EXPECT_EQ(field_of(std::vector<std::uint8_t>(good.begin(), good.end() - 1)), "pixel data");
    auto zero_h = good;
    for (int i = 0; i < 4; ++i) zero_h[22 + i] = 0;
    EXPECT_EQ(field_of(zero_h), "height");
}

TEST(Raster, NonSquareRejected) {
    const Raster r = parse_raster(bytes("P2 3 2 255 1 2 3 4 5 6"));
    EXPECT_THROW(to_gray_image(r), DimensionError);
}

TEST(Files, SaveLoadAndMissing) {
    const auto p = temp_path("img.pgm");
    const GrayImage img(4, 17.0);
    save_pgm(img, p.string(), true);
    EXPECT_EQ(load_gray(p.string()), img);
    std::filesystem::remove(p);
    EXPECT_THROW(load_gray(p.string()), IoError);
    EXPECT_THROW(save_pgm(img, "/nonexistent_dir_rht/x.pgm", true), IoError);
}

TEST(Csv, GoldenOutput) {
    NormCurve c;
    c.push_back({2, 0.0, std::nullopt});
    c.push_back({3, 2.0 / 9, std::nullopt});
    c.push_back({1024, 0.0110950123456789, std::nullopt});
    EXPECT_EQ(format_csv(c), "n,mu\n2,0\n3,0.222222222222\n1024,0.0110950123457\n");
}

TEST(Csv, RoundTripAndErrors) {
    const NormCurve c = norm_curve(2, 40);
    const NormCurve back = parse_csv(format_csv(c));
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back[i].n, c[i].n);
        // 12 significant digits: relative error at most 5e-12.
        EXPECT_NEAR(back[i].mu, c[i].mu, 5e-12 * c[i].mu);
    }
    const auto p = temp_path("curve.csv");
    write_csv(c, p.string());
    EXPECT_EQ(read_csv(p.string()).size(), c.size());
    std::filesystem::remove(p);

    EXPECT_THROW(parse_csv(""), ParseError);
    EXPECT_THROW(parse_csv("x,y\n"), ParseError);
    EXPECT_THROW(parse_csv("n,mu\n3\n"), ParseError);
    EXPECT_THROW(parse_csv("n,mu\n3,abc\n"), ParseError);
    EXPECT_THROW(parse_csv("n,mu\n3,0.1\n3,0.2\n"), ParseError);
    EXPECT_EQ(parse_csv("n,mu\r\n5,0.5\r\n").size(), 1u);
}
