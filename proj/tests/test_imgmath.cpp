#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oriole/dssim.hpp"
#include "oriole/image.hpp"
#include "oriole/ref/reference.hpp"
#include "oriole/rng.hpp"

using namespace oriole;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = rng.uniform(i);
    return Image::from_pixels(w, h, std::move(px));
}

double fd_dssim(const Image& a, const Image& b, const DssimConfig& cfg, int p, double h) {
    Image lo = b, hi = b;
    lo.pixels()[static_cast<std::size_t>(p)] -= h;
    hi.pixels()[static_cast<std::size_t>(p)] += h;
    return (dssim(a, hi, cfg) - dssim(a, lo, cfg)) / (2.0 * h);
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-6});
}

}  // namespace

TEST_CASE("apply_perturbation: zero delta is the identity") {
    Image x = random_image(8, 8, 11);
    Perturbation zero(8, 8);
    CHECK(apply_perturbation(x, zero) == x);
}

TEST_CASE("apply_perturbation clamps at the pixel ceiling") {
    Image x(4, 4, 0.9);
    Perturbation d(4, 4);
    for (double& v : d.delta) v = 0.5;
    Image y = apply_perturbation(x, d);
    for (double v : y.pixels()) CHECK(v == 1.0);
}

TEST_CASE("apply_perturbation: checkerboard offsets evaluate per pixel") {
    Image x(6, 6, 0.5);
    Perturbation d(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) d.at(r, c) = ((r + c) % 2 == 0) ? 0.1 : -0.1;
    Image y = apply_perturbation(x, d);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            CHECK(y.at(r, c) == doctest::Approx(((r + c) % 2 == 0) ? 0.6 : 0.4).epsilon(1e-15));
}

TEST_CASE("apply_perturbation output stays in [0,1] for random offsets") {
    CounterRng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        Image x = random_image(8, 8, 100 + trial);
        Perturbation d(8, 8);
        for (std::size_t i = 0; i < d.delta.size(); ++i)
            d.delta[i] = rng.uniform(trial * 64 + i, -2.0, 2.0);
        Image y = apply_perturbation(x, d);
        for (double v : y.pixels()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("apply_perturbation rejects mismatched shapes") {
    Image x(8, 8, 0.5);
    Perturbation d(4, 8);
    CHECK_THROWS_AS(apply_perturbation(x, d), DimensionError);
}

TEST_CASE("dssim of an image with itself is zero") {
    for (int trial = 0; trial < 10; ++trial) {
        Image x = random_image(16, 16, 300 + trial);
        CHECK(std::abs(dssim(x, x)) <= 1e-15);
    }
}

TEST_CASE("dssim of all-black vs all-white follows the stabilizer formula") {
    Image black(16, 16, 0.0);
    Image white(16, 16, 1.0);
    DssimConfig cfg;  // window 8, c1 = 1e-4, c2 = 9e-4
    const double ssim = cfg.c1 / (1.0 + cfg.c1);
    const double want = (1.0 - ssim) / 2.0;
    CHECK(dssim(black, white, cfg) == doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(0.49995).epsilon(1e-4));
}

TEST_CASE("dssim is symmetric and bounded") {
    for (int trial = 0; trial < 20; ++trial) {
        Image a = random_image(16, 16, 400 + trial);
        Image b = random_image(16, 16, 500 + trial);
        double d_ab = dssim(a, b);
        double d_ba = dssim(b, a);
        CHECK(d_ab == doctest::Approx(d_ba).epsilon(1e-14));
        CHECK(d_ab >= 0.0);
        CHECK(d_ab <= 1.0);
    }
}

TEST_CASE("dssim matches the independent single-pass reference") {
    for (int trial = 0; trial < 20; ++trial) {
        Image a = random_image(16, 16, 600 + trial);
        Image b = random_image(16, 16, 700 + trial);
        CHECK(std::abs(dssim(a, b) - ref::dssim_ref(a, b)) < 1e-10);
    }
}

TEST_CASE("dssim rejects bad shapes and configs") {
    Image a(16, 16, 0.5);
    Image b(16, 8, 0.5);
    CHECK_THROWS_AS(dssim(a, b), DimensionError);
    Image tiny(4, 4, 0.5);
    CHECK_THROWS_AS(dssim(tiny, tiny), DimensionError);  // smaller than the window
    DssimConfig bad;
    bad.window = 1;
    CHECK_THROWS_AS(dssim(a, a, bad), InputError);
    bad = DssimConfig{};
    bad.stride = 0;
    CHECK_THROWS_AS(dssim(a, a, bad), InputError);
}

TEST_CASE("dssim_gradient matches central finite differences") {
    CounterRng pick(31);
    for (int trial = 0; trial < 5; ++trial) {
        Image a = random_image(16, 16, 800 + trial);
        Image b = random_image(16, 16, 900 + trial);
        Perturbation g = dssim_gradient(a, b);
        for (int k = 0; k < 10; ++k) {
            int p = static_cast<int>(pick.below(trial * 10 + k, 256));
            double fd = fd_dssim(a, b, {}, p, 1e-6);
            CHECK(rel_err(g.delta[static_cast<std::size_t>(p)], fd) <= 1e-4);
        }
    }
}

TEST_CASE("dssim_gradient at a == b is the stationary point") {
    Image a = random_image(16, 16, 1000);
    Perturbation g = dssim_gradient(a, a);
    for (int k = 0; k < 10; ++k) {
        int p = k * 23 % 256;
        double fd = fd_dssim(a, a, {}, p, 1e-6);
        CHECK(std::abs(g.delta[static_cast<std::size_t>(p)] - fd) <= 1e-7);
        CHECK(std::abs(g.delta[static_cast<std::size_t>(p)]) <= 1e-10);
    }
}

TEST_CASE("dssim_gradient is uniform on interior pixels for constant inputs") {
    Image a(32, 32, 0.3);
    Image b(32, 32, 0.7);
    Perturbation g = dssim_gradient(a, b);
    // with window 8 / stride 4 every pixel in [7, 24]^2 sits under 4 windows
    const double want = g.at(7, 7);
    for (int r = 7; r <= 24; ++r)
        for (int c = 7; c <= 24; ++c) CHECK(g.at(r, c) == doctest::Approx(want).epsilon(1e-13));
    CHECK(want != 0.0);
}

TEST_CASE("PGM byte layout is pinned") {
    Image img = Image::from_pixels(2, 2, {0.0, 1.0, 0.5, 0.25});
    auto bytes = pgm_bytes(img);
    const std::string header = "P5\n2 2\n65535\n";
    REQUIRE(bytes.size() == header.size() + 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + header.size()) == header);
    auto sample = [&](int i) {
        std::size_t off = header.size() + 2 * static_cast<std::size_t>(i);
        return (static_cast<unsigned>(bytes[off]) << 8) | bytes[off + 1];
    };
    CHECK(sample(0) == 0);
    CHECK(sample(1) == 65535);
    CHECK(sample(2) == 32768);  // round(0.5 * 65535)
    CHECK(sample(3) == 16384);  // round(0.25 * 65535)
}

TEST_CASE("PGM round-trip is stable after one quantization") {
    Image img = random_image(16, 16, 1200);
    auto tmp = std::filesystem::temp_directory_path() / "oriole_test_roundtrip.pgm";
    write_pgm(img, tmp.string());
    Image back = read_pgm(tmp.string());
    REQUIRE(back.same_shape(img));
    for (int i = 0; i < img.npixels(); ++i)
        CHECK(std::abs(back.pixels()[static_cast<std::size_t>(i)] -
                       img.pixels()[static_cast<std::size_t>(i)]) <= 0.5 / 65535.0 + 1e-12);
    // a second write/read cycle reproduces the bytes exactly
    CHECK(pgm_bytes(back) == pgm_bytes(image_from_pgm_bytes(pgm_bytes(back))));
    std::filesystem::remove(tmp);
}

TEST_CASE("PGM reader rejects malformed input") {
    std::vector<unsigned char> junk = {'P', '6', '\n'};
    CHECK_THROWS_AS(image_from_pgm_bytes(junk), InputError);
    std::string small = "P5\n2 2\n255\n";
    CHECK_THROWS_AS(image_from_pgm_bytes({small.begin(), small.end()}), InputError);
}

TEST_CASE("image constructors validate their input") {
    CHECK_THROWS_AS(Image::from_pixels(2, 2, {0.0, 1.0, 0.5}), DimensionError);
    CHECK_THROWS_AS(Image::from_pixels(2, 2, {0.0, 1.0, 0.5, 1.5}), InputError);
    CHECK_THROWS_AS(Image(0, 4), DimensionError);
}
