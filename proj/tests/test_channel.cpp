#include <catch2/catch_amalgamated.hpp>

#include "xlris/channel.hpp"

#include <cmath>

using namespace xlris;

namespace
{
    SceneConfig small_scene()
    {
        SceneConfig s;
        s.dims = {8, 2, 0.5};
        s.g_box = {{-50, 50}, {5, 40}, {-10, 10}};
        s.r_box = {{-30, 60}, {2, 20}, {-5, 5}};
        return s;
    }
}

TEST_CASE("sample_near_field_channel is deterministic per seed")
{
    const auto scene = small_scene();
    RandomStream a(77), b(77);
    const auto c1 = sample_near_field_channel(scene, a);
    const auto c2 = sample_near_field_channel(scene, b);
    CHECK(c1.p_g == c2.p_g);
    CHECK(c1.p_r == c2.p_r);
    CHECK(c1.alpha == c2.alpha);
    CHECK(c1.h_bar == c2.h_bar);

    CHECK(scene.g_box.contains(c1.p_g));
    CHECK(scene.r_box.contains(c1.p_r));
}

TEST_CASE("degenerate boxes pin the scatter points")
{
    auto scene = small_scene();
    scene.g_box = {{3, 3}, {7, 7}, {-2, -2}};
    scene.r_box = {{-1, -1}, {9.5, 9.5}, {4, 4}};
    RandomStream rng(1);
    const auto ch = sample_near_field_channel(scene, rng);
    CHECK(ch.p_g == Point3{3, 7, -2});
    CHECK(ch.p_r == Point3{-1, 9.5, 4});
}

TEST_CASE("invalid scenes are rejected")
{
    auto scene = small_scene();
    scene.g_box.x = {5, -5};
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_near_field_channel(scene, rng), InputError);

    scene = small_scene();
    scene.r_box.y = {0.0, 10.0};
    CHECK_THROWS_AS(sample_near_field_channel(scene, rng), InputError);
}

TEST_CASE("h_bar equals alpha times the stored-geometry steering vector")
{
    const auto scene = small_scene();
    RandomStream rng(19);
    for (int t = 0; t < 20; ++t)
    {
        const auto ch = sample_near_field_channel(scene, rng);
        const auto s = ch.steering();
        for (std::size_t i = 0; i < s.size(); ++i)
            REQUIRE(std::abs(ch.h_bar[i] - ch.alpha * s[i]) <= 1e-12 * std::abs(ch.alpha));
    }
}

TEST_CASE("effective gain has unit second moment")
{
    // |alpha_G alpha_r|^2 with independent CN(0,1) factors: E = 1.
    auto scene = small_scene();
    scene.dims = {1, 1, 0.5};
    RandomStream rng(2024);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        acc += std::norm(sample_near_field_channel(scene, rng).alpha);
    CHECK(std::abs(acc / n - 1.0) < 0.05);
}

TEST_CASE("received_signal")
{
    const ArrayDims dims{8, 4, 0.5};
    RandomStream rng(4);

    SECTION("coherent alignment sums N unit phasors")
    {
        const auto ch = make_near_field_channel({10, 20, 3}, {-5, 8, 1}, {0.6, 0.8}, dims);
        auto theta = ch.steering();
        for (auto &c : theta)
            c = std::conj(c);
        const auto r = received_signal(theta, ch, {1.0, 0.0}, 0.0, rng);
        CHECK(std::abs(std::abs(r) - double(dims.size())) < 1e-9);
    }

    SECTION("toy cancellation")
    {
        ChannelRealization ch;
        ch.h_bar = {{1, 0}, {-1, 0}};
        const ComplexVector theta{{1, 0}, {1, 0}};
        CHECK(received_signal(theta, ch, {1, 0}, 0.0, rng) == cdouble(0, 0));
    }

    SECTION("pure noise has the configured variance")
    {
        const auto ch = make_near_field_channel({10, 20, 3}, {-5, 8, 1}, {1, 0}, dims);
        const auto theta = ch.steering();
        double acc = 0.0;
        cdouble mean = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
        {
            const auto r = received_signal(theta, ch, {0, 0}, 1.0, rng);
            acc += std::norm(r);
            mean += r;
        }
        CHECK(std::abs(acc / n - 1.0) < 0.02);
        CHECK(std::abs(mean / double(n)) < 0.02);
    }

    SECTION("length mismatch")
    {
        const auto ch = make_near_field_channel({10, 20, 3}, {-5, 8, 1}, {1, 0}, dims);
        const ComplexVector theta(3, {1, 0});
        CHECK_THROWS_AS(received_signal(theta, ch, {1, 0}, 0.0, rng), InputError);
    }
}

TEST_CASE("noiseless amplitude is bounded by N |alpha|")
{
    const ArrayDims dims{16, 2, 0.5};
    RandomStream rng(8);
    const auto ch = make_near_field_channel({40, 30, -6}, {-12, 5, 2}, {0.3, -1.1}, dims);
    const double bound = double(dims.size()) * std::abs(ch.alpha);
    for (int t = 0; t < 200; ++t)
    {
        ComplexVector theta(dims.size());
        for (auto &c : theta)
            c = std::polar(1.0, rng.uniform(-3.14159, 3.14159));
        REQUIRE(std::abs(project(theta, ch.h_bar)) <= bound * (1 + 1e-12));
    }
    // Equality with the conjugate steering vector up to a global phase.
    auto theta = ch.steering();
    for (auto &c : theta)
        c = std::conj(c) * std::polar(1.0, 0.7);
    CHECK(std::abs(project(theta, ch.h_bar)) == Catch::Approx(bound).epsilon(1e-12));
}

TEST_CASE("far-field cascaded channel uses the summed angles")
{
    const ArrayDims dims{8, 4, 0.5};
    const cdouble alpha{0.5, -0.25};
    const auto ch = make_far_field_channel(0.1, -0.2, 0.05, 0.3, alpha, dims);
    const auto expect = far_field_steering(0.15, 0.1, dims);
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(ch.h_bar[i] - alpha * expect[i]) < 1e-12);
}
