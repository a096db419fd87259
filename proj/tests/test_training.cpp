#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "xlris/experiments.hpp"
#include "xlris/training.hpp"

using namespace xlris;
using Catch::Approx;

namespace
{
    const ArrayDims dims{16, 4, 0.5};

    SampleGrid grid_g() { return {{{-60, 60}, {5, 25}, {-10, 10}}, 30, 10, 10}; }
    SampleGrid grid_r() { return {{{-30, 30}, {4, 12}, {-4, 4}}, 15, 4, 4}; }
}

TEST_CASE("select_strongest")
{
    RandomStream rng(1);
    const ComplexVector p{{1, 0}, {0, 3}, {-2, 0}, {0, -3}};
    const auto [idx, amp] = select_strongest(p, {1, 0}, 0.0, rng);
    CHECK(idx == 1); // ties keep the earlier slot
    CHECK(amp == 3.0);

    const ComplexVector zeros(3);
    CHECK(select_strongest(zeros, {1, 0}, 0.0, rng).first == 0);
    CHECK_THROWS_AS(select_strongest(ComplexVector{}, {1, 0}, 0.0, rng), InputError);
}

TEST_CASE("exhaustive training recovers on-grid pairs without noise")
{
    const auto cb = build_near_field_codebook(grid_g(), grid_r(), dims);
    RandomStream rng(2);
    for (std::size_t l = 0; l < cb.size(); l += 7)
    {
        const auto [pg, pr] = cb.source_pair(l);
        const cdouble alpha = rng.complex_normal(1.0);
        const auto ch = make_near_field_channel(pg, pr, alpha, dims);
        const auto res = exhaustive_training(cb, ch, {1, 0}, 0.0, rng);
        CHECK(res.best_index == l + 1);
        CHECK(res.best_amplitude == Approx(double(dims.size()) * std::abs(alpha)).epsilon(1e-9));
        CHECK(res.slots_used == cb.size());
        REQUIRE(res.best_pair);
        CHECK(key_hash(canonical_key(cascaded_distance_profile(res.best_pair->first, res.best_pair->second, dims))) ==
              cb.entries()[l].key);
    }
}

TEST_CASE("exhaustive training on a single codeword")
{
    const std::vector<Point3> one{{5, 10, 0}};
    const auto cb = build_near_field_codebook(one, one, dims);
    RandomStream rng(3);
    const auto ch = make_near_field_channel({30, 40, 2}, {-1, 8, 3}, {1, 0}, dims);
    const auto res = exhaustive_training(cb, ch, {1, 0}, 1.0, rng);
    CHECK(res.best_index == 1);
    CHECK(res.slots_used == 1);
}

TEST_CASE("off-grid noiseless training returns the argmax of the explicit projections")
{
    const auto cb = build_near_field_codebook(grid_g(), grid_r(), dims);
    RandomStream rng(4);
    const auto scene = [] {
        SceneConfig s;
        s.dims = dims;
        s.g_box = grid_g().range;
        s.r_box = grid_r().range;
        return s;
    }();
    for (int t = 0; t < 20; ++t)
    {
        const auto ch = sample_near_field_channel(scene, rng);
        std::size_t best = 0;
        double best_amp = -1.0;
        for (std::size_t l = 0; l < cb.size(); ++l)
        {
            const double a = std::abs(oracle::dot(cb.codeword_vector(l), ch.h_bar));
            if (a > best_amp + 1e-9)
            {
                best_amp = a;
                best = l;
            }
        }
        const auto res = exhaustive_training(cb, ch, {1, 0}, 0.0, rng);
        CHECK(res.best_amplitude == Approx(best_amp).epsilon(1e-9));
        CHECK(res.best_index == best + 1);
    }
}

TEST_CASE("far-field codebook trains like any searchable codebook")
{
    const FarFieldCodebook cb({8, 4, 0.5});
    RandomStream rng(5);
    const auto [u, v] = cb.lattice(13);
    ChannelRealization ch;
    ch.dims = {8, 4, 0.5};
    ch.h_bar = far_field_steering(0.5 * u, 0.5 * v, ch.dims);
    const auto res = exhaustive_training(cb, ch, {1, 0}, 0.0, rng);
    CHECK(res.best_index == 14);
    CHECK(res.best_amplitude == Approx(32.0));
    CHECK_FALSE(res.best_pair.has_value());
}

TEST_CASE("refine_ranges")
{
    const double d = 0.5;
    const auto [g, r] = refine_ranges({{100 * d, 10, 0}, {0, 20, 5}}, StepSet::uniform(400 * d));
    CHECK(g.x.lo == -100 * d);
    CHECK(g.x.hi == 300 * d);
    CHECK(r.z.width() == 400 * d);
    CHECK(r.y.lo == 20 - 200 * d);
    CHECK_THROWS_AS(refine_ranges({{}, {}}, StepSet::uniform(0)), InputError);
}

TEST_CASE("one-level hierarchical search equals exhaustive search over the level-one codebook")
{
    HierarchicalConfig h;
    h.levels = 1;
    h.g_range = grid_g().range;
    h.r_range = grid_r().range;
    h.base_steps = StepSet::uniform(5);
    h.multiplier = 2;
    const auto l1 = level_one_codebook(h, dims);

    SceneConfig scene;
    scene.dims = dims;
    scene.g_box = h.g_range;
    scene.r_box = h.r_range;
    RandomStream rng(6);
    for (int t = 0; t < 10; ++t)
    {
        const auto ch = sample_near_field_channel(scene, rng);
        RandomStream a(100 + t), b(100 + t);
        const auto hr = hierarchical_training(h, dims, ch, {1, 0}, 0.5, a);
        const auto er = exhaustive_training(l1, ch, {1, 0}, 0.5, b);
        CHECK(hr.best_index == er.best_index);
        CHECK(hr.slots_used == er.slots_used);
        CHECK(hr.best_amplitude == er.best_amplitude);
    }
}

TEST_CASE("two-level hierarchical search")
{
    HierarchicalConfig h;
    h.levels = 2;
    h.g_range = grid_g().range;
    h.r_range = grid_r().range;
    h.base_steps = StepSet::uniform(5);
    h.multiplier = 4;
    h.step_control = 0.25;
    const auto l1 = level_one_codebook(h, dims);

    SceneConfig scene;
    scene.dims = dims;
    scene.g_box = h.g_range;
    scene.r_box = h.r_range;
    RandomStream rng(7);
    const auto ch = sample_near_field_channel(scene, rng);
    RandomStream a(1), b(1);
    const auto with_cache = hierarchical_training(h, dims, ch, {1, 0}, 0.0, a, &l1);
    const auto without = hierarchical_training(h, dims, ch, {1, 0}, 0.0, b);
    CHECK(with_cache.best_index == without.best_index);
    CHECK(with_cache.slots_used == without.slots_used);
    REQUIRE(with_cache.per_stage.size() == 2);
    CHECK(with_cache.per_stage[0].codebook_size == l1.size());
    CHECK(with_cache.slots_used == with_cache.per_stage[0].codebook_size + with_cache.per_stage[1].codebook_size);
    // The second level refines the first: its winner is at least as strong.
    RandomStream c(1);
    const auto first = exhaustive_training(l1, ch, {1, 0}, 0.0, c);
    CHECK(with_cache.best_amplitude >= first.best_amplitude - 1e-9);

    HierarchicalConfig bad = h;
    bad.step_control = 1.0;
    CHECK_THROWS_AS(hierarchical_training(bad, dims, ch, {1, 0}, 0.0, a), InputError);
    bad = h;
    bad.levels = 0;
    CHECK_THROWS_AS(hierarchical_training(bad, dims, ch, {1, 0}, 0.0, a), InputError);
}

TEST_CASE("worst-case hierarchical stage sizes at the full configuration")
{
    // Level 1: 7 x 1 x 3 points per collection at step 400d, same box on both sides: S1 (S1 + 1) / 2.
    // Level 2: two distinct unclipped 5 x 5 x 5 windows; the product is all distinct.
    ExperimentConfig cfg;
    cfg.g_box_d = {{-1200, 1200}, {10, 200}, {-400, 400}};
    cfg.r_box_d = cfg.g_box_d;
    const auto sizes = hierarchical_stage_sizes(cfg.hierarchical(100), cfg.dims);
    REQUIRE(sizes.size() == 2);
    const std::size_t s1 = oracle::axis_count(-1200, 1200, 400) * oracle::axis_count(10, 200, 400) * oracle::axis_count(-400, 400, 400);
    CHECK(sizes[0] == s1 * (s1 + 1) / 2);
    CHECK(sizes[1] == 125 * 125);
}

TEST_CASE("perfect-CSI beamforming")
{
    ChannelRealization toy;
    toy.dims = {2, 1, 0.5};
    toy.alpha = {1, 0};
    toy.p_g = {0, 1, 0};
    toy.p_r = {0, 1, 0};
    toy.h_bar = {{1, 0}, {0, 1}};
    // Bypass geometry: the toy steering vector is h_bar itself.
    ComplexVector theta{std::conj(toy.h_bar[0]), std::conj(toy.h_bar[1])};
    CHECK(theta[1] == cdouble(0, -1));
    CHECK(std::abs(project(theta, toy.h_bar)) == Approx(2.0));

    const auto cb = build_near_field_codebook(grid_g(), grid_r(), dims);
    SceneConfig scene;
    scene.dims = dims;
    scene.g_box = grid_g().range;
    scene.r_box = grid_r().range;
    RandomStream rng(8);
    for (int t = 0; t < 20; ++t)
    {
        const auto ch = sample_near_field_channel(scene, rng);
        const auto opt = perfect_csi_beamforming(ch);
        const double best = std::abs(project(opt, ch.h_bar));
        CHECK(best == Approx(double(dims.size()) * std::abs(ch.alpha)).epsilon(1e-9));
        for (const auto &p : cb.project_all(ch.h_bar))
            REQUIRE(std::abs(p) <= best * (1 + 1e-12));
        CHECK(perfect_csi_beamforming(ch) == opt);

        const auto scaled = perfect_csi_beamforming(ch, CsiScaling::inv_sqrt_n);
        CHECK(std::abs(project(scaled, ch.h_bar)) == Approx(best / std::sqrt(double(dims.size()))).epsilon(1e-9));
    }
}
