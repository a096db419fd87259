#ifndef XLRIS_TRAINING_HPP
#define XLRIS_TRAINING_HPP

#include "xlris/channel.hpp"
#include "xlris/codebook.hpp"
#include "xlris/errors.hpp"
#include "xlris/random.hpp"
#include "xlris/region.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace xlris
{
    struct StageTrace
    {
        std::size_t stage = 0;         // 1-based level
        std::size_t codebook_size = 0; // L_k
        std::size_t winner = 0;        // 1-based index within the level-k codebook
    };

    struct TrainingResult
    {
        std::size_t best_index = 0;    // 1-based, in the codebook searched last
        double best_amplitude = 0.0;   // |r| of the winning slot (noisy)
        std::size_t slots_used = 0;    // training overhead
        std::vector<StageTrace> per_stage;
        ComplexVector theta;           // winning reflecting vector
        std::optional<std::pair<Point3, Point3>> best_pair; // near-field codebooks only
    };

    // Per-axis sampling steps for both scatter collections.
    struct StepSet
    {
        double gx = 1.0, gy = 1.0, gz = 1.0;
        double rx = 1.0, ry = 1.0, rz = 1.0;

        static StepSet uniform(double s) { return {s, s, s, s, s, s}; }

        StepSet scaled(double f) const { return {gx * f, gy * f, gz * f, rx * f, ry * f, rz * f}; }

        bool positive() const noexcept { return gx > 0 && gy > 0 && gz > 0 && rx > 0 && ry > 0 && rz > 0; }

        friend bool operator==(const StepSet &, const StepSet &) = default;
    };

    struct HierarchicalConfig
    {
        std::size_t levels = 2;    // K
        Box g_range, r_range;      // R^1; also the clipping box for refined ranges
        StepSet base_steps;        // Delta; level 1 uses multiplier * Delta
        double multiplier = 4.0;   // A
        double step_control = 0.25; // delta
        bool clip_to_scene = true;

        void validate() const
        {
            if (levels < 1)
                throw InputError("HierarchicalConfig: at least one level is required");
            if (!(multiplier >= 1.0))
                throw InputError("HierarchicalConfig: step multiplier must be >= 1");
            if (!(step_control > 0.0 && step_control < 1.0))
                throw InputError("HierarchicalConfig: step control must lie in (0, 1)");
            if (!base_steps.positive())
                throw InputError("HierarchicalConfig: sampling steps must be positive");
            g_range.validate("HierarchicalConfig.g_range");
            r_range.validate("HierarchicalConfig.r_range");
        }

        StepSet initial_steps() const { return base_steps.scaled(multiplier); }
    };

    // Slot loop over precomputed noiseless projections; returns (zero-based winner, |r| of winner).
    // Slot 1 seeds the running best; later slots must be strictly stronger to replace it.
    inline std::pair<std::size_t, double> select_strongest(std::span<const cdouble> projections, cdouble s_bar, double sigma2,
                                                           RandomStream &rng)
    {
        if (projections.empty())
            throw InputError("select_strongest: no training slots");
        std::size_t best = 0;
        double best_amp = -1.0;
        for (std::size_t l = 0; l < projections.size(); ++l)
        {
            cdouble r = projections[l] * s_bar;
            if (sigma2 > 0.0)
                r += rng.complex_normal(sigma2);
            const double amp = std::abs(r);
            if (amp > best_amp)
            {
                best = l;
                best_amp = amp;
            }
        }
        return {best, best_amp};
    }

    // Searches `cb` slot by slot: r_l = theta_l^T h s_bar + n_l with fresh noise per slot.
    template <SearchableCodebook CB>
    TrainingResult exhaustive_training(const CB &cb, const ChannelRealization &ch, cdouble s_bar, double sigma2, RandomStream &rng)
    {
        if (cb.size() == 0)
            throw InputError("exhaustive_training: empty codebook");
        if (!(sigma2 >= 0.0))
            throw InputError("exhaustive_training: noise power must be nonnegative");
        const auto proj = cb.project_all(ch.h_bar);
        const auto [best, best_amp] = select_strongest(proj, s_bar, sigma2, rng);
        TrainingResult res;
        res.best_index = best + 1;
        res.best_amplitude = best_amp;
        res.slots_used = cb.size();
        res.per_stage.push_back({1, cb.size(), best + 1});
        res.theta = cb.codeword_vector(best);
        if constexpr (std::is_same_v<CB, NearFieldCodebook>)
            res.best_pair = cb.source_pair(best);
        return res;
    }

    // Next-level ranges: winner coordinate +- step / 2 on each of the six axes.
    inline std::pair<Box, Box> refine_ranges(const std::pair<Point3, Point3> &opt_pair, const StepSet &steps)
    {
        if (!steps.positive())
            throw InputError("refine_ranges: steps must be positive");
        const auto &[g, r] = opt_pair;
        auto around = [](double c, double s) { return Interval{c - s / 2.0, c + s / 2.0}; };
        return {Box{around(g.x, steps.gx), around(g.y, steps.gy), around(g.z, steps.gz)},
                Box{around(r.x, steps.rx), around(r.y, steps.ry), around(r.z, steps.rz)}};
    }

    inline std::pair<SampleGrid, SampleGrid> stage_grids(const Box &g_range, const Box &r_range, const StepSet &steps)
    {
        return {SampleGrid{g_range, steps.gx, steps.gy, steps.gz}, SampleGrid{r_range, steps.rx, steps.ry, steps.rz}};
    }

    inline NearFieldCodebook level_one_codebook(const HierarchicalConfig &hcfg, const ArrayDims &dims, unsigned threads = 1)
    {
        hcfg.validate();
        const auto [gg, gr] = stage_grids(hcfg.g_range, hcfg.r_range, hcfg.initial_steps());
        return build_near_field_codebook(gg, gr, dims, threads);
    }

    // Multi-level search. Level k+1 searches the Delta^k-wide window around the level-k winner
    // with steps delta * Delta^k. `level_one`, when given, must equal level_one_codebook(hcfg, dims).
    inline TrainingResult hierarchical_training(const HierarchicalConfig &hcfg, const ArrayDims &dims, const ChannelRealization &ch,
                                                cdouble s_bar, double sigma2, RandomStream &rng,
                                                const NearFieldCodebook *level_one = nullptr)
    {
        hcfg.validate();
        Box g_range = hcfg.g_range, r_range = hcfg.r_range;
        StepSet steps = hcfg.initial_steps();
        TrainingResult out;
        for (std::size_t k = 1; k <= hcfg.levels; ++k)
        {
            std::optional<NearFieldCodebook> built;
            const NearFieldCodebook *cb = nullptr;
            if (k == 1 && level_one != nullptr)
                cb = level_one;
            else
            {
                const auto [gg, gr] = stage_grids(g_range, r_range, steps);
                try
                {
                    built = build_near_field_codebook(gg, gr, dims);
                }
                catch (const InputError &e)
                {
                    throw ConfigError("hierarchical", "level " + std::to_string(k) + " produced no codebook: " + e.what());
                }
                cb = &*built;
            }
            auto stage = exhaustive_training(*cb, ch, s_bar, sigma2, rng);
            out.slots_used += cb->size();
            out.per_stage.push_back({k, cb->size(), stage.best_index});
            out.best_index = stage.best_index;
            out.best_amplitude = stage.best_amplitude;
            out.theta = std::move(stage.theta);
            out.best_pair = stage.best_pair;
            if (k < hcfg.levels)
            {
                std::tie(g_range, r_range) = refine_ranges(*stage.best_pair, steps);
                if (hcfg.clip_to_scene)
                {
                    g_range = clip(g_range, hcfg.g_range);
                    r_range = clip(r_range, hcfg.r_range);
                }
                steps = steps.scaled(hcfg.step_control);
            }
        }
        return out;
    }

    enum class CsiScaling
    {
        unit_modulus, // |theta_n| = 1, same norm as every codeword
        inv_sqrt_n    // theta = c* / sqrt(N)
    };

    // Conjugate of the channel's steering part.
    inline ComplexVector perfect_csi_beamforming(const ChannelRealization &ch, CsiScaling scaling = CsiScaling::unit_modulus)
    {
        auto theta = ch.steering();
        const double s = scaling == CsiScaling::inv_sqrt_n ? 1.0 / std::sqrt(double(theta.size())) : 1.0;
        for (auto &c : theta)
            c = std::conj(c) * s;
        return theta;
    }
}

#endif
