#ifndef XLRIS_EXPERIMENTS_HPP
#define XLRIS_EXPERIMENTS_HPP

#include "xlris/channel.hpp"
#include "xlris/codebook.hpp"
#include "xlris/errors.hpp"
#include "xlris/parallel.hpp"
#include "xlris/random.hpp"
#include "xlris/training.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace xlris
{
    enum class Scheme
    {
        far_field,
        near_field_exhaustive,
        near_field_hierarchical,
        perfect_csi
    };

    inline constexpr std::array all_schemes{Scheme::far_field, Scheme::near_field_exhaustive, Scheme::near_field_hierarchical,
                                            Scheme::perfect_csi};

    inline std::string_view scheme_name(Scheme s)
    {
        switch (s)
        {
        case Scheme::far_field:
            return "far-field";
        case Scheme::near_field_exhaustive:
            return "near-field-exhaustive";
        case Scheme::near_field_hierarchical:
            return "near-field-hierarchical";
        case Scheme::perfect_csi:
            return "perfect-csi";
        }
        return "?";
    }

    inline std::optional<Scheme> scheme_from_name(std::string_view name)
    {
        for (auto s : all_schemes)
            if (scheme_name(s) == name)
                return s;
        return std::nullopt;
    }

    // Experiment description. Lengths (boxes, steps) are in multiples of the element spacing d.
    struct ExperimentConfig
    {
        ArrayDims dims{128, 4, 0.5};
        std::size_t bs_antennas = 64; // reporting only; the BS is folded into s_bar
        Box g_box_d, r_box_d;
        cdouble s_bar{1.0, 0.0};

        double step_d = 100.0; // Delta_s

        std::size_t levels = 2;
        double multiplier = 4.0;
        double step_control = 0.25;
        bool clip_to_scene = true;

        std::vector<Scheme> schemes{all_schemes.begin(), all_schemes.end()};
        std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0, 10.0};
        std::vector<double> step_sweep_d{75.0, 100.0, 120.0, 150.0};
        std::size_t trials = 200;
        std::uint64_t seed = 1;
        unsigned threads = 0; // 0: hardware concurrency
        CsiScaling csi_scaling = CsiScaling::unit_modulus;

        static Box scale_box(const Box &b, double f)
        {
            return {{b.x.lo * f, b.x.hi * f}, {b.y.lo * f, b.y.hi * f}, {b.z.lo * f, b.z.hi * f}};
        }

        SceneConfig scene() const
        {
            SceneConfig s;
            s.dims = dims;
            s.g_box = scale_box(g_box_d, dims.d);
            s.r_box = scale_box(r_box_d, dims.d);
            s.s_bar = s_bar;
            s.sigma2 = 1.0;
            return s;
        }

        std::pair<SampleGrid, SampleGrid> exhaustive_grids(double step_in_d) const
        {
            const auto sc = scene();
            const double s = step_in_d * dims.d;
            return {SampleGrid{sc.g_box, s, s, s}, SampleGrid{sc.r_box, s, s, s}};
        }

        HierarchicalConfig hierarchical(double step_in_d) const
        {
            const auto sc = scene();
            HierarchicalConfig h;
            h.levels = levels;
            h.g_range = sc.g_box;
            h.r_range = sc.r_box;
            h.base_steps = StepSet::uniform(step_in_d * dims.d);
            h.multiplier = multiplier;
            h.step_control = step_control;
            h.clip_to_scene = clip_to_scene;
            return h;
        }

        unsigned worker_threads() const noexcept { return threads == 0 ? default_threads() : threads; }

        bool has(Scheme s) const
        {
            for (auto x : schemes)
                if (x == s)
                    return true;
            return false;
        }

        void validate() const
        {
            dims.validate();
            scene().validate();
            if (!(step_d > 0.0))
                throw InputError("codebook.step_d must be positive");
            if (trials < 1)
                throw InputError("experiment.trials must be at least 1");
            for (double s : step_sweep_d)
                if (!(s > 0.0))
                    throw InputError("experiment.step_sweep_d values must be positive");
            hierarchical(step_d).validate();
        }
    };

    // ------------------------------------------------------------------------
    // Results
    // ------------------------------------------------------------------------

    struct ResultRow
    {
        std::string scheme;
        std::string sweep_var;
        double sweep_value = 0.0;
        double mean = 0.0;
        double stderr_ = 0.0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
    };

    struct ResultTable
    {
        std::vector<ResultRow> rows;

        const ResultRow *find(std::string_view scheme, double sweep_value) const
        {
            for (const auto &r : rows)
                if (r.scheme == scheme && r.sweep_value == sweep_value)
                    return &r;
            return nullptr;
        }

        std::string to_csv() const
        {
            std::ostringstream out;
            out << "scheme,sweep_var,sweep_value,mean,stderr,trials,seed\n";
            char buf[128];
            for (const auto &r : rows)
            {
                std::snprintf(buf, sizeof buf, ",%.10g,%.12g,%.12g,%zu,%llu\n", r.sweep_value, r.mean, r.stderr_, r.trials,
                              static_cast<unsigned long long>(r.seed));
                out << r.scheme << ',' << r.sweep_var << buf;
            }
            return out.str();
        }
    };

    // Mean and standard error (sample std / sqrt(n)) of per-trial values, summed in trial order.
    inline std::pair<double, double> mean_and_stderr(const std::vector<double> &v)
    {
        if (v.empty())
            return {0.0, 0.0};
        double sum = 0.0;
        for (double x : v)
            sum += x;
        const double mean = sum / double(v.size());
        if (v.size() < 2)
            return {mean, 0.0};
        double ss = 0.0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / double(v.size() - 1));
        return {mean, sd / std::sqrt(double(v.size()))};
    }

    inline double snr_db_to_noise_power(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

    // log2(1 + |theta^T h s_bar|^2 / sigma2).
    inline double achievable_rate(std::span<const cdouble> theta, const ChannelRealization &ch, cdouble s_bar, double sigma2)
    {
        if (!(sigma2 > 0.0))
            throw InputError("achievable_rate: noise power must be positive");
        const double g = std::norm(project(theta, ch.h_bar) * s_bar);
        return std::log2(1.0 + g / sigma2);
    }

    // Shared per-sweep state: codebooks that do not depend on the channel.
    struct SchemeCodebooks
    {
        std::optional<FarFieldCodebook> far_field;
        std::optional<NearFieldCodebook> exhaustive;
        std::optional<NearFieldCodebook> level_one;

        // `exhaustive`, when given, must be the codebook of cfg.exhaustive_grids(cfg.step_d) (e.g. from the cache).
        static SchemeCodebooks build(const ExperimentConfig &cfg, const NearFieldCodebook *exhaustive = nullptr)
        {
            SchemeCodebooks cbs;
            const unsigned threads = cfg.worker_threads();
            if (cfg.has(Scheme::far_field))
                cbs.far_field.emplace(cfg.dims);
            if (cfg.has(Scheme::near_field_exhaustive) && exhaustive != nullptr)
            {
                if (!(exhaustive->dims() == cfg.dims))
                    throw InputError("sweep_snr: supplied codebook has different array dimensions");
                cbs.exhaustive = *exhaustive;
            }
            else if (cfg.has(Scheme::near_field_exhaustive))
            {
                const auto [gg, gr] = cfg.exhaustive_grids(cfg.step_d);
                cbs.exhaustive = build_near_field_codebook(gg, gr, cfg.dims, threads);
            }
            if (cfg.has(Scheme::near_field_hierarchical))
                cbs.level_one = level_one_codebook(cfg.hierarchical(cfg.step_d), cfg.dims, threads);
            return cbs;
        }
    };

    // Per-trial outcome of one scheme at every SNR point.
    struct TrialOutcome
    {
        std::vector<double> rate;     // per SNR point
        std::vector<double> overhead; // slots used per SNR point
    };

    // Runs scheme `s` on channel `ch` at every SNR point. Training noise for a (trial, scheme) uses the
    // same substream at every SNR point, scaled by sigma, so SNR points see common random numbers.
    inline TrialOutcome run_scheme(const ExperimentConfig &cfg, const SchemeCodebooks &cbs, Scheme s, const ChannelRealization &ch,
                                   std::size_t trial)
    {
        TrialOutcome out;
        const auto hcfg = cfg.hierarchical(cfg.step_d);
        std::optional<ComplexVector> projections;
        if (s == Scheme::near_field_exhaustive)
            projections = cbs.exhaustive->project_all(ch.h_bar);
        else if (s == Scheme::far_field)
            projections = cbs.far_field->project_all(ch.h_bar);
        for (double snr : cfg.snr_db)
        {
            const double sigma2 = snr_db_to_noise_power(snr);
            auto rng = RandomStream::derive(cfg.seed, {trial, 1 + static_cast<std::uint64_t>(s)});
            ComplexVector theta;
            std::size_t slots = 0;
            switch (s)
            {
            case Scheme::perfect_csi:
                theta = perfect_csi_beamforming(ch, cfg.csi_scaling);
                break;
            case Scheme::far_field:
            {
                const auto best = select_strongest(*projections, cfg.s_bar, sigma2, rng).first;
                theta = cbs.far_field->codeword_vector(best);
                slots = cbs.far_field->size();
                break;
            }
            case Scheme::near_field_exhaustive:
            {
                const auto best = select_strongest(*projections, cfg.s_bar, sigma2, rng).first;
                theta = cbs.exhaustive->codeword_vector(best);
                slots = cbs.exhaustive->size();
                break;
            }
            case Scheme::near_field_hierarchical:
            {
                auto res = hierarchical_training(hcfg, cfg.dims, ch, cfg.s_bar, sigma2, rng, &*cbs.level_one);
                theta = std::move(res.theta);
                slots = res.slots_used;
                break;
            }
            }
            out.rate.push_back(achievable_rate(theta, ch, cfg.s_bar, sigma2));
            out.overhead.push_back(double(slots));
        }
        return out;
    }

    struct SnrSweepResult
    {
        ResultTable rates;    // mean achievable rate per (scheme, SNR)
        ResultTable overhead; // mean training slots per (scheme, SNR), including boundary clipping effects
    };

    // Rate-vs-SNR sweep. Trial t draws its channel from substream (seed, t, 0) and every scheme and
    // SNR point is evaluated on that channel. Per-trial values are reduced in trial order.
    inline SnrSweepResult sweep_snr(const ExperimentConfig &cfg, const NearFieldCodebook *exhaustive = nullptr)
    {
        cfg.validate();
        if (cfg.snr_db.empty())
            throw InputError("sweep_snr: SNR grid is empty");
        const auto cbs = SchemeCodebooks::build(cfg, exhaustive);
        const auto scene = cfg.scene();
        const std::size_t ns = cfg.schemes.size(), nsnr = cfg.snr_db.size();
        std::vector<std::vector<TrialOutcome>> per_trial(cfg.trials);
        parallel_for(cfg.trials, cfg.worker_threads(), [&](std::size_t t) {
            auto rng = RandomStream::derive(cfg.seed, {t, 0});
            const auto ch = sample_near_field_channel(scene, rng);
            per_trial[t].reserve(ns);
            for (auto s : cfg.schemes)
                per_trial[t].push_back(run_scheme(cfg, cbs, s, ch, t));
        });

        SnrSweepResult res;
        for (std::size_t si = 0; si < ns; ++si)
            for (std::size_t j = 0; j < nsnr; ++j)
            {
                std::vector<double> rates(cfg.trials), slots(cfg.trials);
                for (std::size_t t = 0; t < cfg.trials; ++t)
                {
                    rates[t] = per_trial[t][si].rate[j];
                    slots[t] = per_trial[t][si].overhead[j];
                }
                const std::string name(scheme_name(cfg.schemes[si]));
                const auto [rm, rse] = mean_and_stderr(rates);
                const auto [om, ose] = mean_and_stderr(slots);
                res.rates.rows.push_back({name, "snr_db", cfg.snr_db[j], rm, rse, cfg.trials, cfg.seed});
                res.overhead.rows.push_back({name, "snr_db", cfg.snr_db[j], om, ose, cfg.trials, cfg.seed});
            }
        return res;
    }

    // Channel-independent hierarchical overhead L_1 + ... + L_K. Level k >= 2 uses unclipped full-width
    // windows centred on the first point of the previous BS-side grid and the last point of the previous
    // user-side grid, so the two windows differ whenever the previous grid has more than one point.
    inline std::vector<std::size_t> hierarchical_stage_sizes(const HierarchicalConfig &hcfg, const ArrayDims &dims, unsigned threads = 1)
    {
        hcfg.validate();
        std::vector<std::size_t> sizes;
        Box g_range = hcfg.g_range, r_range = hcfg.r_range;
        StepSet steps = hcfg.initial_steps();
        for (std::size_t k = 1; k <= hcfg.levels; ++k)
        {
            const auto [gg, gr] = stage_grids(g_range, r_range, steps);
            const auto gp = enumerate_grid(gg);
            const auto rp = enumerate_grid(gr);
            sizes.push_back(build_near_field_codebook(gp, rp, dims, threads).size());
            std::tie(g_range, r_range) = refine_ranges({gp.front(), rp.back()}, steps);
            steps = steps.scaled(hcfg.step_control);
        }
        return sizes;
    }

    // Training overhead against Delta_s for the exhaustive and hierarchical near-field schemes.
    inline ResultTable sweep_overhead(const ExperimentConfig &cfg)
    {
        cfg.validate();
        if (cfg.step_sweep_d.empty())
            throw InputError("sweep_overhead: step sweep is empty");
        ResultTable table;
        const unsigned threads = cfg.worker_threads();
        for (double step : cfg.step_sweep_d)
        {
            const auto [gg, gr] = cfg.exhaustive_grids(step);
            const auto exhaustive = build_near_field_codebook(gg, gr, cfg.dims, threads).size();
            std::size_t hier = 0;
            for (auto l : hierarchical_stage_sizes(cfg.hierarchical(step), cfg.dims, threads))
                hier += l;
            table.rows.push_back({std::string(scheme_name(Scheme::near_field_exhaustive)), "step_d", step, double(exhaustive), 0.0, 1,
                                  cfg.seed});
            table.rows.push_back({std::string(scheme_name(Scheme::near_field_hierarchical)), "step_d", step, double(hier), 0.0, 1,
                                  cfg.seed});
        }
        return table;
    }

    // mean(a) / mean(b) at one sweep point.
    inline double summarize_ratio(const ResultTable &table, std::string_view scheme_a, std::string_view scheme_b, double sweep_value)
    {
        const auto *a = table.find(scheme_a, sweep_value);
        const auto *b = table.find(scheme_b, sweep_value);
        if (a == nullptr || b == nullptr)
            throw InputError("summarize_ratio: no row for the requested scheme at this sweep point");
        return a->mean / b->mean;
    }
}

#endif
