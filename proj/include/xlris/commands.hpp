#ifndef XLRIS_COMMANDS_HPP
#define XLRIS_COMMANDS_HPP

#include "xlris/codebook_io.hpp"
#include "xlris/config.hpp"
#include "xlris/experiments.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

// Implementation of the command-line subcommands; tools/xlris.cpp only parses flags.

namespace xlris
{
    inline constexpr const char *artifact_version = "0.1.0";

    namespace fs = std::filesystem;

    struct RunManifest
    {
        std::string command;
        std::string config_digest;
        std::uint64_t seed = 0;
        std::string version = artifact_version;
        std::string started_at, finished_at;
        std::vector<std::string> outputs;
        json details = json::object();

        json to_json() const
        {
            return {{"command", command},     {"config_digest", config_digest}, {"seed", seed},
                    {"version", version},     {"started_at", started_at},       {"finished_at", finished_at},
                    {"outputs", outputs},     {"details", details}};
        }
    };

    inline std::string utc_timestamp()
    {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    // --cache flag, else $XLRIS_CACHE, else ./.xlris-cache.
    inline fs::path resolve_cache_dir(const std::string &flag)
    {
        if (!flag.empty())
            return flag;
        if (const char *env = std::getenv("XLRIS_CACHE"); env != nullptr && *env != '\0')
            return env;
        return ".xlris-cache";
    }

    inline void write_text(const fs::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << text;
        if (!out)
            throw std::runtime_error("failed writing " + path.string());
    }

    inline void write_manifest(RunManifest &m, const fs::path &dir)
    {
        const auto path = dir / "manifest.json";
        m.outputs.push_back(path.string());
        m.finished_at = utc_timestamp();
        write_text(path, m.to_json().dump(2) + "\n");
    }

    struct CodebookBuildOutcome
    {
        NearFieldCodebook codebook;
        fs::path cache_file;
        bool cache_hit = false;
        std::size_t candidate_pairs = 0;
    };

    // Loads the exhaustive codebook from the cache when a file for this config digest exists,
    // otherwise builds it and stores it.
    inline CodebookBuildOutcome cached_exhaustive_codebook(const ExperimentConfig &cfg, const fs::path &cache_dir)
    {
        CodebookBuildOutcome out;
        const auto [gg, gr] = cfg.exhaustive_grids(cfg.step_d);
        out.candidate_pairs = grid_size(gg) * grid_size(gr);
        out.cache_file = cache_dir / ("nearfield-" + codebook_digest(cfg) + ".xlrc");
        if (fs::exists(out.cache_file))
        {
            try
            {
                out.codebook = load_codebook(out.cache_file, cfg.dims);
                out.cache_hit = true;
                return out;
            }
            catch (const LoadError &)
            {
                // stale or damaged cache entry: rebuild below
            }
        }
        out.codebook = build_near_field_codebook(gg, gr, cfg.dims, cfg.worker_threads());
        fs::create_directories(cache_dir);
        save_codebook(out.codebook, out.cache_file);
        return out;
    }

    inline RunManifest cmd_codebook_build(const ExperimentConfig &cfg, const fs::path &cache_dir, const std::string &out_dir,
                                          std::ostream &log)
    {
        RunManifest m;
        m.command = "codebook build";
        m.config_digest = config_digest(cfg);
        m.seed = cfg.seed;
        m.started_at = utc_timestamp();
        const auto res = cached_exhaustive_codebook(cfg, cache_dir);
        log << "candidate pairs (pre-dedup): " << res.candidate_pairs << "\n";
        log << "codebook size L: " << res.codebook.size() << "\n";
        log << "cache " << (res.cache_hit ? "hit" : "miss") << ": " << res.cache_file.string() << "\n";
        m.details = {{"candidate_pairs", res.candidate_pairs},
                     {"codebook_size", res.codebook.size()},
                     {"cache_hit", res.cache_hit},
                     {"cache_file", res.cache_file.string()}};
        m.outputs.push_back(res.cache_file.string());
        if (!out_dir.empty())
        {
            fs::create_directories(out_dir);
            const auto copy = fs::path(out_dir) / "codebook.xlrc";
            fs::copy_file(res.cache_file, copy, fs::copy_options::overwrite_existing);
            m.outputs.push_back(copy.string());
            write_manifest(m, out_dir);
        }
        else
            m.finished_at = utc_timestamp();
        return m;
    }

    // One channel draw, every configured scheme at one SNR point.
    inline json cmd_train(const ExperimentConfig &cfg, double snr_db, std::ostream &log)
    {
        cfg.validate();
        const auto cbs = SchemeCodebooks::build(cfg);
        auto rng = RandomStream::derive(cfg.seed, {0, 0});
        const auto ch = sample_near_field_channel(cfg.scene(), rng);
        const double sigma2 = snr_db_to_noise_power(snr_db);
        json out = {{"p_g", {ch.p_g.x, ch.p_g.y, ch.p_g.z}},
                    {"p_r", {ch.p_r.x, ch.p_r.y, ch.p_r.z}},
                    {"alpha_abs", std::abs(ch.alpha)},
                    {"snr_db", snr_db},
                    {"schemes", json::array()}};
        log << "channel: p_g=(" << ch.p_g.x << ", " << ch.p_g.y << ", " << ch.p_g.z << ") p_r=(" << ch.p_r.x << ", " << ch.p_r.y
            << ", " << ch.p_r.z << ") |alpha|=" << std::abs(ch.alpha) << "\n";
        for (auto s : cfg.schemes)
        {
            auto noise = RandomStream::derive(cfg.seed, {0, 1 + static_cast<std::uint64_t>(s)});
            TrainingResult res;
            switch (s)
            {
            case Scheme::far_field:
                res = exhaustive_training(*cbs.far_field, ch, cfg.s_bar, sigma2, noise);
                break;
            case Scheme::near_field_exhaustive:
                res = exhaustive_training(*cbs.exhaustive, ch, cfg.s_bar, sigma2, noise);
                break;
            case Scheme::near_field_hierarchical:
                res = hierarchical_training(cfg.hierarchical(cfg.step_d), cfg.dims, ch, cfg.s_bar, sigma2, noise, &*cbs.level_one);
                break;
            case Scheme::perfect_csi:
                res.theta = perfect_csi_beamforming(ch, cfg.csi_scaling);
                res.best_amplitude = std::abs(project(res.theta, ch.h_bar) * cfg.s_bar);
                break;
            }
            const double rate = achievable_rate(res.theta, ch, cfg.s_bar, sigma2);
            log << scheme_name(s) << ": index=" << res.best_index << " slots=" << res.slots_used << " |r|=" << res.best_amplitude
                << " rate=" << rate << " bit/s/Hz\n";
            json entry = {{"scheme", scheme_name(s)},
                          {"best_index", res.best_index},
                          {"best_amplitude", res.best_amplitude},
                          {"slots_used", res.slots_used},
                          {"rate", rate}};
            json stages = json::array();
            for (const auto &st : res.per_stage)
                stages.push_back({{"stage", st.stage}, {"codebook_size", st.codebook_size}, {"winner", st.winner}});
            entry["per_stage"] = stages;
            out["schemes"].push_back(entry);
        }
        return out;
    }

    inline json table_json(const ResultTable &t)
    {
        json rows = json::array();
        for (const auto &r : t.rows)
            rows.push_back({{"scheme", r.scheme},
                            {"sweep_var", r.sweep_var},
                            {"sweep_value", r.sweep_value},
                            {"mean", r.mean},
                            {"stderr", r.stderr_},
                            {"trials", r.trials},
                            {"seed", r.seed}});
        return rows;
    }

    enum class SweepKind
    {
        snr,
        step
    };

    // Writes CSV + JSON result tables and manifest.json into out_dir.
    inline RunManifest cmd_sweep(SweepKind kind, const ExperimentConfig &cfg, const fs::path &out_dir, const fs::path &cache_dir,
                                 std::ostream &log)
    {
        RunManifest m;
        m.command = kind == SweepKind::snr ? "sweep snr" : "sweep step";
        m.config_digest = config_digest(cfg);
        m.seed = cfg.seed;
        m.started_at = utc_timestamp();
        fs::create_directories(out_dir);
        const json provenance = config_to_json(cfg);

        auto emit = [&](const std::string &stem, const ResultTable &t) {
            const auto csv = out_dir / (stem + ".csv");
            const auto js = out_dir / (stem + ".json");
            write_text(csv, t.to_csv());
            write_text(js, json{{"config", provenance}, {"config_digest", m.config_digest}, {"rows", table_json(t)}}.dump(2) + "\n");
            m.outputs.push_back(csv.string());
            m.outputs.push_back(js.string());
        };

        if (kind == SweepKind::snr)
        {
            std::optional<CodebookBuildOutcome> cached;
            if (cfg.has(Scheme::near_field_exhaustive))
            {
                cached = cached_exhaustive_codebook(cfg, cache_dir);
                log << "exhaustive codebook L=" << cached->codebook.size() << (cached->cache_hit ? " (cache hit)" : " (built)") << "\n";
            }
            const auto res = sweep_snr(cfg, cached ? &cached->codebook : nullptr);
            emit("snr_rates", res.rates);
            emit("snr_overhead", res.overhead);
            log << res.rates.to_csv();
        }
        else
        {
            const auto table = sweep_overhead(cfg);
            emit("step_overhead", table);
            log << table.to_csv();
        }
        write_manifest(m, out_dir);
        return m;
    }
}

#endif
