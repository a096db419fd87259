// xlris: codebook construction, beam training and Monte Carlo sweeps for extremely large RIS.
//
//   xlris codebook build --config configs/full.json [--cache DIR] [--out DIR]
//   xlris train          --config configs/desk.json [--snr 10] [--seed N]
//   xlris sweep snr      --config configs/desk.json --out results/ [--seed N] [--threads N]
//   xlris sweep step     --config configs/full.json --out results/
//   xlris info           [--aperture 1.0] [--wavelength 0.01]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.

#include "xlris/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace
{
    constexpr int exit_config_error = 2;
    constexpr int exit_runtime_error = 3;

    struct CommonFlags
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<unsigned> threads;
        std::string out;
        std::string cache;
    };

    void add_common(CLI::App *cmd, CommonFlags &f, bool needs_out)
    {
        cmd->add_option("--config", f.config, "Experiment configuration (JSON)")->required();
        cmd->add_option("--seed", f.seed, "Master seed; overrides the config value");
        cmd->add_option("--threads", f.threads, "Worker thread cap (0 = all cores)");
        auto *out = cmd->add_option("--out", f.out, "Output directory");
        if (needs_out)
            out->required();
        cmd->add_option("--cache", f.cache, "Codebook cache directory (default $XLRIS_CACHE or ./.xlris-cache)");
    }

    xlris::ExperimentConfig load(const CommonFlags &f)
    {
        auto cfg = xlris::parse_config(f.config);
        if (f.seed)
            cfg.seed = *f.seed;
        if (f.threads)
            cfg.threads = *f.threads;
        return cfg;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Near-field codebook design and beam training for extremely large-scale RIS"};
    app.require_subcommand(1);

    CommonFlags build_flags, train_flags, snr_flags, step_flags;

    auto *codebook = app.add_subcommand("codebook", "Near-field codebook operations");
    codebook->require_subcommand(1);
    auto *build = codebook->add_subcommand("build", "Build (or load from cache) the exhaustive near-field codebook");
    add_common(build, build_flags, false);

    auto *train = app.add_subcommand("train", "Run every configured scheme on one channel draw");
    add_common(train, train_flags, false);
    double train_snr = 10.0;
    train->add_option("--snr", train_snr, "SNR in dB (noise power 10^(-SNR/10))");

    auto *sweep = app.add_subcommand("sweep", "Monte Carlo sweeps");
    sweep->require_subcommand(1);
    auto *sweep_snr = sweep->add_subcommand("snr", "Achievable rate against SNR");
    add_common(sweep_snr, snr_flags, true);
    auto *sweep_step = sweep->add_subcommand("step", "Training overhead against the sampling step");
    add_common(sweep_step, step_flags, true);

    auto *info = app.add_subcommand("info", "Rayleigh distance 2 D^2 / lambda");
    double aperture = 1.0, wavelength = 0.01;
    info->add_option("--aperture", aperture, "Array aperture D [m]");
    info->add_option("--wavelength", wavelength, "Carrier wavelength [m]");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    try
    {
        if (build->parsed())
        {
            const auto cfg = load(build_flags);
            xlris::cmd_codebook_build(cfg, xlris::resolve_cache_dir(build_flags.cache), build_flags.out, std::cout);
        }
        else if (train->parsed())
        {
            const auto cfg = load(train_flags);
            const auto result = xlris::cmd_train(cfg, train_snr, std::cerr);
            std::cout << result.dump(2) << "\n";
        }
        else if (sweep_snr->parsed() || sweep_step->parsed())
        {
            const bool snr = sweep_snr->parsed();
            const auto &flags = snr ? snr_flags : step_flags;
            const auto cfg = load(flags);
            const auto m = xlris::cmd_sweep(snr ? xlris::SweepKind::snr : xlris::SweepKind::step, cfg, flags.out,
                                            xlris::resolve_cache_dir(flags.cache), std::cout);
            std::cout << "wrote " << m.outputs.size() << " files to " << flags.out << "\n";
        }
        else if (info->parsed())
        {
            std::cout << "aperture " << aperture << " m, wavelength " << wavelength << " m: Rayleigh distance "
                      << xlris::rayleigh_distance(aperture, wavelength) << " m\n";
        }
    }
    catch (const xlris::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const xlris::InputError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
    return 0;
}
