#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace
{
    struct Run
    {
        int code = -1;
        std::string output;
    };

    Run cli(const std::string &args)
    {
        const fs::path log = fs::temp_directory_path() / "xlris_cli_test.log";
        const std::string cmd = std::string("\"") + XLRIS_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
    }

    fs::path scratch()
    {
        const auto dir = fs::temp_directory_path() / "xlris_cli_test";
        fs::create_directories(dir);
        return dir;
    }

    fs::path write_config(const std::string &name, const std::string &text)
    {
        const auto p = scratch() / name;
        std::ofstream(p) << text;
        return p;
    }

    const std::string small_config = R"({
      "array": { "n1": 8, "n2": 2 },
      "scene": { "g_box_d": { "x": [-40, 40], "y": [4, 20], "z": [-8, 8] },
                 "r_box_d": { "x": [-40, 40], "y": [4, 20], "z": [-8, 8] } },
      "codebook": { "step_d": 8 },
      "experiment": { "trials": 4, "seed": 3, "snr_db": [0, 10], "step_sweep_d": [8, 10] }
    })";
}

TEST_CASE("info prints the Rayleigh distance")
{
    const auto r = cli("info --aperture 1 --wavelength 0.01");
    CHECK(r.code == 0);
    CHECK(r.output.find("200") != std::string::npos);
}

TEST_CASE("exit codes")
{
    CHECK(cli("").code == 2);
    CHECK(cli("sweep snr").code == 2);
    CHECK(cli("train --config \"" + write_config("empty.json", "").string() + "\"").code == 2);
    const auto bad = cli("train --config \"" + write_config("neg.json", R"({"array": {"n1": 8, "n2": 2}, "scene": {"g_box_d": {"x": [0,1], "y": [1,2], "z": [0,1]}, "r_box_d": {"x": [0,1], "y": [1,2], "z": [0,1]}}, "codebook": {"step_d": -1}})").string() + "\"");
    CHECK(bad.code == 2);
    CHECK(bad.output.find("codebook.step_d") != std::string::npos);
}

TEST_CASE("codebook build uses the cache on the second run")
{
    const auto cfg = write_config("small.json", small_config);
    const auto cache = scratch() / "cache";
    fs::remove_all(cache);
    const std::string args = "codebook build --config \"" + cfg.string() + "\" --cache \"" + cache.string() + "\"";
    const auto first = cli(args);
    CHECK(first.code == 0);
    CHECK(first.output.find("cache miss") != std::string::npos);
    CHECK(first.output.find("candidate pairs (pre-dedup): ") != std::string::npos);
    const auto second = cli(args);
    CHECK(second.code == 0);
    CHECK(second.output.find("cache hit") != std::string::npos);
}

TEST_CASE("sweeps write tables and a manifest")
{
    const auto cfg = write_config("small.json", small_config);
    const auto out = scratch() / "out";
    fs::remove_all(out);
    const auto r = cli("sweep step --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"");
    CHECK(r.code == 0);
    CHECK(fs::exists(out / "step_overhead.csv"));
    CHECK(fs::exists(out / "step_overhead.json"));
    CHECK(fs::exists(out / "manifest.json"));

    const auto t = cli("train --config \"" + cfg.string() + "\" --snr 10 --cache \"" + (scratch() / "cache").string() + "\"");
    CHECK(t.code == 0);
}
