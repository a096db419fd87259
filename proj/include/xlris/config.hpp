#ifndef XLRIS_CONFIG_HPP
#define XLRIS_CONFIG_HPP

#include "xlris/errors.hpp"
#include "xlris/codebook_io.hpp"
#include "xlris/experiments.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

// JSON experiment configuration. Lengths carry their unit in the key name: `_d` means multiples of
// the element spacing, `_wavelengths` means carrier wavelengths. Unknown keys are rejected.
//
//   {
//     "array":        { "n1": 128, "n2": 4, "d_wavelengths": 0.5, "bs_antennas": 64 },
//     "scene":        { "g_box_d": { "x": [-1200, 1200], "y": [10, 200], "z": [-400, 400] },
//                       "r_box_d": { ... }, "s_bar": [1, 0] },
//     "codebook":     { "step_d": 100 },
//     "hierarchical": { "levels": 2, "multiplier": 4, "step_control": 0.25, "clip_to_scene": true },
//     "experiment":   { "schemes": [...], "snr_db": [...], "step_sweep_d": [...], "trials": 200,
//                       "seed": 42, "threads": 0, "perfect_csi_scaling": "unit_modulus" }
//   }

namespace xlris
{
    using json = nlohmann::json;

    namespace detail
    {
        // Walks one JSON object, remembering which keys were read.
        class ObjectReader
        {
        public:
            ObjectReader(const json &obj, std::string path) : obj_(obj), path_(std::move(path))
            {
                if (!obj_.is_object())
                    throw ConfigError(path_, "expected an object");
            }

            std::string key_path(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            const json *get(const std::string &key)
            {
                seen_.insert(key);
                auto it = obj_.find(key);
                return it == obj_.end() ? nullptr : &*it;
            }

            const json &require(const std::string &key)
            {
                const json *v = get(key);
                if (v == nullptr)
                    throw ConfigError(key_path(key), "missing required key");
                return *v;
            }

            double number(const std::string &key, std::optional<double> fallback = std::nullopt)
            {
                const json *v = fallback ? get(key) : &require(key);
                if (v == nullptr)
                    return *fallback;
                if (!v->is_number())
                    throw ConfigError(key_path(key), "expected a number");
                return v->get<double>();
            }

            std::uint64_t unsigned_int(const std::string &key, std::optional<std::uint64_t> fallback = std::nullopt)
            {
                const json *v = fallback ? get(key) : &require(key);
                if (v == nullptr)
                    return *fallback;
                if (v->is_number_unsigned())
                    return v->get<std::uint64_t>();
                if (v->is_number_integer())
                    throw ConfigError(key_path(key), "must be nonnegative");
                throw ConfigError(key_path(key), "expected an integer");
            }

            bool boolean(const std::string &key, bool fallback)
            {
                const json *v = get(key);
                if (v == nullptr)
                    return fallback;
                if (!v->is_boolean())
                    throw ConfigError(key_path(key), "expected true or false");
                return v->get<bool>();
            }

            void finish() const
            {
                for (auto it = obj_.begin(); it != obj_.end(); ++it)
                    if (!seen_.contains(it.key()))
                        throw ConfigError(key_path(it.key()), "unknown key");
            }

        private:
            const json &obj_;
            std::string path_;
            std::set<std::string> seen_;
        };

        inline Interval read_interval(const json &v, const std::string &path)
        {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw ConfigError(path, "expected [min, max]");
            Interval iv{v[0].get<double>(), v[1].get<double>()};
            if (!iv.valid())
                throw ConfigError(path, "minimum exceeds maximum");
            return iv;
        }

        inline Box read_box(const json &v, const std::string &path)
        {
            ObjectReader r(v, path);
            Box b{read_interval(r.require("x"), r.key_path("x")), read_interval(r.require("y"), r.key_path("y")),
                  read_interval(r.require("z"), r.key_path("z"))};
            r.finish();
            if (!(b.y.lo > 0.0))
                throw ConfigError(r.key_path("y"), "y minimum must be positive (scatters lie in front of the surface)");
            return b;
        }

        inline std::vector<double> read_numbers(const json &v, const std::string &path)
        {
            if (!v.is_array())
                throw ConfigError(path, "expected an array of numbers");
            std::vector<double> out;
            for (const auto &x : v)
            {
                if (!x.is_number())
                    throw ConfigError(path, "expected an array of numbers");
                out.push_back(x.get<double>());
            }
            return out;
        }

        inline json box_json(const Box &b)
        {
            return {{"x", {b.x.lo, b.x.hi}}, {"y", {b.y.lo, b.y.hi}}, {"z", {b.z.lo, b.z.hi}}};
        }
    }

    inline ExperimentConfig config_from_json(const json &root)
    {
        using detail::ObjectReader;
        ExperimentConfig cfg;
        ObjectReader top(root, "");

        {
            ObjectReader a(top.require("array"), "array");
            const auto n1 = a.unsigned_int("n1"), n2 = a.unsigned_int("n2");
            if (n1 < 1 || n1 > 1u << 20)
                throw ConfigError("array.n1", "must be in [1, 2^20]");
            if (n2 < 1 || n2 > 1u << 20)
                throw ConfigError("array.n2", "must be in [1, 2^20]");
            cfg.dims.n1 = n1;
            cfg.dims.n2 = n2;
            cfg.dims.d = a.number("d_wavelengths", 0.5);
            if (!(cfg.dims.d > 0.0))
                throw ConfigError("array.d_wavelengths", "must be positive");
            cfg.bs_antennas = a.unsigned_int("bs_antennas", 64);
            a.finish();
        }
        {
            ObjectReader s(top.require("scene"), "scene");
            cfg.g_box_d = detail::read_box(s.require("g_box_d"), "scene.g_box_d");
            cfg.r_box_d = detail::read_box(s.require("r_box_d"), "scene.r_box_d");
            if (const json *sb = s.get("s_bar"))
            {
                if (!sb->is_array() || sb->size() != 2 || !(*sb)[0].is_number() || !(*sb)[1].is_number())
                    throw ConfigError("scene.s_bar", "expected [re, im]");
                cfg.s_bar = {(*sb)[0].get<double>(), (*sb)[1].get<double>()};
            }
            s.finish();
        }
        {
            ObjectReader c(top.require("codebook"), "codebook");
            cfg.step_d = c.number("step_d");
            if (!(cfg.step_d > 0.0))
                throw ConfigError("codebook.step_d", "must be positive");
            c.finish();
        }
        if (const json *h = top.get("hierarchical"))
        {
            ObjectReader r(*h, "hierarchical");
            cfg.levels = r.unsigned_int("levels", 2);
            if (cfg.levels < 1)
                throw ConfigError("hierarchical.levels", "must be at least 1");
            cfg.multiplier = r.number("multiplier", 4.0);
            if (!(cfg.multiplier >= 1.0))
                throw ConfigError("hierarchical.multiplier", "must be >= 1");
            cfg.step_control = r.number("step_control", 0.25);
            if (!(cfg.step_control > 0.0 && cfg.step_control < 1.0))
                throw ConfigError("hierarchical.step_control", "must lie in (0, 1)");
            cfg.clip_to_scene = r.boolean("clip_to_scene", true);
            r.finish();
        }
        if (const json *e = top.get("experiment"))
        {
            ObjectReader r(*e, "experiment");
            if (const json *sv = r.get("schemes"))
            {
                if (!sv->is_array() || sv->empty())
                    throw ConfigError("experiment.schemes", "expected a nonempty array of scheme names");
                cfg.schemes.clear();
                for (const auto &n : *sv)
                {
                    const auto s = n.is_string() ? scheme_from_name(n.get<std::string>()) : std::nullopt;
                    if (!s)
                        throw ConfigError("experiment.schemes", "unknown scheme " + n.dump());
                    cfg.schemes.push_back(*s);
                }
            }
            if (const json *v = r.get("snr_db"))
            {
                cfg.snr_db = detail::read_numbers(*v, "experiment.snr_db");
                if (cfg.snr_db.empty())
                    throw ConfigError("experiment.snr_db", "must not be empty");
            }
            if (const json *v = r.get("step_sweep_d"))
            {
                cfg.step_sweep_d = detail::read_numbers(*v, "experiment.step_sweep_d");
                for (double x : cfg.step_sweep_d)
                    if (!(x > 0.0))
                        throw ConfigError("experiment.step_sweep_d", "values must be positive");
            }
            cfg.trials = r.unsigned_int("trials", 200);
            if (cfg.trials < 1)
                throw ConfigError("experiment.trials", "must be at least 1");
            cfg.seed = r.unsigned_int("seed", 1);
            cfg.threads = static_cast<unsigned>(r.unsigned_int("threads", 0));
            if (const json *v = r.get("perfect_csi_scaling"))
            {
                const auto name = v->is_string() ? v->get<std::string>() : std::string();
                if (name == "unit_modulus")
                    cfg.csi_scaling = CsiScaling::unit_modulus;
                else if (name == "inv_sqrt_n")
                    cfg.csi_scaling = CsiScaling::inv_sqrt_n;
                else
                    throw ConfigError("experiment.perfect_csi_scaling", "expected \"unit_modulus\" or \"inv_sqrt_n\"");
            }
            r.finish();
        }
        top.finish();
        return cfg;
    }

    // Canonical form: every key present, defaults resolved. nlohmann::json keeps keys sorted.
    inline json config_to_json(const ExperimentConfig &cfg)
    {
        json schemes = json::array();
        for (auto s : cfg.schemes)
            schemes.push_back(std::string(scheme_name(s)));
        return {
            {"array", {{"n1", cfg.dims.n1}, {"n2", cfg.dims.n2}, {"d_wavelengths", cfg.dims.d}, {"bs_antennas", cfg.bs_antennas}}},
            {"scene",
             {{"g_box_d", detail::box_json(cfg.g_box_d)},
              {"r_box_d", detail::box_json(cfg.r_box_d)},
              {"s_bar", {cfg.s_bar.real(), cfg.s_bar.imag()}}}},
            {"codebook", {{"step_d", cfg.step_d}}},
            {"hierarchical",
             {{"levels", cfg.levels},
              {"multiplier", cfg.multiplier},
              {"step_control", cfg.step_control},
              {"clip_to_scene", cfg.clip_to_scene}}},
            {"experiment",
             {{"schemes", schemes},
              {"snr_db", cfg.snr_db},
              {"step_sweep_d", cfg.step_sweep_d},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"threads", cfg.threads},
              {"perfect_csi_scaling", cfg.csi_scaling == CsiScaling::unit_modulus ? "unit_modulus" : "inv_sqrt_n"}}},
        };
    }

    inline ExperimentConfig parse_config_text(const std::string &text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("not valid JSON: ") + e.what());
        }
        if (!root.is_object())
            throw ConfigError("", "top level must be an object");
        auto cfg = config_from_json(root);
        try
        {
            cfg.validate();
        }
        catch (const InputError &e)
        {
            throw ConfigError("", e.what());
        }
        return cfg;
    }

    inline ExperimentConfig parse_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("", "cannot read " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }

    // 64-bit FNV-1a, printed as 16 hex digits.
    inline std::string fnv1a_hex(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    // Digest of the canonical config; thread count is excluded since it never changes results.
    inline std::string config_digest(const ExperimentConfig &cfg)
    {
        auto j = config_to_json(cfg);
        j["experiment"].erase("threads");
        return fnv1a_hex(j.dump());
    }

    // Digest of only what determines the exhaustive near-field codebook.
    inline std::string codebook_digest(const ExperimentConfig &cfg)
    {
        const auto j = config_to_json(cfg);
        const json sub = {{"array", {{"n1", cfg.dims.n1}, {"n2", cfg.dims.n2}, {"d_wavelengths", cfg.dims.d}}},
                          {"g_box_d", j["scene"]["g_box_d"]},
                          {"r_box_d", j["scene"]["r_box_d"]},
                          {"step_d", cfg.step_d},
                          {"format", codebook_format_version}};
        return fnv1a_hex(sub.dump());
    }
}

#endif
