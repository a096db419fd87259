#ifndef XLRIS_ERRORS_HPP
#define XLRIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xlris
{
    // Invalid argument passed to a library routine.
    class InputError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Configuration file problem; key_path() names the offending key ("scene.g_box_d.x").
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string key_path, const std::string &what)
            : std::runtime_error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}

        const std::string &key_path() const noexcept { return key_path_; }

    private:
        std::string key_path_;
    };

    // Codebook cache file could not be read back.
    class LoadError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
