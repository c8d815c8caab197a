#pragma once

// Flat key=value run configuration shared by the CLI subcommands. File values
// are overridden by command-line flags; every error names the offending key.

#include <cctype>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slhe/equalizer.hpp"
#include "slhe/kernels.hpp"
#include "slhe/sigma_field.hpp"

namespace slhe {

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string k, const std::string& msg)
        : std::runtime_error(msg), key(std::move(k)) {}
};

struct RunConfig {
    double sigma_min = 64.0;
    double sigma_max = 256.0;
    int radius = 32;
    SpatialKernel::Kind kernel = SpatialKernel::Kind::box;
    int bins = 256;
    int lut_levels = 16;
    EqualizerConfig::Engine engine = EqualizerConfig::Engine::binned;
    GroupPolicy policy = GroupPolicy::paper;
    double alpha = 1.0;
    double saturation = 1.0;

    /// For the gauss kernel the radius value is reused as the spatial sigma.
    SpatialKernel spatial_kernel() const {
        return kernel == SpatialKernel::Kind::box ? SpatialKernel::box(radius)
                                                  : SpatialKernel::gauss(radius);
    }
    SigmaParams sigma_params() const { return {sigma_min, sigma_max, policy}; }
    EqualizerConfig equalizer_config() const {
        EqualizerConfig cfg;
        cfg.engine = engine;
        cfg.bin_count = bins;
        cfg.sigma_lut_levels = lut_levels;
        cfg.strength = alpha;
        return cfg;
    }

    void validate() const {
        if (!(sigma_min > 0.0)) throw ConfigError("sigma_min", "sigma_min must be > 0");
        if (sigma_max < sigma_min)
            throw ConfigError("sigma_min/sigma_max", "sigma_min must not exceed sigma_max");
        if (sigma_max > IntensityScale::max_level)
            throw ConfigError("sigma_max", "sigma_max must be <= 1023 levels");
        if (radius < 1) throw ConfigError("radius", "radius must be >= 1");
        if (bins < 16) throw ConfigError("bins", "bins must be >= 16");
        if (lut_levels < 1) throw ConfigError("lut_levels", "lut_levels must be >= 1");
        if (engine == EqualizerConfig::Engine::binned && sigma_min != sigma_max &&
            lut_levels < 2)
            throw ConfigError("lut_levels",
                              "lut_levels must be >= 2 for the binned engine with "
                              "sigma_min < sigma_max");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "alpha must be in [0,1]");
        if (!(saturation >= 0.0 && saturation <= 1.0))
            throw ConfigError("saturation", "saturation must be in [0,1]");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "config: cannot parse value '" + value + "' for key " + key);
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "config: cannot parse value '" + value + "' for key " + key);
    }
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "sigma_min") {
        cfg.sigma_min = parse_double(key, value);
    } else if (key == "sigma_max") {
        cfg.sigma_max = parse_double(key, value);
    } else if (key == "radius") {
        cfg.radius = parse_int(key, value);
    } else if (key == "kernel") {
        if (value == "box") cfg.kernel = SpatialKernel::Kind::box;
        else if (value == "gauss") cfg.kernel = SpatialKernel::Kind::gauss3box;
        else throw ConfigError(key, "config: kernel must be 'box' or 'gauss', got '" + value + "'");
    } else if (key == "bins") {
        cfg.bins = parse_int(key, value);
    } else if (key == "lut_levels") {
        cfg.lut_levels = parse_int(key, value);
    } else if (key == "engine") {
        if (value == "reference") cfg.engine = EqualizerConfig::Engine::reference;
        else if (value == "binned") cfg.engine = EqualizerConfig::Engine::binned;
        else throw ConfigError(key, "config: engine must be 'reference' or 'binned', got '" +
                                        value + "'");
    } else if (key == "policy") {
        if (value == "paper") cfg.policy = GroupPolicy::paper;
        else if (value == "swapped") cfg.policy = GroupPolicy::swapped;
        else throw ConfigError(key,
                               "config: policy must be 'paper' or 'swapped', got '" + value + "'");
    } else if (key == "alpha") {
        cfg.alpha = parse_double(key, value);
    } else if (key == "saturation") {
        cfg.saturation = parse_double(key, value);
    } else {
        throw ConfigError(key, "config: unknown key '" + key + "'");
    }
}

}  // namespace detail

/// Parses "key = value" lines ('#' starts a comment), applies flag overrides
/// on top, fills the rest with defaults, then checks all constraints.
inline RunConfig parse_config(
    const std::string& file_text,
    const std::vector<std::pair<std::string, std::string>>& flag_overrides = {}) {
    RunConfig cfg;
    std::size_t pos = 0;
    while (pos <= file_text.size()) {
        std::size_t eol = file_text.find('\n', pos);
        std::string line = file_text.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? file_text.size() + 1 : eol + 1;

        if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "config: expected 'key = value', got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        detail::apply_config_entry(cfg, key, value);
    }
    for (const auto& [key, value] : flag_overrides) detail::apply_config_entry(cfg, key, value);
    cfg.validate();
    return cfg;
}

}  // namespace slhe
