#pragma once

#include "boxdesign/analytics.hpp"
#include "boxdesign/pipeline.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace boxdesign {

inline constexpr const char* kVersion = "1.0.0";

// Everything a batch run needs. Paths are empty when not given.
struct RunConfig {
    std::string  boxes;
    std::string  skus;
    std::string  orders;
    std::string  baseline;
    std::string  out = "out";
    std::size_t  k   = 0;  // 0: size of the baseline assortment
    TuningParams params{};
    std::string  grid = "paper";
    SplitSpec    split{};
    std::size_t  threads = 1;
    std::uint64_t seed   = 0;

    [[nodiscard]] std::vector<TuningParams> grid_settings() const;

    // Canonical "key=value" lines; hashed into the run manifest.
    [[nodiscard]] std::string echo() const;
};

namespace detail {

inline double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError("config: '" + key + "' is not a number: '" + text + "'");
    }
    return value;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError("config: '" + key + "' is not a non-negative integer: '" + text + "'");
    }
    return value;
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    std::stringstream   stream(text);
    std::string         token;
    while (std::getline(stream, token, ',')) {
        const auto first = token.find_first_not_of(' ');
        const auto last  = token.find_last_not_of(' ');
        if (first == std::string::npos) continue;
        values.push_back(parse_real(key, token.substr(first, last - first + 1)));
    }
    if (values.empty()) throw ValidationError("config: '" + key + "' lists no values");
    return values;
}

inline std::string real_text(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

}  // namespace detail

/// Grid spec: "paper" for the 4 x 5 x 5 default, "single" for the one setting in
/// `params`, or "rho=0.25,0.5;delta=0,2;alpha=1" (missing axes take `params`).
inline std::vector<TuningParams> parse_grid(const std::string& spec, const TuningParams& params) {
    if (spec == "paper") return default_grid();
    if (spec == "single") return {params};
    std::vector<double> rhos{params.rho}, deltas{params.delta}, alphas{params.alpha};
    std::stringstream   stream(spec);
    std::string         part;
    while (std::getline(stream, part, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ValidationError("grid: expected axis=values, got '" + part + "'");
        const auto axis   = part.substr(0, eq);
        const auto values = detail::parse_real_list("grid." + axis, part.substr(eq + 1));
        if (axis == "rho") {
            rhos = values;
        } else if (axis == "delta") {
            deltas = values;
        } else if (axis == "alpha") {
            alphas = values;
        } else {
            throw ValidationError("grid: unknown axis '" + axis + "'");
        }
    }
    auto grid = make_grid(rhos, deltas, alphas);
    for (const auto& p : grid) p.validate();
    return grid;
}

inline std::vector<TuningParams> RunConfig::grid_settings() const { return parse_grid(grid, params); }

/// Applies one key/value pair. Unknown keys are an error.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "boxes") {
        config.boxes = value;
    } else if (key == "skus") {
        config.skus = value;
    } else if (key == "orders") {
        config.orders = value;
    } else if (key == "baseline") {
        config.baseline = value;
    } else if (key == "out") {
        config.out = value;
    } else if (key == "k") {
        config.k = detail::parse_unsigned(key, value);
    } else if (key == "rho") {
        config.params.rho = detail::parse_real(key, value);
    } else if (key == "delta") {
        config.params.delta = detail::parse_real(key, value);
    } else if (key == "alpha") {
        config.params.alpha = detail::parse_real(key, value);
    } else if (key == "grid") {
        config.grid = value;
    } else if (key == "split") {
        const auto fractions = detail::parse_real_list(key, value);
        if (fractions.size() != 3) throw ValidationError("config: 'split' needs three fractions");
        config.split.train_fraction      = fractions[0];
        config.split.validation_fraction = fractions[1];
        config.split.test_fraction       = fractions[2];
    } else if (key == "threads") {
        config.threads = detail::parse_unsigned(key, value);
    } else if (key == "seed") {
        config.seed = detail::parse_unsigned(key, value);
    } else {
        throw ValidationError("config: unknown key '" + key + "'");
    }
    config.split.seed = config.seed;
}

/// Reads "key = value" lines; '#' starts a comment. Returns the pairs in file order.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string                                      line;
    std::size_t                                      line_no = 0;
    auto trim = [](const std::string& text) {
        const auto first = text.find_first_not_of(" \t\r");
        if (first == std::string::npos) return std::string();
        const auto last = text.find_last_not_of(" \t\r");
        return text.substr(first, last - first + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": expected key = value");
        }
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    return parse_config_text(in, path);
}

inline std::string RunConfig::echo() const {
    std::ostringstream out;
    out << "boxes=" << boxes << '\n'
        << "skus=" << skus << '\n'
        << "orders=" << orders << '\n'
        << "baseline=" << baseline << '\n'
        << "k=" << k << '\n'
        << "rho=" << detail::real_text(params.rho) << '\n'
        << "delta=" << detail::real_text(params.delta) << '\n'
        << "alpha=" << detail::real_text(params.alpha) << '\n'
        << "grid=" << grid << '\n'
        << "split=" << detail::real_text(split.train_fraction) << ',' << detail::real_text(split.validation_fraction)
        << ',' << detail::real_text(split.test_fraction) << '\n'
        << "seed=" << seed << '\n';
    return out.str();
}

}  // namespace boxdesign
