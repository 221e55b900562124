// config.hpp - line-based `key = value` run configuration with [section] headers

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace decaykit::io {

// Raw key/value store. Keys are "section.key"; values remember the line they
// came from so that later validation errors can cite it.
class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::string& path);

    // Overrides (command-line flags). Line 0 means "not from the file".
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    int line_of(const std::string& key) const;

    std::optional<double> get_double(const std::string& key) const;
    std::optional<long> get_int(const std::string& key) const;

    // All keys present, sorted.
    std::vector<std::string> keys() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries_;
};

enum class Spacing { linear, log };

struct DensityBlock {
    std::string kind = "breit_wigner"; // breit_wigner | linear_onset | point_masses | interpolated
    double e0 = 25.0;
    double gamma0 = 1.0;
    double emin = 0.0;
    std::optional<double> cutoff; // linear_onset only
    std::string file;             // tabulated kinds
};

struct ModelBlock {
    std::string file;
    std::optional<double> eta;
    std::optional<double> group_tolerance;
    int order = 2; // kernel series order
};

struct GridBlock {
    std::optional<double> tmin;
    std::optional<double> tmax;
    std::optional<long> points;
    Spacing spacing = Spacing::log;
};

struct OutputBlock {
    std::string csv;
    std::string svg;
    int precision = 10;
};

struct RunConfig {
    std::string command;
    DensityBlock density;
    ModelBlock model;
    GridBlock grid;
    OutputBlock output;
    int threads = 0; // 0: default worker count

    // Resolved values as "section.key = value" lines, in a fixed order.
    std::vector<std::string> describe() const;
};

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c{"fig1", "fig2", "survival", "heff", "tas", "subspace", "exact-compare"};
    return c;
}

// Validates and converts; throws ConfigError citing the offending line.
RunConfig make_run_config(const std::string& command, const Config& config);

// Evenly spaced (linear or logarithmic) grid with both ends included.
std::vector<double> make_grid(double lo, double hi, std::size_t points, Spacing spacing);

} // namespace decaykit::io
