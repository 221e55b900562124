#include "decaykit/io/config.hpp"

#include "decaykit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace decaykit::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> k{
        "density.kind", "density.e0",   "density.gamma0",    "density.emin",    "density.cutoff",
        "density.file", "model.file",   "model.eta",         "model.group_tolerance", "model.order",
        "grid.tmin",    "grid.tmax",    "grid.points",       "grid.spacing",    "output.csv",
        "output.svg",   "output.precision", "run.threads"};
    return k;
}

std::string format_optional(const std::optional<double>& v) {
    if (!v) return "default";
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
}

std::string format_double(double v) { return format_optional(std::optional<double>(v)); }

} // namespace

Config Config::parse(std::istream& in) {
    Config c;
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3) throw ConfigError("malformed section header", line);
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected `key = value`", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line);
        const std::string full = section.empty() ? key : section + "." + key;
        if (c.entries_.count(full)) throw ConfigError("duplicate key `" + full + "`", line);
        c.entries_[full] = {value, line};
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file `" + path + "`");
    return parse(in);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
}

int Config::line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

std::optional<double> Config::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    double out = 0.0;
    const auto* end = v->data() + v->size();
    const auto r = std::from_chars(v->data(), end, out);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out))
        throw ConfigError("`" + key + "` expects a finite number, got `" + *v + "`", line_of(key));
    return out;
}

std::optional<long> Config::get_int(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    long out = 0;
    const auto* end = v->data() + v->size();
    const auto r = std::from_chars(v->data(), end, out);
    if (r.ec != std::errc() || r.ptr != end)
        throw ConfigError("`" + key + "` expects an integer, got `" + *v + "`", line_of(key));
    return out;
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) out.push_back(k);
    return out;
}

RunConfig make_run_config(const std::string& command, const Config& config) {
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
        throw ConfigError("unknown command `" + command + "`");
    for (const auto& k : config.keys())
        if (!known_keys().count(k)) throw ConfigError("unknown key `" + k + "`", config.line_of(k));

    auto fail = [&](const std::string& key, const std::string& what) { throw ConfigError(what, config.line_of(key)); };

    RunConfig rc;
    rc.command = command;

    auto& d = rc.density;
    if (auto v = config.get("density.kind")) d.kind = *v;
    if (d.kind != "breit_wigner" && d.kind != "linear_onset" && d.kind != "point_masses" && d.kind != "interpolated")
        fail("density.kind", "density.kind must be breit_wigner, linear_onset, point_masses or interpolated");
    if (auto v = config.get_double("density.e0")) d.e0 = *v;
    if (auto v = config.get_double("density.gamma0")) d.gamma0 = *v;
    if (auto v = config.get_double("density.emin")) d.emin = *v;
    d.cutoff = config.get_double("density.cutoff");
    if (auto v = config.get("density.file")) d.file = *v;
    if (!(d.gamma0 > 0.0)) fail("density.gamma0", "density.gamma0 must be positive");
    if (!(d.e0 > d.emin)) fail(config.has("density.e0") ? "density.e0" : "density.emin", "density.e0 must exceed density.emin");
    if (d.cutoff && !(*d.cutoff > 0.0)) fail("density.cutoff", "density.cutoff must be positive");
    if ((d.kind == "point_masses" || d.kind == "interpolated") && d.file.empty())
        fail("density.kind", "tabulated densities need density.file");

    auto& m = rc.model;
    if (auto v = config.get("model.file")) m.file = *v;
    m.eta = config.get_double("model.eta");
    m.group_tolerance = config.get_double("model.group_tolerance");
    if (auto v = config.get_int("model.order")) m.order = static_cast<int>(*v);
    if (m.eta && !(*m.eta > 0.0)) fail("model.eta", "model.eta must be positive");
    if (m.group_tolerance && !(*m.group_tolerance >= 0.0))
        fail("model.group_tolerance", "model.group_tolerance must be non-negative");
    if (m.order < 0 || m.order > 4) fail("model.order", "model.order must lie in [0, 4]");
    if ((command == "subspace" || command == "exact-compare") && m.file.empty())
        throw ConfigError("command `" + command + "` requires model.file");

    auto& g = rc.grid;
    g.tmin = config.get_double("grid.tmin");
    g.tmax = config.get_double("grid.tmax");
    g.points = config.get_int("grid.points");
    if (auto v = config.get("grid.spacing")) {
        if (*v == "linear") g.spacing = Spacing::linear;
        else if (*v == "log") g.spacing = Spacing::log;
        else fail("grid.spacing", "grid.spacing must be linear or log");
    } else if (command == "exact-compare" || command == "survival" || command == "heff") {
        g.spacing = Spacing::linear;
    }
    if (g.tmin && g.tmax && !(*g.tmin < *g.tmax)) fail("grid.tmax", "grid.tmin must be smaller than grid.tmax");
    if (g.points && *g.points < 2) fail("grid.points", "grid.points must be at least 2");
    if (g.tmin && *g.tmin < 0.0) fail("grid.tmin", "grid.tmin must be non-negative");
    if (g.spacing == Spacing::log && g.tmin && !(*g.tmin > 0.0))
        fail("grid.tmin", "log spacing needs grid.tmin > 0");

    auto& o = rc.output;
    if (auto v = config.get("output.csv")) o.csv = *v;
    if (auto v = config.get("output.svg")) o.svg = *v;
    if (auto v = config.get_int("output.precision")) {
        if (*v < 6 || *v > 17) fail("output.precision", "output.precision must lie in [6, 17]");
        o.precision = static_cast<int>(*v);
    }
    if (auto v = config.get_int("run.threads")) {
        if (*v < 0) fail("run.threads", "run.threads must be non-negative");
        rc.threads = static_cast<int>(*v);
    }
    return rc;
}

std::vector<std::string> RunConfig::describe() const {
    auto opt_int = [](const std::optional<long>& v) { return v ? std::to_string(*v) : std::string("default"); };
    return {
        "command = " + command,
        "density.kind = " + density.kind,
        "density.e0 = " + format_double(density.e0),
        "density.gamma0 = " + format_double(density.gamma0),
        "density.emin = " + format_double(density.emin),
        "density.cutoff = " + format_optional(density.cutoff),
        "density.file = " + density.file,
        "model.file = " + model.file,
        "model.eta = " + format_optional(model.eta),
        "model.group_tolerance = " + format_optional(model.group_tolerance),
        "model.order = " + std::to_string(model.order),
        "grid.tmin = " + format_optional(grid.tmin),
        "grid.tmax = " + format_optional(grid.tmax),
        "grid.points = " + opt_int(grid.points),
        std::string("grid.spacing = ") + (grid.spacing == Spacing::log ? "log" : "linear"),
        "output.precision = " + std::to_string(output.precision),
    };
}

std::vector<double> make_grid(double lo, double hi, std::size_t points, Spacing spacing) {
    if (points < 2 || !(hi > lo)) throw DomainError("make_grid: need hi > lo and at least two points");
    if (spacing == Spacing::log && !(lo > 0.0)) throw DomainError("make_grid: log spacing needs lo > 0");
    std::vector<double> out(points);
    const double last = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / last;
        out[i] = spacing == Spacing::log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace decaykit::io
