// decaykit command-line front end.
//
//   decaykit <command> [--config FILE] [--set section.key=value ...] [flags]
//
// Exit codes: 0 ok, 1 unexpected failure, 2 configuration error,
// 3 numerical failure, 4 model-file error.

#include "decaykit/errors.hpp"
#include "decaykit/io/commands.hpp"
#include "decaykit/io/svg.hpp"
#include "decaykit/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { ok = 0, unexpected = 1, config_error = 2, numeric_error = 3, model_error = 4 };

} // namespace

int main(int argc, char** argv) {
    using namespace decaykit;

    CLI::App app{"decaykit - survival amplitudes and effective Hamiltonians of unstable states"};
    app.set_version_flag("--version", std::string(DECAYKIT_VERSION));

    std::string command, config_path;
    std::vector<std::string> sets;
    // Flags are collected as (key, value) overrides applied after the config file.
    std::vector<std::pair<std::string, std::string>> flags;
    auto bind = [&](const std::string& name, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
    };

    app.add_option("command", command, "fig1 | fig2 | survival | heff | tas | subspace | exact-compare")
        ->required();
    app.add_option("-c,--config", config_path, "Configuration file ([section] key = value)");
    app.add_option("--set", sets, "Override: section.key=value (repeatable)");
    bind("--kind", "density.kind", "Density kind");
    bind("--e0", "density.e0", "Resonance energy");
    bind("--gamma0", "density.gamma0", "Resonance width");
    bind("--emin", "density.emin", "Spectral threshold");
    bind("--cutoff", "density.cutoff", "Onset scale of the linear_onset density");
    bind("--density-file", "density.file", "Two-column table for tabulated densities");
    bind("--model", "model.file", "Model file");
    bind("--eta", "model.eta", "Regularization of discrete reservoirs");
    bind("--group-tol", "model.group_tolerance", "Eigenvalue grouping tolerance");
    bind("--tmin", "grid.tmin", "Grid start");
    bind("--tmax", "grid.tmax", "Grid end");
    bind("--points", "grid.points", "Grid points");
    bind("--spacing", "grid.spacing", "linear | log");
    bind("-o,--csv", "output.csv", "CSV output path (default: standard output)");
    bind("--svg", "output.svg", "SVG output path (figure commands)");
    bind("--precision", "output.precision", "Significant digits, 6..17");
    bind("-j,--threads", "run.threads", "Worker threads (default: DECAYKIT_THREADS or all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::config_error;
    }

    try {
        io::Config cfg = config_path.empty() ? io::Config{} : io::Config::load(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got `" + s + "`");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        for (const auto& [k, v] : flags) cfg.set(k, v);
        const auto rc = io::make_run_config(command, cfg);
        if (rc.threads > 0) set_worker_count(rc.threads);

        const auto out = io::run_command(rc);
        for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
        if (rc.output.csv.empty()) {
            // Keep standard output a valid CSV stream: the summary becomes comments.
            std::istringstream lines(out.message);
            for (std::string line; std::getline(lines, line);) std::cout << "# " << line << '\n';
            io::write_csv(std::cout, out.table, rc.output.precision);
        } else {
            std::ostringstream csv;
            io::write_csv(csv, out.table, rc.output.precision);
            io::write_text_file(rc.output.csv, csv.str());
        }
        if (!rc.output.svg.empty()) {
            if (out.svg.empty()) throw ConfigError("command `" + command + "` does not draw a figure");
            io::write_text_file(rc.output.svg, out.svg);
        }
        if (!out.message.empty() && !rc.output.csv.empty()) std::cout << out.message << '\n';
        return Exit::ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return Exit::config_error;
    } catch (const ModelFileError& e) {
        std::cerr << "model file error: " << e.what() << '\n';
        return Exit::model_error;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return Exit::config_error;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return Exit::numeric_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::unexpected;
    }
}
