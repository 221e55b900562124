// commands.hpp - the CLI commands as library functions (used by tools/ and tests)

#pragma once

#include "decaykit/io/config.hpp"
#include "decaykit/io/csv.hpp"
#include "decaykit/spectral.hpp"

#include <string>
#include <vector>

namespace decaykit::io {

struct CommandOutput {
    CsvTable table;
    std::string svg;     // empty unless the command draws a figure
    std::string message; // printed to standard output
    std::vector<std::string> warnings;
};

spectral::SpectralDensity make_density(const DensityBlock& block);

CommandOutput cmd_fig1(const RunConfig& rc);
CommandOutput cmd_fig2(const RunConfig& rc);
CommandOutput cmd_survival(const RunConfig& rc);
CommandOutput cmd_heff(const RunConfig& rc);
CommandOutput cmd_tas(const RunConfig& rc);
CommandOutput cmd_subspace(const RunConfig& rc);
CommandOutput cmd_exact_compare(const RunConfig& rc);

CommandOutput run_command(const RunConfig& rc);

// Figure-2 time grid in units of tau: log grid on [lo, 0.7 t_as), linear core
// on [0.7, 1.3] t_as with `core_points`, log grid on (1.3 t_as, hi].
std::vector<double> fig2_grid(double t_as_over_tau, double lo, double hi, std::size_t core_points,
                              std::size_t side_points);

} // namespace decaykit::io
