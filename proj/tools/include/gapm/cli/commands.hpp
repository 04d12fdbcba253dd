#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gapm/cli/builders.hpp"
#include "gapm/engine.hpp"

namespace gapm::cli {

enum ExitCode : int { exit_converged = 0, exit_error = 1, exit_not_converged = 2 };

struct RunOptions {
    std::filesystem::path instance;
    /// "lands" or "cvar" instead of an instance file.
    std::string builtin;
    double epsilon = 1e-4;
    std::size_t max_iterations = 100;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> mc_pool;
    std::string refiner = "auto";
    bool oracle = false;
    std::optional<std::filesystem::path> out_dir;
    bool verbose = false;
};

struct RunOutcome {
    int exit_code = exit_error;
    GapmResult result;
    std::optional<double> oracle_objective;
};

/// Runs GAPM, prints the table to `out`, writes reports when out_dir is set.
/// Errors propagate as exceptions.
RunOutcome run_command(const RunOptions& options, std::ostream& out, std::ostream& err);

int exit_code_for(Termination reason);

/// Full command line entry point; never throws.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gapm::cli
