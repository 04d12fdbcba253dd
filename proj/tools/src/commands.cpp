#include "gapm/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "CLI11.hpp"

#include "gapm/cli/instance.hpp"
#include "gapm/cli/report.hpp"
#include "gapm/errors.hpp"
#include "gapm/refiners.hpp"

namespace gapm::cli {

namespace {

Instance load(const RunOptions& options) {
    if (options.builtin == "lands") return make_lands(bundled_lands_data());
    if (options.builtin == "cvar") return make_cvar(CvarOptions{});
    if (!options.builtin.empty()) throw ValidationError("unknown built-in instance '" + options.builtin + "'");
    if (options.instance.empty()) throw ValidationError("no instance given (use --instance or --builtin)");
    return read_instance(options.instance);
}

void print_cells(std::ostream& err, const IterationRecord& rec, const Partition& p) {
    char buf[160];
    for (std::size_t k = 0; k < p.cells.size(); ++k) {
        const Cell& c = p.cells[k];
        std::string where;
        if (const auto* iv = std::get_if<Interval>(&c.geometry)) {
            std::snprintf(buf, sizeof buf, "[%.6g, %.6g]", iv->lo, iv->hi);
            where = buf;
        } else if (const auto* s = std::get_if<ScenarioSet>(&c.geometry)) {
            where = std::to_string(s->indices.size()) + " scenarios";
        } else {
            where = std::to_string(std::get<Polytope>(c.geometry).halfspaces.size()) + " halfspaces, " +
                    std::to_string(c.sample_count) + " samples";
        }
        std::snprintf(buf, sizeof buf, "  iter %zu cell %zu: mass %.6g, Q(x, mean) %.6g, ", rec.t, c.id, c.mass,
                      rec.cell_values[k]);
        err << buf << where << '\n';
    }
}

}  // namespace

int exit_code_for(Termination reason) {
    switch (reason) {
        case Termination::gap:
        case Termination::conditions_satisfied: return exit_converged;
        case Termination::partition_stabilized:
        case Termination::iteration_limit: return exit_not_converged;
    }
    return exit_error;
}

RunOutcome run_command(const RunOptions& options, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const Instance instance = load(options);
    const auto space = make_space(instance, {options.seed, options.mc_pool});
    const auto refiner = make_refiner(options.refiner, *space);

    GapmConfig config;
    config.epsilon = options.epsilon;
    config.max_iterations = options.max_iterations;

    RunOutcome outcome;
    outcome.result = run(instance.model, *space, *refiner, config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    print_table(out, outcome.result);
    char buf[160];
    std::snprintf(buf, sizeof buf, "termination: %s after %zu iterations, objective %.6f\n",
                  std::string(to_string(outcome.result.reason)).c_str(), outcome.result.history.size(),
                  outcome.result.objective);
    out << buf;

    if (options.verbose) {
        for (std::size_t k = 0; k < outcome.result.history.size(); ++k) {
            print_cells(err, outcome.result.history[k], outcome.result.partitions[k]);
        }
    }

    if (options.oracle) {
        if (const auto* discrete = dynamic_cast<const DiscreteSpace*>(space.get())) {
            const ExtensiveFormResult ef = solve_extensive_form(instance.model, *discrete);
            outcome.oracle_objective = ef.objective;
            const double diff = std::abs(ef.objective - outcome.result.objective);
            std::snprintf(buf, sizeof buf, "oracle: extensive-form optimum %.9g, |difference| %.3g (relative %.3g)\n",
                          ef.objective, diff, diff / std::max(1.0, std::abs(ef.objective)));
            out << buf;
        } else {
            err << "oracle: extensive form is only available for discrete instances\n";
        }
    }

    if (options.out_dir) {
        RunInfo info{instance.metadata.name, std::string(refiner->name()), options.epsilon, wall,
                     outcome.oracle_objective};
        write_reports(*options.out_dir, outcome.result, info);
    }
    outcome.exit_code = exit_code_for(outcome.result.reason);
    return outcome;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized adaptive partition solver for two-stage stochastic linear programs", "gapm"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::uint64_t seed = 0;
    std::size_t pool = 0;
    auto* run_cmd = app.add_subcommand("run", "Solve an instance and write reports");
    auto* inst_opt = run_cmd->add_option("--instance", run_opts.instance, "Instance JSON file");
    auto* builtin_opt = run_cmd->add_option("--builtin", run_opts.builtin, "Built-in instance")
                            ->check(CLI::IsMember({"lands", "cvar"}));
    inst_opt->excludes(builtin_opt);
    run_cmd->add_option("--epsilon", run_opts.epsilon, "Relative gap tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run_cmd->add_option("--max-iters", run_opts.max_iterations, "Iteration limit")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
        ->capture_default_str();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Monte Carlo pool seed (overrides the instance)");
    auto* pool_opt = run_cmd->add_option("--mc-pool", pool, "Monte Carlo pool size (overrides the instance)")
                         ->check(CLI::PositiveNumber);
    run_cmd->add_option("--refiner", run_opts.refiner, "Refinement rule")
        ->check(CLI::IsMember({"auto", "dual-cluster", "ranging", "hyperplane"}))
        ->capture_default_str();
    run_cmd->add_flag("--oracle", run_opts.oracle, "Also solve the extensive form (discrete instances)");
    std::string out_dir;
    auto* out_opt = run_cmd->add_option("--out-dir", out_dir, "Directory for iterations.csv, partitions.json, summary.json");
    run_cmd->add_flag("--verbose", run_opts.verbose, "Print per-cell details to stderr");

    std::string lands_out;
    std::vector<double> d1_interval;
    double d1_fixed = 0.0;
    auto* lands_cmd = app.add_subcommand("make-lands", "Write the capacity expansion instance");
    lands_cmd->add_option("--output", lands_out, "Output path")->required();
    auto* interval_opt = lands_cmd->add_option("--d1-interval", d1_interval, "Support of demand 1")->expected(2);
    auto* fixed_opt = lands_cmd->add_option("--d1-fixed", d1_fixed, "Deterministic demand 1");
    interval_opt->excludes(fixed_opt);

    CvarOptions cvar;
    std::string cvar_out;
    std::vector<double> sigma;
    auto* cvar_cmd = app.add_subcommand("make-cvar", "Write a normal-returns CVaR portfolio instance");
    cvar_cmd->add_option("--output", cvar_out, "Output path")->required();
    cvar_cmd->add_option("--mu", cvar.mean, "Mean returns")->capture_default_str();
    auto* sigma_opt = cvar_cmd->add_option("--sigma", sigma, "Covariance, k*k values row-major");
    auto* stdev_opt = cvar_cmd->add_option("--stdev", cvar.stdev, "Standard deviations")->capture_default_str();
    auto* corr_opt = cvar_cmd->add_option("--corr", cvar.correlation, "Common pairwise correlation")
                         ->capture_default_str();
    sigma_opt->excludes(stdev_opt)->excludes(corr_opt);
    cvar_cmd->add_option("--delta", cvar.delta, "CVaR level")->capture_default_str();
    cvar_cmd->add_option("--seed", cvar.seed, "Monte Carlo pool seed")->capture_default_str();
    cvar_cmd->add_option("--pool", cvar.pool_size, "Monte Carlo pool size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_converged : exit_error;
    }

    try {
        if (*run_cmd) {
            if (*seed_opt) run_opts.seed = seed;
            if (*pool_opt) run_opts.mc_pool = pool;
            if (*out_opt) run_opts.out_dir = out_dir;
            return run_command(run_opts, out, err).exit_code;
        }
        if (*lands_cmd) {
            LandsOptions lo;
            if (*interval_opt) lo.d1_interval = {d1_interval[0], d1_interval[1]};
            if (*fixed_opt) lo.d1_fixed = d1_fixed;
            write_instance(make_lands(bundled_lands_data(), lo), lands_out);
            out << "wrote " << lands_out << '\n';
            return exit_converged;
        }
        if (*cvar_cmd) {
            if (*sigma_opt) {
                const std::size_t k = cvar.mean.size();
                if (sigma.size() != k * k) {
                    throw ValidationError("--sigma needs " + std::to_string(k * k) + " values for " +
                                          std::to_string(k) + " assets");
                }
                cvar.covariance = Matrix(k, k);
                for (std::size_t i = 0; i < k; ++i) {
                    for (std::size_t j = 0; j < k; ++j) cvar.covariance(i, j) = sigma[i * k + j];
                }
            }
            write_instance(make_cvar(cvar), cvar_out);
            out << "wrote " << cvar_out << '\n';
            return exit_converged;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}

}  // namespace gapm::cli
