#include "gapm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapm/errors.hpp"
#include "gapm/refiners.hpp"

namespace gapm {

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::gap: return "gap";
        case Termination::conditions_satisfied: return "conditions-satisfied";
        case Termination::partition_stabilized: return "partition-stabilized";
        case Termination::iteration_limit: return "iteration-limit";
    }
    return "?";
}

void GapmConfig::validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("config: epsilon must be positive");
    if (max_iterations < 1) throw ValidationError("config: max_iterations must be at least 1");
    if (!(condition_tol >= 0.0)) throw ValidationError("config: condition tolerance must be nonnegative");
}

MasterSolve solve_master(const RecourseModel& model, const Partition& partition, const GapmConfig& config) {
    const std::vector<CellMeans> means = partition.means();
    MasterSolve out{build_aggregated_master(model, means), {}, {}, 0.0};
    LpOptions options;
    options.trace = config.lp_trace;
    if (config.tie_break == TieBreak::lexicographic) {
        const std::size_t n1 = model.first_stage_dim();
        for (std::size_t k = n1; k-- > 0;) {
            Vector g(out.master.lp.num_cols(), 0.0);
            g[k] = 1.0;
            options.tie_break.push_back(std::move(g));
        }
    }
    out.solution = solve(out.master.lp, options);
    if (out.solution.status != LpStatus::optimal) {
        throw RecourseViolation("aggregated master is " + std::string(to_string(out.solution.status)));
    }
    out.x = out.master.first_stage(out.solution);
    out.objective = out.solution.objective;
    return out;
}

std::optional<std::vector<ConditionSample>> atomized_samples(const RecourseModel& model,
                                                             const UncertaintySpace& space,
                                                             const Cell& cell, std::span<const double> x) {
    auto atoms = space.cell_realizations(cell);
    if (!atoms) return std::nullopt;
    std::vector<ConditionSample> out;
    out.reserve(atoms->size());
    for (std::size_t k = 0; k < atoms->size(); ++k) {
        auto& r = (*atoms)[k];
        SubproblemOutcome o =
            evaluate_subproblem(model, x, r, "atom " + std::to_string(k) + " of cell " + std::to_string(cell.id));
        out.push_back({r.weight, std::move(r.h), std::move(r.T), std::move(o.dual)});
    }
    return out;
}

bool check_conditions(std::span<const ConditionSample> samples, std::span<const double> x, double tol) {
    if (samples.empty()) throw ContractViolation("check_conditions: cell has no atoms");
    const std::size_t m = samples.front().h.size();
    const std::size_t n1 = x.size();
    double total = 0.0;
    for (const auto& s : samples) {
        if (s.dual.size() != m) throw ContractViolation("check_conditions: missing or malformed dual");
        total += s.weight;
    }
    if (!(total > 0.0)) throw ContractViolation("check_conditions: cell has zero weight");

    Vector mean_h(m, 0.0);
    Vector mean_lambda(m, 0.0);
    Matrix mean_T(m, n1);
    double mean_h_lambda = 0.0;
    Vector mean_T_lambda(n1, 0.0);  // E[T^T lambda]
    for (const auto& s : samples) {
        const double w = s.weight / total;
        for (std::size_t i = 0; i < m; ++i) {
            mean_h[i] += w * s.h[i];
            mean_lambda[i] += w * s.dual[i];
            for (std::size_t j = 0; j < n1; ++j) mean_T(i, j) += w * s.T(i, j);
        }
        mean_h_lambda += w * dot(s.h, s.dual);
        const Vector tl = s.T.multiply_transposed(s.dual);
        for (std::size_t j = 0; j < n1; ++j) mean_T_lambda[j] += w * tl[j];
    }
    auto close = [tol](double lhs, double rhs) { return std::abs(lhs - rhs) <= tol * (1.0 + std::abs(rhs)); };
    const double lhs_a = dot(mean_h, mean_lambda);
    const double lhs_b = dot(x, mean_T.multiply_transposed(mean_lambda));
    const double rhs_b = dot(x, mean_T_lambda);
    return close(lhs_a, mean_h_lambda) && close(lhs_b, rhs_b);
}

std::optional<double> compute_upper_bound(const RecourseModel& model, const UncertaintySpace& space,
                                          const Vector& x, UpperBoundMode mode) {
    if (mode == UpperBoundMode::off) return std::nullopt;
    auto ub = space.upper_bound(model, x);
    if (!ub && mode == UpperBoundMode::on) {
        throw ValidationError("upper bound requested but the " + std::string(space.kind()) +
                              " backend has no method for it");
    }
    return ub;
}

std::optional<double> relative_gap(double lower, std::optional<double> upper) {
    if (!upper) return std::nullopt;
    const double diff = *upper - lower;
    if (*upper == 0.0) return diff == 0.0 ? 0.0 : (diff > 0.0 ? kInf : -kInf);
    return diff / std::abs(*upper);
}

GapmResult run(const RecourseModel& model, const UncertaintySpace& space, const Refiner& refiner,
               const GapmConfig& config) {
    config.validate();
    if (!refiner.supports(space)) {
        throw ContractViolation("refiner '" + std::string(refiner.name()) + "' does not support a " +
                                std::string(space.kind()) + " space");
    }
    GapmResult result;
    Partition partition = space.trivial_partition();
    std::optional<double> best_upper;

    for (std::size_t t = 1;; ++t) {
        const MasterSolve ms = solve_master(model, partition, config);

        IterationRecord rec;
        rec.t = t;
        rec.lower = ms.objective;
        rec.x = ms.x;
        rec.cells = partition.size();
        rec.master_pivots = ms.solution.iterations;
        rec.upper = compute_upper_bound(model, space, ms.x, config.upper_bound);
        if (rec.upper) best_upper = best_upper ? std::min(*best_upper, *rec.upper) : *rec.upper;
        rec.best_upper = best_upper;
        rec.gap = relative_gap(rec.lower, best_upper);

        rec.cell_values.reserve(partition.size());
        for (const auto& cell : partition.cells) {
            const Realization mean{cell.h_mean, cell.T_mean, cell.mass};
            rec.cell_values.push_back(
                evaluate_subproblem(model, ms.x, mean, "conditional mean of cell " + std::to_string(cell.id)).value);
        }

        result.history.push_back(rec);
        result.partitions.push_back(partition);
        result.x = ms.x;
        result.objective = ms.objective;

        if (rec.gap && *rec.gap < config.epsilon) {
            result.reason = Termination::gap;
            break;
        }
        if (!refiner.certifies_on_noop() &&
            refiner.conditions_hold(model, space, partition, ms.x, config.condition_tol)) {
            result.reason = Termination::conditions_satisfied;
            break;
        }
        if (t >= config.max_iterations) {
            result.reason = Termination::iteration_limit;
            break;
        }
        SplitResult refined = refiner.refine(model, space, partition, ms.x);
        if (!refined.changed) {
            result.reason = refiner.certifies_on_noop() ? Termination::conditions_satisfied
                                                        : Termination::partition_stabilized;
            break;
        }
        partition = std::move(refined.partition);
    }
    result.partition = partition;
    return result;
}

ExtensiveFormResult solve_extensive_form(const RecourseModel& model, const DiscreteSpace& space) {
    std::vector<CellMeans> cells;
    for (const auto& r : space.scenarios()) {
        if (r.weight > 0.0) cells.push_back({r.weight, r.h, r.T});
    }
    const AggregatedMaster master = build_aggregated_master(model, cells);
    const LpSolution sol = solve(master.lp);
    if (sol.status != LpStatus::optimal) {
        throw RecourseViolation("extensive form is " + std::string(to_string(sol.status)));
    }
    return {sol.objective, master.first_stage(sol)};
}

}  // namespace gapm
