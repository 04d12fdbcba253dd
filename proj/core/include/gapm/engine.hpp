#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/lp.hpp"
#include "gapm/model.hpp"
#include "gapm/partition.hpp"

namespace gapm {

class Refiner;

enum class UpperBoundMode { automatic, on, off };
enum class TieBreak { none, lexicographic };
enum class Termination { gap, conditions_satisfied, partition_stabilized, iteration_limit };

std::string_view to_string(Termination t);

struct GapmConfig {
    /// Relative gap threshold.
    double epsilon = 1e-4;
    std::size_t max_iterations = 100;
    /// Relative tolerance for the expectation-of-products conditions.
    double condition_tol = 1e-6;
    UpperBoundMode upper_bound = UpperBoundMode::automatic;
    /// Among optimal master solutions, minimize x[n-1], then x[n-2], ...
    TieBreak tie_break = TieBreak::lexicographic;
    std::ostream* lp_trace = nullptr;

    void validate() const;
};

struct IterationRecord {
    std::size_t t = 0;
    double lower = 0.0;
    /// Upper bound evaluated at this iteration's incumbent.
    std::optional<double> upper;
    /// Running minimum of the upper bounds, used for the gap.
    std::optional<double> best_upper;
    std::optional<double> gap;
    std::size_t cells = 0;
    Vector x;
    /// Q(x, E[xi | P]) per cell.
    Vector cell_values;
    std::size_t master_pivots = 0;
};

struct GapmResult {
    Vector x;
    double objective = 0.0;
    Partition partition;
    std::vector<IterationRecord> history;
    /// Partition used at each iteration (same length as history).
    std::vector<Partition> partitions;
    Termination reason = Termination::iteration_limit;
};

GapmResult run(const RecourseModel& model, const UncertaintySpace& space, const Refiner& refiner,
               const GapmConfig& config = {});

struct MasterSolve {
    AggregatedMaster master;
    LpSolution solution;
    Vector x;
    double objective = 0.0;
};

/// Solves the aggregated master for the partition.
MasterSolve solve_master(const RecourseModel& model, const Partition& partition, const GapmConfig& config = {});

/// One atom of a cell with its optimal second-stage dual at the incumbent.
struct ConditionSample {
    double weight = 1.0;
    Vector h;
    Matrix T;
    Vector dual;
};

/// Atomized duals at x for every realization the backend enumerates in the
/// cell; nullopt when the backend cannot enumerate atoms.
std::optional<std::vector<ConditionSample>> atomized_samples(const RecourseModel& model,
                                                             const UncertaintySpace& space,
                                                             const Cell& cell, std::span<const double> x);

/// E[h]^T E[lambda] == E[h^T lambda] and x^T E[T]^T E[lambda] == x^T E[T^T lambda],
/// each within tol * (1 + |rhs|).
bool check_conditions(std::span<const ConditionSample> samples, std::span<const double> x, double tol);

std::optional<double> compute_upper_bound(const RecourseModel& model, const UncertaintySpace& space,
                                          const Vector& x, UpperBoundMode mode = UpperBoundMode::automatic);

/// (upper - lower) / |upper|; nullopt when upper is absent.
std::optional<double> relative_gap(double lower, std::optional<double> upper);

struct ExtensiveFormResult {
    double objective = 0.0;
    Vector x;
};

/// Full deterministic equivalent over every scenario.
ExtensiveFormResult solve_extensive_form(const RecourseModel& model, const DiscreteSpace& space);

}  // namespace gapm
