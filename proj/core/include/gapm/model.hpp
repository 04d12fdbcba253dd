#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/lp.hpp"

namespace gapm {

/// One random coefficient of h or T, bound to coordinate `coord` of the
/// random vector xi.
struct RandomEntry {
    enum class Target { rhs, technology };
    Target target = Target::rhs;
    std::size_t row = 0;
    std::size_t col = 0;  // technology entries only
    std::size_t coord = 0;

    friend bool operator==(const RandomEntry&, const RandomEntry&) = default;
};

struct Realization {
    Vector h;
    Matrix T;
    double weight = 1.0;
};

/// Two-stage stochastic LP with fixed recourse:
///   min c^T x + E[Q(x, xi)]  over X = {x : A x (senses) b, lower <= x <= upper}
///   Q(x, xi) = min { q^T y : W y (recourse_senses) h(xi) - T(xi) x, y >= 0 }
/// `h` and `T` hold the deterministic values; entries listed in
/// `random_entries` are overwritten by realize().
struct RecourseModel {
    Vector c;
    Matrix A;
    Vector b;
    std::vector<Sense> senses;
    Vector x_lower;
    Vector x_upper;

    Matrix W;
    Vector q;
    std::vector<Sense> recourse_senses;
    Vector h;
    Matrix T;
    std::vector<RandomEntry> random_entries;

    std::size_t first_stage_dim() const noexcept { return c.size(); }
    std::size_t recourse_rows() const noexcept { return W.rows(); }
    std::size_t recourse_cols() const noexcept { return W.cols(); }
    /// Number of coordinates of xi referenced by random_entries.
    std::size_t random_dim() const noexcept;

    /// Shape checks plus one LP solve confirming X is nonempty.
    void validate() const;

    StandardLp first_stage_lp() const;

    /// Deterministic data with random entries replaced by xi.
    Realization realize(std::span<const double> xi, double weight = 1.0) const;

    friend bool operator==(const RecourseModel&, const RecourseModel&) = default;
};

struct SubproblemOutcome {
    double value = 0.0;
    Vector primal;
    Vector dual;
    /// h - T x as used in the solve.
    Vector rhs;
};

/// Second-stage LP at first-stage decision x and data (h, T).
StandardLp subproblem_lp(const RecourseModel& model, std::span<const double> x, const Vector& h,
                         const Matrix& T);

/// Solves Q(x, r). Throws RecourseViolation naming `label` when the LP is
/// infeasible or unbounded.
SubproblemOutcome evaluate_subproblem(const RecourseModel& model, std::span<const double> x,
                                      const Realization& r, const std::string& label = "realization",
                                      const LpOptions& options = {});

struct CellMeans {
    double mass = 1.0;
    Vector h;
    Matrix T;
};

/// Deterministic equivalent of the aggregated problem with one scenario per
/// cell, plus the column/row layout needed to read results back.
struct AggregatedMaster {
    StandardLp lp;
    std::size_t first_stage_dim = 0;
    std::size_t first_stage_rows = 0;
    std::size_t recourse_rows = 0;
    std::size_t recourse_cols = 0;
    Vector masses;

    std::size_t cells() const noexcept { return masses.size(); }
    std::size_t y_offset(std::size_t cell) const noexcept {
        return first_stage_dim + cell * recourse_cols;
    }
    std::size_t row_offset(std::size_t cell) const noexcept {
        return first_stage_rows + cell * recourse_rows;
    }
    Vector first_stage(const LpSolution& sol) const;
    Vector cell_primal(const LpSolution& sol, std::size_t cell) const;
};

AggregatedMaster build_aggregated_master(const RecourseModel& model, std::span<const CellMeans> cells);

/// Per-cell duals of the aggregated subproblems, mass factored out.
std::vector<Vector> extract_cell_duals(const AggregatedMaster& master, const LpSolution& sol);

}  // namespace gapm
