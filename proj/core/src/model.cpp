#include "gapm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapm/errors.hpp"

namespace gapm {

std::size_t RecourseModel::random_dim() const noexcept {
    std::size_t d = 0;
    for (const auto& e : random_entries) d = std::max(d, e.coord + 1);
    return d;
}

void RecourseModel::validate() const {
    const std::size_t n1 = c.size();
    if (A.cols() != n1 && !(A.rows() == 0)) {
        throw ValidationError("model: first-stage matrix A has " + std::to_string(A.cols()) +
                              " columns, expected " + std::to_string(n1));
    }
    if (A.rows() != b.size() || A.rows() != senses.size()) {
        throw ValidationError("model: first-stage rhs/senses must match the rows of A");
    }
    if (!x_lower.empty() && x_lower.size() != n1) throw ValidationError("model: x lower bound length");
    if (!x_upper.empty() && x_upper.size() != n1) throw ValidationError("model: x upper bound length");
    const std::size_t m = W.rows();
    const std::size_t n = W.cols();
    if (m == 0 || n == 0) throw ValidationError("model: recourse matrix W is empty");
    if (q.size() != n) {
        throw ValidationError("model: q has " + std::to_string(q.size()) + " entries, W has " +
                              std::to_string(n) + " columns");
    }
    if (recourse_senses.size() != m) throw ValidationError("model: recourse senses length must equal rows of W");
    if (h.size() != m) throw ValidationError("model: h must have one entry per row of W");
    if (T.rows() != m || T.cols() != n1) {
        throw ValidationError("model: T must be " + std::to_string(m) + " x " + std::to_string(n1));
    }
    for (std::size_t k = 0; k < random_entries.size(); ++k) {
        const auto& e = random_entries[k];
        if (e.row >= m || (e.target == RandomEntry::Target::technology && e.col >= n1)) {
            throw ValidationError("model: random entry " + std::to_string(k) + " is out of bounds");
        }
    }
    const LpSolution sol = solve(first_stage_lp());
    if (sol.status == LpStatus::infeasible) {
        throw ValidationError("model: first-stage feasible set X is empty");
    }
}

StandardLp RecourseModel::first_stage_lp() const {
    StandardLp lp;
    lp.cost = Vector(c.size(), 0.0);
    lp.matrix = A.rows() == 0 ? Matrix(0, c.size()) : A;
    lp.rhs = b;
    lp.senses = senses;
    lp.lower = x_lower;
    lp.upper = x_upper;
    return lp;
}

Realization RecourseModel::realize(std::span<const double> xi, double weight) const {
    if (xi.size() < random_dim()) {
        throw ContractViolation("realize: xi has " + std::to_string(xi.size()) +
                                " coordinates, model needs " + std::to_string(random_dim()));
    }
    Realization r{h, T, weight};
    for (const auto& e : random_entries) {
        if (e.target == RandomEntry::Target::rhs) {
            r.h[e.row] = xi[e.coord];
        } else {
            r.T(e.row, e.col) = xi[e.coord];
        }
    }
    return r;
}

StandardLp subproblem_lp(const RecourseModel& model, std::span<const double> x, const Vector& h,
                         const Matrix& T) {
    if (x.size() != model.first_stage_dim()) {
        throw ContractViolation("subproblem: x has wrong dimension");
    }
    if (h.size() != model.recourse_rows() || T.rows() != model.recourse_rows() ||
        T.cols() != model.first_stage_dim()) {
        throw ContractViolation("subproblem: realization shape does not match the model");
    }
    StandardLp lp;
    lp.cost = model.q;
    lp.matrix = model.W;
    lp.senses = model.recourse_senses;
    lp.rhs = h;
    const Vector tx = T.multiply(x);
    for (std::size_t i = 0; i < lp.rhs.size(); ++i) lp.rhs[i] -= tx[i];
    return lp;
}

SubproblemOutcome evaluate_subproblem(const RecourseModel& model, std::span<const double> x,
                                      const Realization& r, const std::string& label,
                                      const LpOptions& options) {
    StandardLp lp = subproblem_lp(model, x, r.h, r.T);
    const LpSolution sol = solve(lp, options);
    if (sol.status != LpStatus::optimal) {
        throw RecourseViolation("second-stage problem is " + std::string(to_string(sol.status)) +
                                " at " + label);
    }
    return {sol.objective, sol.primal, sol.dual, std::move(lp.rhs)};
}

Vector AggregatedMaster::first_stage(const LpSolution& sol) const {
    return Vector(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(first_stage_dim));
}

Vector AggregatedMaster::cell_primal(const LpSolution& sol, std::size_t cell) const {
    const auto start = sol.primal.begin() + static_cast<std::ptrdiff_t>(y_offset(cell));
    return Vector(start, start + static_cast<std::ptrdiff_t>(recourse_cols));
}

AggregatedMaster build_aggregated_master(const RecourseModel& model, std::span<const CellMeans> cells) {
    if (cells.empty()) throw ValidationError("master: partition has no cells");
    double total = 0.0;
    for (const auto& cell : cells) {
        if (!(cell.mass > 0.0)) throw ValidationError("master: cell mass must be positive");
        if (cell.h.size() != model.recourse_rows() || cell.T.rows() != model.recourse_rows() ||
            cell.T.cols() != model.first_stage_dim()) {
            throw ValidationError("master: conditional means do not match the model shape");
        }
        total += cell.mass;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("master: cell masses sum to " + std::to_string(total) + ", expected 1");
    }

    AggregatedMaster out;
    out.first_stage_dim = model.first_stage_dim();
    out.first_stage_rows = model.A.rows();
    out.recourse_rows = model.recourse_rows();
    out.recourse_cols = model.recourse_cols();
    const std::size_t k = cells.size();
    const std::size_t n1 = out.first_stage_dim;
    const std::size_t cols = n1 + k * out.recourse_cols;
    const std::size_t rows = out.first_stage_rows + k * out.recourse_rows;

    StandardLp& lp = out.lp;
    lp.cost.assign(cols, 0.0);
    lp.matrix = Matrix(rows, cols);
    lp.rhs.assign(rows, 0.0);
    lp.senses.assign(rows, Sense::eq);
    lp.lower.assign(cols, 0.0);
    lp.upper.assign(cols, kInf);

    for (std::size_t j = 0; j < n1; ++j) {
        lp.cost[j] = model.c[j];
        lp.lower[j] = model.x_lower.empty() ? 0.0 : model.x_lower[j];
        lp.upper[j] = model.x_upper.empty() ? kInf : model.x_upper[j];
    }
    for (std::size_t i = 0; i < out.first_stage_rows; ++i) {
        for (std::size_t j = 0; j < n1; ++j) lp.matrix(i, j) = model.A(i, j);
        lp.rhs[i] = model.b[i];
        lp.senses[i] = model.senses[i];
    }
    for (std::size_t p = 0; p < k; ++p) {
        const auto& cell = cells[p];
        out.masses.push_back(cell.mass);
        const std::size_t y0 = out.y_offset(p);
        const std::size_t r0 = out.row_offset(p);
        for (std::size_t j = 0; j < out.recourse_cols; ++j) lp.cost[y0 + j] = cell.mass * model.q[j];
        for (std::size_t i = 0; i < out.recourse_rows; ++i) {
            for (std::size_t j = 0; j < n1; ++j) lp.matrix(r0 + i, j) = cell.T(i, j);
            for (std::size_t j = 0; j < out.recourse_cols; ++j) lp.matrix(r0 + i, y0 + j) = model.W(i, j);
            lp.rhs[r0 + i] = cell.h[i];
            lp.senses[r0 + i] = model.recourse_senses[i];
        }
    }
    return out;
}

std::vector<Vector> extract_cell_duals(const AggregatedMaster& master, const LpSolution& sol) {
    if (sol.status != LpStatus::optimal) {
        throw ContractViolation("extract_cell_duals: master is not optimal");
    }
    std::vector<Vector> out;
    out.reserve(master.cells());
    for (std::size_t p = 0; p < master.cells(); ++p) {
        Vector lambda(master.recourse_rows);
        const std::size_t r0 = master.row_offset(p);
        for (std::size_t i = 0; i < master.recourse_rows; ++i) {
            lambda[i] = sol.dual[r0 + i] / master.masses[p];
        }
        out.push_back(std::move(lambda));
    }
    return out;
}

}  // namespace gapm
