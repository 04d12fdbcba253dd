#include "gapm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "gapm/errors.hpp"

namespace gapm {

std::string_view to_string(Sense s) {
    switch (s) {
        case Sense::eq: return "eq";
        case Sense::le: return "le";
        case Sense::ge: return "ge";
    }
    return "?";
}

Sense parse_sense(std::string_view s) {
    if (s == "eq" || s == "=" || s == "==") return Sense::eq;
    if (s == "le" || s == "<=") return Sense::le;
    if (s == "ge" || s == ">=") return Sense::ge;
    throw ValidationError("unknown row sense '" + std::string(s) + "'");
}

std::string_view to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

void StandardLp::validate() const {
    const std::size_t m = matrix.rows();
    const std::size_t n = matrix.cols();
    if (cost.size() != n) {
        throw ValidationError("lp: cost has " + std::to_string(cost.size()) + " entries, matrix has " +
                              std::to_string(n) + " columns");
    }
    if (rhs.size() != m || senses.size() != m) {
        throw ValidationError("lp: rhs/senses length must equal row count " + std::to_string(m));
    }
    if (!lower.empty() && lower.size() != n) throw ValidationError("lp: lower bound length mismatch");
    if (!upper.empty() && upper.size() != n) throw ValidationError("lp: upper bound length mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        const double l = lower_bound(j);
        const double u = upper_bound(j);
        if (std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf || l > u) {
            throw ValidationError("lp: invalid bounds on column " + std::to_string(j));
        }
    }
    for (double v : matrix.data()) {
        if (!std::isfinite(v)) throw ValidationError("lp: non-finite matrix entry");
    }
    for (double v : rhs) {
        if (!std::isfinite(v)) throw ValidationError("lp: non-finite rhs entry");
    }
    for (double v : cost) {
        if (!std::isfinite(v)) throw ValidationError("lp: non-finite cost entry");
    }
}

double primal_residual(const StandardLp& lp, const Vector& y) {
    double worst = 0.0;
    const Vector act = lp.matrix.multiply(y);
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const double d = act[i] - lp.rhs[i];
        switch (lp.senses[i]) {
            case Sense::eq: worst = std::max(worst, std::abs(d)); break;
            case Sense::le: worst = std::max(worst, d); break;
            case Sense::ge: worst = std::max(worst, -d); break;
        }
    }
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        worst = std::max(worst, lp.lower_bound(j) - y[j]);
        worst = std::max(worst, y[j] - lp.upper_bound(j));
    }
    return worst;
}

namespace {

enum class ColumnMap { shifted, negated, split };

struct VariableMap {
    ColumnMap kind = ColumnMap::shifted;
    std::size_t col = 0;  // canonical column (positive part for split)
    double offset = 0.0;  // lower bound (shifted) or upper bound (negated)
};

// Equality form  A z = b, z >= 0, b >= 0, built from a StandardLp.
struct Canonical {
    Matrix a;
    Vector b;
    Vector c;
    double c_offset = 0.0;
    Vector row_sign;  // canonical row i = row_sign[i] * (original or bound row i)
    Vector row_shift;  // rhs shift from bound substitution, original orientation
    std::vector<VariableMap> vars;
    std::size_t original_rows = 0;
    std::size_t structural_cols = 0;

    std::size_t rows() const { return a.rows(); }
    std::size_t cols() const { return a.cols(); }

    Vector map_cost(const Vector& cost) const {
        Vector out(cols(), 0.0);
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const auto& v = vars[j];
            switch (v.kind) {
                case ColumnMap::shifted: out[v.col] = cost[j]; break;
                case ColumnMap::negated: out[v.col] = -cost[j]; break;
                case ColumnMap::split:
                    out[v.col] = cost[j];
                    out[v.col + 1] = -cost[j];
                    break;
            }
        }
        return out;
    }

    Vector recover(const Vector& z) const {
        Vector y(vars.size(), 0.0);
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const auto& v = vars[j];
            switch (v.kind) {
                case ColumnMap::shifted: y[j] = v.offset + z[v.col]; break;
                case ColumnMap::negated: y[j] = v.offset - z[v.col]; break;
                case ColumnMap::split: y[j] = z[v.col] - z[v.col + 1]; break;
            }
        }
        return y;
    }
};

Canonical canonicalize(const StandardLp& lp) {
    const std::size_t m = lp.num_rows();
    const std::size_t n = lp.num_cols();
    Canonical cf;
    cf.original_rows = m;
    cf.vars.resize(n);

    std::size_t next_col = 0;
    std::vector<std::size_t> bound_rows;  // original vars needing an upper-bound row
    for (std::size_t j = 0; j < n; ++j) {
        const double l = lp.lower_bound(j);
        const double u = lp.upper_bound(j);
        auto& v = cf.vars[j];
        if (std::isfinite(l)) {
            v = {ColumnMap::shifted, next_col++, l};
            if (std::isfinite(u)) bound_rows.push_back(j);
        } else if (std::isfinite(u)) {
            v = {ColumnMap::negated, next_col++, u};
        } else {
            v = {ColumnMap::split, next_col, 0.0};
            next_col += 2;
        }
    }
    cf.structural_cols = next_col;

    const std::size_t total_rows = m + bound_rows.size();
    std::size_t slack_count = bound_rows.size();
    for (Sense s : lp.senses) {
        if (s != Sense::eq) ++slack_count;
    }
    cf.a = Matrix(total_rows, next_col + slack_count);
    cf.b.assign(total_rows, 0.0);
    cf.row_sign.assign(total_rows, 1.0);
    cf.row_shift.assign(total_rows, 0.0);

    for (std::size_t i = 0; i < m; ++i) {
        double shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = lp.matrix(i, j);
            if (aij == 0.0) continue;
            const auto& v = cf.vars[j];
            switch (v.kind) {
                case ColumnMap::shifted:
                    cf.a(i, v.col) = aij;
                    shift += aij * v.offset;
                    break;
                case ColumnMap::negated:
                    cf.a(i, v.col) = -aij;
                    shift += aij * v.offset;
                    break;
                case ColumnMap::split:
                    cf.a(i, v.col) = aij;
                    cf.a(i, v.col + 1) = -aij;
                    break;
            }
        }
        cf.row_shift[i] = shift;
        cf.b[i] = lp.rhs[i] - shift;
    }

    std::size_t slack = next_col;
    for (std::size_t i = 0; i < m; ++i) {
        if (lp.senses[i] == Sense::le) cf.a(i, slack++) = 1.0;
        if (lp.senses[i] == Sense::ge) cf.a(i, slack++) = -1.0;
    }
    for (std::size_t k = 0; k < bound_rows.size(); ++k) {
        const std::size_t j = bound_rows[k];
        const std::size_t r = m + k;
        cf.a(r, cf.vars[j].col) = 1.0;
        cf.a(r, slack++) = 1.0;
        cf.b[r] = lp.upper_bound(j) - lp.lower_bound(j);
    }

    for (std::size_t i = 0; i < total_rows; ++i) {
        if (cf.b[i] < 0.0) {
            cf.row_sign[i] = -1.0;
            cf.b[i] = -cf.b[i];
            for (double& v : cf.a.row(i)) v = -v;
        }
    }

    cf.c = cf.map_cost(lp.cost);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = cf.vars[j];
        if (v.kind != ColumnMap::split) cf.c_offset += lp.cost[j] * v.offset;
    }
    return cf;
}

// Full tableau [A | I | b] with artificial identity; basis per row.
class Tableau {
public:
    Tableau(const Canonical& cf, const LpOptions& opt) : cf_(cf), opt_(opt) {
        m_ = cf.rows();
        n_ = cf.cols();
        width_ = n_ + m_ + 1;
        reset();
    }

    void reset() {
        t_ = Matrix(m_, width_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) t_(i, j) = cf_.a(i, j);
            t_(i, n_ + i) = 1.0;
            t_(i, width_ - 1) = cf_.b[i];
        }
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::size_t rhs_col() const { return width_ - 1; }
    bool is_artificial(std::size_t j) const { return j >= n_ && j < n_ + m_; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    double value(std::size_t i) const { return t_(i, rhs_col()); }
    double at(std::size_t i, std::size_t j) const { return t_(i, j); }

    /// Reduced-cost row for cost vector over [structural | artificial].
    Vector cost_row(const Vector& cost_struct, const Vector& cost_art) const {
        Vector d(width_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) d[j] = cost_struct[j];
        for (std::size_t i = 0; i < m_; ++i) d[n_ + i] = cost_art[i];
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t bj = basis_[i];
            const double cb = bj < n_ ? cost_struct[bj] : cost_art[bj - n_];
            if (cb == 0.0) continue;
            const auto row = t_.row(i);
            for (std::size_t j = 0; j < width_; ++j) d[j] -= cb * row[j];
        }
        return d;
    }

    void pivot(std::size_t r, std::size_t k, std::vector<Vector*>& cost_rows) {
        auto prow = t_.row(r);
        const double p = prow[k];
        for (double& v : prow) v /= p;
        prow[k] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, k);
            if (f == 0.0) continue;
            auto row = t_.row(i);
            for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
            row[k] = 0.0;
        }
        for (Vector* d : cost_rows) {
            const double f = (*d)[k];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) (*d)[j] -= f * prow[j];
            (*d)[k] = 0.0;
        }
        basis_[r] = k;
    }

    /// Rebuilds B^-1 [A | I | b] from scratch for the given basic columns.
    void refactor(const std::vector<std::size_t>& basic_cols) {
        reset();
        std::vector<bool> assigned(m_, false);
        std::vector<Vector*> none;
        for (std::size_t k : basic_cols) {
            std::size_t best = m_;
            double best_abs = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (assigned[i]) continue;
                const double a = std::abs(t_(i, k));
                if (a > best_abs) {
                    best_abs = a;
                    best = i;
                }
            }
            if (best == m_ || best_abs < opt_.tol.pivot) {
                throw SolverFailure("lp: basis matrix singular during refactorization");
            }
            pivot(best, k, none);
            assigned[best] = true;
        }
    }

    void dump(std::ostream& os, std::string_view label, const Vector* d) const {
        os << "-- tableau " << label << " (" << m_ << " x " << width_ << ")\n";
        os << "   basis:";
        for (std::size_t b : basis_) os << ' ' << b;
        os << '\n';
        if (width_ > 40) return;
        const auto flags = os.flags();
        os << std::setprecision(4);
        for (std::size_t i = 0; i < m_; ++i) {
            os << "   ";
            for (std::size_t j = 0; j < width_; ++j) os << std::setw(10) << t_(i, j);
            os << '\n';
        }
        if (d != nullptr) {
            os << "   ";
            for (std::size_t j = 0; j < width_; ++j) os << std::setw(10) << (*d)[j];
            os << '\n';
        }
        os.flags(flags);
    }

private:
    const Canonical& cf_;
    const LpOptions& opt_;
    std::size_t m_ = 0;
    std::size_t n_ = 0;
    std::size_t width_ = 0;
    Matrix t_;
    std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded };

constexpr std::size_t kStallLimit = 50;

class SimplexDriver {
public:
    SimplexDriver(Tableau& tab, const LpOptions& opt) : tab_(tab), opt_(opt) {}

    std::size_t iterations() const { return iterations_; }

    // Minimizes the objective whose reduced costs are *cost_rows[0]; other rows
    // are kept consistent. Only columns flagged in `allowed` may enter.
    PhaseResult run(std::vector<Vector*>& cost_rows, const std::vector<bool>& allowed,
                    double opt_tol) {
        Vector& d = *cost_rows.front();
        bool bland = false;
        std::size_t stall = 0;
        const std::size_t m = tab_.rows();
        const std::size_t rhs = tab_.rhs_col();
        while (true) {
            if (iterations_ >= opt_.max_iterations) {
                throw SolverFailure("lp: iteration limit reached");
            }
            std::size_t enter = rhs;
            double best = -opt_tol;
            for (std::size_t j = 0; j < rhs; ++j) {
                if (!allowed[j] || d[j] >= -opt_tol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (d[j] < best) {
                    best = d[j];
                    enter = j;
                }
            }
            if (enter == rhs) return PhaseResult::optimal;

            std::size_t leave = m;
            double best_ratio = kInf;
            double best_piv = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab_.at(i, enter);
                if (a <= opt_.tol.pivot) continue;
                const double ratio = std::max(tab_.value(i), 0.0) / a;
                const double slack = 1e-12 * (1.0 + std::abs(best_ratio == kInf ? ratio : best_ratio));
                bool take = false;
                if (leave == m || ratio < best_ratio - slack) {
                    take = true;
                } else if (ratio <= best_ratio + slack) {
                    if (bland) {
                        take = tab_.basis()[i] < tab_.basis()[leave];
                    } else {
                        take = a > best_piv ||
                               (a == best_piv && tab_.basis()[i] < tab_.basis()[leave]);
                    }
                }
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                    best_piv = a;
                }
            }
            if (leave == m) return PhaseResult::unbounded;

            if (best_ratio <= 1e-12) {
                if (++stall >= kStallLimit) bland = true;
            } else if (!bland) {
                stall = 0;
            }
            tab_.pivot(leave, enter, cost_rows);
            ++iterations_;
        }
    }

private:
    Tableau& tab_;
    const LpOptions& opt_;
    std::size_t iterations_ = 0;
};

Vector extract_z(const Tableau& tab) {
    Vector z(tab.cols(), 0.0);
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const std::size_t bj = tab.basis()[i];
        if (bj < tab.cols()) z[bj] = std::max(tab.value(i), 0.0);
    }
    return z;
}

}  // namespace

LpSolution solve(const StandardLp& lp, const LpOptions& options) {
    lp.validate();
    for (const Vector& g : options.tie_break) {
        if (g.size() != lp.num_cols()) throw ValidationError("lp: tie-break objective length mismatch");
    }
    const Canonical cf = canonicalize(lp);
    const std::size_t m = cf.rows();
    const std::size_t n = cf.cols();
    const double opt_tol = 1e-9 * std::max(1.0, norm_inf(cf.c));

    LpSolution sol;
    Tableau tab(cf, options);
    SimplexDriver driver(tab, options);

    // Phase 1: minimize the sum of artificials.
    {
        Vector zero_struct(n, 0.0);
        Vector ones(m, 1.0);
        Vector d = tab.cost_row(zero_struct, ones);
        std::vector<Vector*> rows{&d};
        std::vector<bool> allowed(n + m, false);
        std::fill(allowed.begin(), allowed.begin() + static_cast<std::ptrdiff_t>(n), true);
        if (options.trace) tab.dump(*options.trace, "phase 1 start", &d);
        driver.run(rows, allowed, 1e-9);
        if (options.trace) tab.dump(*options.trace, "phase 1 end", &d);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.is_artificial(tab.basis()[i])) infeas += std::max(tab.value(i), 0.0);
        }
        if (infeas > options.tol.feas * (1.0 + norm_inf(cf.b))) {
            sol.status = LpStatus::infeasible;
            sol.iterations = driver.iterations();
            return sol;
        }
        // Drive remaining artificials out where a structural pivot exists.
        std::vector<Vector*> none;
        for (std::size_t i = 0; i < m; ++i) {
            if (!tab.is_artificial(tab.basis()[i])) continue;
            std::size_t best = n;
            double best_abs = options.tol.pivot;
            for (std::size_t j = 0; j < n; ++j) {
                const double a = std::abs(tab.at(i, j));
                if (a > best_abs) {
                    best_abs = a;
                    best = j;
                }
            }
            if (best != n) tab.pivot(i, best, none);
        }
    }

    const Vector zero_art(m, 0.0);
    std::vector<Vector> tie_costs;
    tie_costs.reserve(options.tie_break.size());
    for (const Vector& g : options.tie_break) tie_costs.push_back(cf.map_cost(g));

    bool verified = false;
    for (int round = 0; round < 4 && !verified; ++round) {
        Vector d = tab.cost_row(cf.c, zero_art);
        std::vector<bool> allowed(n + m, false);
        std::fill(allowed.begin(), allowed.begin() + static_cast<std::ptrdiff_t>(n), true);
        std::vector<Vector*> rows{&d};
        if (options.trace) tab.dump(*options.trace, "phase 2 start", &d);
        if (driver.run(rows, allowed, opt_tol) == PhaseResult::unbounded) {
            sol.status = LpStatus::unbounded;
            sol.iterations = driver.iterations();
            return sol;
        }

        std::vector<Vector> tie_rows;
        tie_rows.reserve(tie_costs.size());
        for (const Vector& g : tie_costs) tie_rows.push_back(tab.cost_row(g, zero_art));
        std::vector<Vector*> previous{&d};
        for (std::size_t k = 0; k < tie_rows.size(); ++k) {
            const Vector& last = *previous.back();
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(last[j]) > (previous.size() == 1 ? opt_tol : 1e-9)) allowed[j] = false;
            }
            std::vector<Vector*> active{&tie_rows[k]};
            active.insert(active.end(), previous.begin(), previous.end());
            for (std::size_t r = k + 1; r < tie_rows.size(); ++r) active.push_back(&tie_rows[r]);
            if (driver.run(active, allowed, 1e-9) == PhaseResult::unbounded) break;
            previous.push_back(&tie_rows[k]);
        }

        // Refactor from the final basis and verify primal and dual feasibility.
        const std::vector<std::size_t> final_basis = tab.basis();
        tab.refactor(final_basis);
        const Vector dv = tab.cost_row(cf.c, zero_art);
        verified = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.value(i) < -options.tol.feas) verified = false;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (dv[j] < -opt_tol * 10.0) verified = false;
        }
        if (options.trace) tab.dump(*options.trace, verified ? "verified" : "refactored, resuming", &dv);
    }
    if (!verified) throw SolverFailure("lp: could not verify optimal basis after refactorization");

    const Vector d = tab.cost_row(cf.c, zero_art);
    const Vector z = extract_z(tab);
    sol.status = LpStatus::optimal;
    sol.primal = cf.recover(z);
    sol.objective = dot(lp.cost, sol.primal);
    sol.dual.assign(lp.num_rows(), 0.0);
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        // Reduced cost of artificial i equals minus the canonical row dual.
        sol.dual[i] = -d[n + i] * cf.row_sign[i];
    }
    sol.basis = tab.basis();
    std::sort(sol.basis.begin(), sol.basis.end());
    sol.iterations = driver.iterations();
    return sol;
}

RangingInterval rhs_ranging(const StandardLp& lp, const LpSolution& sol, std::size_t row,
                            const LpTolerances& tol) {
    if (sol.status != LpStatus::optimal) {
        throw ContractViolation("rhs_ranging: solution is not optimal");
    }
    if (row >= lp.num_rows()) throw ContractViolation("rhs_ranging: row out of range");
    const Canonical cf = canonicalize(lp);
    const std::size_t m = cf.rows();
    const std::size_t n = cf.cols();
    if (sol.basis.size() != m) throw ContractViolation("rhs_ranging: basis does not match lp");

    Matrix bmat(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t col = sol.basis[k];
        if (col < n) {
            for (std::size_t i = 0; i < m; ++i) bmat(i, k) = cf.a(i, col);
        } else if (col < n + m) {
            bmat(col - n, k) = 1.0;
        } else {
            throw ContractViolation("rhs_ranging: basis index out of range");
        }
    }
    Vector xb;
    Vector dir;
    Vector unit(m, 0.0);
    unit[row] = cf.row_sign[row];
    if (!solve_dense(bmat, cf.b, tol.pivot, xb) || !solve_dense(bmat, unit, tol.pivot, dir)) {
        throw SolverFailure("rhs_ranging: basis matrix singular");
    }

    double lo = -kInf;
    double hi = kInf;
    for (std::size_t k = 0; k < m; ++k) {
        const double dk = dir[k];
        if (std::abs(dk) <= tol.pivot) continue;
        if (sol.basis[k] >= n) {
            // Basic artificial of a redundant row: any change breaks feasibility.
            lo = std::max(lo, 0.0);
            hi = std::min(hi, 0.0);
            continue;
        }
        const double x = std::max(xb[k], 0.0);
        const double step = -x / dk;
        if (dk > 0.0) {
            lo = std::max(lo, step);
        } else {
            hi = std::min(hi, step);
        }
    }
    RangingInterval out;
    out.row = row;
    out.lower = lp.rhs[row] + lo;
    out.upper = lp.rhs[row] + hi;
    out.dual = sol.dual;
    return out;
}

}  // namespace gapm
