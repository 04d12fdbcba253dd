#include "gapm/parametric.hpp"

#include <algorithm>
#include <cmath>

#include "gapm/errors.hpp"

namespace gapm {

namespace {

bool same_dual(const Vector& a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-9 * (1.0 + std::abs(b[i]))) return false;
    }
    return true;
}

}  // namespace

std::size_t scalar_rhs_row(const RecourseModel& model) {
    if (model.random_entries.size() != 1 ||
        model.random_entries.front().target != RandomEntry::Target::rhs ||
        model.random_entries.front().coord != 0) {
        throw ValidationError("model randomness must be a single rhs component");
    }
    return model.random_entries.front().row;
}

std::vector<DualSegment> scalar_rhs_segments(const RecourseModel& model, std::span<const double> x,
                                             double lo, double hi, double step) {
    const std::size_t row = scalar_rhs_row(model);
    if (!(lo < hi)) throw ContractViolation("segments: empty sweep interval");
    step = std::max(step, 1e-12 * (1.0 + std::abs(hi)));

    auto solve_at = [&](double xi) {
        const double coord[] = {xi};
        const Realization r = model.realize(coord);
        StandardLp lp = subproblem_lp(model, x, r.h, r.T);
        LpSolution sol = solve(lp);
        if (sol.status != LpStatus::optimal) {
            throw RecourseViolation("second-stage problem is " + std::string(to_string(sol.status)) +
                                    " at xi = " + std::to_string(xi));
        }
        return std::pair{std::move(lp), std::move(sol)};
    };
    // rhs(xi) = h(xi) - T x; only `row` depends on xi, with unit slope.
    auto value_at = [&](double xi, const Vector& base_rhs, double base_xi, const Vector& dual) {
        Vector r = base_rhs;
        r[row] += xi - base_xi;
        return dot(r, dual);
    };

    std::vector<DualSegment> out;
    double s = lo;
    while (s < hi) {
        auto [lp, sol] = solve_at(s);
        RangingInterval range = rhs_ranging(lp, sol, row);
        double base_xi = s;
        // rhs[row] = xi - (T x)[row]; convert the interval to xi units.
        const double shift = s - lp.rhs[row];
        double end = std::min(range.upper + shift, hi);
        if (end <= s + step * 0.5) {
            const double probe = std::min(s + step, hi);
            auto probed = solve_at(probe);
            lp = std::move(probed.first);
            sol = std::move(probed.second);
            range = rhs_ranging(lp, sol, row);
            base_xi = probe;
            end = std::min(std::max(range.upper + shift, probe), hi);
        }
        DualSegment seg;
        seg.lo = s;
        seg.hi = end;
        seg.dual = sol.dual;
        seg.value_lo = value_at(s, lp.rhs, base_xi, sol.dual);
        seg.value_hi = value_at(end, lp.rhs, base_xi, sol.dual);
        if (!out.empty() && same_dual(out.back().dual, seg.dual)) {
            out.back().hi = seg.hi;
            out.back().value_hi = seg.value_hi;
        } else {
            out.push_back(std::move(seg));
        }
        s = end;
    }
    return out;
}

double integrate_segments(std::span<const DualSegment> segments) {
    double total = 0.0;
    for (const auto& s : segments) total += 0.5 * (s.value_lo + s.value_hi) * (s.hi - s.lo);
    return total;
}

}  // namespace gapm
