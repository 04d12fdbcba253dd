#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace gapm::testing {

namespace {

struct Constraint {
    Vector a;
    double b = 0.0;
    bool equality = false;  // else a.y <= b
};

std::vector<Constraint> constraints_of(const StandardLp& lp, bool recession) {
    const std::size_t n = lp.num_cols();
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        Vector a(lp.matrix.row(i).begin(), lp.matrix.row(i).end());
        double b = recession ? 0.0 : lp.rhs[i];
        switch (lp.senses[i]) {
            case Sense::eq: out.push_back({a, b, true}); break;
            case Sense::le: out.push_back({a, b, false}); break;
            case Sense::ge:
                for (double& v : a) v = -v;
                out.push_back({a, -b, false});
                break;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        const double lo = lp.lower_bound(j);
        const double hi = lp.upper_bound(j);
        if (recession) {
            if (std::isfinite(lo)) {
                e[j] = -1.0;
                out.push_back({e, 0.0, false});
            }
            if (std::isfinite(hi)) {
                e[j] = 1.0;
                out.push_back({e, 0.0, false});
            }
            e[j] = 1.0;
            out.push_back({e, 1.0, false});
            e[j] = -1.0;
            out.push_back({e, 1.0, false});
        } else {
            if (std::isfinite(lo)) {
                e[j] = -1.0;
                out.push_back({e, -lo, false});
            }
            if (std::isfinite(hi)) {
                e[j] = 1.0;
                out.push_back({e, hi, false});
            }
        }
    }
    return out;
}

/// Best vertex of {constraints} under cost, or nullopt if there is none.
std::optional<std::pair<double, Vector>> best_vertex(const std::vector<Constraint>& cons, const Vector& cost,
                                                     double tol) {
    const std::size_t n = cost.size();
    const std::size_t k = cons.size();
    if (k < n) return std::nullopt;
    std::optional<std::pair<double, Vector>> best;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
        if (depth == n) {
            Eigen::MatrixXd M(n, n);
            Eigen::VectorXd r(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) M(i, j) = cons[pick[i]].a[j];
                r(i) = cons[pick[i]].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            lu.setThreshold(1e-10);
            if (!lu.isInvertible()) return;
            const Eigen::VectorXd y = lu.solve(r);
            Vector v(y.data(), y.data() + n);
            for (const auto& c : cons) {
                const double lhs = dot(c.a, v);
                const double slack = tol * (1.0 + std::abs(c.b) + norm_inf(c.a) * norm_inf(v));
                if (c.equality ? std::abs(lhs - c.b) > slack : lhs > c.b + slack) return;
            }
            const double obj = dot(cost, v);
            if (!best || obj < best->first) best = std::make_pair(obj, std::move(v));
            return;
        }
        for (std::size_t s = start; s + (n - depth) <= k; ++s) {
            pick[depth] = s;
            rec(depth + 1, s + 1);
        }
    };
    rec(0, 0);
    return best;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

OracleResult vertex_enumeration(const StandardLp& lp, double tol) {
    OracleResult out;
    const auto primal = best_vertex(constraints_of(lp, false), lp.cost, tol);
    if (!primal) {
        out.status = LpStatus::infeasible;
        return out;
    }
    const auto ray = best_vertex(constraints_of(lp, true), lp.cost, tol);
    if (ray && ray->first < -1e-9 * (1.0 + norm_inf(lp.cost))) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.objective = primal->first;
    out.point = primal->second;
    return out;
}

StandardLp extensive_form_lp(const RecourseModel& model, const std::vector<Realization>& scenarios) {
    const std::size_t n1 = model.c.size();
    const std::size_t n2 = model.q.size();
    const std::size_t m1 = model.b.size();
    const std::size_t m2 = model.h.size();
    const std::size_t S = scenarios.size();
    StandardLp lp;
    lp.cost.assign(n1 + S * n2, 0.0);
    lp.matrix = Matrix(m1 + S * m2, n1 + S * n2);
    lp.lower.assign(n1 + S * n2, 0.0);
    lp.upper.assign(n1 + S * n2, kInf);
    for (std::size_t j = 0; j < n1; ++j) {
        lp.cost[j] = model.c[j];
        if (!model.x_lower.empty()) lp.lower[j] = model.x_lower[j];
        if (!model.x_upper.empty()) lp.upper[j] = model.x_upper[j];
    }
    for (std::size_t i = 0; i < m1; ++i) {
        for (std::size_t j = 0; j < n1; ++j) lp.matrix(i, j) = model.A(i, j);
        lp.rhs.push_back(model.b[i]);
        lp.senses.push_back(model.senses[i]);
    }
    for (std::size_t s = 0; s < S; ++s) {
        const std::size_t col = n1 + s * n2;
        const std::size_t row = m1 + s * m2;
        for (std::size_t k = 0; k < n2; ++k) lp.cost[col + k] = scenarios[s].weight * model.q[k];
        for (std::size_t i = 0; i < m2; ++i) {
            for (std::size_t j = 0; j < n1; ++j) lp.matrix(row + i, j) = scenarios[s].T(i, j);
            for (std::size_t k = 0; k < n2; ++k) lp.matrix(row + i, col + k) = model.W(i, k);
            lp.rhs.push_back(scenarios[s].h[i]);
            lp.senses.push_back(model.recourse_senses[i]);
        }
    }
    return lp;
}

StandardLp random_lp(std::mt19937_64& rng, std::size_t max_vars, std::size_t max_rows) {
    const std::size_t n = uniform_int(rng, 1, max_vars);
    const std::size_t m = uniform_int(rng, 1, max_rows);
    StandardLp lp;
    lp.matrix = Matrix(m, n);
    for (std::size_t j = 0; j < n; ++j) lp.cost.push_back(uniform(rng, -2.0, 2.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            lp.matrix(i, j) = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, -3.0, 3.0);
        }
        lp.rhs.push_back(uniform(rng, -3.0, 5.0));
        const double u = uniform(rng, 0.0, 1.0);
        lp.senses.push_back(u < 0.5 ? Sense::le : (u < 0.8 ? Sense::ge : Sense::eq));
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double u = uniform(rng, 0.0, 1.0);
        lp.lower.push_back(u < 0.7 ? 0.0 : uniform(rng, -4.0, 0.0));
        lp.upper.push_back(uniform(rng, 0.0, 1.0) < 0.4 ? lp.lower.back() + uniform(rng, 0.5, 6.0) : kInf);
    }
    return lp;
}

RandomTssp random_tssp(std::mt19937_64& rng, std::size_t n1_lo, std::size_t n1_hi, std::size_t scen_lo,
                       std::size_t scen_hi) {
    RandomTssp out;
    RecourseModel& m = out.model;
    const std::size_t n1 = uniform_int(rng, n1_lo, n1_hi);
    for (std::size_t j = 0; j < n1; ++j) m.c.push_back(uniform(rng, -1.0, 1.0));
    m.A = Matrix(1, n1, 1.0);
    m.b = {0.6 * 5.0 * static_cast<double>(n1)};
    m.senses = {Sense::le};
    m.x_lower.assign(n1, 0.0);
    m.x_upper.assign(n1, 5.0);

    const std::size_t rows = uniform_int(rng, 1, 2);
    std::vector<std::pair<std::size_t, double>> penalties;  // (row, sign)
    for (std::size_t i = 0; i < rows; ++i) {
        const double u = uniform(rng, 0.0, 1.0);
        const Sense s = u < 0.4 ? Sense::ge : (u < 0.75 ? Sense::le : Sense::eq);
        m.recourse_senses.push_back(s);
        if (s != Sense::le) penalties.push_back({i, 1.0});
        if (s != Sense::ge) penalties.push_back({i, -1.0});
    }
    const std::size_t p = penalties.size();
    const std::size_t free_cols = uniform_int(rng, std::max<std::size_t>(1, p < 3 ? 3 - p : 1), 6 - p);
    const std::size_t n2 = p + free_cols;
    m.W = Matrix(rows, n2);
    for (std::size_t k = 0; k < free_cols; ++k) {
        for (std::size_t i = 0; i < rows; ++i) m.W(i, k) = uniform(rng, -1.0, 1.0);
        m.q.push_back(uniform(rng, 0.5, 2.0));
    }
    for (std::size_t k = 0; k < p; ++k) {
        m.W(penalties[k].first, free_cols + k) = penalties[k].second;
        m.q.push_back(uniform(rng, 3.0, 6.0));
    }
    for (std::size_t i = 0; i < rows; ++i) m.h.push_back(uniform(rng, -2.0, 2.0));
    m.T = Matrix(rows, n1);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < n1; ++j) m.T(i, j) = uniform(rng, -1.0, 1.0);
    }

    const std::size_t S = uniform_int(rng, scen_lo, scen_hi);
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        Realization r{m.h, m.T, uniform(rng, 0.2, 1.0)};
        for (double& v : r.h) v += uniform(rng, -2.0, 2.0);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < n1; ++j) r.T(i, j) += uniform(rng, -0.5, 0.5);
        }
        total += r.weight;
        out.scenarios.push_back(std::move(r));
    }
    for (auto& r : out.scenarios) r.weight /= total;
    return out;
}

Vector random_first_stage(std::mt19937_64& rng, const RecourseModel& model) {
    const std::size_t n1 = model.c.size();
    Vector x(n1);
    for (std::size_t j = 0; j < n1; ++j) x[j] = uniform(rng, model.x_lower[j], model.x_upper[j]);
    double sum = 0.0;
    for (double v : x) sum += v;
    if (sum > model.b[0]) {
        for (double& v : x) v *= model.b[0] / sum;
    }
    return x;
}

}  // namespace gapm::testing
