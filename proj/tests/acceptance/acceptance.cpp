// Acceptance checks. Usage: gapm_acceptance [criterion...]; no argument runs all.
// One "PASS name: ..." or "FAIL name: ..." line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gapm/cli/builders.hpp"
#include "gapm/cli/commands.hpp"
#include "gapm/engine.hpp"
#include "gapm/errors.hpp"
#include "gapm/lp.hpp"
#include "gapm/refiners.hpp"
#include "oracles.hpp"

using namespace gapm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 10) failures.push_back(what);
        }
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// tolerances
constexpr double kCapacityTol = 0.01;
constexpr double kCapacityEpsilon = 2e-6;
constexpr double kCapacityGap = 1e-5;
constexpr double kCapacitySeconds = 5.0;
constexpr double kDiscreteRel = 1e-6;
constexpr double kConditionTol = 1e-6;
constexpr double kAveragingTol = 1e-7;
constexpr double kCvarGap = 0.005;
constexpr std::size_t kCvarIterations = 15;
constexpr double kCvarMonotone = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kLpTol = 1e-7;

Verdict capacity_bounds() {
    Verdict v;
    const double lb[] = {378.667, 380.122, 380.601, 380.842, 380.843, 380.844};
    const double ub[] = {382.711, 381.100, 380.844, 380.893, 380.856, 380.847};
    const double x6[] = {1.875, 4.042, 3.646, 2.438};

    cli::RunOptions opt;
    opt.builtin = "lands";
    opt.epsilon = kCapacityEpsilon;
    std::ostringstream out;
    std::ostringstream err;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli::run_command(opt, out, err);
    const double secs = seconds_since(t0);
    const auto& h = r.result.history;

    v.expect(h.size() == 6, fmt("expected 6 iterations, got %zu", h.size()));
    double worst = 0.0;
    for (std::size_t t = 0; t < std::min<std::size_t>(h.size(), 6); ++t) {
        const double dl = std::abs(h[t].lower - lb[t]);
        const double du = h[t].upper ? std::abs(*h[t].upper - ub[t]) : INFINITY;
        worst = std::max({worst, dl, du});
        v.expect(dl <= kCapacityTol, fmt("LB[%zu] = %.6f vs %.3f", t + 1, h[t].lower, lb[t]));
        v.expect(du <= kCapacityTol, fmt("UB[%zu] off by %.6f", t + 1, du));
    }
    if (h.size() >= 6) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = std::abs(h[5].x[j] - x6[j]);
            worst = std::max(worst, d);
            v.expect(d <= kCapacityTol, fmt("x6[%zu] = %.6f vs %.3f", j, h[5].x[j], x6[j]));
        }
    }
    const double gap = h.empty() || !h.back().gap ? INFINITY : *h.back().gap;
    v.expect(gap <= kCapacityGap, fmt("final gap %.3g", gap));
    v.expect(r.exit_code == cli::exit_converged, "exit code");
    v.expect(secs < kCapacitySeconds, fmt("took %.2f s", secs));
    v.detail = fmt("%zu iterations, max deviation %.2e (tol %.2g), final gap %.2e (tol %.0e), %.3f s", h.size(),
                   worst, kCapacityTol, gap, kCapacityGap, secs);
    return v;
}

Verdict discrete_exactness() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    double worst_rel = 0.0;
    std::size_t max_iters = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = testing::random_tssp(rng, 2, 4, 5, 20);
        const DiscreteSpace space(inst.scenarios);
        const auto ef = solve(testing::extensive_form_lp(inst.model, inst.scenarios));
        if (ef.status != LpStatus::optimal) {
            v.expect(false, fmt("trial %d: oracle status %s", trial, std::string(to_string(ef.status)).c_str()));
            continue;
        }
        GapmConfig cfg;
        cfg.upper_bound = UpperBoundMode::off;
        cfg.condition_tol = kConditionTol;
        const auto res = run(inst.model, space, DualClusteringRefiner{}, cfg);
        max_iters = std::max(max_iters, res.history.size());
        const double rel = std::abs(res.objective - ef.objective) / std::max(1.0, std::abs(ef.objective));
        worst_rel = std::max(worst_rel, rel);
        v.expect(rel <= kDiscreteRel, fmt("trial %d: objective %.9g vs %.9g", trial, res.objective, ef.objective));
        v.expect(res.reason == Termination::conditions_satisfied,
                 fmt("trial %d: terminated by %s", trial, std::string(to_string(res.reason)).c_str()));
        for (const auto& cell : res.partition.cells) {
            const auto samples = atomized_samples(inst.model, space, cell, res.x);
            v.expect(samples && check_conditions(*samples, res.x, kConditionTol),
                     fmt("trial %d: cell %zu fails the conditions", trial, cell.id));
        }
    }
    const double secs = seconds_since(t0);
    v.expect(secs < 60.0, fmt("took %.1f s", secs));
    v.detail = fmt("200 instances, worst relative error %.2e (tol %.0e), conditions tol %.0e, at most %zu "
                   "iterations, %.2f s",
                   worst_rel, kDiscreteRel, kConditionTol, max_iters, secs);
    return v;
}

Verdict cell_averaging() {
    Verdict v;
    std::mt19937_64 rng(77);
    double worst_a = 0.0;
    double worst_b = -INFINITY;
    double worst_c = -INFINITY;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = testing::random_tssp(rng);
        const auto& m = inst.model;
        const Vector x = testing::random_first_stage(rng, m);
        // a random sub-cell of the scenarios
        std::vector<Realization> cell;
        for (const auto& s : inst.scenarios) {
            if (cell.empty() || rng() % 3 != 0) cell.push_back(s);
        }
        double mass = 0.0;
        for (const auto& s : cell) mass += s.weight;

        Vector y_bar(m.recourse_cols(), 0.0);
        Vector l_bar(m.recourse_rows(), 0.0);
        Vector h_bar(m.recourse_rows(), 0.0);
        Matrix t_bar(m.recourse_rows(), m.first_stage_dim());
        double expected = 0.0;
        for (const auto& s : cell) {
            const double w = s.weight / mass;
            const auto o = evaluate_subproblem(m, x, s);
            for (std::size_t k = 0; k < y_bar.size(); ++k) y_bar[k] += w * o.primal[k];
            for (std::size_t i = 0; i < l_bar.size(); ++i) {
                l_bar[i] += w * o.dual[i];
                h_bar[i] += w * s.h[i];
                for (std::size_t j = 0; j < m.first_stage_dim(); ++j) t_bar(i, j) += w * s.T(i, j);
            }
            expected += w * o.value;
        }
        const double res_a = primal_residual(subproblem_lp(m, x, h_bar, t_bar), y_bar);
        worst_a = std::max(worst_a, res_a);
        v.expect(res_a <= kAveragingTol, fmt("trial %d: averaged primal residual %.3g", trial, res_a));
        const Vector wt = m.W.multiply_transposed(l_bar);
        for (std::size_t k = 0; k < wt.size(); ++k) {
            worst_b = std::max(worst_b, wt[k] - m.q[k]);
            v.expect(wt[k] <= m.q[k] + kAveragingTol, fmt("trial %d: (W^T lambda)[%zu] exceeds q", trial, k));
        }
        const double agg = evaluate_subproblem(m, x, Realization{h_bar, t_bar, 1.0}).value;
        worst_c = std::max(worst_c, agg - expected);
        v.expect(agg <= expected + kAveragingTol, fmt("trial %d: Q(E xi) %.9g > E Q %.9g", trial, agg, expected));
    }
    const double secs = seconds_since(t0);
    v.expect(secs < 10.0, fmt("took %.1f s", secs));
    v.detail = fmt("100 cells: max residual %.2e, max (W^T lambda - q) %.2e, max (Q(E xi) - E Q) %.2e, tol %.0e, "
                   "%.2f s",
                   worst_a, worst_b, worst_c, kAveragingTol, secs);
    return v;
}

Verdict cvar_properties() {
    Verdict v;
    const auto inst = cli::make_cvar({});
    const auto space = cli::make_space(inst);
    GapmConfig cfg;
    cfg.epsilon = 1e-4;
    cfg.max_iterations = kCvarIterations;
    const HyperplaneRefiner refiner;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run(inst.model, *space, refiner, cfg);
    const auto& h = res.history;

    std::size_t first_below = 0;
    for (std::size_t t = 0; t < h.size(); ++t) {
        if (t > 0) {
            v.expect(h[t].lower >= h[t - 1].lower - kCvarMonotone * (1 + std::abs(h[t - 1].lower)),
                     fmt("LB decreased at iteration %zu", t + 1));
            v.expect(h[t].cells > h[t - 1].cells, fmt("partition size did not grow at iteration %zu", t + 1));
        }
        if (!first_below && h[t].gap && *h[t].gap < kCvarGap) first_below = t + 1;
    }
    v.expect(first_below != 0 && first_below <= kCvarIterations, "gap never fell below 0.5%");

    std::size_t checked = 0;
    for (std::size_t t = 0; t + 1 < res.partitions.size(); ++t) {
        const Vector& x = h[t].x;
        for (const auto& cell : res.partitions[t + 1].cells) {
            const auto atoms = space->cell_realizations(cell);
            if (!atoms || atoms->empty()) {
                v.expect(false, fmt("cell %zu has no members", cell.id));
                continue;
            }
            const std::size_t n = atoms->size();
            const std::size_t picks = std::min<std::size_t>(100, n);
            const double ref = evaluate_subproblem(inst.model, x, (*atoms)[0]).dual[0];
            for (std::size_t k = 0; k < picks; ++k) {
                const double d = evaluate_subproblem(inst.model, x, (*atoms)[k * n / picks]).dual[0];
                ++checked;
                v.expect(std::abs(d - ref) <= kDualTol * (1 + std::abs(ref)),
                         fmt("iteration %zu cell %zu: dual %.6g vs %.6g", t + 1, cell.id, d, ref));
            }
        }
    }
    const double secs = seconds_since(t0);
    v.expect(secs < 30.0, fmt("took %.1f s", secs));
    v.detail = fmt("%zu iterations (%s), gap < %.1f%% at iteration %zu (limit %zu), cells %zu -> %zu, %zu child "
                   "duals checked, objective %.6f, %.2f s",
                   h.size(), std::string(to_string(res.reason)).c_str(), 100 * kCvarGap, first_below,
                   kCvarIterations, h.empty() ? 0 : h.front().cells, h.empty() ? 0 : h.back().cells, checked,
                   res.objective, secs);
    return v;
}

/// b^T lambda plus the bound terms of the reduced costs; nullopt when the
/// dual is infeasible for the senses or bounds.
std::optional<double> dual_objective(const StandardLp& lp, const Vector& dual, double tol) {
    double value = 0.0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        if (lp.senses[i] == Sense::ge && dual[i] < -tol) return std::nullopt;
        if (lp.senses[i] == Sense::le && dual[i] > tol) return std::nullopt;
        value += lp.rhs[i] * dual[i];
    }
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        double d = lp.cost[j];
        for (std::size_t i = 0; i < lp.num_rows(); ++i) d -= lp.matrix(i, j) * dual[i];
        if (d > tol) {
            if (std::isinf(lp.lower_bound(j))) return std::nullopt;
            value += d * lp.lower_bound(j);
        } else if (d < -tol) {
            if (std::isinf(lp.upper_bound(j))) return std::nullopt;
            value += d * lp.upper_bound(j);
        }
    }
    return value;
}

Verdict lp_oracle() {
    Verdict v;
    std::mt19937_64 rng(5150);
    std::size_t optimal = 0;
    std::size_t resolves = 0;
    double worst_obj = 0.0;
    double worst_gap = 0.0;
    double worst_range = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 500; ++trial) {
        const auto lp = testing::random_lp(rng, 5, 5);
        const auto sol = solve(lp);
        const auto oracle = testing::vertex_enumeration(lp);
        if (sol.status != oracle.status) {
            v.expect(false, fmt("trial %d: status %s vs oracle %s", trial, std::string(to_string(sol.status)).c_str(),
                                std::string(to_string(oracle.status)).c_str()));
            continue;
        }
        if (sol.status != LpStatus::optimal) continue;
        ++optimal;
        const double scale = 1 + std::abs(oracle.objective);
        worst_obj = std::max(worst_obj, std::abs(sol.objective - oracle.objective) / scale);
        v.expect(std::abs(sol.objective - oracle.objective) <= kLpTol * scale,
                 fmt("trial %d: objective %.12g vs %.12g", trial, sol.objective, oracle.objective));
        const auto dual_obj = dual_objective(lp, sol.dual, kLpTol);
        v.expect(dual_obj.has_value(), fmt("trial %d: dual infeasible", trial));
        if (dual_obj) {
            worst_gap = std::max(worst_gap, std::abs(*dual_obj - sol.objective) / scale);
            v.expect(std::abs(*dual_obj - sol.objective) <= kLpTol * scale,
                     fmt("trial %d: duality gap %.3g", trial, *dual_obj - sol.objective));
        }

        for (std::size_t row = 0; row < lp.num_rows(); ++row) {
            const auto range = rhs_ranging(lp, sol, row);
            const double lo = std::max(range.lower, lp.rhs[row] - 10.0);
            const double hi = std::min(range.upper, lp.rhs[row] + 10.0);
            v.expect(range.lower <= lp.rhs[row] + 1e-9 && lp.rhs[row] <= range.upper + 1e-9,
                     fmt("trial %d row %zu: interval excludes rhs", trial, row));
            if (!(hi > lo)) continue;
            for (int k = 0; k < 100; ++k) {
                auto moved = lp;
                moved.rhs[row] = lo + (hi - lo) * (k + 0.5) / 100.0;
                const auto re = solve(moved);
                ++resolves;
                const double predicted = sol.objective + range.dual[row] * (moved.rhs[row] - lp.rhs[row]);
                const double err = re.status == LpStatus::optimal ? std::abs(re.objective - predicted) : INFINITY;
                worst_range = std::max(worst_range, err / (1 + std::abs(predicted)));
                v.expect(err <= kLpTol * (1 + std::abs(predicted)),
                         fmt("trial %d row %zu: re-solve at %.6g off by %.3g", trial, row, moved.rhs[row], err));
            }
        }
    }
    const double secs = seconds_since(t0);
    v.expect(secs < 60.0, fmt("took %.1f s", secs));
    v.detail = fmt("500 LPs (%zu optimal): worst objective error %.2e, worst duality gap %.2e, %zu ranging "
                   "re-solves with worst error %.2e, tol %.0e, %.2f s",
                   optimal, worst_obj, worst_gap, resolves, worst_range, kLpTol, secs);
    return v;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / "gapm-acceptance-determinism";
    fs::remove_all(root);
    std::size_t bytes = 0;
    for (const std::string builtin : {"lands", "cvar"}) {
        std::string csv[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path dir = root / (builtin + std::to_string(k));
            std::vector<std::string> args{"gapm", "run", "--builtin", builtin, "--seed", "7",
                                          "--mc-pool", "20000", "--out-dir", dir.string()};
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
            v.expect(code != cli::exit_error, builtin + ": run failed: " + err.str());
            csv[k] = read_file(dir / "iterations.csv");
        }
        v.expect(!csv[0].empty(), builtin + ": empty CSV");
        v.expect(csv[0] == csv[1], builtin + ": iteration CSVs differ");
        bytes += csv[0].size();
    }
    fs::remove_all(root);
    v.detail = fmt("two runs each of lands and cvar (seed 7, pool 20000): identical CSVs, %zu bytes compared", bytes);
    return v;
}

struct Criterion {
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"capacity_bounds", capacity_bounds},   {"discrete_exactness", discrete_exactness},
        {"cell_averaging", cell_averaging},           {"cvar_properties", cvar_properties},
        {"lp_oracle", lp_oracle},               {"determinism", determinism},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const auto& w : wanted) {
        if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return w == c.name; })) {
            std::cerr << "unknown criterion '" << w << "'\n";
            return 1;
        }
    }
    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << "\n";
        for (const auto& f : v.failures) std::cout << "    " << f << "\n";
        if (!v.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
