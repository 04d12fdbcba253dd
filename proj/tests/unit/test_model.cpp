#include <cmath>
#include <random>

#include "doctest.h"
#include "gapm/errors.hpp"
#include "gapm/model.hpp"
#include "oracles.hpp"

using namespace gapm;

namespace {

/// Q(x) = min{z : z >= x, z >= 0} with a free scalar first stage.
RecourseModel plus_part_model() {
    RecourseModel m;
    m.c = {0};
    m.A = Matrix(0, 1);
    m.x_lower = {-kInf};
    m.W = Matrix{{1}};
    m.q = {1};
    m.recourse_senses = {Sense::ge};
    m.h = {0};
    m.T = Matrix{{-1}};
    return m;
}

/// One plant of capacity x, one mode with demand d, unit cost 4 and an
/// unserved-demand arc at cost 10.
RecourseModel toy_capacity_model() {
    RecourseModel m;
    m.c = {1};
    m.A = Matrix(0, 1);
    m.W = Matrix{{1, 0}, {1, 1}};
    m.q = {4, 10};
    m.recourse_senses = {Sense::le, Sense::ge};
    m.h = {0, 3};
    m.T = Matrix{{-1}, {0}};
    return m;
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("plus-part subproblem values and duals") {
        const auto m = plus_part_model();
        auto o = evaluate_subproblem(m, Vector{-0.7}, m.realize({}));
        CHECK(o.value == doctest::Approx(0.0));
        CHECK(o.dual[0] == doctest::Approx(0.0));
        o = evaluate_subproblem(m, Vector{0.3}, m.realize({}));
        CHECK(o.value == doctest::Approx(0.3));
        CHECK(o.dual[0] == doctest::Approx(1.0));
        CHECK(o.rhs[0] == doctest::Approx(0.3));
    }

    TEST_CASE("capacity toy: ship 2 at cost 4, 1 unserved at cost 10") {
        const auto m = toy_capacity_model();
        const auto o = evaluate_subproblem(m, Vector{2}, m.realize({}));
        CHECK(o.value == doctest::Approx(18.0));
        CHECK(o.primal[0] == doctest::Approx(2.0));
        CHECK(o.primal[1] == doctest::Approx(1.0));
        CHECK(dot(o.rhs, o.dual) == doctest::Approx(o.value));
    }

    TEST_CASE("infeasible recourse names the realization") {
        auto m = plus_part_model();
        m.recourse_senses = {Sense::eq};  // z = x with z >= 0
        try {
            (void)evaluate_subproblem(m, Vector{-1.0}, m.realize({}), "scenario 7");
            FAIL("expected a recourse violation");
        } catch (const RecourseViolation& e) {
            CHECK(std::string(e.what()).find("scenario 7") != std::string::npos);
        }
    }

    TEST_CASE("validation") {
        auto m = toy_capacity_model();
        CHECK_NOTHROW(m.validate());
        auto bad = m;
        bad.q = {1};
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        bad = m;
        bad.T = Matrix(2, 2);
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        bad = m;
        bad.A = Matrix{{1}};
        bad.b = {-1};
        bad.senses = {Sense::ge};
        bad.x_upper = {-2};
        bad.x_lower = {-3};
        bad.b = {0};
        CHECK_THROWS_AS(bad.validate(), ValidationError);  // x >= 0 and x <= -2
        bad = m;
        bad.random_entries = {{RandomEntry::Target::rhs, 5, 0, 0}};
        CHECK_THROWS_AS(bad.validate(), ValidationError);
    }

    TEST_CASE("realize overwrites random entries") {
        auto m = toy_capacity_model();
        m.random_entries = {{RandomEntry::Target::rhs, 1, 0, 0}, {RandomEntry::Target::technology, 0, 0, 1}};
        CHECK(m.random_dim() == 2);
        const auto r = m.realize(Vector{6.0, -2.0}, 0.25);
        CHECK(r.h[1] == 6.0);
        CHECK(r.T(0, 0) == -2.0);
        CHECK(r.weight == 0.25);
        CHECK_THROWS_AS(m.realize(Vector{1.0}), ContractViolation);
    }

    TEST_CASE("one deterministic cell gives the deterministic LP") {
        const auto m = toy_capacity_model();
        const CellMeans cell{1.0, m.h, m.T};
        const auto master = build_aggregated_master(m, std::span(&cell, 1));
        const auto sol = solve(master.lp);
        REQUIRE(sol.status == LpStatus::optimal);
        // capacity costs 1 and saves 6 per unit up to demand 3: x = 3, cost 3 + 12
        CHECK(sol.objective == doctest::Approx(15.0));
        CHECK(master.first_stage(sol)[0] == doctest::Approx(3.0));
        const auto duals = extract_cell_duals(master, sol);
        const auto direct = evaluate_subproblem(m, master.first_stage(sol), m.realize({}));
        CHECK(dot(direct.rhs, duals[0]) == doctest::Approx(direct.value));
    }

    TEST_CASE("mass sum is validated") {
        const auto m = toy_capacity_model();
        const std::vector<CellMeans> cells{{0.5, m.h, m.T}, {0.4, m.h, m.T}};
        CHECK_THROWS_AS(build_aggregated_master(m, cells), ValidationError);
    }

    TEST_CASE("one pooled cell bounds two singleton cells from below") {
        auto m = toy_capacity_model();
        Vector h1 = m.h;
        Vector h2 = m.h;
        h1[1] = 1;
        h2[1] = 5;
        Vector hm = m.h;
        hm[1] = 3;
        const std::vector<CellMeans> pooled{{1.0, hm, m.T}};
        const std::vector<CellMeans> split{{0.5, h1, m.T}, {0.5, h2, m.T}};
        const double a = solve(build_aggregated_master(m, pooled).lp).objective;
        const double b = solve(build_aggregated_master(m, split).lp).objective;
        CHECK(a <= b + 1e-9);
    }

    TEST_CASE("cell duals match re-solved aggregated subproblems") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            auto inst = testing::random_tssp(rng, 2, 3, 5, 5);
            std::vector<CellMeans> cells;
            for (const auto& s : inst.scenarios) cells.push_back({s.weight, s.h, s.T});
            const auto master = build_aggregated_master(inst.model, cells);
            const auto sol = solve(master.lp);
            REQUIRE(sol.status == LpStatus::optimal);
            const Vector x = master.first_stage(sol);
            const auto duals = extract_cell_duals(master, sol);
            for (std::size_t p = 0; p < cells.size(); ++p) {
                const auto o = evaluate_subproblem(inst.model, x, inst.scenarios[p]);
                // dual objective of the block equals the re-solved value
                CHECK(std::abs(dot(o.rhs, duals[p]) - o.value) <= 1e-6 * (1 + std::abs(o.value)));
                const Vector wt = inst.model.W.multiply_transposed(duals[p]);
                for (std::size_t k = 0; k < wt.size(); ++k) CHECK(wt[k] <= inst.model.q[k] + 1e-7);
            }
        }
    }

    TEST_CASE("averaged primals, averaged duals and the Jensen gap") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const auto inst = testing::random_tssp(rng);
            const auto& m = inst.model;
            const Vector x = testing::random_first_stage(rng, m);
            Vector y_bar(m.recourse_cols(), 0.0);
            Vector l_bar(m.recourse_rows(), 0.0);
            Vector h_bar(m.recourse_rows(), 0.0);
            Matrix t_bar(m.recourse_rows(), m.first_stage_dim());
            double expected = 0.0;
            for (const auto& s : inst.scenarios) {
                const auto o = evaluate_subproblem(m, x, s);
                for (std::size_t k = 0; k < y_bar.size(); ++k) y_bar[k] += s.weight * o.primal[k];
                for (std::size_t i = 0; i < l_bar.size(); ++i) {
                    l_bar[i] += s.weight * o.dual[i];
                    h_bar[i] += s.weight * s.h[i];
                    for (std::size_t j = 0; j < m.first_stage_dim(); ++j) t_bar(i, j) += s.weight * s.T(i, j);
                }
                expected += s.weight * o.value;
            }
            const auto agg_lp = subproblem_lp(m, x, h_bar, t_bar);
            CHECK(primal_residual(agg_lp, y_bar) <= 1e-7);
            const Vector wt = m.W.multiply_transposed(l_bar);
            for (std::size_t k = 0; k < wt.size(); ++k) CHECK(wt[k] <= m.q[k] + 1e-7);
            const auto agg = evaluate_subproblem(m, x, Realization{h_bar, t_bar, 1.0});
            CHECK(agg.value <= expected + 1e-7);
        }
    }
}
