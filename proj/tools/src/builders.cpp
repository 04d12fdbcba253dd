#include "gapm/cli/builders.hpp"

#include <cmath>

#include "json.hpp"

#include "gapm/errors.hpp"
#include "lands_data.hpp"

namespace gapm::cli {

using nlohmann::json;

LandsData parse_lands_data(const std::string& text) {
    LandsData d;
    try {
        const json doc = json::parse(text);
        d.source = doc.at("source").get<std::string>();
        d.capacity_cost = doc.at("capacity_cost").get<Vector>();
        d.min_total_capacity = doc.at("min_total_capacity").get<double>();
        d.budget = doc.at("budget").get<double>();
        d.operating_cost = doc.at("operating_cost").get<std::vector<Vector>>();
        for (const auto& v : doc.at("demand")) d.demand.push_back(v.is_null() ? 0.0 : v.get<double>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("capacity expansion data: ") + e.what());
    }
    if (d.capacity_cost.empty() || d.operating_cost.size() != d.capacity_cost.size() || d.demand.empty()) {
        throw ValidationError("capacity expansion data: inconsistent plant count");
    }
    for (const auto& row : d.operating_cost) {
        if (row.size() != d.demand.size()) throw ValidationError("capacity expansion data: inconsistent mode count");
    }
    return d;
}

LandsData bundled_lands_data() { return parse_lands_data(kLandsClassicJson); }

Instance make_lands(const LandsData& data, const LandsOptions& options) {
    const std::size_t plants = data.capacity_cost.size();
    const std::size_t modes = data.demand.size();
    Instance inst;
    inst.metadata.name = "lands";
    inst.metadata.description = "Capacity expansion: " + std::to_string(plants) + " plants, " +
                                std::to_string(modes) + " modes, random demand in mode 1. Data: " + data.source;

    RecourseModel& m = inst.model;
    m.c = data.capacity_cost;
    m.A = Matrix(2, plants);
    for (std::size_t i = 0; i < plants; ++i) {
        m.A(0, i) = 1.0;
        m.A(1, i) = data.capacity_cost[i];
    }
    m.b = {data.min_total_capacity, data.budget};
    m.senses = {Sense::ge, Sense::le};

    const std::size_t rows = plants + modes;
    m.W = Matrix(rows, plants * modes);
    m.T = Matrix(rows, plants);
    m.h.assign(rows, 0.0);
    m.q.assign(plants * modes, 0.0);
    for (std::size_t i = 0; i < plants; ++i) {
        for (std::size_t j = 0; j < modes; ++j) {
            const std::size_t y = i * modes + j;
            m.q[y] = data.operating_cost[i][j];
            m.W(i, y) = 1.0;
            m.W(plants + j, y) = 1.0;
        }
        m.T(i, i) = -1.0;
        m.recourse_senses.push_back(Sense::le);
    }
    for (std::size_t j = 0; j < modes; ++j) {
        m.h[plants + j] = data.demand[j];
        m.recourse_senses.push_back(Sense::ge);
    }

    const std::size_t random_row = plants;
    if (options.d1_fixed) {
        m.h[random_row] = *options.d1_fixed;
        inst.uncertainty = DiscreteUncertainty{{DiscreteScenario{1.0, m.h, m.T}}};
        inst.metadata.description += ". Demand 1 fixed at " + std::to_string(*options.d1_fixed);
    } else {
        const auto [lo, hi] = options.d1_interval;
        if (!(lo < hi)) throw ValidationError("demand interval must satisfy lo < hi");
        m.h[random_row] = 0.5 * (lo + hi);
        inst.uncertainty = UniformRhsUncertainty{random_row, lo, hi};
        m.random_entries.push_back({RandomEntry::Target::rhs, random_row, 0, 0});
    }
    m.validate();
    return inst;
}

Instance make_cvar(const CvarOptions& options) {
    const std::size_t k = options.mean.size();
    if (k == 0) throw ValidationError("cvar: at least one asset is required");
    if (!(options.delta > 0.0 && options.delta < 1.0)) throw ValidationError("cvar: delta must lie in (0, 1)");
    Matrix cov = options.covariance;
    if (cov.empty()) {
        if (options.stdev.size() != k) throw ValidationError("cvar: need one standard deviation per asset");
        if (!(std::abs(options.correlation) <= 1.0)) throw ValidationError("cvar: correlation must lie in [-1, 1]");
        cov = Matrix(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                cov(i, j) = options.stdev[i] * options.stdev[j] * (i == j ? 1.0 : options.correlation);
            }
        }
    }
    if (cov.rows() != k || cov.cols() != k) throw ValidationError("cvar: covariance must be k x k");
    (void)symmetric_sqrt(cov);

    Instance inst;
    inst.metadata.name = "cvar-portfolio";
    inst.metadata.description = "CVaR portfolio, " + std::to_string(k) + " assets, delta " +
                                std::to_string(options.delta) + ", normal returns";

    RecourseModel& m = inst.model;
    const std::size_t n1 = k + 1;  // assets then tau
    m.c.assign(n1, 0.0);
    m.c[k] = 1.0;
    m.A = Matrix(1, n1, 1.0);
    m.A(0, k) = 0.0;
    m.b = {1.0};
    m.senses = {Sense::eq};
    m.x_lower.assign(n1, 0.0);
    m.x_lower[k] = -kInf;

    m.W = Matrix{{1.0, -1.0}};
    m.q = {1.0 / options.delta, 0.0};
    m.recourse_senses = {Sense::eq};
    m.h = {0.0};
    m.T = Matrix(1, n1);
    for (std::size_t j = 0; j < k; ++j) m.T(0, j) = options.mean[j];
    m.T(0, k) = 1.0;

    GaussianTechnologyUncertainty g;
    for (std::size_t j = 0; j < k; ++j) {
        g.entries.push_back({0, j});
        m.random_entries.push_back({RandomEntry::Target::technology, 0, j, j});
    }
    g.mean = options.mean;
    g.covariance = cov;
    g.cvar_delta = options.delta;
    g.seed = options.seed;
    g.pool_size = options.pool_size;
    inst.uncertainty = std::move(g);
    m.validate();
    return inst;
}

}  // namespace gapm::cli
