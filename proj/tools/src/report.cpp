#include "gapm/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "gapm/errors.hpp"

namespace gapm::cli {

using nlohmann::json;

namespace {

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

json geometry_json(const Geometry& g) {
    if (const auto* s = std::get_if<ScenarioSet>(&g)) return {{"type", "scenarios"}, {"indices", s->indices}};
    if (const auto* iv = std::get_if<Interval>(&g)) return {{"type", "interval"}, {"lo", iv->lo}, {"hi", iv->hi}};
    json planes = json::array();
    for (const auto& h : std::get<Polytope>(g).halfspaces) planes.push_back({{"normal", h.normal}, {"offset", h.offset}});
    return {{"type", "polytope"}, {"halfspaces", std::move(planes)}};
}

json optional_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string iterations_csv(const GapmResult& result) {
    const std::size_t n = result.x.size();
    std::string out = "iter,lb,ub,gap_pct,cells";
    for (std::size_t j = 0; j < n; ++j) out += ",x" + std::to_string(j);
    out += '\n';
    for (const auto& r : result.history) {
        out += std::to_string(r.t) + ',' + g6(r.lower) + ',';
        if (r.upper) out += g6(*r.upper);
        out += ',';
        if (r.gap) out += g6(100.0 * *r.gap);
        out += ',' + std::to_string(r.cells);
        for (double v : r.x) out += ',' + g6(v);
        out += '\n';
    }
    return out;
}

std::string partitions_json(const GapmResult& result) {
    json iters = json::array();
    for (std::size_t k = 0; k < result.partitions.size(); ++k) {
        const Partition& p = result.partitions[k];
        json cells = json::array();
        for (const auto& c : p.cells) {
            json cell = {{"id", c.id},
                         {"geometry", geometry_json(c.geometry)},
                         {"mass", c.mass},
                         {"estimation", c.estimation == Estimation::exact ? "exact" : "monte_carlo"}};
            if (!c.xi_mean.empty()) cell["xi_mean"] = c.xi_mean;
            cell["h_mean"] = c.h_mean;
            if (c.estimation == Estimation::monte_carlo) cell["sample_count"] = c.sample_count;
            cells.push_back(std::move(cell));
        }
        iters.push_back({{"iter", result.history[k].t}, {"generation", p.generation}, {"cells", std::move(cells)}});
    }
    return json{{"iterations", std::move(iters)}}.dump(2) + "\n";
}

std::string summary_json(const GapmResult& result, const RunInfo& info) {
    std::size_t pivots = 0;
    for (const auto& r : result.history) pivots += r.master_pivots;
    const IterationRecord* last = result.history.empty() ? nullptr : &result.history.back();
    json doc = {{"instance", info.instance_name},
                {"refiner", info.refiner},
                {"epsilon", info.epsilon},
                {"termination", std::string(to_string(result.reason))},
                {"iterations", result.history.size()},
                {"objective_lower", result.objective},
                {"objective_upper", last ? optional_json(last->best_upper) : json(nullptr)},
                {"gap", last ? optional_json(last->gap) : json(nullptr)},
                {"x", result.x},
                {"cells", result.partition.size()},
                {"wall_time_s", info.wall_time_s},
                {"solver", {{"master_pivots", pivots}}}};
    if (info.oracle_objective) doc["oracle_objective"] = *info.oracle_objective;
    return doc.dump(2) + "\n";
}

void print_table(std::ostream& out, const GapmResult& result) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%4s  %14s  %14s  %11s  %5s  %s\n", "Iter", "LB", "UB", "Gap", "|P|", "x");
    out << buf;
    for (const auto& r : result.history) {
        std::string ub = "-";
        std::string gap = "-";
        if (r.upper) {
            std::snprintf(buf, sizeof buf, "%.6f", *r.upper);
            ub = buf;
        }
        if (r.gap) {
            std::snprintf(buf, sizeof buf, "%.5f%%", 100.0 * *r.gap);
            gap = buf;
        }
        std::snprintf(buf, sizeof buf, "%4zu  %14.6f  %14s  %11s  %5zu  (", r.t, r.lower, ub.c_str(), gap.c_str(),
                      r.cells);
        out << buf;
        for (std::size_t j = 0; j < r.x.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%s%.4f", j ? ", " : "", r.x[j] == 0.0 ? 0.0 : r.x[j]);
            out << buf;
        }
        out << ")\n";
    }
}

void write_reports(const std::filesystem::path& dir, const GapmResult& result, const RunInfo& info) {
    std::filesystem::create_directories(dir);
    write_file(dir / "iterations.csv", iterations_csv(result));
    write_file(dir / "partitions.json", partitions_json(result));
    write_file(dir / "summary.json", summary_json(result, info));
}

}  // namespace gapm::cli
