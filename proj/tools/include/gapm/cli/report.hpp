#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gapm/engine.hpp"

namespace gapm::cli {

struct RunInfo {
    std::string instance_name;
    std::string refiner;
    double epsilon = 0.0;
    double wall_time_s = 0.0;
    std::optional<double> oracle_objective;
};

/// Header `iter,lb,ub,gap_pct,cells,x0..x{n-1}`; numbers in %.6g, missing
/// bounds left empty. `ub` is the bound at that iteration's incumbent; the
/// gap is taken against the best `ub` so far.
std::string iterations_csv(const GapmResult& result);

/// Per iteration: the cells of the partition in use (geometry, mass, mean).
std::string partitions_json(const GapmResult& result);

std::string summary_json(const GapmResult& result, const RunInfo& info);

/// Iter / LB / UB / Gap / |P| / x table.
void print_table(std::ostream& out, const GapmResult& result);

/// Writes iterations.csv, partitions.json and summary.json into dir.
void write_reports(const std::filesystem::path& dir, const GapmResult& result, const RunInfo& info);

}  // namespace gapm::cli
