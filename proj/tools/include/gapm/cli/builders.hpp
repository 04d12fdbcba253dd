#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapm/cli/instance.hpp"

namespace gapm::cli {

/// Plant/mode data of the capacity expansion instance.
struct LandsData {
    std::string source;
    Vector capacity_cost;          // c_i, also the budget row coefficients
    double min_total_capacity = 0; // m
    double budget = 0;             // b
    std::vector<Vector> operating_cost;  // f_ij, plants x modes
    Vector demand;                 // d_j; entry 0 is replaced by the random demand
};

/// The bundled classic data set.
LandsData bundled_lands_data();
LandsData parse_lands_data(const std::string& text);

struct LandsOptions {
    std::pair<double, double> d1_interval{3.0, 7.0};
    /// Deterministic demand: emits a one-scenario discrete instance.
    std::optional<double> d1_fixed;
};

Instance make_lands(const LandsData& data, const LandsOptions& options = {});

struct CvarOptions {
    Vector mean{0.05, 0.0702};
    /// Row-major k x k; empty means build from `stdev` and `correlation`.
    Matrix covariance;
    Vector stdev{0.3734, 0.4754};
    double correlation = 0.2;
    double delta = 0.1;
    std::uint64_t seed = 42;
    std::size_t pool_size = 100000;
};

/// min tau + E[(-r^T x - tau)^+] / delta  s.t.  sum x = 1, x >= 0, r ~ N(mean, cov).
Instance make_cvar(const CvarOptions& options);

}  // namespace gapm::cli
