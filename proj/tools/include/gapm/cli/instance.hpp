#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/model.hpp"
#include "gapm/partition.hpp"

namespace gapm::cli {

inline constexpr const char* kInstanceFormat = "gapm-instance/1";

struct Metadata {
    std::string name;
    std::string description;

    friend bool operator==(const Metadata&, const Metadata&) = default;
};

struct DiscreteScenario {
    double weight = 1.0;
    Vector h;
    Matrix T;

    friend bool operator==(const DiscreteScenario&, const DiscreteScenario&) = default;
};

struct DiscreteUncertainty {
    std::vector<DiscreteScenario> scenarios;

    friend bool operator==(const DiscreteUncertainty&, const DiscreteUncertainty&) = default;
};

/// h[row] ~ U[lo, hi].
struct UniformRhsUncertainty {
    std::size_t row = 0;
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const UniformRhsUncertainty&, const UniformRhsUncertainty&) = default;
};

struct TechnologyEntry {
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const TechnologyEntry&, const TechnologyEntry&) = default;
};

/// (T[row_k][col_k])_k ~ N(mean, covariance), sampled on a fixed pool.
struct GaussianTechnologyUncertainty {
    std::vector<TechnologyEntry> entries;
    Vector mean;
    Matrix covariance;
    std::optional<double> cvar_delta;
    std::uint64_t seed = 0;
    std::size_t pool_size = 100000;

    friend bool operator==(const GaussianTechnologyUncertainty&, const GaussianTechnologyUncertainty&) = default;
};

using Uncertainty = std::variant<DiscreteUncertainty, UniformRhsUncertainty, GaussianTechnologyUncertainty>;

/// A parsed instance document. `model.random_entries` is derived from the
/// uncertainty section.
struct Instance {
    Metadata metadata;
    RecourseModel model;
    Uncertainty uncertainty;

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// Parses and validates a document. Syntax errors report line and column,
/// schema errors the JSON pointer of the offending field; both throw
/// ValidationError prefixed by `source`.
Instance parse_instance(const std::string& text, const std::string& source = "<instance>");
Instance read_instance(const std::filesystem::path& path);

std::string dump_instance(const Instance& instance);
void write_instance(const Instance& instance, const std::filesystem::path& path);

struct SpaceOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> pool_size;
};

std::unique_ptr<UncertaintySpace> make_space(const Instance& instance, const SpaceOverrides& overrides = {});

}  // namespace gapm::cli
