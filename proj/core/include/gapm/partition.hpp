#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/model.hpp"

namespace gapm {

struct ScenarioSet {
    std::vector<std::size_t> indices;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// normal . xi <= offset
struct Halfspace {
    Vector normal;
    double offset = 0.0;
};

/// Intersection of the inherited split halfspaces (empty list = whole space).
struct Polytope {
    std::vector<Halfspace> halfspaces;
};

using Geometry = std::variant<ScenarioSet, Interval, Polytope>;

enum class Estimation { exact, monte_carlo };

struct Cell {
    std::size_t id = 0;
    Geometry geometry;
    double mass = 0.0;
    Vector xi_mean;  // empty for discrete scenario sets
    Vector h_mean;
    Matrix T_mean;
    Estimation estimation = Estimation::exact;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    /// Scenario indices (discrete) or sample-pool indices (Monte Carlo).
    std::vector<std::size_t> members;

    CellMeans means() const { return {mass, h_mean, T_mean}; }
};

struct Partition {
    std::vector<Cell> cells;
    std::size_t generation = 0;
    std::size_t next_id = 0;

    std::size_t size() const noexcept { return cells.size(); }
    double total_mass() const;
    std::vector<CellMeans> means() const;
    /// Same cells (by id) in the same order.
    bool same_cells(const Partition& other) const;
};

struct ScenarioGroups {
    std::vector<std::vector<std::size_t>> groups;
};

struct Breakpoints {
    std::vector<double> points;
};

/// Splits into {normal . xi <= offset} and {normal . xi >= offset}.
struct Hyperplane {
    Vector normal;
    double offset = 0.0;
};

using Splitter = std::variant<ScenarioGroups, Breakpoints, Hyperplane>;

/// Behavioral contract over (Omega, P): cells, masses and conditional means.
class UncertaintySpace {
public:
    virtual ~UncertaintySpace() = default;

    virtual std::string_view kind() const = 0;
    /// Single cell {Omega} with mass 1.
    virtual Partition trivial_partition() const = 0;
    /// Children of `cell` under `splitter`; zero-mass children are omitted.
    /// Ids are drawn from next_id.
    virtual std::vector<Cell> split(const Cell& cell, const Splitter& splitter,
                                    std::size_t& next_id) const = 0;
    /// Weighted atoms inside the cell when the backend can enumerate them
    /// (scenarios or pool members); nullopt for analytic backends.
    virtual std::optional<std::vector<Realization>> cell_realizations(const Cell& cell) const = 0;
    /// c^T x + E[Q(x, xi)] when the backend has an exact or closed-form
    /// method; nullopt otherwise.
    virtual std::optional<double> upper_bound(const RecourseModel& model, const Vector& x) const = 0;
    /// Masses and means are exact (true) or Monte Carlo estimates (false).
    virtual bool exact() const = 0;
};

struct SplitResult {
    Partition partition;
    bool changed = false;
};

/// Replaces `partition.cells[cell_index]` by its children. A split that
/// leaves the parent whole is reported with changed = false.
SplitResult split_cell(const UncertaintySpace& space, const Partition& partition,
                       std::size_t cell_index, const Splitter& splitter);

class DiscreteSpace final : public UncertaintySpace {
public:
    explicit DiscreteSpace(std::vector<Realization> scenarios);

    std::string_view kind() const override { return "discrete"; }
    Partition trivial_partition() const override;
    std::vector<Cell> split(const Cell& cell, const Splitter& splitter,
                            std::size_t& next_id) const override;
    std::optional<std::vector<Realization>> cell_realizations(const Cell& cell) const override;
    std::optional<double> upper_bound(const RecourseModel& model, const Vector& x) const override;
    bool exact() const override { return true; }

    const std::vector<Realization>& scenarios() const noexcept { return scenarios_; }
    /// Cell over an arbitrary scenario subset (nullopt when its mass is 0).
    std::optional<Cell> make_cell(std::vector<std::size_t> indices, std::size_t id) const;

private:
    std::vector<Realization> scenarios_;
};

/// One rhs component uniform on [lo, hi]; everything else deterministic.
class UniformRhsSpace final : public UncertaintySpace {
public:
    UniformRhsSpace(RecourseModel model, double lo, double hi, double degeneracy_step_fraction = 1e-7);

    std::string_view kind() const override { return "uniform_rhs"; }
    Partition trivial_partition() const override;
    std::vector<Cell> split(const Cell& cell, const Splitter& splitter,
                            std::size_t& next_id) const override;
    std::optional<std::vector<Realization>> cell_realizations(const Cell&) const override {
        return std::nullopt;
    }
    std::optional<double> upper_bound(const RecourseModel& model, const Vector& x) const override;
    bool exact() const override { return true; }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t rhs_row() const noexcept { return row_; }
    double degeneracy_step(double a, double b) const noexcept { return step_fraction_ * (b - a); }
    const RecourseModel& model() const noexcept { return model_; }
    std::optional<Cell> make_cell(double a, double b, std::size_t id) const;

private:
    RecourseModel model_;
    std::size_t row_ = 0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double step_fraction_ = 1e-7;
};

/// Technology coefficients r ~ N(mean, cov), estimated on one fixed pool of
/// samples drawn from `seed` (common random numbers across iterations).
class GaussianTechnologySpace final : public UncertaintySpace {
public:
    GaussianTechnologySpace(RecourseModel model, Vector mean, Matrix cov, std::uint64_t seed,
                            std::size_t pool_size, std::optional<double> cvar_delta = std::nullopt);

    std::string_view kind() const override { return "gaussian_technology"; }
    Partition trivial_partition() const override;
    std::vector<Cell> split(const Cell& cell, const Splitter& splitter,
                            std::size_t& next_id) const override;
    std::optional<std::vector<Realization>> cell_realizations(const Cell& cell) const override;
    std::optional<double> upper_bound(const RecourseModel& model, const Vector& x) const override;
    bool exact() const override { return false; }

    const Matrix& pool() const noexcept { return pool_; }
    const Vector& mean() const noexcept { return mean_; }
    const Matrix& covariance() const noexcept { return cov_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::optional<double> cvar_delta() const noexcept { return cvar_delta_; }
    const RecourseModel& model() const noexcept { return model_; }
    /// Asset weights: x restricted to the columns carrying random coefficients.
    Vector asset_weights(const Vector& x) const;
    std::optional<Cell> make_cell(std::vector<std::size_t> members, Polytope geometry,
                                  std::size_t id) const;

private:
    RecourseModel model_;
    Vector mean_;
    Matrix cov_;
    std::uint64_t seed_ = 0;
    std::optional<double> cvar_delta_;
    Matrix pool_;  // pool_size x dim
};

/// Symmetric square root S (S S = cov). Throws ValidationError if cov is
/// not symmetric positive semidefinite.
Matrix symmetric_sqrt(const Matrix& cov);

}  // namespace gapm
