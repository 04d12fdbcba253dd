#include "gapm/partition.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gapm/errors.hpp"
#include "gapm/normal.hpp"
#include "gapm/parametric.hpp"

namespace gapm {

double Partition::total_mass() const {
    double total = 0.0;
    for (const auto& c : cells) total += c.mass;
    return total;
}

std::vector<CellMeans> Partition::means() const {
    std::vector<CellMeans> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.means());
    return out;
}

bool Partition::same_cells(const Partition& other) const {
    if (cells.size() != other.cells.size()) return false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].id != other.cells[i].id) return false;
    }
    return true;
}

SplitResult split_cell(const UncertaintySpace& space, const Partition& partition,
                       std::size_t cell_index, const Splitter& splitter) {
    if (cell_index >= partition.cells.size()) throw ContractViolation("split_cell: cell index out of range");
    std::size_t next_id = partition.next_id;
    std::vector<Cell> children = space.split(partition.cells[cell_index], splitter, next_id);
    if (children.size() <= 1) return {partition, false};

    SplitResult out;
    out.changed = true;
    out.partition.generation = partition.generation;
    out.partition.next_id = next_id;
    out.partition.cells.reserve(partition.cells.size() + children.size() - 1);
    for (std::size_t i = 0; i < partition.cells.size(); ++i) {
        if (i == cell_index) {
            for (auto& child : children) out.partition.cells.push_back(std::move(child));
        } else {
            out.partition.cells.push_back(partition.cells[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------- discrete

DiscreteSpace::DiscreteSpace(std::vector<Realization> scenarios) : scenarios_(std::move(scenarios)) {
    if (scenarios_.empty()) throw ValidationError("discrete space: scenario list is empty");
    double total = 0.0;
    const auto& first = scenarios_.front();
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
        const auto& r = scenarios_[s];
        if (!(r.weight >= 0.0 && r.weight <= 1.0)) {
            throw ValidationError("discrete space: scenario " + std::to_string(s) + " weight outside [0, 1]");
        }
        if (r.h.size() != first.h.size() || r.T.rows() != first.T.rows() || r.T.cols() != first.T.cols()) {
            throw ValidationError("discrete space: scenario " + std::to_string(s) + " has inconsistent shape");
        }
        total += r.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("discrete space: weights sum to " + std::to_string(total) + ", expected 1");
    }
}

std::optional<Cell> DiscreteSpace::make_cell(std::vector<std::size_t> indices, std::size_t id) const {
    const auto& first = scenarios_.front();
    Cell cell;
    cell.id = id;
    cell.h_mean.assign(first.h.size(), 0.0);
    cell.T_mean = Matrix(first.T.rows(), first.T.cols());
    double mass = 0.0;
    for (std::size_t s : indices) {
        if (s >= scenarios_.size()) throw ContractViolation("discrete space: scenario index out of range");
        mass += scenarios_[s].weight;
    }
    if (!(mass > 0.0)) return std::nullopt;
    for (std::size_t s : indices) {
        const auto& r = scenarios_[s];
        const double w = r.weight / mass;
        for (std::size_t i = 0; i < cell.h_mean.size(); ++i) cell.h_mean[i] += w * r.h[i];
        for (std::size_t i = 0; i < r.T.rows(); ++i) {
            for (std::size_t j = 0; j < r.T.cols(); ++j) cell.T_mean(i, j) += w * r.T(i, j);
        }
    }
    cell.mass = mass;
    cell.members = indices;
    cell.geometry = ScenarioSet{std::move(indices)};
    cell.estimation = Estimation::exact;
    return cell;
}

Partition DiscreteSpace::trivial_partition() const {
    std::vector<std::size_t> all(scenarios_.size());
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
    Partition p;
    auto cell = make_cell(std::move(all), 0);
    p.cells.push_back(std::move(*cell));
    p.cells.front().mass = 1.0;
    p.next_id = 1;
    return p;
}

std::vector<Cell> DiscreteSpace::split(const Cell& cell, const Splitter& splitter,
                                       std::size_t& next_id) const {
    const auto* groups = std::get_if<ScenarioGroups>(&splitter);
    const auto* set = std::get_if<ScenarioSet>(&cell.geometry);
    if (groups == nullptr || set == nullptr) {
        throw ContractViolation("discrete space: only scenario regrouping is supported");
    }
    std::vector<std::size_t> parent = set->indices;
    std::vector<std::size_t> covered;
    for (const auto& g : groups->groups) covered.insert(covered.end(), g.begin(), g.end());
    std::sort(parent.begin(), parent.end());
    std::sort(covered.begin(), covered.end());
    if (parent != covered) {
        throw ContractViolation("discrete space: regrouping must partition the cell's scenarios");
    }
    std::vector<Cell> out;
    std::size_t nonempty = 0;
    for (const auto& g : groups->groups) {
        if (!g.empty()) ++nonempty;
    }
    if (nonempty <= 1) return {cell};
    for (const auto& g : groups->groups) {
        if (g.empty()) continue;
        if (auto child = make_cell(g, next_id)) {
            ++next_id;
            out.push_back(std::move(*child));
        }
    }
    return out;
}

std::optional<std::vector<Realization>> DiscreteSpace::cell_realizations(const Cell& cell) const {
    std::vector<Realization> out;
    out.reserve(cell.members.size());
    for (std::size_t s : cell.members) out.push_back(scenarios_[s]);
    return out;
}

std::optional<double> DiscreteSpace::upper_bound(const RecourseModel& model, const Vector& x) const {
    double total = dot(model.c, x);
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
        if (scenarios_[s].weight == 0.0) continue;
        total += scenarios_[s].weight *
                 evaluate_subproblem(model, x, scenarios_[s], "scenario " + std::to_string(s)).value;
    }
    return total;
}

// ---------------------------------------------------------------- uniform

UniformRhsSpace::UniformRhsSpace(RecourseModel model, double lo, double hi, double degeneracy_step_fraction)
    : model_(std::move(model)), lo_(lo), hi_(hi), step_fraction_(degeneracy_step_fraction) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("uniform space: support must satisfy lo < hi");
    }
    row_ = scalar_rhs_row(model_);
}

std::optional<Cell> UniformRhsSpace::make_cell(double a, double b, std::size_t id) const {
    const double tol = 1e-12 * (1.0 + std::abs(hi_) + std::abs(lo_));
    if (a < lo_ - tol || b > hi_ + tol) {
        throw ValidationError("uniform space: interval [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] lies outside the support");
    }
    if (!(a < b)) return std::nullopt;
    Cell cell;
    cell.id = id;
    cell.geometry = Interval{a, b};
    cell.mass = (b - a) / (hi_ - lo_);
    cell.xi_mean = {0.5 * (a + b)};
    const Realization r = model_.realize(cell.xi_mean);
    cell.h_mean = r.h;
    cell.T_mean = r.T;
    cell.estimation = Estimation::exact;
    return cell;
}

Partition UniformRhsSpace::trivial_partition() const {
    Partition p;
    p.cells.push_back(*make_cell(lo_, hi_, 0));
    p.next_id = 1;
    return p;
}

std::vector<Cell> UniformRhsSpace::split(const Cell& cell, const Splitter& splitter,
                                         std::size_t& next_id) const {
    const auto* bps = std::get_if<Breakpoints>(&splitter);
    const auto* iv = std::get_if<Interval>(&cell.geometry);
    if (bps == nullptr || iv == nullptr) {
        throw ContractViolation("uniform space: only breakpoint splits are supported");
    }
    const double tol = 1e-12 * (1.0 + std::abs(iv->lo) + std::abs(iv->hi));
    std::vector<double> inner;
    for (double p : bps->points) {
        if (p > iv->lo + tol && p < iv->hi - tol) inner.push_back(p);
    }
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end(),
                            [tol](double a, double b) { return std::abs(a - b) <= tol; }),
                inner.end());
    if (inner.empty()) return {cell};
    std::vector<Cell> out;
    double a = iv->lo;
    inner.push_back(iv->hi);
    for (double b : inner) {
        if (auto child = make_cell(a, b, next_id)) {
            ++next_id;
            out.push_back(std::move(*child));
        }
        a = b;
    }
    return out;
}

std::optional<double> UniformRhsSpace::upper_bound(const RecourseModel& model, const Vector& x) const {
    const auto segments = scalar_rhs_segments(model, x, lo_, hi_, degeneracy_step(lo_, hi_));
    return dot(model.c, x) + integrate_segments(segments) / (hi_ - lo_);
}

// ---------------------------------------------------------------- gaussian

Matrix symmetric_sqrt(const Matrix& cov) {
    const std::size_t n = cov.rows();
    if (cov.cols() != n) throw ValidationError("covariance must be square");
    double scale = 0.0;
    for (double v : cov.data()) {
        if (!std::isfinite(v)) throw ValidationError("covariance has a non-finite entry");
        scale = std::max(scale, std::abs(v));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * (1.0 + scale)) {
                throw ValidationError("covariance is not symmetric");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(i, j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) throw ValidationError("covariance factorization failed");
    Eigen::VectorXd values = eig.eigenvalues();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values(k) < -1e-10 * (1.0 + scale)) {
            throw ValidationError("covariance is not positive semidefinite");
        }
        values(k) = std::sqrt(std::max(values(k), 0.0));
    }
    const Eigen::MatrixXd root = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = root(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

GaussianTechnologySpace::GaussianTechnologySpace(RecourseModel model, Vector mean, Matrix cov,
                                                 std::uint64_t seed, std::size_t pool_size,
                                                 std::optional<double> cvar_delta)
    : model_(std::move(model)), mean_(std::move(mean)), cov_(std::move(cov)), seed_(seed),
      cvar_delta_(cvar_delta) {
    const std::size_t dim = mean_.size();
    if (dim == 0 || model_.random_dim() != dim) {
        throw ValidationError("gaussian space: mean has " + std::to_string(dim) +
                              " entries, model references " + std::to_string(model_.random_dim()) +
                              " random coordinates");
    }
    if (cov_.rows() != dim || cov_.cols() != dim) throw ValidationError("gaussian space: covariance shape");
    if (pool_size == 0) throw ValidationError("gaussian space: pool size must be positive");
    if (cvar_delta_ && !(*cvar_delta_ > 0.0 && *cvar_delta_ < 1.0)) {
        throw ValidationError("gaussian space: cvar delta must lie in (0, 1)");
    }
    const Matrix root = symmetric_sqrt(cov_);

    std::mt19937_64 gen(seed_);
    std::normal_distribution<double> normal(0.0, 1.0);
    pool_ = Matrix(pool_size, dim);
    Vector z(dim);
    for (std::size_t s = 0; s < pool_size; ++s) {
        for (double& v : z) v = normal(gen);
        auto row = pool_.row(s);
        for (std::size_t i = 0; i < dim; ++i) row[i] = mean_[i] + dot(root.row(i), z);
    }
}

std::optional<Cell> GaussianTechnologySpace::make_cell(std::vector<std::size_t> members, Polytope geometry,
                                                       std::size_t id) const {
    if (members.empty()) return std::nullopt;
    const std::size_t dim = mean_.size();
    Cell cell;
    cell.id = id;
    cell.geometry = std::move(geometry);
    cell.xi_mean.assign(dim, 0.0);
    for (std::size_t s : members) {
        const auto row = pool_.row(s);
        for (std::size_t i = 0; i < dim; ++i) cell.xi_mean[i] += row[i];
    }
    for (double& v : cell.xi_mean) v /= static_cast<double>(members.size());
    cell.mass = static_cast<double>(members.size()) / static_cast<double>(pool_.rows());
    const Realization r = model_.realize(cell.xi_mean);
    cell.h_mean = r.h;
    cell.T_mean = r.T;
    cell.estimation = Estimation::monte_carlo;
    cell.sample_count = members.size();
    cell.seed = seed_;
    cell.members = std::move(members);
    return cell;
}

Partition GaussianTechnologySpace::trivial_partition() const {
    std::vector<std::size_t> all(pool_.rows());
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
    Partition p;
    p.cells.push_back(*make_cell(std::move(all), Polytope{}, 0));
    p.next_id = 1;
    return p;
}

std::vector<Cell> GaussianTechnologySpace::split(const Cell& cell, const Splitter& splitter,
                                                 std::size_t& next_id) const {
    const auto* plane = std::get_if<Hyperplane>(&splitter);
    const auto* poly = std::get_if<Polytope>(&cell.geometry);
    if (plane == nullptr || poly == nullptr) {
        throw ContractViolation("gaussian space: only hyperplane splits are supported");
    }
    if (plane->normal.size() != mean_.size()) throw ContractViolation("gaussian space: hyperplane dimension");
    std::vector<std::size_t> below;
    std::vector<std::size_t> above;
    for (std::size_t s : cell.members) {
        if (dot(plane->normal, pool_.row(s)) <= plane->offset) {
            below.push_back(s);
        } else {
            above.push_back(s);
        }
    }
    if (below.empty() || above.empty()) return {cell};

    Polytope lower = *poly;
    lower.halfspaces.push_back({plane->normal, plane->offset});
    Polytope upper = *poly;
    Vector flipped = plane->normal;
    for (double& v : flipped) v = -v;
    upper.halfspaces.push_back({std::move(flipped), -plane->offset});

    std::vector<Cell> out;
    out.push_back(*make_cell(std::move(below), std::move(lower), next_id++));
    out.push_back(*make_cell(std::move(above), std::move(upper), next_id++));
    return out;
}

std::optional<std::vector<Realization>> GaussianTechnologySpace::cell_realizations(const Cell& cell) const {
    std::vector<Realization> out;
    out.reserve(cell.members.size());
    const double w = 1.0 / static_cast<double>(pool_.rows());
    for (std::size_t s : cell.members) out.push_back(model_.realize(pool_.row(s), w));
    return out;
}

Vector GaussianTechnologySpace::asset_weights(const Vector& x) const {
    Vector w(mean_.size(), 0.0);
    std::vector<bool> seen(mean_.size(), false);
    for (const auto& e : model_.random_entries) {
        if (e.target != RandomEntry::Target::technology || seen[e.coord]) continue;
        w[e.coord] = x[e.col];
        seen[e.coord] = true;
    }
    return w;
}

std::optional<double> GaussianTechnologySpace::upper_bound(const RecourseModel&, const Vector& x) const {
    if (!cvar_delta_) return std::nullopt;
    return cvar_analytic_ub(mean_, cov_, *cvar_delta_, asset_weights(x));
}

}  // namespace gapm
