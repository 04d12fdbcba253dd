#include "gapm/refiners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapm/engine.hpp"
#include "gapm/errors.hpp"
#include "gapm/parametric.hpp"

namespace gapm {

namespace {

SplitResult split_all(const UncertaintySpace& space, const Partition& partition,
                      const std::vector<Splitter>& per_cell) {
    Partition current = partition;
    bool changed = false;
    // Walk back to front so indices of unvisited cells stay valid.
    for (std::size_t k = partition.cells.size(); k-- > 0;) {
        SplitResult r = split_cell(space, current, k, per_cell[k]);
        if (r.changed) {
            current = std::move(r.partition);
            changed = true;
        }
    }
    if (changed) ++current.generation;
    return {std::move(current), changed};
}

}  // namespace

bool Refiner::conditions_hold(const RecourseModel& model, const UncertaintySpace& space,
                              const Partition& partition, const Vector& x, double tol) const {
    for (const auto& cell : partition.cells) {
        const auto samples = atomized_samples(model, space, cell, x);
        if (!samples) return false;
        if (!check_conditions(*samples, x, tol)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- dual clustering

SplitResult dual_clustering_refine(const DiscreteSpace& space, const Partition& partition,
                                   const std::vector<Vector>& scenario_duals, double abs_tol, double rel_tol) {
    if (scenario_duals.size() != space.scenarios().size()) {
        throw ContractViolation("dual clustering: need one dual vector per scenario");
    }
    auto equal = [&](const Vector& a, const Vector& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::abs(a[i] - b[i]) > abs_tol + rel_tol * std::max(std::abs(a[i]), std::abs(b[i]))) {
                return false;
            }
        }
        return true;
    };
    std::vector<Splitter> splitters;
    splitters.reserve(partition.cells.size());
    for (const auto& cell : partition.cells) {
        ScenarioGroups groups;
        for (std::size_t s : cell.members) {
            auto it = std::find_if(groups.groups.begin(), groups.groups.end(), [&](const auto& g) {
                return equal(scenario_duals[g.front()], scenario_duals[s]);
            });
            if (it == groups.groups.end()) {
                groups.groups.push_back({s});
            } else {
                it->push_back(s);
            }
        }
        splitters.emplace_back(std::move(groups));
    }
    return split_all(space, partition, splitters);
}

bool DualClusteringRefiner::supports(const UncertaintySpace& space) const {
    return dynamic_cast<const DiscreteSpace*>(&space) != nullptr;
}

SplitResult DualClusteringRefiner::refine(const RecourseModel& model, const UncertaintySpace& space,
                                          const Partition& partition, const Vector& x) const {
    const auto* discrete = dynamic_cast<const DiscreteSpace*>(&space);
    if (discrete == nullptr) throw ContractViolation("dual clustering needs a discrete space");
    std::vector<Vector> duals(discrete->scenarios().size());
    for (const auto& cell : partition.cells) {
        for (std::size_t s : cell.members) {
            duals[s] = evaluate_subproblem(model, x, discrete->scenarios()[s], "scenario " + std::to_string(s)).dual;
        }
    }
    return dual_clustering_refine(*discrete, partition, duals, abs_tol_, rel_tol_);
}

// ---------------------------------------------------------------- ranging

namespace {

std::vector<double> interior_breakpoints(const UniformRhsSpace& space, const RecourseModel& model,
                                         const Vector& x, const Interval& iv) {
    const auto segments = scalar_rhs_segments(model, x, iv.lo, iv.hi, space.degeneracy_step(iv.lo, iv.hi));
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < segments.size(); ++k) out.push_back(segments[k].hi);
    return out;
}

}  // namespace

SplitResult ranging_refine(const UniformRhsSpace& space, const Partition& partition, const RecourseModel& model,
                           const Vector& x) {
    std::vector<Splitter> splitters;
    splitters.reserve(partition.cells.size());
    for (const auto& cell : partition.cells) {
        const auto* iv = std::get_if<Interval>(&cell.geometry);
        if (iv == nullptr) throw ContractViolation("ranging refiner: cell is not an interval");
        splitters.emplace_back(Breakpoints{interior_breakpoints(space, model, x, *iv)});
    }
    return split_all(space, partition, splitters);
}

bool RangingRefiner::supports(const UncertaintySpace& space) const {
    return dynamic_cast<const UniformRhsSpace*>(&space) != nullptr;
}

SplitResult RangingRefiner::refine(const RecourseModel& model, const UncertaintySpace& space,
                                   const Partition& partition, const Vector& x) const {
    const auto* uniform = dynamic_cast<const UniformRhsSpace*>(&space);
    if (uniform == nullptr) throw ContractViolation("ranging refiner needs a uniform rhs space");
    return ranging_refine(*uniform, partition, model, x);
}

bool RangingRefiner::conditions_hold(const RecourseModel& model, const UncertaintySpace& space,
                                     const Partition& partition, const Vector& x, double) const {
    const auto* uniform = dynamic_cast<const UniformRhsSpace*>(&space);
    if (uniform == nullptr) throw ContractViolation("ranging refiner needs a uniform rhs space");
    for (const auto& cell : partition.cells) {
        if (!interior_breakpoints(*uniform, model, x, std::get<Interval>(cell.geometry)).empty()) return false;
    }
    return true;
}

// ---------------------------------------------------------------- hyperplane

Hyperplane rhs_sign_hyperplane(const RecourseModel& model, const Vector& x) {
    if (model.recourse_rows() != 1) {
        throw ContractViolation("hyperplane refiner: recourse must have a single row");
    }
    const std::size_t dim = model.random_dim();
    const Vector zero(dim, 0.0);
    const Realization base = model.realize(zero);
    const double alpha = base.h[0] - dot(base.T.row(0), x);
    Vector g(dim, 0.0);
    for (const auto& e : model.random_entries) {
        if (e.target == RandomEntry::Target::rhs) {
            g[e.coord] += 1.0;
        } else {
            g[e.coord] -= x[e.col];
        }
    }
    return {std::move(g), -alpha};
}

SplitResult hyperplane_refine(const GaussianTechnologySpace& space, const Partition& partition,
                              const RecourseModel& model, const Vector& x) {
    Hyperplane plane = rhs_sign_hyperplane(model, x);
    if (norm_inf(plane.normal) == 0.0) return {partition, false};
    std::vector<Splitter> splitters(partition.cells.size(), Splitter{plane});
    return split_all(space, partition, splitters);
}

bool HyperplaneRefiner::supports(const UncertaintySpace& space) const {
    const auto* gauss = dynamic_cast<const GaussianTechnologySpace*>(&space);
    return gauss != nullptr && gauss->model().recourse_rows() == 1;
}

SplitResult HyperplaneRefiner::refine(const RecourseModel& model, const UncertaintySpace& space,
                                      const Partition& partition, const Vector& x) const {
    const auto* gauss = dynamic_cast<const GaussianTechnologySpace*>(&space);
    if (gauss == nullptr) throw ContractViolation("hyperplane refiner needs a gaussian technology space");
    return hyperplane_refine(*gauss, partition, model, x);
}

bool HyperplaneRefiner::conditions_hold(const RecourseModel& model, const UncertaintySpace& space,
                                        const Partition& partition, const Vector& x, double) const {
    const auto* gauss = dynamic_cast<const GaussianTechnologySpace*>(&space);
    if (gauss == nullptr) throw ContractViolation("hyperplane refiner needs a gaussian technology space");
    const Hyperplane plane = rhs_sign_hyperplane(model, x);
    for (const auto& cell : partition.cells) {
        bool below = false;
        bool above = false;
        for (std::size_t s : cell.members) {
            const double v = dot(plane.normal, gauss->pool().row(s)) - plane.offset;
            below = below || v < 0.0;
            above = above || v > 0.0;
        }
        if (below && above) return false;
    }
    return true;
}

std::unique_ptr<Refiner> make_refiner(std::string_view name, const UncertaintySpace& space) {
    std::unique_ptr<Refiner> out;
    if (name == "auto") {
        if (space.kind() == "discrete") name = "dual-cluster";
        if (space.kind() == "uniform_rhs") name = "ranging";
        if (space.kind() == "gaussian_technology") name = "hyperplane";
    }
    if (name == "dual-cluster") out = std::make_unique<DualClusteringRefiner>();
    if (name == "ranging") out = std::make_unique<RangingRefiner>();
    if (name == "hyperplane") out = std::make_unique<HyperplaneRefiner>();
    if (!out) throw ValidationError("unknown refiner '" + std::string(name) + "'");
    if (!out->supports(space)) {
        throw ValidationError("refiner '" + std::string(out->name()) + "' does not support a " +
                              std::string(space.kind()) + " space");
    }
    return out;
}

}  // namespace gapm
