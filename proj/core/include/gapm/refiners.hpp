#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/model.hpp"
#include "gapm/partition.hpp"

namespace gapm {

/// Disaggregation procedure: splits cells of a partition using the
/// second-stage duals at the incumbent x.
class Refiner {
public:
    virtual ~Refiner() = default;

    virtual std::string_view name() const = 0;
    virtual bool supports(const UncertaintySpace& space) const = 0;
    /// Every output cell lies in exactly one input cell. On change the
    /// generation counter is incremented once.
    virtual SplitResult refine(const RecourseModel& model, const UncertaintySpace& space,
                               const Partition& partition, const Vector& x) const = 0;
    /// Evaluates the expectation-of-products conditions on every cell at x
    /// over the atoms the backend enumerates. False when it cannot.
    virtual bool conditions_hold(const RecourseModel& model, const UncertaintySpace& space,
                                 const Partition& partition, const Vector& x, double tol) const;
    /// A refiner whose children always carry a constant dual: a no-op
    /// refinement then certifies the conditions.
    virtual bool certifies_on_noop() const { return false; }
};

/// Groups scenarios whose duals agree within abs_tol + rel_tol * max(|a|,|b|).
class DualClusteringRefiner final : public Refiner {
public:
    explicit DualClusteringRefiner(double abs_tol = 1e-6, double rel_tol = 1e-6)
        : abs_tol_(abs_tol), rel_tol_(rel_tol) {}

    std::string_view name() const override { return "dual-cluster"; }
    bool supports(const UncertaintySpace& space) const override;
    SplitResult refine(const RecourseModel& model, const UncertaintySpace& space, const Partition& partition,
                       const Vector& x) const override;

private:
    double abs_tol_;
    double rel_tol_;
};

/// Splits interval cells at the breakpoints of the piecewise-linear Q(x, .).
class RangingRefiner final : public Refiner {
public:
    std::string_view name() const override { return "ranging"; }
    bool supports(const UncertaintySpace& space) const override;
    SplitResult refine(const RecourseModel& model, const UncertaintySpace& space, const Partition& partition,
                       const Vector& x) const override;
    bool conditions_hold(const RecourseModel& model, const UncertaintySpace& space, const Partition& partition,
                         const Vector& x, double tol) const override;
    bool certifies_on_noop() const override { return true; }
};

/// Cuts every cell with the hyperplane where the single second-stage row's
/// rhs h(xi) - T(xi) x changes sign.
class HyperplaneRefiner final : public Refiner {
public:
    std::string_view name() const override { return "hyperplane"; }
    bool supports(const UncertaintySpace& space) const override;
    SplitResult refine(const RecourseModel& model, const UncertaintySpace& space, const Partition& partition,
                       const Vector& x) const override;
    bool conditions_hold(const RecourseModel& model, const UncertaintySpace& space, const Partition& partition,
                         const Vector& x, double tol) const override;
    bool certifies_on_noop() const override { return true; }
};

SplitResult dual_clustering_refine(const DiscreteSpace& space, const Partition& partition,
                                   const std::vector<Vector>& scenario_duals, double abs_tol = 1e-6,
                                   double rel_tol = 1e-6);

SplitResult ranging_refine(const UniformRhsSpace& space, const Partition& partition, const RecourseModel& model,
                           const Vector& x);

/// For a one-row recourse, rhs(xi) = h(xi) - T(xi) x is affine in xi. Returns
/// the plane rhs(xi) = 0 oriented so that normal . xi <= offset iff rhs <= 0.
Hyperplane rhs_sign_hyperplane(const RecourseModel& model, const Vector& x);

SplitResult hyperplane_refine(const GaussianTechnologySpace& space, const Partition& partition,
                              const RecourseModel& model, const Vector& x);

/// "auto" picks the refiner matching the backend kind.
std::unique_ptr<Refiner> make_refiner(std::string_view name, const UncertaintySpace& space);

}  // namespace gapm
