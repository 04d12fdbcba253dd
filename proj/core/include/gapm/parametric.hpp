#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gapm/linalg.hpp"
#include "gapm/model.hpp"

namespace gapm {

/// A maximal stretch of the scalar random coordinate over which the
/// second-stage optimal dual stays fixed; Q is linear on it.
struct DualSegment {
    double lo = 0.0;
    double hi = 0.0;
    Vector dual;
    double value_lo = 0.0;
    double value_hi = 0.0;
};

/// Row of the second-stage rhs driven by the scalar random coordinate.
/// Throws ValidationError when the model's randomness is not a single rhs
/// component.
std::size_t scalar_rhs_row(const RecourseModel& model);

/// Sweeps xi from lo to hi, solving Q(x, xi) and ranging the driven rhs row
/// to collect dual-constant segments. Adjacent segments with equal duals
/// (1e-9 abs + rel) are merged. A zero-width ranging interval advances the
/// probe by `step`.
std::vector<DualSegment> scalar_rhs_segments(const RecourseModel& model, std::span<const double> x,
                                             double lo, double hi, double step);

/// Integral of Q(x, xi) over [lo, hi] from the segment decomposition.
double integrate_segments(std::span<const DualSegment> segments);

}  // namespace gapm
