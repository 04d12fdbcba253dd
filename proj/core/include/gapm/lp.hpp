#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

#include "gapm/linalg.hpp"

namespace gapm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { eq, le, ge };

std::string_view to_string(Sense s);
Sense parse_sense(std::string_view s);

struct LpTolerances {
    double feas = 1e-7;
    double duality = 1e-6;
    double pivot = 1e-9;
};

/// min cost^T y  s.t.  matrix y (senses) rhs,  lower <= y <= upper.
/// Empty `lower` means all zeros; empty `upper` means all +inf.
struct StandardLp {
    Vector cost;
    Matrix matrix;
    Vector rhs;
    std::vector<Sense> senses;
    Vector lower;
    Vector upper;

    std::size_t num_rows() const noexcept { return matrix.rows(); }
    std::size_t num_cols() const noexcept { return matrix.cols(); }
    double lower_bound(std::size_t j) const { return lower.empty() ? 0.0 : lower[j]; }
    double upper_bound(std::size_t j) const { return upper.empty() ? kInf : upper[j]; }

    /// Throws ValidationError on any shape or bound inconsistency.
    void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string_view to_string(LpStatus s);

/// Duals follow d(objective)/d(rhs): >= 0 on ge rows, <= 0 on le rows, free
/// on equalities, so that matrix^T dual <= cost holds for nonnegative columns.
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector primal;
    Vector dual;
    double objective = 0.0;
    /// Basic columns of the internal canonical form, sorted ascending.
    std::vector<std::size_t> basis;
    std::size_t iterations = 0;
};

struct RangingInterval {
    std::size_t row = 0;
    double lower = -kInf;
    double upper = kInf;
    Vector dual;
};

struct LpOptions {
    LpTolerances tol;
    /// Secondary objectives minimized in order over the optimal face.
    std::vector<Vector> tie_break;
    /// Tableau dump sink for debugging; null disables tracing.
    std::ostream* trace = nullptr;
    std::size_t max_iterations = 100000;
};

LpSolution solve(const StandardLp& lp, const LpOptions& options = {});

/// Maximal interval of rhs[row] over which the basis of `sol` stays optimal.
RangingInterval rhs_ranging(const StandardLp& lp, const LpSolution& sol, std::size_t row,
                            const LpTolerances& tol = {});

/// Primal residual: worst violation of rows and bounds at y.
double primal_residual(const StandardLp& lp, const Vector& y);

}  // namespace gapm
