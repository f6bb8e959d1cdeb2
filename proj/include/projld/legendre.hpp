#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "projld/dist.hpp"
#include "projld/quad.hpp"

namespace projld {

// A smooth convex function with f(0) = 0, given by value and derivative
// oracles plus the open range of the derivative. The derivative oracle may
// return +-infinity (extended-real monotone) but never NaN.
struct ConvexFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    Interval deriv_range;
};

// f*(w) = sup_t { t w - f(t) }.
struct ConjugateResult {
    double w = 0.0;
    // +infinity when w lies outside the closure of the derivative range.
    double value = 0.0;
    // Maximising tilt t_w with f'(t_w) = w; empty when the sup is not attained.
    std::optional<double> tilt;
    bool attained = false;

    [[nodiscard]] bool finite() const noexcept;
};

// Stationarity tolerance |f'(t) - w| <= kSlopeTolerance * (1 + |w|).
inline constexpr double kSlopeTolerance = 1e-10;
inline constexpr int kMaxBracketDoublings = 60;

// Solves deriv(t) = target for non-decreasing deriv by bracket expansion over
// +-2^k (k <= 60) followed by an Illinois false-position / bisection hybrid.
// Returns nothing when no bracket is found.
[[nodiscard]] std::optional<double> solve_slope(const std::function<double(double)>& deriv, double target);

// Attainment is decided from the derivative range: interior w is solved,
// boundary w returns the limiting sup (attained = false), and w outside the
// closed range returns +infinity.
[[nodiscard]] ConjugateResult conjugate(const ConvexFunction& f, double w);

[[nodiscard]] ConvexFunction cramer_function(const LogMgf& lmgf);
[[nodiscard]] ConvexFunction universal_function(const PsiOracle& psi);

enum class RateLabel { CramerRate, UniversalRate };

[[nodiscard]] std::string to_string(RateLabel label);

struct RateFunctionTable {
    std::vector<double> grid;
    std::vector<ConjugateResult> results;
    RateLabel label = RateLabel::CramerRate;
    DistributionSpec dist = DistributionSpec::rademacher();
};

// Pointwise conjugate of Lambda (CramerRate) or Psi (UniversalRate) on a
// sorted finite grid. Grid points are split across `threads` workers; output
// order matches the grid.
[[nodiscard]] RateFunctionTable rate_table(const DistributionSpec& dist, RateLabel which,
                                           const std::vector<double>& grid, unsigned threads = 1);

}  // namespace projld
