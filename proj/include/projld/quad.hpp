#pragma once

#include <functional>

#include "projld/dist.hpp"

namespace projld {

struct QuadEstimate {
    double value;
    // |value at N nodes - value at 2N nodes| for the accepted pair.
    double error;
    // Node count of the accepted (finer) rule.
    int nodes;
};

// Expectations against the standard Gaussian measure nu:
//
//   Psi(t)      = E[Lambda(t Z)]
//   Psi'(t)     = E[Z Lambda'(t Z)]
//   h2(t)       = E[|Lambda(t Z)|^4]
//
// All three integrands are even in Z, so the oracle integrates 2 * phi(u) * g(u)
// over [0, kCutoff] with panelled Gauss-Legendre rules. Panels are graded
// geometrically towards u = 0 when |t| is large, where Lambda(t u) bends on the
// scale 1/|t|. Each evaluation runs at N and 2N nodes per panel and accepts the
// finer value once the two agree to kAgreement (relative to max(1, |value|)),
// doubling N up to kMaxNodes before throwing AccuracyError.
class PsiOracle {
public:
    static constexpr int kMaxNodes = 512;
    static constexpr double kAgreement = 1e-9;
    static constexpr double kCutoff = 14.0;

    explicit PsiOracle(DistributionSpec dist, int nodes = 128);

    [[nodiscard]] const DistributionSpec& dist() const noexcept { return lmgf_.spec(); }
    [[nodiscard]] const LogMgf& log_mgf() const noexcept { return lmgf_; }
    [[nodiscard]] int nodes() const noexcept { return nodes_; }

    [[nodiscard]] double psi(double t) const { return psi_estimate(t).value; }
    [[nodiscard]] double psi_deriv(double t) const { return psi_deriv_estimate(t).value; }
    [[nodiscard]] double h2_integral(double t) const { return h2_estimate(t).value; }

    [[nodiscard]] QuadEstimate psi_estimate(double t) const;
    [[nodiscard]] QuadEstimate psi_deriv_estimate(double t) const;
    [[nodiscard]] QuadEstimate h2_estimate(double t) const;

    // Psi' ranges over sqrt(2/pi) times the range of Lambda'.
    [[nodiscard]] Interval deriv_range() const noexcept;

    // E[g(Z)] for even g at a fixed node count and panel scale; exposed for tests.
    [[nodiscard]] static double gaussian_even_expectation(const std::function<double(double)>& g,
                                                          double scale, int nodes);

private:
    [[nodiscard]] QuadEstimate escalate(const std::function<double(double)>& g, double t,
                                        const char* what) const;

    LogMgf lmgf_;
    int nodes_;
};

}  // namespace projld
