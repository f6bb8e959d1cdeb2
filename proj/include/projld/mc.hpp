#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projld/directions.hpp"
#include "projld/dist.hpp"

namespace projld {

struct SimulationOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    // Samples per rng substream. Results depend on this, never on `threads`.
    std::size_t chunk_size = 4096;
    // Overrides the stationary tilt (tilt 0 gives plain Monte Carlo).
    std::optional<double> forced_tilt;
};

// Importance-sampling estimate of P(W >= w) for W = (1/sqrt(n)) <X, theta>.
struct SimulationReport {
    DistributionSpec dist = DistributionSpec::rademacher();
    DirectionMode mode = DirectionMode::CramerIota;
    bool normalized = true;
    double w = 0.0;
    std::size_t n = 0;
    std::size_t samples = 0;
    double tilt = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    // -(1/n) log p_hat; +infinity when p_hat == 0.
    double rate_hat = 0.0;
    // Delta-method standard error of rate_hat.
    double rate_std_error = 0.0;
    std::uint64_t seed = 0;
    double effective_sample_size = 0.0;
    double acceptance_rate = 1.0;
    std::optional<std::string> warning;
};

inline constexpr std::size_t kMinSamples = 1000;
inline constexpr double kMinEffectiveSampleSize = 10.0;

// Solves (1/n) sum_i c_i Lambda'(t c_i) = w for the projection coefficients c.
// Throws InfeasibleThreshold when w is outside the open range of that mean.
[[nodiscard]] double choose_tilt(const DistributionSpec& dist, const DirectionArray& arr, double w);

// Draws X_i from the (t* c_i)-tilted laws and averages the likelihood ratio
// exp(-t* n W + sum_i Lambda(t* c_i)) on the closed event {W >= w}. Event
// membership allows a 1e-12 relative slack so lattice-valued projections land
// on the intended side of the threshold.
[[nodiscard]] SimulationReport estimate_tail(const DistributionSpec& dist, const DirectionArray& arr, double w,
                                             const SimulationOptions& options);

// estimate_tail across n_set. Gaussian modes draw one row per n from
// options.seed (column-constant rows therefore extend one another).
[[nodiscard]] std::vector<SimulationReport> rate_scan(const DistributionSpec& dist, DirectionMode mode, double w,
                                                      const std::vector<std::size_t>& n_set,
                                                      const SimulationOptions& options, bool normalized = true);

}  // namespace projld
