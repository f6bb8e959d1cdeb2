#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "projld/directions.hpp"
#include "projld/dist.hpp"
#include "projld/quad.hpp"

namespace projld {

// Lambda_{n,z}(t) = (1/n) sum_i Lambda(t z_i) for a raw row z.
[[nodiscard]] double finite_lmgf(const LogMgf& lmgf, const DirectionArray& raw, double t);
[[nodiscard]] double finite_lmgf(const DistributionSpec& dist, const DirectionArray& raw, double t);

struct FiniteLogMgfCurve {
    DistributionSpec dist;
    DirectionArray arr;
    std::vector<double> t_grid;
    std::vector<double> values;
};

[[nodiscard]] FiniteLogMgfCurve finite_lmgf_curve(const DistributionSpec& dist, const DirectionArray& raw,
                                                  const std::vector<double>& t_grid);

// Lambda(t sqrt(n)) / n: the log-mgf of X_1 / sqrt(n) along the basis direction.
[[nodiscard]] double e1_lmgf(const DistributionSpec& dist, std::size_t n, double t);

struct ProfileRow {
    std::size_t n;
    double t;
    double gap;  // |Lambda_{n,z}(t) - Psi(t)|
    std::uint64_t seed;
};

struct MedianGap {
    std::size_t n;
    double t;
    double median;
};

// Gap table over every (seed, n, t). Rows are ordered seed-major, then n, then
// t, independent of the worker count.
[[nodiscard]] std::vector<ProfileRow> convergence_profile(const PsiOracle& psi, DirectionMode mode,
                                                          const std::vector<std::uint64_t>& seeds,
                                                          const std::vector<double>& t_set,
                                                          const std::vector<std::size_t>& n_set,
                                                          unsigned threads = 1);

// Median gap per (n, t), ordered as in n_set x t_set of first appearance.
[[nodiscard]] std::vector<MedianGap> median_gaps(const std::vector<ProfileRow>& rows);

}  // namespace projld
