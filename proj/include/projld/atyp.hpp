#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projld/dist.hpp"
#include "projld/legendre.hpp"

namespace projld {

enum class Curvature { Concave, Convex, Linear, Indeterminate };
enum class PhiTrend { NonDecreasing, NonIncreasing, Constant, Neither };

[[nodiscard]] std::string to_string(Curvature c);
[[nodiscard]] std::string to_string(PhiTrend p);

struct H2Check {
    bool pass = false;
    // Largest node-doubling difference of the fourth-moment integral over t in {1, 2, 5}.
    double max_residual = 0.0;
    std::optional<std::string> failure;
};

struct H2PrimeCheck {
    bool pass = false;
    // Fitted growth exponent of Lambda on [10, 1e3] and a constant C with
    // Lambda(t) <= C (1 + |t|^r) on the fit grid.
    double r = 0.0;
    double c = 0.0;
};

struct H3Check {
    bool pass = false;
    double max_asymmetry = 0.0;
};

struct CurvatureCheck {
    Curvature classification = Curvature::Indeterminate;
    // Extreme second divided differences of s -> Lambda(sqrt(s)) and where they occur.
    double min_second_difference = 0.0;
    double max_second_difference = 0.0;
    double witness_min_s = 0.0;
    double witness_max_s = 0.0;
};

struct PhiCheck {
    PhiTrend trend = PhiTrend::Neither;
    // phi(k) = (2k+1) E|X|^{2k} / E|X|^{2k+2}, k = 1..10.
    std::vector<double> values;
};

struct HypothesisReport {
    DistributionSpec dist = DistributionSpec::rademacher();
    H2Check h2;
    H2PrimeCheck h2prime;
    H3Check h3;
    CurvatureCheck sqrt_curvature;
    PhiCheck phi;
    // Curvature of s -> log f(sqrt(s)) for families with a density given in
    // closed form (generalized normal only).
    std::optional<Curvature> log_density_curvature;

    // False when the moment-ratio trend implies a curvature that the
    // numerical classification contradicts.
    [[nodiscard]] bool consistent() const;
};

[[nodiscard]] HypothesisReport check_hypotheses(const DistributionSpec& dist);

// Ordering of the universal rate against the Cramer rate implied by the
// curvature of Lambda(sqrt(.)).
enum class Ordering { UniversalAtLeastCramer, UniversalAtMostCramer, Equal };

[[nodiscard]] std::string to_string(Ordering o);
[[nodiscard]] Ordering expected_ordering(Curvature c);

struct ComparisonRow {
    double w;
    double cramer;     // Lambda*(w), possibly +inf
    double universal;  // Psi*(w), possibly +inf
    double gap;        // universal - cramer; NaN when both are infinite
};

struct ComparisonTable {
    DistributionSpec dist = DistributionSpec::rademacher();
    Curvature classification = Curvature::Indeterminate;
    Ordering verdict = Ordering::Equal;
    std::vector<ComparisonRow> rows;
    // Smallest gap*sign over |w| >= kStrictBand inside both domains (the
    // margin the strictness check enforced); NaN if no such grid point.
    double strict_margin = 0.0;
};

inline constexpr double kOrderingSlack = 1e-8;
inline constexpr double kStrictGapMargin = 1e-6;
inline constexpr double kStrictBand = 0.25;

// Builds both rate tables on the grid and enforces the ordering implied by the
// curvature class. Throws VerdictViolation naming the first offending w, and
// ContractViolation if the hypotheses fail or the curvature is indeterminate.
[[nodiscard]] ComparisonTable compare_rates(const DistributionSpec& dist, const std::vector<double>& grid,
                                            unsigned threads = 1);
// Same, with the curvature already known.
[[nodiscard]] ComparisonTable compare_rates(const DistributionSpec& dist, Curvature classification,
                                            const std::vector<double>& grid, unsigned threads = 1);

struct JensenResult {
    // Worst signed residual against the predicted inequality (<= 0 is good);
    // for the linear class, max |Psi - Lambda|.
    double max_violation = 0.0;
    double witness_t = 0.0;
    // min |Lambda - Psi| over |t| >= kJensenStrictBand (NaN if no such t).
    double min_strict_margin = 0.0;
};

inline constexpr double kJensenSlack = 1e-9;
inline constexpr double kJensenStrictMargin = 1e-8;
inline constexpr double kJensenStrictBand = 0.5;

// Psi <= Lambda (concave) or Psi >= Lambda (convex) pointwise on t_grid.
// Throws VerdictViolation on a violation beyond kJensenSlack or a strictness
// failure at |t| >= 0.5.
[[nodiscard]] JensenResult jensen_check(const DistributionSpec& dist, Curvature classification,
                                        const std::vector<double>& t_grid);

// The rate function of the basis-direction sequence, chi_0: 0 at 0, +inf elsewhere.
[[nodiscard]] double chi0(double w) noexcept;

}  // namespace projld
