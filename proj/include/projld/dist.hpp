#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "projld/rng.hpp"

namespace projld {

enum class Family { GeneralizedNormal, Rademacher, UniformSymmetric, GaussianAlpha };

[[nodiscard]] std::string to_string(Family f);
[[nodiscard]] Family family_from_string(const std::string& name);

// Open interval of extended reals.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

// A member of the symmetric source-distribution catalog.
//
//   GeneralizedNormal(alpha, beta): density ~ exp(-(|x|/alpha)^beta), beta > 1
//   Rademacher:                     +-1 with probability 1/2
//   UniformSymmetric(a):            uniform on [-a, a]
//   GaussianAlpha(alpha):           density ~ exp(-(x/alpha)^2), variance alpha^2/2
//
// Every member has a log-mgf that is finite on the whole line and grows slowly
// enough for the Gaussian-mixed fourth-moment integrability condition. Shapes
// beta <= 1 violate it and are rejected.
class DistributionSpec {
public:
    [[nodiscard]] static DistributionSpec generalized_normal(double scale, double shape);
    [[nodiscard]] static DistributionSpec rademacher();
    [[nodiscard]] static DistributionSpec uniform_symmetric(double half_width);
    [[nodiscard]] static DistributionSpec gaussian_alpha(double scale);

    [[nodiscard]] Family family() const noexcept { return family_; }
    // alpha for GeneralizedNormal/GaussianAlpha, a for UniformSymmetric, 1 for Rademacher.
    [[nodiscard]] double scale() const noexcept { return scale_; }
    // beta for GeneralizedNormal, 2 for GaussianAlpha, unused otherwise.
    [[nodiscard]] double shape() const noexcept { return shape_; }

    [[nodiscard]] std::string name() const;

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

private:
    DistributionSpec(Family f, double scale, double shape) : family_(f), scale_(scale), shape_(shape) {}

    Family family_;
    double scale_;
    double shape_;
};

struct LogMgfDerivs {
    double first;
    double second;
};

// Evaluator for Lambda(t) = log E[exp(t X)] and its first two derivatives.
// Immutable; safe for concurrent use.
class LogMgf {
public:
    explicit LogMgf(DistributionSpec spec) : spec_(spec) {}

    [[nodiscard]] const DistributionSpec& spec() const noexcept { return spec_; }

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] LogMgfDerivs derivs(double t) const;
    [[nodiscard]] double deriv1(double t) const;
    [[nodiscard]] double deriv2(double t) const { return derivs(t).second; }

    // (inf Lambda', sup Lambda'), the open range of the derivative.
    [[nodiscard]] Interval deriv_range() const noexcept;
    // True when Lambda has a closed form; false when computed by quadrature.
    [[nodiscard]] bool analytic() const noexcept;

private:
    DistributionSpec spec_;
};

[[nodiscard]] double log_mgf(const DistributionSpec& spec, double t);
[[nodiscard]] LogMgfDerivs log_mgf_derivs(const DistributionSpec& spec, double t);

// E|X|^order for an even order >= 2.
[[nodiscard]] double absolute_moment(const DistributionSpec& spec, int order);

// Draws from the exponentially tilted law dG_t/dG(x) = exp(t x - Lambda(t)).
// Construction precomputes the rejection envelope where one is needed, so a
// sampler built once can be reused across many draws. Tilt 0 reproduces the
// untilted sampler draw for draw.
class TiltedSampler {
public:
    TiltedSampler(DistributionSpec spec, double tilt);

    double operator()(Stream& rng);

    [[nodiscard]] double tilt() const noexcept { return tilt_; }
    [[nodiscard]] std::uint64_t proposals() const noexcept { return proposals_; }
    [[nodiscard]] std::uint64_t accepted() const noexcept { return accepted_; }
    // Empirical acceptance rate of the rejection step (1 for direct samplers).
    [[nodiscard]] double acceptance_rate() const noexcept;

private:
    double draw_generalized_normal(Stream& rng);

    DistributionSpec spec_;
    double tilt_;
    // Tilted Rademacher: P(X = 1).
    double p_plus_ = 0.5;
    // Generalized-normal envelope in units of the unit-scale variable:
    // flat at the mode between [left_break, right_break], exponential tails
    // with slopes left_slope > 0 and right_slope < 0 beyond.
    double scaled_tilt_ = 0.0;
    double peak_ = 0.0;
    double left_break_ = 0.0;
    double right_break_ = 0.0;
    double left_slope_ = 0.0;
    double right_slope_ = 0.0;
    double left_mass_ = 0.0;
    double mid_mass_ = 0.0;
    double right_mass_ = 0.0;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
};

// Minimum acceptable rejection rate before a sampler reports an envelope failure.
inline constexpr double kMinAcceptanceRate = 1e-3;

struct SampleBatch {
    std::vector<double> values;
    double acceptance_rate = 1.0;
};

[[nodiscard]] std::vector<double> sample(const DistributionSpec& spec, Stream& rng, std::size_t count);
[[nodiscard]] SampleBatch sample_tilted(const DistributionSpec& spec, double tilt, Stream& rng,
                                        std::size_t count);

}  // namespace projld
