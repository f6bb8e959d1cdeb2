#include "projld/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "projld/errors.hpp"

namespace projld {

std::string to_string(Family f) {
    switch (f) {
        case Family::GeneralizedNormal: return "GeneralizedNormal";
        case Family::Rademacher: return "Rademacher";
        case Family::UniformSymmetric: return "UniformSymmetric";
        case Family::GaussianAlpha: return "GaussianAlpha";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    for (auto f : {Family::GeneralizedNormal, Family::Rademacher, Family::UniformSymmetric,
                   Family::GaussianAlpha}) {
        if (to_string(f) == name) return f;
    }
    throw ContractViolation("unknown distribution family '" + name + "'");
}

namespace {

void require_positive_finite(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw ContractViolation(std::string(what) + " must be finite and > 0");
    }
}

void require_finite(double t) {
    if (!std::isfinite(t)) throw DomainError("log-mgf argument must be finite");
}

}  // namespace

DistributionSpec DistributionSpec::generalized_normal(double scale, double shape) {
    require_positive_finite(scale, "generalized normal scale");
    if (!std::isfinite(shape) || !(shape > 1.0)) {
        throw ContractViolation("generalized normal shape must be > 1 (tails at or above exponential fail the "
                                "integrability requirement)");
    }
    return {Family::GeneralizedNormal, scale, shape};
}

DistributionSpec DistributionSpec::rademacher() { return {Family::Rademacher, 1.0, 0.0}; }

DistributionSpec DistributionSpec::uniform_symmetric(double half_width) {
    require_positive_finite(half_width, "uniform half-width");
    return {Family::UniformSymmetric, half_width, 0.0};
}

DistributionSpec DistributionSpec::gaussian_alpha(double scale) {
    require_positive_finite(scale, "gaussian scale");
    return {Family::GaussianAlpha, scale, 2.0};
}

std::string DistributionSpec::name() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(family_);
    switch (family_) {
        case Family::GeneralizedNormal: os << "(alpha=" << scale_ << ",beta=" << shape_ << ")"; break;
        case Family::UniformSymmetric: os << "(a=" << scale_ << ")"; break;
        case Family::GaussianAlpha: os << "(alpha=" << scale_ << ")"; break;
        case Family::Rademacher: break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace {

constexpr double kLn2 = std::numbers::ln2;

double log_cosh(double t) {
    const double a = std::abs(t);
    return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

double sech2(double t) {
    const double e = std::exp(-2.0 * std::abs(t));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

// Below |x| = 1 the closed forms cancel badly; these series have no
// cancellation and converge in a handful of terms.
constexpr double kSeriesSwitch = 1.0;

// sum_{k>=1} c_k x^{2k} with c_k = coef(k) * c_{k-1}-style ratios supplied by `next`.
template <class Ratio>
double even_series(double x2, double first, Ratio ratio) {
    double term = first;
    double sum = 0.0;
    for (int k = 1; k < 40 && term != 0.0; ++k) {
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        term *= x2 * ratio(k);
    }
    return sum;
}

// log(sinh(x)/x)
double log_sinhc(double x) {
    const double a = std::abs(x);
    if (a < kSeriesSwitch) {
        // sinh(a)/a - 1 = sum_{k>=1} a^{2k} / (2k+1)!
        const double x2 = a * a;
        const double excess = even_series(x2, x2 / 6.0, [](int k) { return 1.0 / ((2.0 * k + 2) * (2.0 * k + 3)); });
        return std::log1p(excess);
    }
    return a + std::log1p(-std::exp(-2.0 * a)) - kLn2 - std::log(a);
}

// Langevin function coth(x) - 1/x = (x cosh x - sinh x) / (x sinh x) and its derivative.
double langevin(double x) {
    if (std::abs(x) < kSeriesSwitch) {
        if (x == 0.0) return 0.0;
        // x cosh x - sinh x = sum_{k>=1} 2k x^{2k+1} / (2k+1)!
        const double x2 = x * x;
        const double num = x * even_series(x2, x2 / 3.0, [](int k) {
            return (k + 1.0) / (k * (2.0 * k + 2) * (2.0 * k + 3));
        });
        return num / (x * std::sinh(x));
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

double langevin_prime(double x) {
    if (std::abs(x) < kSeriesSwitch) {
        if (x == 0.0) return 1.0 / 3.0;
        // sinh^2 x - x^2 = sum_{k>=2} (2x)^{2k} / (2 (2k)!)
        const double x2 = x * x;
        const double num = even_series(4.0 * x2, x2 * x2 / 3.0, [](int k) {
            return 1.0 / ((2.0 * k + 3) * (2.0 * k + 4));
        });
        const double s = std::sinh(x);
        return num / (x2 * s * s);
    }
    const double s = std::sinh(x);
    return 1.0 / (x * x) - 1.0 / (s * s);
}

// ---------------------------------------------------------------------------
// Generalized normal by quadrature. Works with the unit-scale variable Y,
// density exp(-|y|^beta) / (2 Gamma(1 + 1/beta)); X = alpha Y so
// Lambda_X(t) = Lambda_Y(alpha t).
// ---------------------------------------------------------------------------

constexpr double kQuadRelTol = 1e-13;
constexpr int kQuadMaxPanels = 400;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel make_panel(F& f, double a, double b) {
    Panel p{a, b, 0.0, 0.0};
    double l1 = 0.0;
    p.value = Kronrod::integrate(f, a, b, 0, 0.0, &p.error, &l1);
    // Nothing below the rounding level of the panel's own mass can be resolved.
    p.error = std::max(0.0, p.error - 16.0 * std::numeric_limits<double>::epsilon() * l1);
    return p;
}

// Globally adaptive: always bisects the panel with the largest error estimate
// until the summed estimate is below the relative tolerance.
template <class F>
double integrate_pieces(F&& f, const std::vector<double>& breaks) {
    std::priority_queue<Panel> queue;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Panel p = make_panel(f, breaks[i], breaks[i + 1]);
        value += p.value;
        error += p.error;
        queue.push(p);
    }
    for (int n = 0; n < kQuadMaxPanels && error > kQuadRelTol * std::abs(value); ++n) {
        const Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = make_panel(f, worst.a, mid);
        const Panel right = make_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    return value;
}

struct GnGeometry {
    double mode;    // maximiser of s*y - y^beta on y >= 0
    double shift;   // s*mode - mode^beta, the log of the integrand peak
    std::vector<double> breaks;
};

// s >= 0.
GnGeometry gn_geometry(double s, double beta) {
    GnGeometry g;
    g.mode = s > 0.0 ? std::pow(s / beta, 1.0 / (beta - 1.0)) : 0.0;
    g.shift = s * g.mode - std::pow(g.mode, beta);

    double radius = std::max(10.0, 10.0 * std::pow(1.0 + s, 1.0 / (beta - 1.0)));
    // Push the cutoff out until the integrand is below exp(-45) of its peak.
    while (s * radius - std::pow(radius, beta) - g.shift > -45.0) radius *= 1.5;

    const double curvature = g.mode > 0.0 ? beta * (beta - 1.0) * std::pow(g.mode, beta - 2.0) : 0.0;
    double width = (curvature > 0.0 && std::isfinite(curvature)) ? 1.0 / std::sqrt(curvature) : 1.0;
    width = std::min(width, std::max(1.0, g.mode));

    g.breaks = {0.0, radius};
    for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0}) {
        const double b = g.mode + k * width;
        if (b > 0.0 && b < radius) g.breaks.push_back(b);
    }
    std::sort(g.breaks.begin(), g.breaks.end());
    g.breaks.erase(std::unique(g.breaks.begin(), g.breaks.end()), g.breaks.end());
    return g;
}

double gn_log_norm(double beta) { return std::log(2.0) + std::lgamma(1.0 + 1.0 / beta); }

double gn_log_mgf_unit(double s, double beta) {
    s = std::abs(s);
    if (s == 0.0) return 0.0;
    const GnGeometry g = gn_geometry(s, beta);
    if (s <= 1.0) {
        // Lambda = log1p(E[cosh(sY)] - 1); keeps full relative accuracy near 0.
        auto excess = [&](double y) {
            const double h = std::sinh(0.5 * s * y);
            return 2.0 * h * h * std::exp(-std::pow(y, beta));
        };
        const double integral = integrate_pieces(excess, g.breaks);
        return std::log1p(integral / std::exp(std::lgamma(1.0 + 1.0 / beta)));
    }
    auto folded = [&](double y) {
        const double base = -std::pow(y, beta) - g.shift;
        return std::exp(s * y + base) + std::exp(-s * y + base);
    };
    const double j0 = integrate_pieces(folded, g.breaks);
    return g.shift + std::log(j0) - gn_log_norm(beta);
}

struct TiltedMoments {
    double mean;
    double variance;
};

// Mean and variance of Y under the s-tilted law, s >= 0.
TiltedMoments gn_tilted_moments(double s, double beta, bool want_variance) {
    const GnGeometry g = gn_geometry(s, beta);
    auto plus = [&](double y) { return std::exp(s * y - std::pow(y, beta) - g.shift); };
    auto minus = [&](double y) { return std::exp(-s * y - std::pow(y, beta) - g.shift); };

    const double j0 = integrate_pieces([&](double y) { return plus(y) + minus(y); }, g.breaks);
    // plus - minus = plus * (1 - exp(-2 s y)) without cancellation.
    const double j1 =
        integrate_pieces([&](double y) { return -y * plus(y) * std::expm1(-2.0 * s * y); }, g.breaks);
    TiltedMoments m{j1 / j0, 0.0};
    if (want_variance) {
        const double mu = m.mean;
        const double j2 = integrate_pieces(
            [&](double y) { return (y - mu) * (y - mu) * plus(y) + (y + mu) * (y + mu) * minus(y); },
            g.breaks);
        m.variance = j2 / j0;
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// LogMgf
// ---------------------------------------------------------------------------

double LogMgf::value(double t) const {
    require_finite(t);
    const double a = spec_.scale();
    switch (spec_.family()) {
        case Family::Rademacher: return log_cosh(t);
        case Family::GaussianAlpha: return a * a * t * t / 4.0;
        case Family::UniformSymmetric: return log_sinhc(a * t);
        case Family::GeneralizedNormal: return gn_log_mgf_unit(a * t, spec_.shape());
    }
    return 0.0;
}

LogMgfDerivs LogMgf::derivs(double t) const {
    require_finite(t);
    const double a = spec_.scale();
    switch (spec_.family()) {
        case Family::Rademacher: return {std::tanh(t), sech2(t)};
        case Family::GaussianAlpha: return {a * a * t / 2.0, a * a / 2.0};
        case Family::UniformSymmetric: return {a * langevin(a * t), a * a * langevin_prime(a * t)};
        case Family::GeneralizedNormal: {
            const double s = a * t;
            const TiltedMoments m = gn_tilted_moments(std::abs(s), spec_.shape(), true);
            return {std::copysign(a * m.mean, s), a * a * m.variance};
        }
    }
    return {0.0, 0.0};
}

double LogMgf::deriv1(double t) const {
    if (spec_.family() != Family::GeneralizedNormal) return derivs(t).first;
    require_finite(t);
    const double s = spec_.scale() * t;
    if (s == 0.0) return 0.0;
    return std::copysign(spec_.scale() * gn_tilted_moments(std::abs(s), spec_.shape(), false).mean, s);
}

Interval LogMgf::deriv_range() const noexcept {
    switch (spec_.family()) {
        case Family::Rademacher: return {-1.0, 1.0};
        case Family::UniformSymmetric: return {-spec_.scale(), spec_.scale()};
        case Family::GaussianAlpha:
        case Family::GeneralizedNormal: return {};
    }
    return {};
}

bool LogMgf::analytic() const noexcept { return spec_.family() != Family::GeneralizedNormal; }

double log_mgf(const DistributionSpec& spec, double t) { return LogMgf(spec).value(t); }

LogMgfDerivs log_mgf_derivs(const DistributionSpec& spec, double t) { return LogMgf(spec).derivs(t); }

double absolute_moment(const DistributionSpec& spec, int order) {
    if (order < 2 || order % 2 != 0) throw ContractViolation("absolute_moment needs an even order >= 2");
    const double a = spec.scale();
    const int k = order / 2;
    switch (spec.family()) {
        case Family::Rademacher: return 1.0;
        case Family::UniformSymmetric: return std::pow(a, order) / (order + 1.0);
        case Family::GaussianAlpha: {
            // sigma^2 = alpha^2 / 2; E Z^{2k} = (2k-1)!!
            double m = 1.0;
            for (int j = 1; j <= k; ++j) m *= (2.0 * j - 1.0) * a * a / 2.0;
            return m;
        }
        case Family::GeneralizedNormal: {
            const double b = spec.shape();
            return std::pow(a, order) * std::exp(std::lgamma((order + 1.0) / b) - std::lgamma(1.0 / b));
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

// g(y) = s*y - |y|^beta, concave for beta >= 1.
struct GnLogDensity {
    double s;
    double beta;
    double operator()(double y) const { return s * y - std::pow(std::abs(y), beta); }
    double slope(double y) const {
        return s - beta * std::copysign(std::pow(std::abs(y), beta - 1.0), y);
    }
};

// Point on the given side of the mode where g has dropped by one unit.
double unit_drop_point(const GnLogDensity& g, double mode, double peak, double direction) {
    double lo = 0.0;
    double hi = 1.0;
    while (g(mode + direction * hi) > peak - 1.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mode + direction * mid) > peak - 1.0 ? lo : hi) = mid;
    }
    return mode + direction * hi;
}

}  // namespace

TiltedSampler::TiltedSampler(DistributionSpec spec, double tilt) : spec_(spec), tilt_(tilt) {
    require_finite(tilt);
    switch (spec_.family()) {
        case Family::Rademacher: p_plus_ = 1.0 / (1.0 + std::exp(-2.0 * tilt)); break;
        case Family::GeneralizedNormal: {
            if (tilt == 0.0) break;
            const double beta = spec_.shape();
            scaled_tilt_ = spec_.scale() * tilt;
            const GnLogDensity g{scaled_tilt_, beta};
            const double mode =
                std::copysign(std::pow(std::abs(scaled_tilt_) / beta, 1.0 / (beta - 1.0)), scaled_tilt_);
            peak_ = g(mode);
            const double yl = unit_drop_point(g, mode, peak_, -1.0);
            const double yr = unit_drop_point(g, mode, peak_, +1.0);
            left_slope_ = g.slope(yl);
            right_slope_ = g.slope(yr);
            left_break_ = yl + (peak_ - g(yl)) / left_slope_;
            right_break_ = yr + (peak_ - g(yr)) / right_slope_;
            left_mass_ = 1.0 / left_slope_;
            mid_mass_ = right_break_ - left_break_;
            right_mass_ = -1.0 / right_slope_;
            break;
        }
        case Family::UniformSymmetric:
        case Family::GaussianAlpha: break;
    }
}

double TiltedSampler::acceptance_rate() const noexcept {
    return proposals_ == 0 ? 1.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

double TiltedSampler::draw_generalized_normal(Stream& rng) {
    const double alpha = spec_.scale();
    const double beta = spec_.shape();
    if (tilt_ == 0.0) {
        std::gamma_distribution<double> gamma(1.0 / beta, 1.0);
        const double magnitude = std::pow(gamma(rng), 1.0 / beta);
        ++proposals_;
        ++accepted_;
        return alpha * (rng.uniform() < 0.5 ? -magnitude : magnitude);
    }
    const GnLogDensity g{scaled_tilt_, beta};
    const double total = left_mass_ + mid_mass_ + right_mass_;
    for (;;) {
        ++proposals_;
        if (proposals_ >= 1000 && acceptance_rate() < kMinAcceptanceRate) {
            throw EnvelopeError("generalized normal envelope acceptance below 1e-3 at tilt " +
                                    std::to_string(tilt_),
                                tilt_, acceptance_rate());
        }
        const double pick = rng.uniform() * total;
        double y;
        double log_envelope;
        if (pick < left_mass_) {
            y = left_break_ + std::log(rng.uniform()) / left_slope_;
            log_envelope = peak_ + left_slope_ * (y - left_break_);
        } else if (pick < left_mass_ + mid_mass_) {
            y = left_break_ + rng.uniform() * mid_mass_;
            log_envelope = peak_;
        } else {
            y = right_break_ + std::log(rng.uniform()) / right_slope_;
            log_envelope = peak_ + right_slope_ * (y - right_break_);
        }
        if (std::log(rng.uniform()) <= g(y) - log_envelope) {
            ++accepted_;
            return alpha * y;
        }
    }
}

double TiltedSampler::operator()(Stream& rng) {
    const double a = spec_.scale();
    switch (spec_.family()) {
        case Family::Rademacher: return rng.uniform() < p_plus_ ? 1.0 : -1.0;
        case Family::GaussianAlpha: {
            std::normal_distribution<double> normal(0.0, 1.0);
            return tilt_ * a * a / 2.0 + a / std::numbers::sqrt2 * normal(rng);
        }
        case Family::UniformSymmetric: {
            const double u = rng.uniform();
            const double c = tilt_ * a;
            if (c == 0.0) return -a + 2.0 * a * u;
            // Inverse CDF of the density ~ exp(t x) on [-a, a], mirrored for t < 0.
            const double c_abs = std::abs(c);
            const double x = a + std::log1p((1.0 - u) * std::expm1(-2.0 * c_abs)) / (c_abs / a);
            return c > 0.0 ? x : -x;
        }
        case Family::GeneralizedNormal: return draw_generalized_normal(rng);
    }
    return 0.0;
}

std::vector<double> sample(const DistributionSpec& spec, Stream& rng, std::size_t count) {
    return sample_tilted(spec, 0.0, rng, count).values;
}

SampleBatch sample_tilted(const DistributionSpec& spec, double tilt, Stream& rng, std::size_t count) {
    TiltedSampler sampler(spec, tilt);
    SampleBatch batch;
    batch.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) batch.values.push_back(sampler(rng));
    batch.acceptance_rate = sampler.acceptance_rate();
    return batch;
}

}  // namespace projld
