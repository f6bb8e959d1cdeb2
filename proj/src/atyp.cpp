#include "projld/atyp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "projld/errors.hpp"
#include "projld/quad.hpp"

namespace projld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCurvatureFloor = 1e-10;

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> v(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

// Classifies f on the grid s by the sign of its second divided differences.
template <class F>
CurvatureCheck classify_curvature(F&& f, const std::vector<double>& s) {
    std::vector<double> values;
    values.reserve(s.size());
    for (double x : s) values.push_back(f(x));

    CurvatureCheck out;
    out.min_second_difference = kInf;
    out.max_second_difference = -kInf;
    bool any_negative = false;
    bool any_positive = false;
    for (std::size_t j = 1; j + 1 < s.size(); ++j) {
        const double left = (values[j] - values[j - 1]) / (s[j] - s[j - 1]);
        const double right = (values[j + 1] - values[j]) / (s[j + 1] - s[j]);
        const double dd = 2.0 * (right - left) / (s[j + 1] - s[j - 1]);
        if (dd < out.min_second_difference) {
            out.min_second_difference = dd;
            out.witness_min_s = s[j];
        }
        if (dd > out.max_second_difference) {
            out.max_second_difference = dd;
            out.witness_max_s = s[j];
        }
        any_negative |= dd < -kCurvatureFloor;
        any_positive |= dd > kCurvatureFloor;
    }
    if (any_negative && any_positive) {
        out.classification = Curvature::Indeterminate;
    } else if (any_negative) {
        out.classification = Curvature::Concave;
    } else if (any_positive) {
        out.classification = Curvature::Convex;
    } else {
        out.classification = Curvature::Linear;
    }
    return out;
}

PhiCheck phi_trend(const DistributionSpec& dist) {
    PhiCheck out;
    for (int k = 1; k <= 10; ++k) {
        out.values.push_back((2.0 * k + 1.0) * absolute_moment(dist, 2 * k) / absolute_moment(dist, 2 * k + 2));
    }
    bool up = true;
    bool down = true;
    bool flat = true;
    for (std::size_t i = 0; i + 1 < out.values.size(); ++i) {
        const double d = out.values[i + 1] - out.values[i];
        const double tol = 1e-12 * std::max(std::abs(out.values[i]), std::abs(out.values[i + 1]));
        up &= d >= -tol;
        down &= d <= tol;
        flat &= std::abs(d) <= tol;
    }
    out.trend = flat ? PhiTrend::Constant
              : up   ? PhiTrend::NonDecreasing
              : down ? PhiTrend::NonIncreasing
                     : PhiTrend::Neither;
    return out;
}

std::optional<Curvature> implied_by(PhiTrend trend) {
    switch (trend) {
        case PhiTrend::NonDecreasing: return Curvature::Concave;
        case PhiTrend::NonIncreasing: return Curvature::Convex;
        case PhiTrend::Constant: return Curvature::Linear;
        case PhiTrend::Neither: return std::nullopt;
    }
    return std::nullopt;
}

bool decisive(Curvature c) { return c != Curvature::Indeterminate; }

std::string format_w(double w) {
    std::ostringstream os;
    os.precision(17);
    os << w;
    return os.str();
}

}  // namespace

std::string to_string(Curvature c) {
    switch (c) {
        case Curvature::Concave: return "Concave";
        case Curvature::Convex: return "Convex";
        case Curvature::Linear: return "Linear";
        case Curvature::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::string to_string(PhiTrend p) {
    switch (p) {
        case PhiTrend::NonDecreasing: return "NonDecreasing";
        case PhiTrend::NonIncreasing: return "NonIncreasing";
        case PhiTrend::Constant: return "Constant";
        case PhiTrend::Neither: return "Neither";
    }
    return "?";
}

std::string to_string(Ordering o) {
    switch (o) {
        case Ordering::UniversalAtLeastCramer: return "UniversalAtLeastCramer";
        case Ordering::UniversalAtMostCramer: return "UniversalAtMostCramer";
        case Ordering::Equal: return "Equal";
    }
    return "?";
}

Ordering expected_ordering(Curvature c) {
    switch (c) {
        case Curvature::Concave: return Ordering::UniversalAtLeastCramer;
        case Curvature::Convex: return Ordering::UniversalAtMostCramer;
        case Curvature::Linear: return Ordering::Equal;
        case Curvature::Indeterminate: break;
    }
    throw ContractViolation("no ordering verdict for an indeterminate curvature");
}

bool HypothesisReport::consistent() const {
    const Curvature c = sqrt_curvature.classification;
    if (!decisive(c)) return true;
    if (const auto implied = implied_by(phi.trend); implied && *implied != c) return false;
    if (log_density_curvature && decisive(*log_density_curvature) && *log_density_curvature != c) return false;
    return true;
}

HypothesisReport check_hypotheses(const DistributionSpec& dist) {
    const LogMgf lmgf(dist);
    HypothesisReport rep;
    rep.dist = dist;

    for (int i = 0; i <= 100; ++i) {
        const double t = -5.0 + 0.1 * i;
        rep.h3.max_asymmetry = std::max(rep.h3.max_asymmetry, std::abs(lmgf.value(t) - lmgf.value(-t)));
    }
    rep.h3.pass = rep.h3.max_asymmetry <= 1e-10;

    const PsiOracle psi(dist);
    rep.h2.pass = true;
    for (double t : {1.0, 2.0, 5.0}) {
        try {
            rep.h2.max_residual = std::max(rep.h2.max_residual, psi.h2_estimate(t).error);
        } catch (const AccuracyError& e) {
            rep.h2.pass = false;
            rep.h2.max_residual = std::max(rep.h2.max_residual, std::abs(e.fine() - e.coarse()));
            rep.h2.failure = e.what();
        } catch (const OracleError& e) {
            // E Lambda(tZ)^4 overflowed: the integrability requirement fails outright.
            rep.h2.pass = false;
            rep.h2.max_residual = std::numeric_limits<double>::infinity();
            rep.h2.failure = e.what();
        }
    }

    // Least-squares slope of log Lambda against log t on [10, 1e3].
    const auto ts = log_spaced(10.0, 1000.0, 41);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> lam;
    lam.reserve(ts.size());
    for (double t : ts) {
        const double v = lmgf.value(t);
        lam.push_back(v);
        const double x = std::log(t);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(ts.size());
    rep.h2prime.r = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.h2prime.c = std::max(rep.h2prime.c, lam[i] / (1.0 + std::pow(ts[i], rep.h2prime.r)));
    }
    rep.h2prime.pass = rep.h2prime.r < 2.0 - 0.05;

    rep.sqrt_curvature =
        classify_curvature([&](double s) { return lmgf.value(std::sqrt(s)); }, log_spaced(1e-4, 1e2, 121));

    rep.phi = phi_trend(dist);

    if (dist.family() == Family::GeneralizedNormal || dist.family() == Family::GaussianAlpha) {
        const double alpha = dist.scale();
        const double beta = dist.shape();
        // log f(sqrt(s)) = const - s^{beta/2} / alpha^beta
        rep.log_density_curvature =
            classify_curvature([&](double s) { return -std::pow(std::sqrt(s) / alpha, beta); },
                               log_spaced(1e-4, 1e2, 121))
                .classification;
    }
    return rep;
}

ComparisonTable compare_rates(const DistributionSpec& dist, const std::vector<double>& grid, unsigned threads) {
    const HypothesisReport rep = check_hypotheses(dist);
    if (!rep.h2.pass || !rep.h3.pass) {
        throw ContractViolation("compare_rates: " + dist.name() + " fails the integrability or symmetry check");
    }
    if (!decisive(rep.sqrt_curvature.classification)) {
        throw ContractViolation("compare_rates: curvature of Lambda(sqrt(s)) is indeterminate for " + dist.name());
    }
    return compare_rates(dist, rep.sqrt_curvature.classification, grid, threads);
}

ComparisonTable compare_rates(const DistributionSpec& dist, Curvature classification,
                              const std::vector<double>& grid, unsigned threads) {
    ComparisonTable table;
    table.dist = dist;
    table.classification = classification;
    table.verdict = expected_ordering(classification);

    const auto cramer = rate_table(dist, RateLabel::CramerRate, grid, threads);
    const auto universal = rate_table(dist, RateLabel::UniversalRate, grid, threads);

    const double sign = table.verdict == Ordering::UniversalAtMostCramer ? -1.0 : 1.0;
    table.strict_margin = kNaN;
    std::optional<double> witness;
    std::string reason;
    auto flag = [&](double w, const std::string& why) {
        if (!witness) {
            witness = w;
            reason = why;
        }
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        const double c = cramer.results[i].value;
        const double u = universal.results[i].value;
        const bool both_infinite = !std::isfinite(c) && !std::isfinite(u);
        const double gap = both_infinite ? kNaN : u - c;
        table.rows.push_back({w, c, u, gap});
        if (both_infinite) continue;

        if (w == 0.0 && !(std::abs(gap) <= kOrderingSlack)) flag(w, "gap at w = 0 is not zero");

        if (table.verdict == Ordering::Equal) {
            if (!(std::abs(gap) <= kOrderingSlack)) flag(w, "rates differ for a linear curvature class");
            continue;
        }
        if (sign * gap < -kOrderingSlack) flag(w, "ordering reversed");
        if (std::abs(w) >= kStrictBand && std::isfinite(gap)) {
            const double margin = sign * gap;
            if (std::isnan(table.strict_margin) || margin < table.strict_margin) table.strict_margin = margin;
            if (!(margin > kStrictGapMargin)) flag(w, "gap not strictly positive away from 0");
        }
    }
    if (witness) {
        throw VerdictViolation("compare_rates(" + dist.name() + ", " + to_string(classification) + "): " + reason +
                                   " at w = " + format_w(*witness),
                               *witness);
    }
    return table;
}

JensenResult jensen_check(const DistributionSpec& dist, Curvature classification,
                          const std::vector<double>& t_grid) {
    if (!decisive(classification)) throw ContractViolation("jensen_check needs a decisive curvature class");
    const PsiOracle psi(dist);
    const LogMgf& lmgf = psi.log_mgf();

    JensenResult out;
    out.max_violation = -kInf;
    out.min_strict_margin = kNaN;
    std::optional<double> strict_witness;
    for (double t : t_grid) {
        const double lam = lmgf.value(t);
        const double ps = psi.psi(t);
        double residual;
        switch (classification) {
            case Curvature::Concave: residual = ps - lam; break;
            case Curvature::Convex: residual = lam - ps; break;
            default: residual = std::abs(ps - lam); break;
        }
        if (residual > out.max_violation) {
            out.max_violation = residual;
            out.witness_t = t;
        }
        if (classification != Curvature::Linear && std::abs(t) >= kJensenStrictBand) {
            const double margin = -residual;
            if (std::isnan(out.min_strict_margin) || margin < out.min_strict_margin) out.min_strict_margin = margin;
            if (!(margin > kJensenStrictMargin) && !strict_witness) strict_witness = t;
        }
    }
    if (out.max_violation > kJensenSlack) {
        throw VerdictViolation("jensen_check(" + dist.name() + "): Psi vs Lambda ordering violated at t = " +
                                   format_w(out.witness_t),
                               out.witness_t);
    }
    if (strict_witness) {
        throw VerdictViolation("jensen_check(" + dist.name() + "): inequality not strict at t = " +
                                   format_w(*strict_witness),
                               *strict_witness);
    }
    return out;
}

double chi0(double w) noexcept { return w == 0.0 ? 0.0 : kInf; }

}  // namespace projld
