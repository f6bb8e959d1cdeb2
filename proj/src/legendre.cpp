#include "projld/legendre.hpp"

#include <cmath>
#include <limits>

#include "projld/errors.hpp"
#include "projld/parallel.hpp"

namespace projld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// lim_{|t| -> inf} (t w - f(t)) along direction dir, for w on the boundary of
// the derivative range. The sequence is monotone; it is truncated once it
// stabilises, once t*w loses too much precision, or once the oracle can no
// longer resolve f at the current tilt.
double boundary_limit(const ConvexFunction& f, double w, double dir) {
    double best = -f.value(0.0);
    for (int k = 0; k <= kMaxBracketDoublings; ++k) {
        const double t = dir * std::ldexp(1.0, k);
        if (std::abs(t * w) * std::numeric_limits<double>::epsilon() > 1e-9) break;
        double v;
        try {
            v = t * w - f.value(t);
        } catch (const AccuracyError&) {
            break;
        }
        if (!std::isfinite(v)) break;
        const bool settled = std::abs(v - best) <= 1e-12 * (1.0 + std::abs(v));
        best = std::max(best, v);
        if (settled) break;
    }
    return best;
}

}  // namespace

bool ConjugateResult::finite() const noexcept { return std::isfinite(value); }

std::optional<double> solve_slope(const std::function<double(double)>& deriv, double target) {
    if (!std::isfinite(target)) throw DomainError("solve_slope: target must be finite");
    const double tol = kSlopeTolerance * (1.0 + std::abs(target));
    auto residual = [&](double t) {
        const double d = deriv(t);
        if (std::isnan(d)) throw OracleError("derivative oracle returned NaN");
        return d - target;
    };

    const double r0 = residual(0.0);
    if (std::abs(r0) <= tol) return 0.0;
    const double dir = r0 < 0.0 ? 1.0 : -1.0;

    double a = 0.0;
    double fa = r0;
    double b = 0.0;
    double fb = r0;
    bool bracketed = false;
    for (int k = 0; k <= kMaxBracketDoublings; ++k) {
        b = dir * std::ldexp(1.0, k);
        fb = residual(b);
        if (std::abs(fb) <= tol) return b;
        if (sign_of(fb) != sign_of(r0)) {
            bracketed = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!bracketed) return std::nullopt;

    // Illinois false position on [a, b] with fa, fb of opposite sign, falling
    // back to bisection when an endpoint is infinite or progress stalls.
    int side = 0;
    int slow_steps = 0;
    double best_t = std::abs(fa) < std::abs(fb) ? a : b;
    double best_r = std::min(std::abs(fa), std::abs(fb));
    for (int iter = 0; iter < 500; ++iter) {
        const double width = std::abs(b - a);
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;

        double c;
        if (std::isfinite(fa) && std::isfinite(fb) && slow_steps < 3) {
            c = (a * fb - b * fa) / (fb - fa);
        } else {
            c = 0.5 * (a + b);
            slow_steps = 0;
        }
        if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);

        const double fc = residual(c);
        if (std::abs(fc) < best_r) {
            best_r = std::abs(fc);
            best_t = c;
        }
        if (std::abs(fc) <= tol) return c;

        if (sign_of(fc) == sign_of(fb)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
        slow_steps = std::abs(b - a) > 0.5 * width ? slow_steps + 1 : 0;
    }
    return best_t;
}

ConjugateResult conjugate(const ConvexFunction& f, double w) {
    if (!std::isfinite(w)) throw DomainError("conjugate: w must be finite");
    ConjugateResult out;
    out.w = w;
    const Interval range = f.deriv_range;
    if (w < range.lo || w > range.hi) {
        out.value = kInf;
        return out;
    }
    if (w == range.lo || w == range.hi) {
        out.value = boundary_limit(f, w, w == range.hi ? 1.0 : -1.0);
        return out;
    }
    const auto tilt = solve_slope(f.deriv, w);
    if (!tilt) {
        out.value = boundary_limit(f, w, w > f.deriv(0.0) ? 1.0 : -1.0);
        return out;
    }
    const double fv = f.value(*tilt);
    if (!std::isfinite(fv)) throw OracleError("conjugate: value oracle returned a non-finite value");
    out.value = *tilt * w - fv;
    out.tilt = *tilt;
    out.attained = true;
    return out;
}

ConvexFunction cramer_function(const LogMgf& lmgf) {
    return {[lmgf](double t) { return lmgf.value(t); }, [lmgf](double t) { return lmgf.deriv1(t); },
            lmgf.deriv_range()};
}

ConvexFunction universal_function(const PsiOracle& psi) {
    return {[psi](double t) { return psi.psi(t); }, [psi](double t) { return psi.psi_deriv(t); },
            psi.deriv_range()};
}

std::string to_string(RateLabel label) {
    return label == RateLabel::CramerRate ? "CramerRate" : "UniversalRate";
}

RateFunctionTable rate_table(const DistributionSpec& dist, RateLabel which, const std::vector<double>& grid,
                             unsigned threads) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ContractViolation("rate_table: grid values must be finite");
        if (i > 0 && grid[i] < grid[i - 1]) throw ContractViolation("rate_table: grid must be sorted");
    }
    const ConvexFunction f =
        which == RateLabel::CramerRate ? cramer_function(LogMgf(dist)) : universal_function(PsiOracle(dist));

    RateFunctionTable table;
    table.grid = grid;
    table.label = which;
    table.dist = dist;
    table.results.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) { table.results[i] = conjugate(f, grid[i]); });
    return table;
}

}  // namespace projld
