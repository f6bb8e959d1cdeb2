#include "projld/quad.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "projld/errors.hpp"

namespace projld {

namespace {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

Rule make_gauss_legendre(int n) {
    Rule r;
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    auto push = [&](double x) {
        const double dp = boost::math::legendre_p_prime(n, x);
        r.nodes.push_back(x);
        r.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    };
    for (double z : zeros) {
        push(z);
        if (z != 0.0) push(-z);
    }
    return r;
}

// Supported counts are 64, 128, 256, 512 (and 1024 as the refinement of 512).
const Rule& rule(int n) {
    static const std::array<Rule, 5> rules = {make_gauss_legendre(64), make_gauss_legendre(128),
                                              make_gauss_legendre(256), make_gauss_legendre(512),
                                              make_gauss_legendre(1024)};
    switch (n) {
        case 64: return rules[0];
        case 128: return rules[1];
        case 256: return rules[2];
        case 512: return rules[3];
        case 1024: return rules[4];
        default: throw ContractViolation("node count must be one of 64, 128, 256, 512");
    }
}

// Lambda(t u) bends on the scale 1/|t|; grade panels so the first one is no
// wider than ~80/|t| of the cutoff.
std::vector<double> panel_breaks(double scale) {
    const double cutoff = PsiOracle::kCutoff;
    const double span = std::abs(scale) * cutoff;
    int levels = 0;
    if (span > 80.0) levels = static_cast<int>(std::ceil(std::log2(span / 80.0)));
    std::vector<double> breaks{0.0};
    for (int k = levels; k >= 0; --k) breaks.push_back(std::ldexp(cutoff, -k));
    return breaks;
}

}  // namespace

PsiOracle::PsiOracle(DistributionSpec dist, int nodes) : lmgf_(dist), nodes_(nodes) {
    if (nodes != 64 && nodes != 128 && nodes != 256 && nodes != 512) {
        throw ContractViolation("PsiOracle node count must be one of 64, 128, 256, 512");
    }
    (void)rule(nodes);  // build tables eagerly
}

double PsiOracle::gaussian_even_expectation(const std::function<double(double)>& g, double scale,
                                            int nodes) {
    const Rule& r = rule(nodes);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const auto breaks = panel_breaks(scale);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double half = 0.5 * (breaks[p + 1] - breaks[p]);
        const double mid = 0.5 * (breaks[p + 1] + breaks[p]);
        double panel = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const double u = mid + half * r.nodes[i];
            panel += r.weights[i] * g(u) * std::exp(-0.5 * u * u);
        }
        total += half * panel;
    }
    return 2.0 * inv_sqrt_2pi * total;
}

QuadEstimate PsiOracle::escalate(const std::function<double(double)>& g, double t, const char* what) const {
    if (!std::isfinite(t)) throw DomainError(std::string(what) + ": argument must be finite");
    if (t == 0.0) return {g(0.0), 0.0, nodes_};
    double coarse = gaussian_even_expectation(g, t, nodes_);
    double previous = coarse;
    double fine = coarse;
    int n = nodes_;
    do {
        previous = coarse;
        fine = gaussian_even_expectation(g, t, 2 * n);
        if (!std::isfinite(fine)) throw OracleError(std::string(what) + ": non-finite quadrature value");
        const double err = std::abs(fine - coarse);
        if (err <= kAgreement * std::max(1.0, std::abs(fine))) return {fine, err, 2 * n};
        coarse = fine;
        n *= 2;
    } while (2 * n <= kMaxNodes);
    std::ostringstream os;
    os.precision(17);
    os << what << "(" << t << ") did not converge at " << n << " nodes";
    throw AccuracyError(os.str(), previous, fine, n);
}

QuadEstimate PsiOracle::psi_estimate(double t) const {
    if (t == 0.0) return {0.0, 0.0, nodes_};
    return escalate([&](double u) { return lmgf_.value(t * u); }, t, "psi");
}

QuadEstimate PsiOracle::psi_deriv_estimate(double t) const {
    if (t == 0.0) return {0.0, 0.0, nodes_};
    return escalate([&](double u) { return u * lmgf_.deriv1(t * u); }, t, "psi_deriv");
}

QuadEstimate PsiOracle::h2_estimate(double t) const {
    if (t == 0.0) return {0.0, 0.0, nodes_};
    return escalate(
        [&](double u) {
            const double v = lmgf_.value(t * u);
            return (v * v) * (v * v);
        },
        t, "h2_integral");
}

Interval PsiOracle::deriv_range() const noexcept {
    const double c = std::sqrt(2.0 / std::numbers::pi);
    const Interval r = lmgf_.deriv_range();
    return {c * r.lo, c * r.hi};
}

}  // namespace projld
