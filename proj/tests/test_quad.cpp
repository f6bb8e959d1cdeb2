#include <doctest.h>

#include <cmath>
#include <numbers>

#include "catalog.hpp"
#include "oracles.hpp"
#include "projld/errors.hpp"
#include "projld/quad.hpp"

using namespace projld;
using testing_catalog::all;
using testing_catalog::grid;

TEST_CASE("Gaussian: Psi equals Lambda") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        const PsiOracle psi(DistributionSpec::gaussian_alpha(alpha));
        for (double t : {-3.0, -1.0, 0.25, 2.0, 7.5}) {
            CHECK(psi.psi(t) == doctest::Approx(alpha * alpha * t * t / 4.0).epsilon(1e-13));
            CHECK(psi.psi_deriv(t) == doctest::Approx(alpha * alpha * t / 2.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("values at the origin") {
    for (const auto& spec : all()) {
        const PsiOracle psi(spec);
        CHECK(psi.psi(0.0) == 0.0);
        CHECK(psi.psi_deriv(0.0) == 0.0);
        CHECK(psi.h2_integral(0.0) == 0.0);
    }
}

TEST_CASE("Rademacher against dense trapezoid oracles") {
    const PsiOracle psi(DistributionSpec::rademacher());
    auto lc = [](double x) { return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::numbers::ln2; };
    for (double t : {0.3, 1.0, 2.5, 5.0}) {
        const double ref = oracle::gaussian_expectation([&](double u) { return lc(t * u); });
        CHECK(std::abs(psi.psi(t) - ref) < 1e-8);
    }
    const double d_ref = oracle::central_diff([&](double t) { return psi.psi(t); }, 1.0, 1e-5);
    CHECK(std::abs(psi.psi_deriv(1.0) - d_ref) < 1e-6);

    const double h2_ref = oracle::gaussian_expectation([&](double u) { return std::pow(lc(2.0 * u), 4); });
    CHECK(std::abs(psi.h2_integral(2.0) - h2_ref) < 1e-7);
}

TEST_CASE("fourth-moment integral for the Gaussian") {
    const PsiOracle psi(DistributionSpec::gaussian_alpha(1.0));
    CHECK(psi.h2_integral(1.0) == doctest::Approx(105.0 / 256.0).epsilon(1e-13));
}

TEST_CASE("generalized normal: Psi against an independent double integral") {
    const PsiOracle psi(DistributionSpec::generalized_normal(1.0, 4.0));
    const double t = 1.0;
    const double ref = oracle::trapezoid(
        [&](double u) { return oracle::gn_log_mgf(1.0, 4.0, t * u, 10.0, 4000) * oracle::std_normal_pdf(u); }, -9.0,
        9.0, 1800);
    CHECK(std::abs(psi.psi(t) - ref) < 1e-8);
}

TEST_CASE("node-doubling stability on [-5, 5]") {
    for (const auto& spec : all()) {
        const LogMgf lam(spec);
        for (double t : grid(-5.0, 5.0, 0.5)) {
            auto g = [&](double u) { return lam.value(t * u); };
            const double coarse = PsiOracle::gaussian_even_expectation(g, t, 128);
            const double fine = PsiOracle::gaussian_even_expectation(g, t, 256);
            INFO(spec.name() << " t=" << t);
            CHECK(std::abs(coarse - fine) < 1e-9);
        }
    }
}

TEST_CASE("estimates report the accepted node count and residual") {
    const PsiOracle psi(DistributionSpec::rademacher(), 64);
    const QuadEstimate e = psi.psi_estimate(2.0);
    CHECK(e.nodes >= 128);
    CHECK(e.nodes <= PsiOracle::kMaxNodes * 2);
    CHECK(e.error <= PsiOracle::kAgreement * std::max(1.0, std::abs(e.value)));
}

TEST_CASE("Psi' matches finite differences of Psi; Psi is even and convex") {
    for (const auto& spec : all()) {
        const PsiOracle psi(spec);
        auto f = [&](double t) { return psi.psi(t); };
        const auto ts = grid(-5.0, 5.0, 0.5);
        for (double t : ts) {
            INFO(spec.name() << " t=" << t);
            CHECK(std::abs(psi.psi_deriv(t) - oracle::central_diff(f, t, 1e-5)) <= 1e-6);
            CHECK(std::abs(psi.psi(t) - psi.psi(-t)) <= 1e-12 * std::max(1.0, psi.psi(t)));
        }
        for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
            CHECK(f(ts[i + 1]) <= 0.5 * (f(ts[i]) + f(ts[i + 2])) + 1e-10);
        }
    }
}

TEST_CASE("Jensen ordering between Psi and Lambda") {
    struct Case {
        DistributionSpec spec;
        int sign;  // +1: Psi <= Lambda, -1: Psi >= Lambda, 0: equal
    };
    for (const Case& c : {Case{DistributionSpec::generalized_normal(1.0, 4.0), 1},
                          Case{DistributionSpec::rademacher(), 1},
                          Case{DistributionSpec::generalized_normal(1.0, 1.5), -1},
                          Case{DistributionSpec::gaussian_alpha(1.0), 0}}) {
        const PsiOracle psi(c.spec);
        for (double t : grid(-5.0, 5.0, 0.25)) {
            const double diff = psi.log_mgf().value(t) - psi.psi(t);
            INFO(c.spec.name() << " t=" << t << " Lambda-Psi=" << diff);
            if (c.sign == 0) {
                CHECK(std::abs(diff) <= 1e-12);
            } else if (std::abs(t) >= 0.5) {
                CHECK(c.sign * diff > 1e-8);
            } else {
                CHECK(c.sign * diff >= -1e-12);
            }
        }
    }
}

TEST_CASE("derivative range is sqrt(2/pi) times that of Lambda'") {
    const PsiOracle rad(DistributionSpec::rademacher());
    CHECK(rad.deriv_range().hi == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
    CHECK(rad.deriv_range().lo == doctest::Approx(-std::sqrt(2.0 / std::numbers::pi)));
    // Psi' approaches but never exceeds it.
    CHECK(rad.psi_deriv(40.0) < rad.deriv_range().hi);
    CHECK(rad.psi_deriv(40.0) > rad.deriv_range().hi - 0.05);
    const PsiOracle gn(DistributionSpec::generalized_normal(1.0, 4.0));
    CHECK(std::isinf(gn.deriv_range().hi));
}

TEST_CASE("large arguments stay accurate") {
    // E|Z| |t| - ln 2 + E log1p(exp(-2|t Z|)); the last term is O(1/|t|).
    const PsiOracle psi(DistributionSpec::rademacher());
    auto lc = [](double x) { return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::numbers::ln2; };
    for (double t : {20.0, 50.0}) {
        const double ref = 2.0 * oracle::simpson([&](double u) { return lc(t * u) * oracle::std_normal_pdf(u); },
                                                 0.0, 12.0, 2000000);
        CHECK(psi.psi(t) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("contracts") {
    CHECK_THROWS_AS(PsiOracle(DistributionSpec::rademacher(), 100), ContractViolation);
    CHECK_THROWS_AS(PsiOracle(DistributionSpec::rademacher(), 1024), ContractViolation);
    const PsiOracle psi(DistributionSpec::rademacher());
    CHECK_THROWS_AS((void)psi.psi(NAN), DomainError);
}
