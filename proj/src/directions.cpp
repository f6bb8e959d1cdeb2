#include "projld/directions.hpp"

#include <cmath>
#include <random>

#include "projld/errors.hpp"
#include "projld/rng.hpp"

namespace projld {

namespace {

// Stream tags keep the two Gaussian layouts from sharing draws.
constexpr std::uint64_t kIndependentTag = 0x1d;
constexpr std::uint64_t kColumnTag = 0xc0;
constexpr int kMaxNormRetries = 3;

double euclidean_norm(const std::vector<double>& v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
}

std::vector<double> gaussian_row(DirectionMode mode, std::size_t n, std::uint64_t seed, int attempt) {
    // Independent rows are keyed by (seed, n); column-constant rows only by
    // seed, so the first n draws of the stream coincide for every n.
    Stream rng = mode == DirectionMode::GaussianIndependent
                     ? Stream(seed, {kIndependentTag, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(attempt)})
                     : Stream(seed, {kColumnTag, static_cast<std::uint64_t>(attempt)});
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> row(n);
    for (auto& x : row) x = normal(rng);
    return row;
}

}  // namespace

std::string to_string(DirectionMode mode) {
    switch (mode) {
        case DirectionMode::CramerIota: return "CramerIota";
        case DirectionMode::BasisE1: return "BasisE1";
        case DirectionMode::GaussianIndependent: return "GaussianIndependent";
        case DirectionMode::GaussianColumnConstant: return "GaussianColumnConstant";
    }
    return "?";
}

DirectionMode direction_mode_from_string(const std::string& name) {
    for (auto m : {DirectionMode::CramerIota, DirectionMode::BasisE1, DirectionMode::GaussianIndependent,
                   DirectionMode::GaussianColumnConstant}) {
        if (to_string(m) == name) return m;
    }
    throw ContractViolation("unknown direction mode '" + name + "'");
}

bool is_gaussian(DirectionMode mode) noexcept {
    return mode == DirectionMode::GaussianIndependent || mode == DirectionMode::GaussianColumnConstant;
}

std::vector<double> DirectionArray::weights() const {
    if (!normalized) return row;
    std::vector<double> c(n);
    switch (mode) {
        case DirectionMode::CramerIota: std::fill(c.begin(), c.end(), 1.0); break;
        case DirectionMode::BasisE1:
            std::fill(c.begin(), c.end(), 0.0);
            c[0] = std::sqrt(static_cast<double>(n));
            break;
        default: {
            const double root_n = std::sqrt(static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i) c[i] = root_n * row[i];
        }
    }
    return c;
}

DirectionArray generate(DirectionMode mode, std::size_t n, std::uint64_t seed, bool normalized) {
    if (n < 1) throw ContractViolation("generate: n must be >= 1");
    DirectionArray arr{mode, n, {}, seed, normalized};
    const double root_n = std::sqrt(static_cast<double>(n));
    switch (mode) {
        case DirectionMode::CramerIota:
            arr.row.assign(n, normalized ? 1.0 / root_n : 1.0);
            return arr;
        case DirectionMode::BasisE1:
            arr.row.assign(n, 0.0);
            arr.row[0] = normalized ? 1.0 : root_n;
            return arr;
        case DirectionMode::GaussianIndependent:
        case DirectionMode::GaussianColumnConstant: break;
    }
    for (int attempt = 0; attempt <= kMaxNormRetries; ++attempt) {
        auto row = gaussian_row(mode, n, seed, attempt);
        const double norm = euclidean_norm(row);
        if (norm == 0.0) continue;
        if (normalized) {
            for (auto& x : row) x /= norm;
        }
        arr.row = std::move(row);
        return arr;
    }
    throw OracleError("generate: Gaussian row had zero norm after retries");
}

double norm_factor(const DirectionArray& arr) {
    if (arr.normalized) throw ContractViolation("norm_factor needs a raw (unnormalized) row");
    return std::sqrt(static_cast<double>(arr.n)) / euclidean_norm(arr.row);
}

}  // namespace projld
