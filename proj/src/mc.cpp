#include "projld/mc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "projld/errors.hpp"
#include "projld/legendre.hpp"
#include "projld/parallel.hpp"
#include "projld/rng.hpp"

namespace projld {

namespace {

constexpr std::uint64_t kTailTag = 0x7a11;
constexpr double kThresholdSlack = 1e-12;

struct ChunkTotals {
    double weight_sum = 0.0;
    double weight_sq_sum = 0.0;
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
};

}  // namespace

double choose_tilt(const DistributionSpec& dist, const DirectionArray& arr, double w) {
    if (!std::isfinite(w)) throw DomainError("choose_tilt: threshold must be finite");
    const LogMgf lmgf(dist);
    const std::vector<double> c = arr.weights();
    const double n = static_cast<double>(arr.n);

    // Reachable tilted means: (1/n) sum |c_i| times the range of Lambda'.
    double abs_sum = 0.0;
    for (double x : c) abs_sum += std::abs(x);
    const Interval r = lmgf.deriv_range();
    const double hi = abs_sum == 0.0 ? 0.0 : abs_sum / n * r.hi;
    const double lo = abs_sum == 0.0 ? 0.0 : abs_sum / n * r.lo;
    auto infeasible = [&] {
        std::ostringstream os;
        os.precision(17);
        os << "threshold " << w << " is outside the reachable mean range (" << lo << ", " << hi << ") for "
           << dist.name() << " along " << to_string(arr.mode);
        return InfeasibleThreshold(os.str(), w);
    };
    if (!(w > lo && w < hi) && w != 0.0) throw infeasible();

    auto mean = [&](double t) {
        double s = 0.0;
        for (double x : c) {
            if (x != 0.0) s += x * lmgf.deriv1(t * x);
        }
        return s / n;
    };
    const auto t = solve_slope(mean, w);
    if (!t) throw infeasible();
    return *t;
}

SimulationReport estimate_tail(const DistributionSpec& dist, const DirectionArray& arr, double w,
                               const SimulationOptions& options) {
    if (options.samples < kMinSamples) throw ContractViolation("estimate_tail needs at least 1000 samples");
    if (options.chunk_size == 0) throw ContractViolation("estimate_tail: chunk_size must be positive");

    const double tilt = options.forced_tilt ? *options.forced_tilt : choose_tilt(dist, arr, w);
    if (!std::isfinite(tilt)) throw DomainError("estimate_tail: tilt must be finite");

    const LogMgf lmgf(dist);
    const std::vector<double> c = arr.weights();
    const std::size_t n = arr.n;
    double log_normalizer = 0.0;
    for (double x : c) log_normalizer += lmgf.value(tilt * x);
    const double threshold = w - kThresholdSlack * std::max(1.0, std::abs(w));

    const std::size_t chunks = (options.samples + options.chunk_size - 1) / options.chunk_size;
    std::vector<ChunkTotals> totals(chunks);
    parallel_for(chunks, options.threads, [&](std::size_t k) {
        Stream rng(options.seed, {kTailTag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)});
        std::vector<TiltedSampler> samplers;
        samplers.reserve(n);
        for (double x : c) samplers.emplace_back(dist, tilt * x);

        const std::size_t begin = k * options.chunk_size;
        const std::size_t end = std::min(options.samples, begin + options.chunk_size);
        ChunkTotals& acc = totals[k];
        for (std::size_t s = begin; s < end; ++s) {
            double projection = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (c[i] != 0.0) projection += c[i] * samplers[i](rng);
            }
            if (projection / static_cast<double>(n) >= threshold) {
                const double weight = std::exp(log_normalizer - tilt * projection);
                acc.weight_sum += weight;
                acc.weight_sq_sum += weight * weight;
            }
        }
        for (const auto& smp : samplers) {
            acc.proposals += smp.proposals();
            acc.accepted += smp.accepted();
        }
    });

    ChunkTotals all;
    for (const auto& t : totals) {
        all.weight_sum += t.weight_sum;
        all.weight_sq_sum += t.weight_sq_sum;
        all.proposals += t.proposals;
        all.accepted += t.accepted;
    }

    const double count = static_cast<double>(options.samples);
    SimulationReport rep;
    rep.dist = dist;
    rep.mode = arr.mode;
    rep.normalized = arr.normalized;
    rep.w = w;
    rep.n = n;
    rep.samples = options.samples;
    rep.tilt = tilt;
    rep.seed = options.seed;
    rep.p_hat = all.weight_sum / count;
    const double variance =
        std::max(0.0, (all.weight_sq_sum - count * rep.p_hat * rep.p_hat) / (count - 1.0));
    rep.std_error = std::sqrt(variance / count);
    if (rep.p_hat > 0.0) {
        rep.rate_hat = -std::log(rep.p_hat) / static_cast<double>(n);
        rep.rate_std_error = rep.std_error / (rep.p_hat * static_cast<double>(n));
    } else {
        rep.rate_hat = std::numeric_limits<double>::infinity();
        rep.rate_std_error = std::numeric_limits<double>::infinity();
    }
    rep.effective_sample_size =
        all.weight_sq_sum > 0.0 ? all.weight_sum * all.weight_sum / all.weight_sq_sum : 0.0;
    rep.acceptance_rate =
        all.proposals == 0 ? 1.0 : static_cast<double>(all.accepted) / static_cast<double>(all.proposals);
    if (rep.effective_sample_size < kMinEffectiveSampleSize) {
        std::ostringstream os;
        os << "effective sample size " << rep.effective_sample_size << " is below "
           << kMinEffectiveSampleSize << "; p_hat is unreliable";
        rep.warning = os.str();
    }
    return rep;
}

std::vector<SimulationReport> rate_scan(const DistributionSpec& dist, DirectionMode mode, double w,
                                        const std::vector<std::size_t>& n_set, const SimulationOptions& options,
                                        bool normalized) {
    std::vector<SimulationReport> out;
    out.reserve(n_set.size());
    for (std::size_t n : n_set) {
        const DirectionArray arr = generate(mode, n, options.seed, normalized);
        out.push_back(estimate_tail(dist, arr, w, options));
    }
    return out;
}

}  // namespace projld
