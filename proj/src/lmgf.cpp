#include "projld/lmgf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "projld/errors.hpp"
#include "projld/parallel.hpp"

namespace projld {

double finite_lmgf(const LogMgf& lmgf, const DirectionArray& raw, double t) {
    if (raw.normalized) throw ContractViolation("finite_lmgf needs a raw (unnormalized) row");
    if (t == 0.0) return 0.0;
    double sum = 0.0;
    for (double z : raw.row) sum += lmgf.value(t * z);
    return sum / static_cast<double>(raw.n);
}

double finite_lmgf(const DistributionSpec& dist, const DirectionArray& raw, double t) {
    return finite_lmgf(LogMgf(dist), raw, t);
}

FiniteLogMgfCurve finite_lmgf_curve(const DistributionSpec& dist, const DirectionArray& raw,
                                    const std::vector<double>& t_grid) {
    const LogMgf lmgf(dist);
    FiniteLogMgfCurve curve{dist, raw, t_grid, {}};
    curve.values.reserve(t_grid.size());
    for (double t : t_grid) curve.values.push_back(finite_lmgf(lmgf, raw, t));
    return curve;
}

double e1_lmgf(const DistributionSpec& dist, std::size_t n, double t) {
    if (n < 1) throw ContractViolation("e1_lmgf: n must be >= 1");
    const double nd = static_cast<double>(n);
    return log_mgf(dist, t * std::sqrt(nd)) / nd;
}

std::vector<ProfileRow> convergence_profile(const PsiOracle& psi, DirectionMode mode,
                                            const std::vector<std::uint64_t>& seeds,
                                            const std::vector<double>& t_set,
                                            const std::vector<std::size_t>& n_set, unsigned threads) {
    if (!is_gaussian(mode)) throw ContractViolation("convergence_profile needs a Gaussian array mode");
    std::vector<double> psi_values;
    psi_values.reserve(t_set.size());
    for (double t : t_set) psi_values.push_back(psi.psi(t));

    const std::size_t per_seed = n_set.size() * t_set.size();
    std::vector<ProfileRow> rows(seeds.size() * per_seed);
    parallel_for(seeds.size(), threads, [&](std::size_t s) {
        std::size_t k = s * per_seed;
        for (std::size_t n : n_set) {
            const DirectionArray raw = generate(mode, n, seeds[s], false);
            for (std::size_t j = 0; j < t_set.size(); ++j) {
                const double gap = std::abs(finite_lmgf(psi.log_mgf(), raw, t_set[j]) - psi_values[j]);
                rows[k++] = {n, t_set[j], gap, seeds[s]};
            }
        }
    });
    return rows;
}

std::vector<MedianGap> median_gaps(const std::vector<ProfileRow>& rows) {
    std::vector<std::pair<std::size_t, double>> order;
    std::map<std::pair<std::size_t, double>, std::vector<double>> groups;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.n, r.t);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r.gap);
    }
    std::vector<MedianGap> out;
    out.reserve(order.size());
    for (const auto& key : order) {
        auto& g = groups[key];
        std::sort(g.begin(), g.end());
        const std::size_t m = g.size();
        const double median = m % 2 == 1 ? g[m / 2] : 0.5 * (g[m / 2 - 1] + g[m / 2]);
        out.push_back({key.first, key.second, median});
    }
    return out;
}

}  // namespace projld
