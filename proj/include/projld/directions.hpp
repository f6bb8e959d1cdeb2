#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace projld {

enum class DirectionMode {
    CramerIota,              // (1, ..., 1) / sqrt(n)
    BasisE1,                 // (1, 0, ..., 0)
    GaussianIndependent,     // fresh standard normal row for every n
    GaussianColumnConstant,  // column i fixed across n: row n is a prefix of row m >= n
};

[[nodiscard]] std::string to_string(DirectionMode mode);
[[nodiscard]] DirectionMode direction_mode_from_string(const std::string& name);
[[nodiscard]] bool is_gaussian(DirectionMode mode) noexcept;

// One row of a triangular direction array. When normalized, row lies on the
// unit sphere S^{n-1}; otherwise it is the raw row z^(n). Raw rows of the
// deterministic modes are scaled so that ||z|| = sqrt(n): ones for CramerIota
// and (sqrt(n), 0, ..., 0) for BasisE1.
struct DirectionArray {
    DirectionMode mode = DirectionMode::CramerIota;
    std::size_t n = 0;
    std::vector<double> row;
    std::uint64_t seed = 0;
    bool normalized = true;

    // Coefficients c with W = (1/n) sum_i c_i X_i: sqrt(n) * row when
    // normalized, row itself when raw.
    [[nodiscard]] std::vector<double> weights() const;
};

[[nodiscard]] DirectionArray generate(DirectionMode mode, std::size_t n, std::uint64_t seed, bool normalized);

// sqrt(n) / ||z||, the factor relating the raw row to its sphere projection.
[[nodiscard]] double norm_factor(const DirectionArray& arr);

}  // namespace projld
