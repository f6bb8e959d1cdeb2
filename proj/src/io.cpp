#include "projld/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "projld/errors.hpp"

namespace projld::io {

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known |= key == a;
        if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

double required_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!obj.at(key).is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return obj.at(key).get<double>();
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const DistributionSpec& spec) {
    json params = json::object();
    switch (spec.family()) {
        case Family::GeneralizedNormal:
            params["alpha"] = spec.scale();
            params["beta"] = spec.shape();
            break;
        case Family::UniformSymmetric: params["a"] = spec.scale(); break;
        case Family::GaussianAlpha: params["alpha"] = spec.scale(); break;
        case Family::Rademacher: break;
    }
    return {{"family", to_string(spec.family())}, {"params", params}};
}

DistributionSpec spec_from_json(const json& j) {
    const std::string where = "dist";
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    require_keys(j, {"family", "params"}, where);
    if (!j.contains("family") || !j.at("family").is_string()) {
        throw ConfigError(where + ": 'family' must be a string");
    }
    const json params = j.value("params", json::object());
    if (!params.is_object()) throw ConfigError(where + ": 'params' must be an object");
    const std::string fam = j.at("family").get<std::string>();
    try {
        switch (family_from_string(fam)) {
            case Family::GeneralizedNormal:
                require_keys(params, {"alpha", "beta"}, where + ".params");
                return DistributionSpec::generalized_normal(required_number(params, "alpha", where),
                                                            required_number(params, "beta", where));
            case Family::UniformSymmetric:
                require_keys(params, {"a"}, where + ".params");
                return DistributionSpec::uniform_symmetric(required_number(params, "a", where));
            case Family::GaussianAlpha:
                require_keys(params, {"alpha"}, where + ".params");
                return DistributionSpec::gaussian_alpha(required_number(params, "alpha", where));
            case Family::Rademacher:
                require_keys(params, {}, where + ".params");
                return DistributionSpec::rademacher();
        }
    } catch (const ContractViolation& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unsupported family");
}

std::string to_csv(const RateFunctionTable& table) {
    std::ostringstream os;
    os << "w,value,tilt,attained\n";
    for (const auto& r : table.results) {
        os << format_number(r.w) << ',' << format_number(r.value) << ','
           << (r.tilt ? format_number(*r.tilt) : std::string()) << ',' << (r.attained ? "true" : "false") << '\n';
    }
    return os.str();
}

json to_json(const RateFunctionTable& table) {
    json rows = json::array();
    for (const auto& r : table.results) {
        rows.push_back({{"w", r.w},
                        {"value", number_or_null(r.value)},
                        {"infinite", !std::isfinite(r.value)},
                        {"tilt", r.tilt ? json(*r.tilt) : json(nullptr)},
                        {"attained", r.attained}});
    }
    return {{"label", to_string(table.label)}, {"dist", to_json(table.dist)}, {"rows", rows}};
}

std::string to_csv_row(const SimulationReport& rep) {
    std::ostringstream os;
    // The dist name contains commas; quote it.
    os << '"' << rep.dist.name() << '"' << ',' << to_string(rep.mode) << ',' << rep.n << ','
       << format_number(rep.w) << ',' << format_number(rep.tilt) << ',' << format_number(rep.p_hat) << ','
       << format_number(rep.std_error) << ',' << format_number(rep.rate_hat) << ',' << rep.samples << ','
       << rep.seed;
    return os.str();
}

json to_json(const SimulationReport& rep) {
    json j = {{"dist", to_json(rep.dist)},
              {"mode", to_string(rep.mode)},
              {"normalized", rep.normalized},
              {"n", rep.n},
              {"w", rep.w},
              {"tilt", rep.tilt},
              {"p_hat", rep.p_hat},
              {"stderr", rep.std_error},
              {"rate_hat", number_or_null(rep.rate_hat)},
              {"rate_stderr", number_or_null(rep.rate_std_error)},
              {"samples", rep.samples},
              {"seed", rep.seed},
              {"effective_sample_size", rep.effective_sample_size},
              {"acceptance_rate", rep.acceptance_rate}};
    j["warning"] = rep.warning ? json(*rep.warning) : json(nullptr);
    return j;
}

std::string to_csv(const std::vector<ProfileRow>& rows) {
    std::ostringstream os;
    os << "n,t,gap,seed\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_number(r.t) << ',' << format_number(r.gap) << ',' << r.seed << '\n';
    }
    return os.str();
}

json to_json(const std::vector<MedianGap>& medians) {
    json rows = json::array();
    for (const auto& m : medians) rows.push_back({{"n", m.n}, {"t", m.t}, {"median_gap", m.median}});
    return rows;
}

std::string to_csv(const ComparisonTable& table) {
    std::ostringstream os;
    os << "w,cramer,universal,gap\n";
    for (const auto& r : table.rows) {
        os << format_number(r.w) << ',' << format_number(r.cramer) << ',' << format_number(r.universal) << ','
           << format_number(r.gap) << '\n';
    }
    return os.str();
}

json to_json(const ComparisonTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"w", r.w},
                        {"cramer", number_or_null(r.cramer)},
                        {"universal", number_or_null(r.universal)},
                        {"gap", number_or_null(r.gap)},
                        {"cramer_infinite", std::isinf(r.cramer)},
                        {"universal_infinite", std::isinf(r.universal)}});
    }
    return {{"dist", to_json(table.dist)},
            {"classification", to_string(table.classification)},
            {"verdict", to_string(table.verdict)},
            {"strict_margin", number_or_null(table.strict_margin)},
            {"e1_rate", {{"name", "chi0"}, {"at_zero", 0.0}, {"elsewhere", "inf"}}},
            {"rows", rows}};
}

json to_json(const HypothesisReport& rep) {
    json h2 = {{"pass", rep.h2.pass}, {"max_residual", rep.h2.max_residual}};
    if (rep.h2.failure) h2["failure"] = *rep.h2.failure;
    json j = {
        {"dist", to_json(rep.dist)},
        {"h2", h2},
        {"h2prime", {{"pass", rep.h2prime.pass}, {"r", rep.h2prime.r}, {"C", rep.h2prime.c}}},
        {"h3", {{"pass", rep.h3.pass}, {"max_asymmetry", rep.h3.max_asymmetry}}},
        {"sqrt_curvature",
         {{"class", to_string(rep.sqrt_curvature.classification)},
          {"min_second_difference", rep.sqrt_curvature.min_second_difference},
          {"max_second_difference", rep.sqrt_curvature.max_second_difference},
          {"witness_min_s", rep.sqrt_curvature.witness_min_s},
          {"witness_max_s", rep.sqrt_curvature.witness_max_s}}},
        {"phi", {{"trend", to_string(rep.phi.trend)}, {"values", rep.phi.values}}},
        {"consistent", rep.consistent()}};
    j["log_density_curvature"] =
        rep.log_density_curvature ? json(to_string(*rep.log_density_curvature)) : json(nullptr);
    return j;
}

std::string to_csv(const DirectionArray& arr) {
    std::ostringstream os;
    for (double x : arr.row) os << format_number(x) << '\n';
    return os.str();
}

json sidecar_json(const DirectionArray& arr) {
    return {{"mode", to_string(arr.mode)}, {"n", arr.n}, {"seed", arr.seed}, {"normalized", arr.normalized}};
}

}  // namespace projld::io
