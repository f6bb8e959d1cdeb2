#include "projld/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "projld/atyp.hpp"
#include "projld/directions.hpp"
#include "projld/errors.hpp"
#include "projld/io.hpp"
#include "projld/legendre.hpp"
#include "projld/lmgf.hpp"
#include "projld/mc.hpp"
#include "projld/quad.hpp"

#ifndef PROJLD_VERSION
#define PROJLD_VERSION "0.0.0"
#endif

namespace projld::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

const char* version() noexcept { return PROJLD_VERSION; }

std::string config_hash(const json& effective_config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : effective_config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Strict config access
// ---------------------------------------------------------------------------

void allow_only(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known |= key == k;
        if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
    return d;
}

std::uint64_t unsigned_integer(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) throw ConfigError(where + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
            throw ConfigError(where + "." + key + " must contain finite numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::size_t> size_list(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + " must be a non-empty array");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
        const std::uint64_t n = unsigned_integer(x, where + "." + key + " entries");
        if (n == 0) throw ConfigError(where + "." + key + " entries must be >= 1");
        out.push_back(static_cast<std::size_t>(n));
    }
    return out;
}

std::vector<std::uint64_t> seed_list(const json& v, const std::string& where) {
    std::vector<std::uint64_t> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(unsigned_integer(x, where + " entries"));
    } else {
        allow_only(v, {"first", "count"}, where);
        const std::uint64_t first = unsigned_integer(field(v, "first", where), where + ".first");
        const std::uint64_t count = unsigned_integer(field(v, "count", where), where + ".count");
        for (std::uint64_t i = 0; i < count; ++i) out.push_back(first + i);
    }
    if (out.empty()) throw ConfigError(where + " must name at least one seed");
    return out;
}

DirectionMode mode_from(const json& obj, const std::string& where) {
    const json& v = field(obj, "mode", where);
    if (!v.is_string()) throw ConfigError(where + ".mode must be a string");
    try {
        return direction_mode_from_string(v.get<std::string>());
    } catch (const Error& e) {
        throw ConfigError(where + ".mode: " + e.what());
    }
}

std::string json_quoted(const std::string& s) { return json(s).dump(); }

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

enum class Format { Csv, Json };

struct Context {
    std::string command;
    json config;  // effective config, hashed
    std::string hash;
    DistributionSpec dist = DistributionSpec::rademacher();
    Format format = Format::Csv;
    fs::path out_dir = ".";
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
    bool seed_from_flag = false;
    std::ostream* out = nullptr;
};

json meta(const Context& ctx) {
    return {{"artifact", "projld"},
            {"version", version()},
            {"command", ctx.command},
            {"config_hash", ctx.hash}};
}

std::string csv_preamble(const Context& ctx) {
    return "# projld " + std::string(version()) + " command=" + ctx.command + " config_hash=" + ctx.hash + "\n";
}

class OutputFile {
public:
    OutputFile(const Context& ctx, const std::string& name) : path_(ctx.out_dir / name) {
        stream_.open(path_, std::ios::binary | std::ios::trunc);
        if (!stream_) throw ConfigError("cannot open output file " + path_.string());
        *ctx.out << "wrote " << path_.string() << '\n';
    }
    OutputFile& operator<<(const std::string& s) {
        stream_ << s;
        stream_.flush();
        return *this;
    }

private:
    fs::path path_;
    std::ofstream stream_;
};

void write_json(const Context& ctx, const std::string& name, json body) {
    json doc = {{"meta", meta(ctx)}};
    for (auto& [k, v] : body.items()) doc[k] = v;
    OutputFile f(ctx, name);
    f << doc.dump(2) << "\n";
}

void write_csv(const Context& ctx, const std::string& name, const std::string& body) {
    OutputFile f(ctx, name);
    f << csv_preamble(ctx) << body;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_rate(const Context& ctx) {
    const std::string where = "rate";
    const json& sec = field(ctx.config, "rate", "config");
    allow_only(sec, {"grid", "which"}, where);
    const std::vector<double> grid = grid_from_json(field(sec, "grid", where));
    const std::string which = sec.value("which", std::string("both"));
    if (which != "both" && which != "cramer" && which != "universal") {
        throw ConfigError("rate.which must be one of both, cramer, universal");
    }
    std::vector<RateLabel> labels;
    if (which != "universal") labels.push_back(RateLabel::CramerRate);
    if (which != "cramer") labels.push_back(RateLabel::UniversalRate);

    for (RateLabel label : labels) {
        const RateFunctionTable table = rate_table(ctx.dist, label, grid, ctx.threads);
        const std::string stem = label == RateLabel::CramerRate ? "rate_cramer" : "rate_universal";
        if (ctx.format == Format::Csv) {
            write_csv(ctx, stem + ".csv", io::to_csv(table));
        } else {
            write_json(ctx, stem + ".json", {{"table", io::to_json(table)}});
        }
    }
    return kOk;
}

int cmd_check(const Context& ctx) {
    const HypothesisReport rep = check_hypotheses(ctx.dist);
    write_json(ctx, "hypotheses.json", {{"report", io::to_json(rep)}, {"consistent", rep.consistent()}});
    *ctx.out << ctx.dist.name() << ": Lambda(sqrt(s)) " << to_string(rep.sqrt_curvature.classification)
             << ", phi " << to_string(rep.phi.trend) << '\n';
    if (!rep.consistent()) {
        throw VerdictViolation("curvature and moment-ratio classifications disagree for " + ctx.dist.name(),
                               std::nan(""));
    }
    return kOk;
}

int cmd_compare(const Context& ctx) {
    const std::string where = "compare";
    const json& sec = field(ctx.config, "compare", "config");
    allow_only(sec, {"grid"}, where);
    const std::vector<double> grid = grid_from_json(field(sec, "grid", where));

    const HypothesisReport rep = check_hypotheses(ctx.dist);
    write_json(ctx, "hypotheses.json", {{"report", io::to_json(rep)}, {"consistent", rep.consistent()}});
    if (!rep.h2.pass || !rep.h3.pass) {
        throw VerdictViolation(ctx.dist.name() + " fails the integrability or symmetry check; no verdict",
                               std::nan(""));
    }
    if (rep.sqrt_curvature.classification == Curvature::Indeterminate) {
        throw VerdictViolation("curvature of Lambda(sqrt(s)) is indeterminate; no verdict", std::nan(""));
    }
    const ComparisonTable table = compare_rates(ctx.dist, rep.sqrt_curvature.classification, grid, ctx.threads);
    if (ctx.format == Format::Csv) {
        write_csv(ctx, "comparison.csv", io::to_csv(table));
    } else {
        write_json(ctx, "comparison.json", {{"table", io::to_json(table)}});
    }
    *ctx.out << ctx.dist.name() << ": " << to_string(table.classification) << ", "
             << to_string(table.verdict) << '\n';
    return kOk;
}

double reference_rate(const DistributionSpec& dist, DirectionMode mode, double w, std::string& label) {
    switch (mode) {
        case DirectionMode::CramerIota:
            label = "cramer";
            return conjugate(cramer_function(LogMgf(dist)), w).value;
        case DirectionMode::BasisE1:
            label = "chi0";
            return chi0(w);
        case DirectionMode::GaussianIndependent:
        case DirectionMode::GaussianColumnConstant: {
            label = "universal";
            const PsiOracle psi(dist);
            return conjugate(universal_function(psi), w).value;
        }
    }
    return std::nan("");
}

int cmd_simulate(const Context& ctx) {
    const std::string where = "simulate";
    const json& sec = field(ctx.config, "simulate", "config");
    allow_only(sec, {"mode", "w", "n_set", "samples", "normalized", "chunk_size", "tilt"}, where);
    const DirectionMode mode = mode_from(sec, where);
    const double w = number(sec, "w", where);
    const std::vector<std::size_t> n_set = size_list(sec, "n_set", where);
    SimulationOptions opt;
    opt.samples = static_cast<std::size_t>(unsigned_integer(field(sec, "samples", where), "simulate.samples"));
    if (opt.samples < kMinSamples) throw ConfigError("simulate.samples must be >= 1000");
    if (sec.contains("chunk_size")) {
        opt.chunk_size = static_cast<std::size_t>(unsigned_integer(sec.at("chunk_size"), "simulate.chunk_size"));
        if (opt.chunk_size == 0) throw ConfigError("simulate.chunk_size must be >= 1");
    }
    if (sec.contains("tilt")) opt.forced_tilt = number(sec, "tilt", where);
    bool normalized = true;
    if (sec.contains("normalized")) {
        if (!sec.at("normalized").is_boolean()) throw ConfigError("simulate.normalized must be a boolean");
        normalized = sec.at("normalized").get<bool>();
    }
    if (!ctx.seed) throw ConfigError("simulate needs an explicit seed");
    opt.seed = *ctx.seed;
    opt.threads = ctx.threads;

    // Rows are written as they complete so a later infeasible n leaves the
    // earlier results on disk.
    const bool csv = ctx.format == Format::Csv;
    OutputFile reports(ctx, csv ? "simulation.csv" : "simulation.jsonl");
    if (csv) {
        reports << csv_preamble(ctx) << std::string(io::kReportCsvHeader) + "\n";
    } else {
        reports << json({{"meta", meta(ctx)}}).dump() + "\n";
    }

    std::string label;
    const double reference = reference_rate(ctx.dist, mode, w, label);
    json rows = json::array();
    auto write_summary = [&] {
        write_json(ctx, "simulation_summary.json",
                   {{"reference", {{"label", label}, {"w", w}, {"value", io::format_number(reference)}}},
                    {"rows", rows}});
    };

    for (std::size_t n : n_set) {
        SimulationReport rep;
        try {
            const DirectionArray arr = generate(mode, n, opt.seed, normalized);
            rep = estimate_tail(ctx.dist, arr, w, opt);
        } catch (...) {
            write_summary();
            throw;
        }
        reports << (csv ? io::to_csv_row(rep) : io::to_json(rep).dump()) + "\n";
        rows.push_back({{"n", n},
                        {"rate_hat", io::format_number(rep.rate_hat)},
                        {"rate_stderr", io::format_number(rep.rate_std_error)},
                        {"gap", io::format_number(rep.rate_hat - reference)}});
        if (rep.warning) *ctx.out << "warning (n=" << n << "): " << *rep.warning << '\n';
    }
    write_summary();
    return kOk;
}

int cmd_lmgf(const Context& ctx) {
    const std::string where = "lmgf";
    const json& sec = field(ctx.config, "lmgf", "config");
    allow_only(sec, {"mode", "seeds", "t_set", "n_set", "e1_n_set", "e1_t_set"}, where);
    const DirectionMode mode = mode_from(sec, where);
    if (!is_gaussian(mode)) throw ConfigError("lmgf.mode must be a Gaussian array mode");
    const std::vector<double> t_set = number_list(sec, "t_set", where);
    const std::vector<std::size_t> n_set = size_list(sec, "n_set", where);
    std::vector<std::uint64_t> seeds;
    if (sec.contains("seeds")) {
        seeds = seed_list(sec.at("seeds"), "lmgf.seeds");
        if (ctx.seed_from_flag) {
            // An explicit --seed shifts the whole seed chain.
            for (auto& s : seeds) s += *ctx.seed;
        }
    } else if (ctx.seed) {
        seeds = {*ctx.seed};
    } else {
        throw ConfigError("lmgf needs lmgf.seeds or a top-level seed");
    }

    const PsiOracle psi(ctx.dist);
    const std::vector<ProfileRow> rows = convergence_profile(psi, mode, seeds, t_set, n_set, ctx.threads);
    const std::vector<MedianGap> medians = median_gaps(rows);

    const std::vector<std::size_t> e1_n =
        sec.contains("e1_n_set") ? size_list(sec, "e1_n_set", where) : n_set;
    const std::vector<double> e1_t = sec.contains("e1_t_set") ? number_list(sec, "e1_t_set", where) : t_set;
    std::ostringstream e1_csv;
    json e1_json = json::array();
    e1_csv << "n,t,value\n";
    for (std::size_t n : e1_n) {
        for (double t : e1_t) {
            const double v = e1_lmgf(ctx.dist, n, t);
            e1_csv << n << ',' << io::format_number(t) << ',' << io::format_number(v) << '\n';
            e1_json.push_back({{"n", n}, {"t", t}, {"value", v}});
        }
    }

    if (ctx.format == Format::Csv) {
        write_csv(ctx, "profile.csv", io::to_csv(rows));
        write_csv(ctx, "e1.csv", e1_csv.str());
    } else {
        json prof = json::array();
        for (const auto& r : rows) prof.push_back({{"n", r.n}, {"t", r.t}, {"gap", r.gap}, {"seed", r.seed}});
        write_json(ctx, "profile.json", {{"rows", prof}});
        write_json(ctx, "e1.json", {{"rows", e1_json}, {"limit_rate", "chi0"}});
    }
    write_json(ctx, "profile_medians.json", {{"medians", io::to_json(medians)}});
    return kOk;
}

// ---------------------------------------------------------------------------
// Error reporting
// ---------------------------------------------------------------------------

int report(std::ostream& err, int code, const std::string& kind, const std::string& message,
           json extra = json::object()) {
    json e = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    for (auto& [k, v] : extra.items()) e[k] = v;
    err << json({{"error", e}}).dump() << '\n';
    return code;
}

json maybe_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        return report(err, kConfigError, "config", e.what());
    } catch (const VerdictViolation& e) {
        return report(err, kVerdictViolation, "verdict", e.what(), {{"witness", maybe_number(e.witness())}});
    } catch (const InfeasibleThreshold& e) {
        return report(err, kNumericError, "infeasible_threshold", e.what(), {{"threshold", e.threshold()}});
    } catch (const EnvelopeError& e) {
        return report(err, kNumericError, "envelope", e.what(),
                      {{"tilt", e.tilt()}, {"acceptance_rate", e.acceptance()}});
    } catch (const AccuracyError& e) {
        return report(err, kNumericError, "accuracy", e.what(),
                      {{"coarse", maybe_number(e.coarse())}, {"fine", maybe_number(e.fine())}, {"nodes", e.nodes()}});
    } catch (const Error& e) {
        return report(err, kNumericError, "numeric", e.what());
    } catch (const json::exception& e) {
        return report(err, kConfigError, "config", e.what());
    } catch (const std::exception& e) {
        return report(err, kNumericError, "internal", e.what());
    }
}

}  // namespace

std::vector<double> grid_from_json(const json& j) {
    const std::string where = "grid";
    if (j.is_object() && j.contains("points")) {
        allow_only(j, {"points"}, where);
        std::vector<double> pts = number_list(j, "points", where);
        if (!std::is_sorted(pts.begin(), pts.end())) throw ConfigError("grid.points must be sorted");
        return pts;
    }
    allow_only(j, {"min", "max", "step"}, where);
    const double lo = number(j, "min", where);
    const double hi = number(j, "max", where);
    const double step = number(j, "step", where);
    if (!(step > 0.0)) throw ConfigError("grid.step must be > 0");
    if (hi < lo) throw ConfigError("grid.max must be >= grid.min");
    const double span = (hi - lo) / step;
    if (span > 1e6) throw ConfigError("grid has more than 1e6 points");
    const double rounded = std::round(span);
    std::vector<double> pts;
    if (std::abs(span - rounded) <= 1e-9 * std::max(1.0, span)) {
        const auto count = static_cast<long long>(rounded);
        for (long long k = 0; k <= count; ++k) {
            pts.push_back(count == 0 ? lo : ((count - k) * lo + k * hi) / static_cast<double>(count));
        }
    } else {
        for (long long k = 0; lo + k * step <= hi; ++k) pts.push_back(lo + k * step);
    }
    return pts;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cramer and universal rate functions for projected i.i.d. sums", "projld"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(version()));

    std::string config_path;
    std::string out_dir;
    std::string format;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"rate", "Tabulate the Cramer and/or universal rate function on a grid"},
        {"compare", "Check hypotheses and compare both rate functions"},
        {"simulate", "Importance-sampling tail estimates across n"},
        {"lmgf", "Finite-n log-mgf convergence profile and basis-direction curve"},
        {"check", "Run the hypothesis checks only"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "Output directory (created if missing)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "Overrides the configured seed");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << version() << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report(err, kConfigError, "usage", e.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();

    return guarded(err, [&]() -> int {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file " + config_path);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        allow_only(cfg, {"dist", "seed", "format", "output", "rate", "compare", "simulate", "lmgf"}, "config");

        Context ctx;
        ctx.command = command;
        ctx.out = &out;
        ctx.threads = threads;
        ctx.dist = io::spec_from_json(field(cfg, "dist", "config"));

        if (cfg.contains("seed")) ctx.seed = unsigned_integer(cfg.at("seed"), "seed");
        if (seed) {
            ctx.seed = seed;
            ctx.seed_from_flag = true;
        }

        std::string fmt = cfg.value("format", std::string("csv"));
        if (!format.empty()) fmt = format;
        if (fmt != "csv" && fmt != "json") throw ConfigError("format must be csv or json");
        ctx.format = fmt == "csv" ? Format::Csv : Format::Json;

        std::string dir = cfg.value("output", std::string("."));
        if (!out_dir.empty()) dir = out_dir;
        ctx.out_dir = dir;
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + json_quoted(dir) + ": " + ec.message());

        // The hash covers everything that determines file contents: not the
        // output location and not the worker count.
        json effective = cfg;
        effective.erase("output");
        effective["format"] = fmt;
        if (ctx.seed) effective["seed"] = *ctx.seed;
        if (ctx.seed_from_flag) effective["seed_from_flag"] = true;
        effective["command"] = command;
        ctx.hash = config_hash(effective);
        ctx.config = std::move(effective);

        if (command == "rate") return cmd_rate(ctx);
        if (command == "compare") return cmd_compare(ctx);
        if (command == "simulate") return cmd_simulate(ctx);
        if (command == "lmgf") return cmd_lmgf(ctx);
        return cmd_check(ctx);
    });
}

}  // namespace projld::cli
