#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "projld/cli.hpp"
#include "projld/errors.hpp"
#include "projld/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

// A scratch directory per test case, removed on exit.
class Scratch {
public:
    explicit Scratch(const std::string& name) : root_(fs::temp_directory_path() / ("projld_cli_" + name)) {
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
    [[nodiscard]] fs::path path(const std::string& rel) const { return root_ / rel; }

    [[nodiscard]] std::string config(const std::string& name, const json& body) const {
        const fs::path p = path(name);
        std::ofstream(p) << body.dump();
        return p.string();
    }

private:
    fs::path root_;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = projld::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json error_of(const RunResult& r) {
    const json j = json::parse(r.err);
    REQUIRE(j.contains("error"));
    return j.at("error");
}

json rademacher() { return {{"family", "Rademacher"}, {"params", json::object()}}; }

json gaussian(double alpha) { return {{"family", "GaussianAlpha"}, {"params", {{"alpha", alpha}}}}; }

json simulate_config() {
    return {{"dist", rademacher()},
            {"seed", 11},
            {"simulate",
             {{"mode", "GaussianIndependent"}, {"w", 0.3}, {"n_set", {20, 40}}, {"samples", 6000}, {"chunk_size", 512}}}};
}

}  // namespace

TEST_CASE("rate: Gaussian tables in both formats") {
    Scratch s("rate");
    const json cfg = {{"dist", gaussian(1.0)}, {"rate", {{"grid", {{"min", -2}, {"max", 2}, {"step", 0.5}}}}}};
    const std::string path = s.config("c.json", cfg);

    const RunResult csv = run({"rate", "--config", path, "--out", s.path("csv").string()});
    REQUIRE(csv.code == 0);
    CHECK(csv.err.empty());
    for (const char* name : {"rate_cramer.csv", "rate_universal.csv"}) {
        std::istringstream in(slurp(s.path("csv") / name));
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("# projld " + std::string(projld::cli::version()) + " command=rate config_hash=", 0) == 0);
        std::getline(in, line);  // header
        int rows = 0;
        while (std::getline(in, line)) {
            const double w = std::stod(line.substr(0, line.find(',')));
            const double v = std::stod(line.substr(line.find(',') + 1));
            CHECK(std::abs(v - w * w) <= 1e-8);
            ++rows;
        }
        CHECK(rows == 9);
    }

    const RunResult js = run({"rate", "--config", path, "--out", s.path("json").string(), "--format", "json"});
    REQUIRE(js.code == 0);
    const json doc = json::parse(slurp(s.path("json") / "rate_universal.json"));
    CHECK(doc["meta"]["command"] == "rate");
    CHECK(doc["meta"]["version"] == projld::cli::version());
    CHECK(doc["meta"]["artifact"] == "projld");
    CHECK(doc["meta"]["config_hash"].get<std::string>().size() == 16);
    CHECK(doc.contains("table"));

    const json cramer_only = {{"dist", rademacher()}, {"rate", {{"grid", {{"points", {0.5, 1.0, 1.5}}}}, {"which", "cramer"}}}};
    const RunResult c = run({"rate", "--config", s.config("r.json", cramer_only), "--out", s.path("r").string()});
    REQUIRE(c.code == 0);
    CHECK(fs::exists(s.path("r") / "rate_cramer.csv"));
    CHECK_FALSE(fs::exists(s.path("r") / "rate_universal.csv"));
    const std::string body = slurp(s.path("r") / "rate_cramer.csv");
    CHECK(body.find("inf") != std::string::npos);  // w = 1.5 is outside the support
}

TEST_CASE("compare and check") {
    Scratch s("compare");
    const json cfg = {{"dist", rademacher()}, {"compare", {{"grid", {{"min", -0.75}, {"max", 0.75}, {"step", 0.25}}}}}};
    const std::string path = s.config("c.json", cfg);
    const RunResult r = run({"compare", "--config", path, "--out", s.path("o").string(), "--threads", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Concave, UniversalAtLeastCramer") != std::string::npos);
    CHECK(fs::exists(s.path("o") / "comparison.csv"));
    const json hyp = json::parse(slurp(s.path("o") / "hypotheses.json"));
    CHECK(hyp["consistent"] == true);

    const RunResult chk = run({"check", "--config", path, "--out", s.path("k").string()});
    REQUIRE(chk.code == 0);
    CHECK(chk.out.find("Concave") != std::string::npos);
    CHECK(json::parse(slurp(s.path("k") / "hypotheses.json"))["meta"]["command"] == "check");
}

TEST_CASE("compare refuses a law that fails integrability (exit 4)") {
    Scratch s("verdict");
    const json cfg = {{"dist", {{"family", "GeneralizedNormal"}, {"params", {{"alpha", 1.0}, {"beta", 1.05}}}}},
                      {"compare", {{"grid", {{"points", {-0.5, 0.0, 0.5}}}}}}};
    const RunResult r = run({"compare", "--config", s.config("c.json", cfg), "--out", s.path("o").string()});
    CHECK(r.code == projld::cli::kVerdictViolation);
    const json e = error_of(r);
    CHECK(e["kind"] == "verdict");
    CHECK(e["exit_code"] == 4);
    // The hypothesis report is still written for inspection.
    CHECK(json::parse(slurp(s.path("o") / "hypotheses.json"))["report"]["h2"]["pass"] == false);
}

TEST_CASE("simulate writes rows and a summary with the reference rate") {
    Scratch s("simulate");
    const json cfg = {{"dist", rademacher()},
                      {"seed", 5},
                      {"simulate", {{"mode", "CramerIota"}, {"w", 0.3}, {"n_set", {40, 80}}, {"samples", 20000}}}};
    const RunResult r = run({"simulate", "--config", s.config("c.json", cfg), "--out", s.path("o").string()});
    REQUIRE(r.code == 0);
    std::istringstream in(slurp(s.path("o") / "simulation.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# projld", 0) == 0);
    std::getline(in, line);
    CHECK(line == projld::io::kReportCsvHeader);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);
    const json sum = json::parse(slurp(s.path("o") / "simulation_summary.json"));
    CHECK(sum["reference"]["label"] == "cramer");
    CHECK(std::stod(sum["reference"]["value"].get<std::string>()) ==
          doctest::Approx(0.65 * std::log(1.3) + 0.35 * std::log(0.7)).epsilon(1e-10));
    CHECK(sum["rows"].size() == 2);

    const RunResult js = run({"simulate", "--config", s.path("c.json").string(), "--out", s.path("j").string(),
                              "--format", "json"});
    REQUIRE(js.code == 0);
    std::istringstream jl(slurp(s.path("j") / "simulation.jsonl"));
    std::getline(jl, line);
    CHECK(json::parse(line)["meta"]["command"] == "simulate");
    std::getline(jl, line);
    CHECK(json::parse(line)["n"] == 40);
}

TEST_CASE("simulate keeps finished rows when a later n is infeasible (exit 3)") {
    Scratch s("partial");
    // Along e1 the reachable mean range is 1/sqrt(n): 0.2 is feasible at n = 10, not at n = 100.
    const json cfg = {{"dist", rademacher()},
                      {"seed", 3},
                      {"simulate", {{"mode", "BasisE1"}, {"w", 0.2}, {"n_set", {10, 100}}, {"samples", 2000}}}};
    const RunResult r = run({"simulate", "--config", s.config("c.json", cfg), "--out", s.path("o").string()});
    CHECK(r.code == projld::cli::kNumericError);
    const json e = error_of(r);
    CHECK(e["kind"] == "infeasible_threshold");
    CHECK(e["threshold"] == 0.2);
    std::istringstream in(slurp(s.path("o") / "simulation.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);  // preamble, header, the n = 10 row
    const json sum = json::parse(slurp(s.path("o") / "simulation_summary.json"));
    CHECK(sum["reference"]["label"] == "chi0");
    CHECK(sum["rows"].size() == 1);
}

TEST_CASE("simulate output is byte-identical across runs and worker counts") {
    Scratch s("determinism");
    const std::string path = s.config("c.json", simulate_config());
    std::string first;
    for (const char* threads : {"1", "8", "3", "1"}) {
        const std::string dir = s.path(std::string("t") + threads + std::to_string(first.size())).string();
        REQUIRE(run({"simulate", "--config", path, "--out", dir, "--threads", threads}).code == 0);
        const std::string body = slurp(fs::path(dir) / "simulation.csv") + slurp(fs::path(dir) / "simulation_summary.json");
        if (first.empty()) {
            first = body;
        } else {
            CHECK(body == first);
        }
    }
    // A different seed changes the estimates and the hash.
    const RunResult other = run({"simulate", "--config", path, "--out", s.path("seed").string(), "--seed", "12"});
    REQUIRE(other.code == 0);
    CHECK(slurp(s.path("seed") / "simulation.csv") != first.substr(0, first.find("{")));
}

TEST_CASE("lmgf profile and basis-direction curve") {
    Scratch s("lmgf");
    const json cfg = {{"dist", rademacher()},
                      {"lmgf",
                       {{"mode", "GaussianColumnConstant"},
                        {"seeds", {{"first", 0}, {"count", 5}}},
                        {"t_set", {1.0, 2.0}},
                        {"n_set", {100, 1000}},
                        {"e1_n_set", {100, 10000}}}}};
    const std::string path = s.config("c.json", cfg);
    const RunResult r = run({"lmgf", "--config", path, "--out", s.path("o").string()});
    REQUIRE(r.code == 0);
    std::istringstream prof(slurp(s.path("o") / "profile.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(prof, line)) ++lines;
    CHECK(lines == 2 + 5 * 2 * 2);
    const json med = json::parse(slurp(s.path("o") / "profile_medians.json"));
    CHECK(med["medians"].size() == 4);
    std::istringstream e1(slurp(s.path("o") / "e1.csv"));
    lines = 0;
    while (std::getline(e1, line)) ++lines;
    CHECK(lines == 2 + 2 * 2);

    // --seed shifts the seed chain; the config seed alone does not.
    REQUIRE(run({"lmgf", "--config", path, "--out", s.path("a").string(), "--seed", "0"}).code == 0);
    REQUIRE(run({"lmgf", "--config", path, "--out", s.path("b").string(), "--seed", "100"}).code == 0);
    const auto body = [&](const char* dir) {
        const std::string all = slurp(s.path(dir) / "profile.csv");
        return all.substr(all.find('\n') + 1);
    };
    CHECK(body("a") == body("o"));
    CHECK(body("b") != body("o"));

    const json iota = {{"dist", rademacher()},
                       {"lmgf", {{"mode", "CramerIota"}, {"seeds", {1}}, {"t_set", {1.0}}, {"n_set", {10}}}}};
    CHECK(run({"lmgf", "--config", s.config("i.json", iota), "--out", s.path("i").string()}).code == 2);
}

TEST_CASE("config errors exit with 2 and a JSON message") {
    Scratch s("errors");
    const std::string out = s.path("o").string();
    auto expect_config_error = [&](const json& cfg, const std::string& cmd, const std::string& fragment) {
        const RunResult r = run({cmd, "--config", s.config("c.json", cfg), "--out", out});
        INFO(cfg.dump());
        CHECK(r.code == projld::cli::kConfigError);
        const json e = error_of(r);
        CHECK(e["exit_code"] == 2);
        CHECK(e["message"].get<std::string>().find(fragment) != std::string::npos);
    };
    expect_config_error({{"dist", rademacher()}, {"bogus", 1}}, "rate", "unknown field 'bogus'");
    expect_config_error({{"dist", rademacher()}}, "rate", "missing field 'rate'");
    expect_config_error({{"dist", rademacher()}, {"rate", {{"grid", {{"points", {0.1}}}}, {"extra", true}}}}, "rate",
                        "unknown field 'extra'");
    expect_config_error({{"dist", rademacher()}, {"rate", {{"grid", {{"min", 0}, {"max", 1}, {"step", 0}}}}}}, "rate",
                        "step");
    expect_config_error({{"dist", {{"family", "Cauchy"}, {"params", json::object()}}}, {"rate", {{"grid", {{"points", {0}}}}}}},
                        "rate", "");
    expect_config_error({{"dist", gaussian(-1.0)}, {"rate", {{"grid", {{"points", {0}}}}}}}, "rate", "");
    json no_seed = simulate_config();
    no_seed.erase("seed");
    expect_config_error(no_seed, "simulate", "seed");
    json few = simulate_config();
    few["simulate"]["samples"] = 10;
    expect_config_error(few, "simulate", "samples");
    json neg = simulate_config();
    neg["seed"] = -4;
    expect_config_error(neg, "simulate", "seed");

    const RunResult missing = run({"rate", "--config", s.path("absent.json").string()});
    CHECK(missing.code == 2);
    std::ofstream(s.path("broken.json")) << "{ not json";
    CHECK(run({"rate", "--config", s.path("broken.json").string()}).code == 2);

    const RunResult usage = run({"rate"});
    CHECK(usage.code == 2);
    CHECK(error_of(usage)["kind"] == "usage");
    CHECK(run({"nonsense", "--config", "x"}).code == 2);
    CHECK(run({"rate", "--config", s.path("c.json").string(), "--format", "xml"}).code == 2);
    CHECK(run({"rate", "--config", s.path("c.json").string(), "--threads", "0"}).code == 2);

    const RunResult version = run({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out == std::string(projld::cli::version()) + "\n");
}

TEST_CASE("config hash ignores output location and worker count") {
    using projld::cli::config_hash;
    const json a = {{"dist", rademacher()}, {"seed", 1}};
    json b = a;
    b["seed"] = 2;
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);

    Scratch s("hash");
    const std::string path = s.config("c.json", simulate_config());
    REQUIRE(run({"simulate", "--config", path, "--out", s.path("x").string(), "--threads", "2"}).code == 0);
    REQUIRE(run({"simulate", "--config", path, "--out", s.path("y").string()}).code == 0);
    const auto hash = [&](const char* dir) {
        return json::parse(slurp(s.path(dir) / "simulation_summary.json"))["meta"]["config_hash"];
    };
    CHECK(hash("x") == hash("y"));
}

TEST_CASE("grid parsing") {
    using projld::cli::grid_from_json;
    const auto g = grid_from_json({{"min", -2.0}, {"max", 2.0}, {"step", 0.05}});
    REQUIRE(g.size() == 81);
    CHECK(g.front() == -2.0);
    CHECK(g.back() == 2.0);
    CHECK(g[40] == 0.0);
    CHECK(g[50] == 0.5);
    CHECK(grid_from_json({{"min", 1.0}, {"max", 1.0}, {"step", 0.1}}) == std::vector<double>{1.0});
    CHECK(grid_from_json({{"points", {0.1, 0.2}}}) == std::vector<double>{0.1, 0.2});
    CHECK_THROWS_AS((void)grid_from_json({{"points", {0.2, 0.1}}}), projld::ConfigError);
    CHECK_THROWS_AS((void)grid_from_json({{"min", 1.0}, {"max", 0.0}, {"step", 0.1}}), projld::ConfigError);
    CHECK_THROWS_AS((void)grid_from_json({{"min", 0.0}, {"max", 1.0}}), projld::ConfigError);
    CHECK_THROWS_AS((void)grid_from_json({{"min", 0.0}, {"max", 1.0}, {"step", 0.5}, {"n", 3}}), projld::ConfigError);
}

TEST_CASE("number formatting and distribution round trips") {
    using projld::io::format_number;
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
    for (double v : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0}) CHECK(std::stod(format_number(v)) == v);
    for (const auto& spec :
         {projld::DistributionSpec::rademacher(), projld::DistributionSpec::gaussian_alpha(0.7),
          projld::DistributionSpec::uniform_symmetric(2.5), projld::DistributionSpec::generalized_normal(2.0, 3.0)}) {
        const auto back = projld::io::spec_from_json(projld::io::to_json(spec));
        CHECK(back.name() == spec.name());
    }
}
