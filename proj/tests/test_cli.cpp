#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "rfim/equilibrium.hpp"
#include "rfim/predictor.hpp"
#include "rfim/series.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = rfim::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rfim_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("gen then predict on a constant series") {
    const auto csv = scratch("const.csv");
    const auto trace = scratch("const_trace.csv");
    REQUIRE(run({"gen", "--kind", "constant", "--length", "10", "--level", "100", "--out", csv.string()}).code == 0);
    const std::string series_text = slurp(csv);
    CHECK(series_text.rfind("# rfim 0.1.0 gen ", 0) == 0);
    CHECK(rfim::parse_csv_text(series_text).size() == 10);

    const auto sidecar = nlohmann::json::parse(slurp(csv.string() + ".json"));
    CHECK(sidecar["config"]["kind"] == "constant");
    CHECK(sidecar["config"]["length"] == 10);

    const auto r = run({"predict", csv.string(), "--tau", "2", "--M", "2", "--out", trace.string()});
    REQUIRE(r.code == 0);
    const std::string text = slurp(trace);
    CHECK(text.rfind("# rfim 0.1.0 ", 0) == 0);
    const auto parsed = rfim::parse_trace_csv(text);
    REQUIRE(parsed.records.size() == 5);
    for (const auto& rec : parsed.records) CHECK(rec.eps == 0.0);
    const auto predict_sidecar = nlohmann::json::parse(slurp(trace.string() + ".json"));
    CHECK(predict_sidecar["config"]["learning"]["tau"] == 2);
    CHECK(predict_sidecar["config"]["learning"]["sigma_mode"] == "literal");
}

TEST_CASE("phase onset at mu = 0.31") {
    const auto r = run({"phase", "--mu", "0.31", "--h", "0", "--invJ", "0.6:0.9:0.001"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# rfim 0.1.0 phase ", 0) == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "invJ,m,a");
    double onset = NAN;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double x = std::stod(line.substr(0, c1));
        const double m = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        if (std::abs(m) <= 1e-9 && std::isnan(onset)) onset = x;
    }
    CHECK(std::abs(onset - 0.7317) <= 1.001e-3);
}

TEST_CASE("phase field sweep") {
    const auto r = run({"phase", "--mu", "1", "--J", "1.2", "--hgrid", "-0.01:0.01:0.005"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nh,m,a\n") != std::string::npos);
}

TEST_CASE("gradcheck") {
    const auto r = run({"gradcheck", "--seed", "7", "--trials", "100"});
    CHECK(r.code == 0);
    CHECK(r.out.find(" ok\n") != std::string::npos);
}

TEST_CASE("mc writes the observables row") {
    const auto r = run({"mc", "--J", "0.5", "--N", "50", "--sweeps", "20", "--burn-in", "5", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nJ,h,mu,sigma,N,m_mean,m_stderr,a_mean,a_stderr\n0.5,0,0,1,50,") != std::string::npos);
}

TEST_CASE("same spec and seed give byte-identical files") {
    const auto a = scratch("crash_a.csv");
    const auto b = scratch("crash_b.csv");
    for (const auto& p : {a, b}) {
        REQUIRE(run({"gen", "--kind", "crash", "--length", "1500", "--seed", "11", "--out", p.string()}).code == 0);
    }
    CHECK(slurp(a) == slurp(b));

    const auto ta = scratch("trace_a.csv");
    const auto tb = scratch("trace_b.csv");
    for (const auto& t : {ta, tb}) {
        REQUIRE(run({"predict", a.string(), "--tau", "20", "--M", "20", "--eta", "0.5", "--model", "both", "--out",
                     t.string()})
                    .code == 0);
    }
    CHECK(slurp(ta) == slurp(tb));
    CHECK(slurp(scratch("trace_a.ising.csv")) == slurp(scratch("trace_b.ising.csv")));
    const auto base = rfim::parse_trace_csv(slurp(scratch("trace_a.ising.csv")));
    REQUIRE(!base.records.empty());
    CHECK(base.records.front().a == 1.0);

    const auto other = scratch("crash_c.csv");
    REQUIRE(run({"gen", "--kind", "crash", "--length", "1500", "--seed", "12", "--out", other.string()}).code == 0);
    CHECK(slurp(other) != slurp(a));
}

TEST_CASE("config file and flag overrides") {
    const auto cfg = scratch("learn.json");
    std::ofstream(cfg) << R"({"eta": 0.2, "tau": 3, "M": 4, "sigma_mode": "per_term"})";
    const auto csv = scratch("lin.csv");
    REQUIRE(run({"gen", "--kind", "linear", "--length", "60", "--slope", "0.1", "--out", csv.string()}).code == 0);
    const auto r = run({"predict", csv.string(), "--config", cfg.string(), "--tau", "5", "--mode", "recursive"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"eta\":0.2") != std::string::npos);
    CHECK(r.out.find("\"tau\":5,\"M\":4") != std::string::npos);
    CHECK(r.out.find("\"sigma_mode\":\"per_term\"") != std::string::npos);
    CHECK(r.out.find("mode=recursive") != std::string::npos);

    const auto jl = run({"predict", csv.string(), "--tau", "5", "--M", "5", "--format", "jsonl"});
    REQUIRE(jl.code == 0);
    CHECK(nlohmann::json::parse(jl.out.substr(0, jl.out.find('\n')))["rfim"] == "0.1.0");
}

TEST_CASE("exit codes") {
    SUBCASE("missing input file is a domain error") {
        const auto r = run({"predict", "/nonexistent/series.csv"});
        CHECK(r.code == 1);
        CHECK(r.err.find("cannot open") != std::string::npos);
    }
    SUBCASE("series too short for the windows") {
        const auto csv = scratch("short.csv");
        REQUIRE(run({"gen", "--kind", "constant", "--length", "10", "--out", csv.string()}).code == 0);
        CHECK(run({"predict", csv.string()}).code == 1);
    }
    SUBCASE("invalid learning value") { CHECK(run({"predict", "x.csv", "--eta", "-1"}).code != 0); }
    SUBCASE("bad flags give usage text") {
        const auto r = run({"phase", "--mu", "0", "--bogus", "1"});
        CHECK(r.code == 2);
        CHECK(r.err.find("Usage") != std::string::npos);
    }
    SUBCASE("no subcommand") { CHECK(run({}).code == 2); }
    SUBCASE("two subcommands") { CHECK(run({"gradcheck", "gen"}).code == 2); }
    SUBCASE("conflicting sweep axes") {
        CHECK(run({"phase", "--mu", "0", "--invJ", "0.5:1:0.1", "--J", "1", "--hgrid", "0:1:0.5"}).code == 2);
    }
    SUBCASE("bad choice") {
        CHECK(run({"predict", "x.csv", "--mode", "future"}).code == 2);
        CHECK(run({"gen", "--kind", "spike", "--length", "10"}).code == 2);
    }
    SUBCASE("unwritable output") {
        CHECK(run({"gen", "--kind", "constant", "--length", "5", "--out", "/nonexistent/dir/x.csv"}).code == 1);
    }
    SUBCASE("help") {
        const auto r = run({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("gradcheck") != std::string::npos);
    }
}
