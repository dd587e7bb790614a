#include "dyncenter/analysis.hpp"
#include "dyncenter/cli.hpp"
#include "dyncenter/serialization.hpp"

#include "support.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace dyncenter;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return dctest::fixture(name).string(); }

}  // namespace

TEST_CASE("io analyze prints linkage and structure CSVs from the shared pipeline") {
    const auto r = run({"io", "analyze", fx("oracle2x2.csv")});
    REQUIRE(r.code == 0);
    const auto analysis = run_table_analysis(io::load_io_table(fx("oracle2x2.csv")));
    CHECK(r.out == linkage::format_linkage_csv(analysis.linkage) + "\n" +
                       structure::format_structure_csv(analysis.structure));
    CHECK(r.out.find("Agriculture,1.083333,") != std::string::npos);
    CHECK(r.out.find("Manufacturing,0.916667,") != std::string::npos);
}

TEST_CASE("io analyze writes files with --out-dir") {
    const auto dir = std::filesystem::temp_directory_path() / fmt::format("dyncenter-cli-{}", ::getpid());
    std::filesystem::remove_all(dir);
    const auto r = run({"io", "analyze", fx("oracle2x2.csv"), "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(dir / "linkages.csv"));
    CHECK(std::filesystem::exists(dir / "structure.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("entropy subcommand") {
    const auto r = run({"entropy", fx("oracle2x2.csv"), "--with-final-demand"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Agriculture,1.029653,0.636514") != std::string::npos);
    const auto bits = run({"entropy", fx("oracle2x2.csv"), "--units", "bits"});
    CHECK(bits.out.find("entropy_units=bits") != std::string::npos);
    CHECK(run({"entropy", fx("oracle2x2.csv"), "--units", "furlongs"}).code == 2);
}

TEST_CASE("hhi subcommand") {
    const auto r = run({"hhi", "--shares", "30,30,20,20", "--merge", "2,3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("pre_hhi: 2600\n") != std::string::npos);
    CHECK(r.out.find("delta_hhi: 800\n") != std::string::npos);
    CHECK(r.out.find("post_hhi: 3400\n") != std::string::npos);
    CHECK(r.out.find("action: PresumedEnhancesMarketPower\n") != std::string::npos);
    CHECK(r.out == cli::format_verdict_text(merger::screen({{30, 30, 20, 20}, {2, 3}, false})));
    CHECK(run({"hhi", "--shares", "30,30,20,20"}).out == "hhi: 2600\ncoverage: 100\n");
    const auto j = run({"hhi", "--shares", "30,30,20,20", "--merge", "2,3", "--json"});
    CHECK(nlohmann::json::parse(j.out)["post_hhi"] == 3400.0);
}

TEST_CASE("tcc subcommand") {
    const auto r = run({"tcc", "--profile", fx("derived_profile.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("tcc: 3.18609007", 0) == 0);
    CHECK(r.out.find("tca: 35.4010008") != std::string::npos);
}

TEST_CASE("plan evaluate subcommand is deterministic") {
    const auto a = run({"plan", "evaluate", fx("plan_new_method.json"), "--timestamp", "2026-01-01T00:00:00Z"});
    const auto b = run({"plan", "evaluate", fx("plan_new_method.json"), "--timestamp", "2026-01-01T00:00:00Z"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto e = nlohmann::json::parse(a.out);
    CHECK(e["group"] == 2);
    CHECK(e["instruments"][0]["instrument"] == "CreditCreationWithProductiveMeansCollateral");
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"hhi", "--shares", "1,2", "--frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"teleport"}).code == cli::kExitUsage);
    CHECK(run({"hhi", "--shares", "60,60"}).code == cli::kExitValidation);
    CHECK(run({"hhi", "--shares", "30,30", "--merge", "0,7"}).code == cli::kExitValidation);
    CHECK(run({"io", "analyze", "/nonexistent.csv"}).code == cli::kExitFailure);
    CHECK(run({"--help"}).code == cli::kExitOk);
    const auto usage = run({"hhi", "--bogus"});
    CHECK(usage.err.find("Usage") != std::string::npos);
}

TEST_CASE("non-productive table exits with a validation code") {
    const auto path = std::filesystem::temp_directory_path() / fmt::format("dc-np-{}.csv", ::getpid());
    {
        std::ofstream out(path);
        out << "sector,A,B,final_demand,gross_output\nA,50,50,0,100\nB,50,50,0,100\n";
    }
    const auto r = run({"io", "analyze", path.string()});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("non-productive") != std::string::npos);
    std::filesystem::remove(path);
}
