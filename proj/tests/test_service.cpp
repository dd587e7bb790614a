#include "dyncenter/analysis.hpp"
#include "dyncenter/serialization.hpp"

#include "service_harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

using namespace dyncenter;
using Json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json post_json(httplib::Client& c, const std::string& path, const Json& body, int expected) {
    auto res = c.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expected);
    return Json::parse(res->body);
}

Json get_json(httplib::Client& c, const std::string& path, int expected) {
    auto res = c.Get(path);
    REQUIRE(res);
    CHECK(res->status == expected);
    return Json::parse(res->body);
}

std::string upload_oracle(httplib::Client& c) {
    auto res = c.Post("/tables", read_file(dctest::fixture("oracle2x2.csv")), "text/csv");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    return Json::parse(res->body)["id"].get<std::string>();
}

}  // namespace

TEST_CASE("HHI tool") {
    dctest::RunningService svc;
    auto c = svc.client();
    const auto plain = post_json(c, "/tools/hhi", {{"shares", {30, 30, 20, 20}}}, 200);
    CHECK(plain["hhi"] == 2600.0);
    const auto merged =
        post_json(c, "/tools/hhi", {{"shares", {30, 30, 20, 20}}, {"merging", {2, 3}}}, 200);
    CHECK(merged["pre_hhi"] == 2600.0);
    CHECK(merged["delta_hhi"] == 800.0);
    CHECK(merged["post_hhi"] == 3400.0);
    CHECK(merged["action"] == "PresumedEnhancesMarketPower");
    const auto bad = post_json(c, "/tools/hhi", {{"shares", {70, 50}}, {"merging", {0, 5}}}, 400);
    CHECK(bad["errors"].size() == 2);
}

TEST_CASE("TCC tool") {
    dctest::RunningService svc;
    auto c = svc.client();
    const auto body = Json::parse(read_file(dctest::fixture("derived_profile.json")));
    const auto out = post_json(c, "/tools/tcc", body, 200);
    CHECK(out["tcc"].get<double>() == doctest::Approx(3.1860900746).epsilon(1e-10));
    CHECK(out["tca"].get<double>() == doctest::Approx(35.4010008288).epsilon(1e-10));
    CHECK(out["elasticities"]["T"].get<double>() == doctest::Approx(0.1593045037).epsilon(1e-9));
    auto bad = body;
    bad["beta"] = {0.5, 0.5, 0.5, 0.5};
    const auto err = post_json(c, "/tools/tcc", bad, 400);
    CHECK(err["errors"][0]["field"] == "beta");
}

TEST_CASE("tables, linkages and structure over HTTP") {
    dctest::RunningService svc;
    auto c = svc.client();
    const auto id = upload_oracle(c);
    const auto table = get_json(c, "/tables/" + id, 200);
    CHECK(table["kind"] == "io_table");
    CHECK(table["payload"]["sector_labels"][1] == "Manufacturing");

    const auto link = get_json(c, "/analysis/io/" + id + "/linkages", 200);
    CHECK(link["u_backward"][0].get<double>() == doctest::Approx(1.0833333333).epsilon(1e-9));
    CHECK(link["u_backward"][1].get<double>() == doctest::Approx(0.9166666667).epsilon(1e-9));
    CHECK(link["table_id"] == id);

    const auto st = get_json(c, "/analysis/io/" + id + "/structure?variant=with-final-demand&alpha=0.25", 200);
    CHECK(st["entropy_variant"] == "with-final-demand");
    CHECK(st["alpha_rank_weight"] == 0.25);
    CHECK(st["h_row"][0].get<double>() == doctest::Approx(1.0296530141).epsilon(1e-9));

    const auto bad = get_json(c, "/analysis/io/" + id + "/structure?variant=sideways&alpha=x", 400);
    CHECK(bad["errors"].size() == 2);
    get_json(c, "/analysis/io/tbl-424242/linkages", 404);
    get_json(c, "/tables/tbl-424242", 404);

    const auto cands = post_json(c, "/analysis/io/" + id + "/import-substitution",
                                 {{"import_share", {0.2, 0.3}}}, 200);
    CHECK(cands["candidates"][0]["label"] == "Manufacturing");
}

TEST_CASE("malformed table uploads answer 400 with coordinates") {
    dctest::RunningService svc;
    auto c = svc.client();
    auto res = c.Post("/tables", "sector,A,B,final_demand,gross_output\nA,1,x,1,3\nB,1,1,1,3\n", "text/csv");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(Json::parse(res->body)["errors"][0]["field"] == "body:2:3");
    res = c.Post("/tables", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    const Json nonproductive = {{"sector_labels", {"A", "B"}},
                                {"flows", {{50, 50}, {50, 50}}},
                                {"final_demand", {0, 0}},
                                {"gross_output", {100, 100}}};
    post_json(c, "/tables", nonproductive, 422);
}

TEST_CASE("plans are stored, evaluated and re-evaluated with supersedes links") {
    dctest::RunningService svc;
    auto c = svc.client();
    const auto plan = Json::parse(read_file(dctest::fixture("plan_merger.json")));
    const auto stored = post_json(c, "/plans", plan, 201);
    const std::string plan_id = stored["id"];
    CHECK(plan_id == "plan-000001");
    CHECK(stored["payload"]["id"] == plan_id);
    CHECK(get_json(c, "/plans/" + plan_id, 200) == stored);

    const auto first = post_json(c, "/plans/" + plan_id + "/evaluate", Json::object(), 201);
    CHECK(first["payload"]["instruments"][0]["instrument"] == "Reject");
    CHECK(first["payload"]["audit"].size() >= 3);
    CHECK(first["supersedes"].is_null());
    const auto second = post_json(c, "/plans/" + plan_id + "/evaluate", Json::object(), 201);
    CHECK(second["supersedes"] == first["id"]);
    CHECK(second["payload"]["supersedes"] == first["id"]);
    CHECK(get_json(c, "/evaluations/" + second["id"].get<std::string>(), 200) == second);
    get_json(c, "/evaluations/eval-999999", 404);
    post_json(c, "/plans/plan-999999/evaluate", Json::object(), 404);

    // Caller-chosen ids are honoured once.
    const auto named = Json::parse(read_file(dctest::fixture("plan_new_method.json")));
    CHECK(post_json(c, "/plans", named, 201)["id"] == "plan-sample-method");
    post_json(c, "/plans", named, 400);
}

TEST_CASE("structurally invalid plans answer 400 with field errors") {
    dctest::RunningService svc;
    auto c = svc.client();
    const Json plan = {{"claimed_novelty", "NewMarket"}, {"market_case", "DomesticGrowthPrediction"}};
    const auto err = post_json(c, "/plans", plan, 400);
    CHECK(err["errors"][0]["field"] == "tariff_terms");
    post_json(c, "/plans", Json::array(), 400);
}

TEST_CASE("restart replays the store and reproduces every GET") {
    dctest::RunningService svc;
    std::vector<std::string> paths;
    std::vector<std::string> bodies;
    {
        auto c = svc.client();
        const auto table_id = upload_oracle(c);
        const auto plan = post_json(c, "/plans", Json::parse(read_file(dctest::fixture("plan_new_method.json"))), 201);
        const auto eval = post_json(c, "/plans/" + plan["id"].get<std::string>() + "/evaluate", Json::object(), 201);
        paths = {"/tables/" + table_id, "/analysis/io/" + table_id + "/linkages",
                 "/analysis/io/" + table_id + "/structure?source=b", "/plans/" + plan["id"].get<std::string>(),
                 "/evaluations/" + eval["id"].get<std::string>()};
        for (const auto& p : paths) bodies.push_back(c.Get(p)->body);
    }
    svc.restart();
    auto c = svc.client();
    for (std::size_t k = 0; k < paths.size(); ++k) {
        CAPTURE(paths[k]);
        auto res = c.Get(paths[k]);
        REQUIRE(res);
        CHECK(res->body == bodies[k]);
    }
}

TEST_CASE("concurrent evaluations of one plan form a single supersedes chain") {
    dctest::RunningService svc;
    std::string plan_id;
    {
        auto c = svc.client();
        plan_id = post_json(c, "/plans", Json::parse(read_file(dctest::fixture("plan_merger.json"))), 201)["id"];
    }
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            auto c = svc.client();
            for (int k = 0; k < 3; ++k) c.Post("/plans/" + plan_id + "/evaluate", "{}", "application/json");
        });
    }
    for (auto& th : threads) th.join();
    const auto evals = svc.service().records().list(store::RecordKind::Evaluation);
    REQUIRE(evals.size() == 12);
    CHECK_FALSE(evals[0].supersedes.has_value());
    for (std::size_t k = 1; k < evals.size(); ++k) CHECK(evals[k].supersedes == evals[k - 1].id);
}

TEST_CASE("unknown endpoints answer 404 JSON") {
    dctest::RunningService svc;
    auto c = svc.client();
    auto res = c.Get("/nowhere");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(Json::parse(res->body).contains("error"));
}
