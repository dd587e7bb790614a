#include "dyncenter/error.hpp"
#include "dyncenter/merger_screen.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace dyncenter;
using merger::Action;
using merger::MarketClass;

TEST_CASE("HHI anchors") {
    CHECK(merger::hhi(std::vector<double>{30, 30, 20, 20}) == 2600.0);
    CHECK(merger::hhi(std::vector<double>{100}) == 10000.0);
    CHECK(merger::delta_hhi(5, 10) == 100.0);
    CHECK(merger::delta_hhi(20, 20) == 800.0);
}

TEST_CASE("four-firm merger is presumed to enhance market power") {
    const auto v = merger::screen({{30, 30, 20, 20}, {2, 3}, false});
    CHECK(v.pre_hhi == 2600.0);
    CHECK(v.delta_hhi == 800.0);
    CHECK(v.post_hhi == 3400.0);
    CHECK(v.market_class == MarketClass::HighlyConcentrated);
    CHECK(v.action == Action::PresumedEnhancesMarketPower);
    CHECK(v.coverage == 100.0);
}

TEST_CASE("small firms merging in a fragmented market sit on the 100-point boundary") {
    std::vector<double> shares{5, 10};
    shares.insert(shares.end(), 85, 1.0);
    const auto v = merger::screen({shares, {0, 1}, false});
    CHECK(v.pre_hhi == 210.0);
    CHECK(v.delta_hhi == 100.0);
    CHECK(v.post_hhi == 310.0);
    CHECK(v.market_class == MarketClass::Unconcentrated);
    CHECK(v.action == Action::NoFurtherAnalysis);
}

TEST_CASE("post-merger HHI equals the HHI of the merged share list") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 2 + static_cast<std::size_t>(trial % 10);
        auto shares = dctest::random_shares(rng, n);
        for (auto& s : shares) s *= dctest::uniform(rng, 50.0, 100.0);
        const std::size_t a = trial % n;
        const std::size_t b = (a + 1 + static_cast<std::size_t>(trial / 10) % (n - 1)) % n;
        merger::MergerScenario sc{shares, {a, b}, false};
        const auto v = merger::screen(sc);
        CHECK(v.post_hhi == doctest::Approx(merger::hhi(merger::merged_shares(sc))).epsilon(1e-12));
        CHECK(v.delta_hhi >= 0.0);
    }
}

TEST_CASE("market class bands") {
    CHECK(merger::classify_market(1499.999) == MarketClass::Unconcentrated);
    CHECK(merger::classify_market(1500) == MarketClass::ModeratelyConcentrated);
    CHECK(merger::classify_market(2500) == MarketClass::ModeratelyConcentrated);
    CHECK(merger::classify_market(2500.001) == MarketClass::HighlyConcentrated);
}

TEST_CASE("guideline action table with boundary decisions") {
    struct Row {
        MarketClass cls;
        double delta;
        Action expected;
    };
    const std::vector<Row> rows = {
        {MarketClass::Unconcentrated, 0, Action::NoFurtherAnalysis},
        {MarketClass::Unconcentrated, 99.9, Action::NoFurtherAnalysis},
        {MarketClass::Unconcentrated, 100, Action::NoFurtherAnalysis},
        {MarketClass::Unconcentrated, 1000, Action::NoFurtherAnalysis},
        {MarketClass::ModeratelyConcentrated, 99.9, Action::NoFurtherAnalysis},
        {MarketClass::ModeratelyConcentrated, 100, Action::PotentialConcernScrutiny},
        {MarketClass::ModeratelyConcentrated, 200, Action::PotentialConcernScrutiny},
        {MarketClass::ModeratelyConcentrated, 900, Action::PotentialConcernScrutiny},
        {MarketClass::HighlyConcentrated, 99.9, Action::NoFurtherAnalysis},
        {MarketClass::HighlyConcentrated, 100, Action::PotentialConcernScrutiny},
        {MarketClass::HighlyConcentrated, 150, Action::PotentialConcernScrutiny},
        {MarketClass::HighlyConcentrated, 200, Action::PotentialConcernScrutiny},
        {MarketClass::HighlyConcentrated, 200.001, Action::PresumedEnhancesMarketPower},
        {MarketClass::HighlyConcentrated, 800, Action::PresumedEnhancesMarketPower},
    };
    for (const auto& r : rows) {
        CAPTURE(merger::to_string(r.cls));
        CAPTURE(r.delta);
        CHECK(merger::guideline_action(r.cls, r.delta) == r.expected);
    }
}

TEST_CASE("invalid scenarios are rejected with field errors") {
    CHECK_THROWS_AS(merger::screen({{60, 50}, {0, 1}, false}), ValidationError);
    CHECK_THROWS_AS(merger::screen({{30, 30}, {0, 0}, false}), ValidationError);
    CHECK_THROWS_AS(merger::screen({{30, 30}, {0, 2}, false}), ValidationError);
    CHECK_THROWS_AS(merger::screen({{-1, 30}, {0, 1}, false}), ValidationError);
    CHECK_THROWS_AS(merger::hhi(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(merger::delta_hhi(-1, 5), ValidationError);
}

TEST_CASE("shares covering less than the whole market are accepted") {
    const auto v = merger::screen({{30, 20}, {0, 1}, true});
    CHECK(v.coverage == 50.0);
    CHECK(v.projected_shares);
    CHECK(v.post_hhi == 2500.0);
    CHECK(v.market_class == MarketClass::ModeratelyConcentrated);
}
