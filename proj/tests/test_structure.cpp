#include "dyncenter/analysis.hpp"
#include "dyncenter/error.hpp"
#include "dyncenter/structure.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace dyncenter;
using dctest::close;

namespace {

const char* kOracle =
    "sector,Agriculture,Manufacturing,final_demand,gross_output\n"
    "Agriculture,20,30,50,100\n"
    "Manufacturing,40,10,50,100\n";

double population_cv(const std::vector<double>& c) {
    const double m = static_cast<double>(c.size());
    double mean = 0.0;
    for (double x : c) mean += x / m;
    double var = 0.0;
    for (double x : c) var += (x - mean) * (x - mean) / m;
    return std::sqrt(var) / mean;
}

}  // namespace

TEST_CASE("G and H anchors") {
    const std::vector<double> one_hot{0.0, 1.0, 0.0, 0.0};
    const std::vector<double> uniform(5, 0.2);
    CHECK(structure::concentration_g(one_hot) == doctest::Approx(0.0));
    CHECK(close(structure::concentration_g(uniform), 2.0, 1e-12));
    CHECK(close(structure::concentration_g(std::vector<double>{0.5, 0.3, 0.2}), 1.3638181697, 1e-9));
    CHECK(structure::entropy(one_hot) == 0.0);
    CHECK(close(structure::entropy(uniform), std::log(5.0), 1e-12));
    CHECK(close(structure::entropy(std::vector<double>{0.4, 0.6}), 0.6730116670, 1e-9));
}

TEST_CASE("G squared plus population CV squared is m - 1") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto line = dctest::random_shares(rng, 2 + static_cast<std::size_t>(trial % 12));
        const double g = structure::concentration_g(line);
        const double v = population_cv(line);
        CHECK(close(g * g + v * v, static_cast<double>(line.size()) - 1.0, 1e-9));
    }
}

TEST_CASE("entropy bounds on random lines") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = 2 + static_cast<std::size_t>(trial % 15);
        const double h = structure::entropy(dctest::random_shares(rng, m));
        CHECK(h >= 0.0);
        CHECK(h <= std::log(static_cast<double>(m)) + 1e-12);
    }
}

TEST_CASE("structure report on the 2x2 oracle") {
    const auto t = io::parse_io_table(kOracle);
    const auto r = run_table_analysis(t).structure;
    CHECK(close(*r.g_row[0], 0.9797958971, 1e-9));
    CHECK(close(*r.g_row[1], 0.8, 1e-12));
    CHECK(close(*r.g_col[0], 0.9428090416, 1e-9));
    CHECK(close(*r.g_col[1], 0.8660254038, 1e-9));
    CHECK(close(*r.h_row[0], 0.6730116670, 1e-9));
    CHECK(close(*r.h_row[1], 0.5004024235, 1e-9));
    CHECK(close(*r.h_col[0], 0.6365141683, 1e-9));
    CHECK(close(*r.h_col[1], 0.5623351446, 1e-9));
    // Backward GI pairs U_backward [1.083, 0.917] with G_col [0.943, 0.866].
    CHECK(r.backward.gi == std::vector<double>{1.0, 2.0});
    // Forward pairs U_forward [1, 1] (tied) with G_row [0.98, 0.8].
    CHECK(r.forward.ranks_u == std::vector<double>{1.5, 1.5});
    CHECK(r.forward.gi == std::vector<double>{1.25, 1.75});
}

TEST_CASE("final-demand entropy uses rows of length n + 1") {
    const auto t = io::parse_io_table(kOracle);
    structure::StructureOptions opts;
    opts.variant = structure::EntropyVariant::WithFinalDemand;
    const auto r = run_table_analysis(t, opts).structure;
    CHECK(r.h_row_line_length == 3);
    CHECK(close(*r.h_row[0], 1.0296530141, 1e-9));
    CHECK(close(*r.h_row[1], 0.9433483923, 1e-9));
    // Column entropy and G are unaffected by the variant.
    CHECK(close(*r.h_col[0], 0.6365141683, 1e-9));
    CHECK(close(*r.g_row[0], 0.9797958971, 1e-9));
}

TEST_CASE("final-demand entropy stays within ln(n + 1)") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + trial % 9);
        const auto shares = structure::normalize_with_final_demand(dctest::random_table(rng, n));
        for (const auto& h : structure::entropy(shares)) {
            REQUIRE(h.has_value());
            CHECK(*h <= std::log(static_cast<double>(n + 1)) + 1e-12);
            CHECK(*h >= 0.0);
        }
        for (Eigen::Index i = 0; i < n; ++i) CHECK(close(shares.lines.row(i).sum(), 1.0, 1e-9));
    }
}

TEST_CASE("shares from the Leontief inverse") {
    const auto t = io::parse_io_table(kOracle);
    structure::StructureOptions opts;
    opts.source = structure::ShareSource::LeontiefInverse;
    const auto r = run_table_analysis(t, opts).structure;
    CHECK(close(*r.g_col[0], 0.9230769231, 1e-9));
    CHECK(close(*r.g_col[1], 0.8907235428, 1e-9));
    opts.variant = structure::EntropyVariant::WithFinalDemand;
    CHECK_THROWS_AS(run_table_analysis(t, opts), ValidationError);
}

TEST_CASE("all-zero lines are excluded and rank last") {
    io::Matrix a(3, 3);
    a << 0.1, 0.0, 0.2, 0.3, 0.0, 0.1, 0.0, 0.0, 0.0;
    const auto rows = structure::normalize(a, structure::Orientation::Rows);
    CHECK(rows.excluded == std::vector<bool>{false, false, true});
    const auto cols = structure::normalize(a, structure::Orientation::Columns);
    CHECK(cols.excluded == std::vector<bool>{false, true, false});
    const auto g = structure::concentration_g(cols);
    CHECK_FALSE(g[1].has_value());
    const auto ranks = structure::descending_ranks(g);
    CHECK(ranks[1] == 3.0);
    CHECK_THROWS_AS(structure::normalize(a, structure::Orientation::Rows, false), ValidationError);
}

TEST_CASE("descending ranks share the average on ties") {
    io::Vector v(5);
    v << 3.0, 5.0, 3.0, 1.0, 5.0;
    CHECK(structure::descending_ranks(v) == std::vector<double>{3.5, 1.5, 3.5, 5.0, 1.5});
    std::vector<std::optional<double>> with_missing{2.0, std::nullopt, 2.0, std::nullopt};
    CHECK(structure::descending_ranks(with_missing) == std::vector<double>{1.5, 3.5, 1.5, 3.5});
}

TEST_CASE("general index properties") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + trial % 10);
        io::Vector u(n), g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i) = dctest::uniform(rng, 0.5, 1.5);
            g(i) = dctest::uniform(rng, 0.0, 3.0);
        }
        const double alpha = dctest::uniform(rng, 0.0, 1.0);
        const auto gi = structure::general_index(u, g, alpha);

        const auto same = structure::general_index(u, u, alpha);
        CHECK(same.gi == same.ranks_u);
        CHECK(structure::general_index(u, g, 0.0).gi == gi.ranks_u);
        CHECK(structure::general_index(u, g, 1.0).gi == gi.ranks_g);

        // Ranks are invariant under strictly increasing transforms.
        const io::Vector u2 = (u.array() * 3.0 + 7.0).exp();
        const io::Vector g2 = g.array().cube() + 0.5;
        CHECK(structure::general_index(u2, g2, alpha).gi == gi.gi);
    }
}

TEST_CASE("rank weight outside [0, 1] is rejected") {
    io::Vector u = io::Vector::Ones(2);
    CHECK_THROWS_AS(structure::general_index(u, u, 1.5), ValidationError);
    CHECK_THROWS_AS(structure::general_index(u, u, -0.1), ValidationError);
}

TEST_CASE("entropy unit conversion") {
    CHECK(close(structure::rescale_entropy(std::log(4.0), structure::EntropyUnits::Bits, 4), 2.0, 1e-12));
    CHECK(close(structure::rescale_entropy(std::log(4.0), structure::EntropyUnits::Normalized, 4), 1.0,
                1e-12));
    CHECK(structure::parse_entropy_units("bits") == structure::EntropyUnits::Bits);
    CHECK_THROWS_AS(structure::parse_entropy_units("hartleys"), ValidationError);
}

TEST_CASE("structure CSV layout") {
    const auto r = run_table_analysis(io::parse_io_table(kOracle)).structure;
    const auto csv = structure::format_structure_csv(r);
    CHECK(csv.rfind("# entropy_variant=intermediate-only entropy_units=nats", 0) == 0);
    CHECK(csv.find("sector,G_row,G_col,H_row,H_col,RU,RG,GI,RU_forward,RG_forward,GI_forward\n") !=
          std::string::npos);
    CHECK(csv.find("Agriculture,0.979796,0.942809,0.673012,0.636514,1.000000,1.000000,1.000000,"
                   "1.500000,1.000000,1.250000\n") != std::string::npos);
    const auto entropy_csv = structure::format_entropy_csv(r, structure::EntropyUnits::Normalized);
    CHECK(entropy_csv.find("entropy_units=normalized") != std::string::npos);
    CHECK(entropy_csv.find("alpha_rank_weight") == std::string::npos);
}
