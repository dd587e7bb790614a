#include "dyncenter/cli.hpp"

#include "dyncenter/analysis.hpp"
#include "dyncenter/decision_engine.hpp"
#include "dyncenter/error.hpp"
#include "dyncenter/serialization.hpp"
#include "dyncenter/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dyncenter::cli {

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError(fmt::format("cannot open {}", path));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path, fmt::format("malformed JSON at byte {}", e.byte));
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError(fmt::format("cannot write {}", path.string()));
    out << text;
    if (!out) throw StorageError(fmt::format("cannot write {}", path.string()));
}

service::Service* g_running = nullptr;

extern "C" void handle_stop_signal(int) {
    if (g_running != nullptr) g_running->stop();
}

}  // namespace

std::string format_verdict_text(const merger::HhiVerdict& v) {
    std::string out = fmt::format(
        "pre_hhi: {}\ndelta_hhi: {}\npost_hhi: {}\ncoverage: {}\nmarket_class: {}\naction: {}\n"
        "rule: {}\n",
        v.pre_hhi, v.delta_hhi, v.post_hhi, v.coverage, merger::to_string(v.market_class),
        merger::to_string(v.action), v.rule);
    if (!v.boundary_note.empty()) out += fmt::format("boundary_note: {}\n", v.boundary_note);
    if (v.projected_shares) out += "projected_shares: true\n";
    return out;
}

std::string format_hhi_text(double hhi, double coverage) {
    return fmt::format("hhi: {}\ncoverage: {}\n", hhi, coverage);
}

std::string format_tcc_text(const tech::TechnologyProfile& p) {
    const double value = tech::tcc(p);
    std::string out = fmt::format("tcc: {}\ntca: {}\neva: {}\n", value, tech::tca(value, p.eva), p.eva);
    for (auto c : {tech::Component::Technoware, tech::Component::Inforware,
                   tech::Component::Humanware, tech::Component::Orgaware}) {
        out += fmt::format("elasticity_{}: {}\n", tech::to_string(c), tech::component_elasticity(p, c));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Input-output, technology and merger analytics for production-plan review",
                 "dyncenter"};
    app.require_subcommand(1);

    // io analyze
    auto* io_cmd = app.add_subcommand("io", "Flow-table analytics");
    io_cmd->require_subcommand(1);
    auto* analyze_cmd =
        io_cmd->add_subcommand("analyze", "Linkage and structure CSVs for a flow table");
    std::string table_path;
    std::string out_dir;
    std::string variant = "intermediate-only";
    std::string source = "technical-coefficients";
    std::string units = "nats";
    double alpha = 0.5;
    analyze_cmd->add_option("table", table_path, "Flow table CSV")->required();
    analyze_cmd->add_option("--out-dir", out_dir,
                            "Write linkages.csv and structure.csv here instead of stdout");
    analyze_cmd->add_option("--variant", variant, "intermediate-only | with-final-demand");
    analyze_cmd->add_option("--source", source, "technical-coefficients | leontief-inverse");
    analyze_cmd->add_option("--alpha", alpha, "Rank weight of G in the general index");
    analyze_cmd->add_option("--units", units, "nats | bits | normalized");

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "Row and column entropy of a flow table");
    std::string entropy_table;
    bool with_final_demand = false;
    std::string entropy_units = "nats";
    entropy_cmd->add_option("table", entropy_table, "Flow table CSV")->required();
    entropy_cmd->add_flag("--with-final-demand", with_final_demand,
                          "Include final demand in the row distributions");
    entropy_cmd->add_option("--units", entropy_units, "nats | bits | normalized");

    // hhi
    auto* hhi_cmd = app.add_subcommand("hhi", "Herfindahl-Hirschman screen");
    std::vector<double> shares;
    std::vector<std::size_t> merge;
    bool projected = false;
    bool hhi_json = false;
    hhi_cmd->add_option("--shares", shares, "Percentage shares, comma separated")
        ->required()
        ->delimiter(',');
    hhi_cmd->add_option("--merge", merge, "0-based indices of the merging firms, as a,b")
        ->delimiter(',')
        ->expected(2);
    hhi_cmd->add_flag("--projected", projected, "Shares are projections for a potential entrant");
    hhi_cmd->add_flag("--json", hhi_json, "Print JSON");

    // tcc
    auto* tcc_cmd = app.add_subcommand("tcc", "Technology contribution of a profile");
    std::string profile_path;
    bool tcc_json = false;
    tcc_cmd->add_option("--profile", profile_path, "Technology profile JSON")->required();
    tcc_cmd->add_flag("--json", tcc_json, "Print JSON");

    // plan evaluate
    auto* plan_cmd = app.add_subcommand("plan", "Production plans");
    plan_cmd->require_subcommand(1);
    auto* evaluate_cmd = plan_cmd->add_subcommand("evaluate", "Evaluate a production plan");
    std::string plan_path;
    std::string evaluation_id;
    std::string timestamp;
    evaluate_cmd->add_option("plan", plan_path, "Production plan JSON")->required();
    evaluate_cmd->add_option("--evaluation-id", evaluation_id, "Id stamped on the evaluation");
    evaluate_cmd->add_option("--timestamp", timestamp, "Timestamp stamped on the evaluation");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    std::optional<int> port;
    std::optional<std::string> store_dir;
    std::string host = "127.0.0.1";
    serve_cmd->add_option("--port", port, "Port (default DC_PORT or 8080)");
    serve_cmd->add_option("--store", store_dir, "Store directory (default DC_STORE_DIR)");
    serve_cmd->add_option("--host", host, "Bind address");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        if (e.get_exit_code() != 0) err << app.help();
        return kExitUsage;
    }

    try {
        if (*analyze_cmd) {
            structure::StructureOptions options;
            options.variant = structure::parse_entropy_variant(variant);
            options.source = structure::parse_share_source(source);
            options.alpha_rank_weight = alpha;
            const auto entropy_units_v = structure::parse_entropy_units(units);
            const auto analysis = run_table_analysis(io::load_io_table(table_path), options);
            const auto linkages = linkage::format_linkage_csv(analysis.linkage);
            const auto structure_csv =
                structure::format_structure_csv(analysis.structure, entropy_units_v);
            if (out_dir.empty()) {
                out << linkages << '\n' << structure_csv;
            } else {
                std::filesystem::create_directories(out_dir);
                const auto dir = std::filesystem::path(out_dir);
                write_file(dir / "linkages.csv", linkages);
                write_file(dir / "structure.csv", structure_csv);
                out << (dir / "linkages.csv").string() << '\n'
                    << (dir / "structure.csv").string() << '\n';
            }
        } else if (*entropy_cmd) {
            structure::StructureOptions options;
            options.variant = with_final_demand ? structure::EntropyVariant::WithFinalDemand
                                                : structure::EntropyVariant::IntermediateOnly;
            const auto u = structure::parse_entropy_units(entropy_units);
            const auto analysis = run_table_analysis(io::load_io_table(entropy_table), options);
            out << structure::format_entropy_csv(analysis.structure, u);
        } else if (*hhi_cmd) {
            if (merge.empty()) {
                const double value = merger::hhi(shares);
                double coverage = 0.0;
                for (double s : shares) coverage += s;
                if (hhi_json) {
                    out << nlohmann::json{{"hhi", value}, {"coverage", coverage}}.dump(2) << '\n';
                } else {
                    out << format_hhi_text(value, coverage);
                }
            } else {
                merger::MergerScenario scenario{shares, {merge[0], merge[1]}, projected};
                const auto verdict = merger::screen(scenario);
                if (hhi_json) {
                    out << json::to_json(verdict).dump(2) << '\n';
                } else {
                    out << format_verdict_text(verdict);
                }
            }
        } else if (*tcc_cmd) {
            const auto profile = json::profile_from_json(read_json_file(profile_path));
            if (tcc_json) {
                out << json::tcc_summary(profile).dump(2) << '\n';
            } else {
                out << format_tcc_text(profile);
            }
        } else if (*evaluate_cmd) {
            const auto plan = json::plan_from_json(read_json_file(plan_path));
            decision::EvaluationContext ctx;
            ctx.evaluation_id = evaluation_id;
            ctx.timestamp = timestamp;
            out << json::to_json(decision::evaluate_plan(plan, ctx)).dump(2) << '\n';
        } else if (*serve_cmd) {
            auto config = service::config_from_env();
            if (port) config.port = *port;
            if (store_dir) config.store_dir = *store_dir;
            config.host = host;
            service::Service svc(config);
            const int bound = svc.bind();
            out << fmt::format("listening on http://{}:{} (store {})\n", config.host, bound,
                               config.store_dir.string())
                << std::flush;
            g_running = &svc;
            std::signal(SIGINT, handle_stop_signal);
            std::signal(SIGTERM, handle_stop_signal);
            svc.listen();
            g_running = nullptr;
        }
    } catch (const ValidationError& e) {
        err << "error: validation failed\n";
        for (const auto& fe : e.errors()) err << "  " << fe.field << ": " << fe.message << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace dyncenter::cli
