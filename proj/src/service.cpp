#include "dyncenter/service.hpp"

#include "dyncenter/analysis.hpp"
#include "dyncenter/decision_engine.hpp"
#include "dyncenter/error.hpp"
#include "dyncenter/serialization.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <mutex>

namespace dyncenter::service {

namespace {

using nlohmann::json;
using store::RecordKind;
namespace wire = dyncenter::json;

constexpr const char* kJson = "application/json";

json error_body(std::string_view message, const std::vector<FieldError>& errors = {}) {
    json list = json::array();
    for (const auto& e : errors) list.push_back({{"field", e.field}, {"message", e.message}});
    return {{"error", message}, {"errors", std::move(list)}};
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) throw ValidationError("body", "request body is empty");
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw ValidationError("body", fmt::format("malformed JSON at byte {}", e.byte));
    }
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
}

double parse_alpha(const std::string& text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("alpha", fmt::format("'{}' is not a number", text));
    }
    return value;
}

bool wants_csv(const httplib::Request& req) {
    const auto format = query(req, "format");
    if (!format) return false;
    if (*format == "csv") return true;
    if (*format == "json") return false;
    throw ValidationError("format", fmt::format("unknown format '{}' (expected json or csv)", *format));
}

// Runs f and records its field errors instead of throwing them.
template <typename F>
void collect(ErrorCollector& errors, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        for (const auto& fe : e.errors()) errors.add(fe.field, fe.message);
    }
}

// Runs a handler and maps library exceptions onto HTTP statuses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ValidationError& e) {
            send_json(res, 400, error_body("validation failed", e.errors()));
        } catch (const NotFoundError& e) {
            send_json(res, 404, error_body(e.what()));
        } catch (const NumericalError& e) {
            send_json(res, 422, error_body(e.what(), {{"table", e.what()}}));
        } catch (const StorageError& e) {
            send_json(res, 500, error_body(e.what()));
        } catch (const std::exception& e) {
            send_json(res, 500, error_body(e.what()));
        }
    };
}

}  // namespace

ServiceConfig config_from_env() {
    ServiceConfig c;
    if (const char* dir = std::getenv("DC_STORE_DIR"); dir && *dir) c.store_dir = dir;
    if (const char* port = std::getenv("DC_PORT"); port && *port) {
        const std::string_view text(port);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0 || value > 65535) {
            throw ValidationError("DC_PORT", fmt::format("'{}' is not a port number", text));
        }
        c.port = value;
    }
    return c;
}

struct Service::Impl {
    ServiceConfig config;
    store::RecordStore records;
    httplib::Server server;
    std::mutex report_mutex;

    explicit Impl(ServiceConfig c) : config(std::move(c)), records(config.store_dir) { routes(); }

    io::IoTable load_table(const std::string& id) {
        return wire::table_from_json(records.fetch(RecordKind::IoTable, id).payload);
    }

    // Keeps one stored copy of each distinct derived report.
    void remember_report(RecordKind kind, const nlohmann::json& payload) {
        std::lock_guard lock(report_mutex);
        const auto existing = records.list(kind, [&](const store::StoredRecord& r) {
            return r.payload == payload;
        });
        if (existing.empty()) records.persist(kind, payload);
    }

    void routes() {
        server.Post("/tables", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto content_type = req.get_header_value("Content-Type");
            io::IoTable table = content_type.rfind("text/csv", 0) == 0
                                    ? io::parse_io_table(req.body, "body")
                                    : wire::table_from_json(parse_body(req));
            // Reject non-productive tables up front rather than on first analysis.
            io::technical_coefficients(table);
            const auto record = records.append(RecordKind::IoTable, [&](const std::string&) {
                return store::Draft{wire::to_json(table), std::nullopt};
            });
            send_json(res, 201, store::to_json(record));
        }));

        server.Get(R"(/tables/([^/]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200,
                                 store::to_json(records.fetch(RecordKind::IoTable, req.matches[1].str())));
                   }));

        server.Get(R"(/analysis/io/([^/]+)/linkages)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const std::string id = req.matches[1].str();
                       const bool csv = wants_csv(req);
                       const auto analysis = run_table_analysis(load_table(id));
                       auto body = wire::to_json(analysis.linkage);
                       body["table_id"] = id;
                       remember_report(RecordKind::LinkageReport, body);
                       if (csv) {
                           res.set_content(linkage::format_linkage_csv(analysis.linkage), "text/csv");
                       } else {
                           send_json(res, 200, body);
                       }
                   }));

        server.Get(R"(/analysis/io/([^/]+)/structure)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const std::string id = req.matches[1].str();
                       ErrorCollector errors;
                       structure::StructureOptions options;
                       auto units = structure::EntropyUnits::Nats;
                       collect(errors, [&] {
                           if (auto v = query(req, "variant")) {
                               options.variant = structure::parse_entropy_variant(*v);
                           }
                       });
                       collect(errors, [&] {
                           if (auto s = query(req, "source")) {
                               options.source = structure::parse_share_source(*s);
                           }
                       });
                       collect(errors, [&] {
                           if (auto a = query(req, "alpha")) options.alpha_rank_weight = parse_alpha(*a);
                       });
                       collect(errors, [&] {
                           if (auto u = query(req, "units")) units = structure::parse_entropy_units(*u);
                       });
                       errors.throw_if_any();
                       const bool csv = wants_csv(req);
                       const auto analysis = run_table_analysis(load_table(id), options);
                       auto body = wire::to_json(analysis.structure);
                       body["table_id"] = id;
                       remember_report(RecordKind::StructureReport, body);
                       if (csv) {
                           res.set_content(structure::format_structure_csv(analysis.structure, units),
                                           "text/csv");
                       } else {
                           send_json(res, 200, body);
                       }
                   }));

        server.Post(R"(/analysis/io/([^/]+)/import-substitution)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const std::string id = req.matches[1].str();
                        const auto body = parse_body(req);
                        if (!body.is_object() || !body.contains("import_share") ||
                            !body["import_share"].is_array()) {
                            throw ValidationError("import_share", "required array of shares in [0, 1]");
                        }
                        std::vector<double> shares;
                        ErrorCollector errors;
                        for (std::size_t i = 0; i < body["import_share"].size(); ++i) {
                            const auto& v = body["import_share"][i];
                            if (!v.is_number()) {
                                errors.add(fmt::format("import_share[{}]", i), "must be a number");
                                shares.push_back(0.0);
                            } else {
                                shares.push_back(v.get<double>());
                            }
                        }
                        errors.throw_if_any();
                        const auto table = load_table(id);
                        const auto analysis = run_table_analysis(table);
                        auto out = wire::to_json(decision::import_substitution_candidates(
                            table, shares, analysis.linkage, analysis.structure.backward.gi));
                        out["table_id"] = id;
                        send_json(res, 200, out);
                    }));

        server.Post("/tools/hhi", guarded([](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            if (body.is_object() && body.contains("merging") && !body["merging"].is_null()) {
                const auto verdict = merger::screen(wire::scenario_from_json(body));
                auto out = wire::to_json(verdict);
                out["hhi"] = verdict.pre_hhi;
                send_json(res, 200, out);
                return;
            }
            const auto shares = wire::market_shares_from_json(body);
            double coverage = 0.0;
            for (double s : shares) coverage += s;
            send_json(res, 200, {{"hhi", merger::hhi(shares)}, {"coverage", coverage}});
        }));

        server.Post("/tools/tcc", guarded([](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, wire::tcc_summary(wire::profile_from_json(parse_body(req))));
        }));

        server.Post("/plans", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto plan = wire::plan_from_json(parse_body(req));
            std::optional<std::string> requested;
            if (!plan.id.empty()) requested = plan.id;
            // The store assigns the id, so validate the rest against a placeholder.
            auto probe = plan;
            if (probe.id.empty()) probe.id = "pending";
            decision::validate_plan(probe);
            const auto record = records.append(
                RecordKind::Plan,
                [&](const std::string& id) {
                    plan.id = id;
                    return store::Draft{wire::to_json(plan), std::nullopt};
                },
                requested);
            send_json(res, 201, store::to_json(record));
        }));

        server.Get(R"(/plans/([^/]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200,
                                 store::to_json(records.fetch(RecordKind::Plan, req.matches[1].str())));
                   }));

        server.Post(R"(/plans/([^/]+)/evaluate)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const std::string plan_id = req.matches[1].str();
                        const auto plan =
                            wire::plan_from_json(records.fetch(RecordKind::Plan, plan_id).payload);
                        std::optional<merger::HhiVerdict> verdict;
                        // The evaluation kind's write lock serializes evaluations, so the
                        // supersedes link always points at the latest prior record.
                        const auto record = records.append(
                            RecordKind::Evaluation, [&](const std::string& id) {
                                const auto prior = records.list(
                                    RecordKind::Evaluation, [&](const store::StoredRecord& r) {
                                        return r.payload.value("plan_id", "") == plan_id;
                                    });
                                decision::EvaluationContext ctx;
                                ctx.evaluation_id = id;
                                ctx.timestamp = records.now();
                                if (!prior.empty()) ctx.supersedes = prior.back().id;
                                const auto evaluation = decision::evaluate_plan(plan, ctx);
                                verdict = evaluation.merger_verdict;
                                return store::Draft{wire::to_json(evaluation), ctx.supersedes};
                            });
                        if (verdict) {
                            auto payload = wire::to_json(*verdict);
                            payload["evaluation_id"] = record.id;
                            payload["plan_id"] = plan_id;
                            records.persist(RecordKind::MergerVerdict, std::move(payload));
                        }
                        send_json(res, 201, store::to_json(record));
                    }));

        server.Get(R"(/evaluations/([^/]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200, store::to_json(
                                               records.fetch(RecordKind::Evaluation, req.matches[1].str())));
                   }));

        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) {
                res.set_content(error_body(res.status == 404 ? "no such endpoint" : "request failed").dump(),
                                kJson);
            }
        });
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind() {
    auto& c = impl_->config;
    const int port = c.port == 0 ? impl_->server.bind_to_any_port(c.host)
                                 : (impl_->server.bind_to_port(c.host, c.port) ? c.port : -1);
    if (port < 0) {
        throw std::runtime_error(fmt::format("cannot bind {}:{}", c.host, c.port));
    }
    return port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

store::RecordStore& Service::records() { return impl_->records; }

}  // namespace dyncenter::service
