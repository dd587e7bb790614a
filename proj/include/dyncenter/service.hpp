#pragma once

#include "dyncenter/store.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace dyncenter::service {

struct ServiceConfig {
    std::filesystem::path store_dir = "dyncenter-store";
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
};

/// Defaults overridden by DC_STORE_DIR and DC_PORT.
ServiceConfig config_from_env();

/// JSON API over the record store and the analytics.
///
///   POST /tables                              CSV (text/csv) or JSON body
///   GET  /tables/{id}
///   GET  /analysis/io/{id}/linkages           ?format=csv
///   GET  /analysis/io/{id}/structure          ?variant=&alpha=&source=&format=csv
///   POST /analysis/io/{id}/import-substitution {import_share:[...]}
///   POST /tools/hhi                           {shares, merging?}
///   POST /tools/tcc                           technology profile
///   POST /plans
///   GET  /plans/{id}
///   POST /plans/{id}/evaluate
///   GET  /evaluations/{id}
///
/// Malformed input answers 400 with {"error", "errors":[{field, message}]};
/// unknown ids answer 404.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the socket and returns the bound port. Throws std::runtime_error
    /// when the address cannot be bound.
    int bind();
    /// Serves until stop(); call after bind().
    void listen();
    void stop();

    store::RecordStore& records();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dyncenter::service
