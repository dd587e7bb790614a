#pragma once

#include <json.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace dyncenter::store {

enum class RecordKind { IoTable, LinkageReport, StructureReport, Plan, Evaluation, MergerVerdict };

inline constexpr std::array<RecordKind, 6> kAllKinds = {
    RecordKind::IoTable,  RecordKind::LinkageReport, RecordKind::StructureReport,
    RecordKind::Plan,     RecordKind::Evaluation,    RecordKind::MergerVerdict};

std::string_view to_string(RecordKind k);
RecordKind parse_record_kind(std::string_view text);

struct StoredRecord {
    RecordKind kind = RecordKind::IoTable;
    std::string id;
    std::string created_at;
    int schema_version = 1;
    nlohmann::json payload;
    std::optional<std::string> supersedes;
};

nlohmann::json to_json(const StoredRecord& r);

/// What a writer hands to RecordStore::append once the id is known.
struct Draft {
    nlohmann::json payload;
    std::optional<std::string> supersedes;
};

/// Append-only record store: one newline-delimited JSON file per kind under
/// a directory. Every append is fsynced before it becomes visible. The
/// in-memory index is rebuilt from the files on construction, so a restarted
/// store answers every fetch exactly as before.
///
/// Writes to one kind are serialized; reads never block on file I/O.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path directory);

    RecordStore(const RecordStore&) = delete;
    RecordStore& operator=(const RecordStore&) = delete;

    const std::filesystem::path& directory() const noexcept { return dir_; }

    /// Persists a payload under a fresh id (or `requested_id` when given and unused).
    std::string persist(RecordKind kind, nlohmann::json payload,
                        std::optional<std::string> supersedes = std::nullopt,
                        std::optional<std::string> requested_id = std::nullopt);

    /// Runs `build` while holding the kind's write lock, with the id the record
    /// will get. `build` may read the store; it must not write the same kind.
    StoredRecord append(RecordKind kind, const std::function<Draft(const std::string& id)>& build,
                        std::optional<std::string> requested_id = std::nullopt);

    /// Throws NotFoundError for unknown ids.
    StoredRecord fetch(RecordKind kind, std::string_view id) const;
    std::optional<StoredRecord> find(RecordKind kind, std::string_view id) const;

    /// Records of one kind in append order, optionally filtered.
    std::vector<StoredRecord> list(
        RecordKind kind, const std::function<bool(const StoredRecord&)>& filter = {}) const;

    /// Serialized payload exactly as persisted.
    std::string payload_text(RecordKind kind, std::string_view id) const;

    /// Timestamp source; replaced in tests for deterministic records.
    void set_clock(std::function<std::string()> clock);
    std::string now() const;

private:
    struct Entry {
        StoredRecord record;
        std::string payload_text;
    };
    struct KindState {
        std::mutex write_mutex;
        std::vector<Entry> entries;
        std::map<std::string, std::size_t, std::less<>> by_id;
        std::uint64_t next_counter = 1;
    };

    KindState& state(RecordKind kind) { return states_[static_cast<std::size_t>(kind)]; }
    const KindState& state(RecordKind kind) const {
        return states_[static_cast<std::size_t>(kind)];
    }
    std::filesystem::path file_for(RecordKind kind) const;
    void replay(RecordKind kind);
    void write_line(RecordKind kind, const std::string& line);

    std::filesystem::path dir_;
    std::array<KindState, kAllKinds.size()> states_;
    mutable std::shared_mutex index_mutex_;
    std::function<std::string()> clock_;
};

/// Current UTC time as 2026-01-31T12:00:00.123Z.
std::string utc_timestamp();

}  // namespace dyncenter::store
