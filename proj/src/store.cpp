#include "dyncenter/store.hpp"

#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace dyncenter::store {

namespace {

struct KindInfo {
    std::string_view name;
    std::string_view id_prefix;
};

constexpr std::array<KindInfo, kAllKinds.size()> kKindInfo = {{
    {"io_table", "tbl"},
    {"linkage_report", "lnk"},
    {"structure_report", "str"},
    {"plan", "plan"},
    {"evaluation", "eval"},
    {"merger_verdict", "hhi"},
}};

const KindInfo& info(RecordKind k) { return kKindInfo[static_cast<std::size_t>(k)]; }

std::string format_id(RecordKind k, std::uint64_t counter) {
    return fmt::format("{}-{:06d}", info(k).id_prefix, counter);
}

// Counter of a generated id such as "tbl-000042"; nullopt for caller-chosen ids.
std::optional<std::uint64_t> counter_of(RecordKind k, std::string_view id) {
    const auto prefix = info(k).id_prefix;
    if (id.size() <= prefix.size() + 1 || id.substr(0, prefix.size()) != prefix ||
        id[prefix.size()] != '-') {
        return std::nullopt;
    }
    const auto digits = id.substr(prefix.size() + 1);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    return value;
}

void fsync_or_throw(int fd, const std::filesystem::path& path) {
    if (::fsync(fd) != 0) {
        const int err = errno;
        ::close(fd);
        throw StorageError(fmt::format("fsync {}: {}", path.string(), std::strerror(err)));
    }
}

void sync_directory(const std::filesystem::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

StoredRecord record_from_line(RecordKind kind, const nlohmann::json& j) {
    StoredRecord r;
    r.kind = parse_record_kind(j.at("kind").get<std::string>());
    if (r.kind != kind) {
        throw StorageError(fmt::format("record of kind {} found in the {} file", to_string(r.kind),
                                       to_string(kind)));
    }
    r.id = j.at("id").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    r.schema_version = j.at("schema_version").get<int>();
    r.payload = j.at("payload");
    if (j.contains("supersedes") && !j.at("supersedes").is_null()) {
        r.supersedes = j.at("supersedes").get<std::string>();
    }
    return r;
}

}  // namespace

std::string_view to_string(RecordKind k) { return info(k).name; }

RecordKind parse_record_kind(std::string_view text) {
    for (auto k : kAllKinds) {
        if (info(k).name == text) return k;
    }
    throw ValidationError("kind", fmt::format("unknown record kind '{}'", text));
}

nlohmann::json to_json(const StoredRecord& r) {
    return {{"kind", to_string(r.kind)},
            {"id", r.id},
            {"created_at", r.created_at},
            {"schema_version", r.schema_version},
            {"payload", r.payload},
            {"supersedes", r.supersedes ? nlohmann::json(*r.supersedes) : nlohmann::json(nullptr)}};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:03d}Z", tm.tm_year + 1900,
                       tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                       static_cast<int>(ms.count()));
}

RecordStore::RecordStore(std::filesystem::path directory)
    : dir_(std::move(directory)), clock_(utc_timestamp) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
        throw StorageError(fmt::format("cannot create store directory {}: {}", dir_.string(),
                                       ec ? ec.message() : "not a directory"));
    }
    for (auto k : kAllKinds) replay(k);
}

std::filesystem::path RecordStore::file_for(RecordKind kind) const {
    return dir_ / fmt::format("{}.ndjson", to_string(kind));
}

void RecordStore::replay(RecordKind kind) {
    const auto path = file_for(kind);
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError(fmt::format("cannot read {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    // A crash mid-append leaves a line without its newline; it was never
    // acknowledged, so it is cut off before new appends land behind it.
    const auto last_newline = text.rfind('\n');
    const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (complete != text.size()) {
        std::filesystem::resize_file(path, complete);
        text.resize(complete);
    }

    auto& st = state(kind);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        StoredRecord record;
        try {
            record = record_from_line(kind, nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw StorageError(fmt::format("{}:{}: corrupt record: {}", path.string(), line_no, e.what()));
        }
        if (st.by_id.count(record.id) != 0) {
            throw StorageError(fmt::format("{}:{}: duplicate id {}", path.string(), line_no, record.id));
        }
        if (auto c = counter_of(kind, record.id); c && *c >= st.next_counter) st.next_counter = *c + 1;
        std::string payload_text = record.payload.dump();
        st.by_id.emplace(record.id, st.entries.size());
        st.entries.push_back({std::move(record), std::move(payload_text)});
    }
}

void RecordStore::write_line(RecordKind kind, const std::string& line) {
    const auto path = file_for(kind);
    const bool existed = std::filesystem::exists(path);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw StorageError(fmt::format("open {}: {}", path.string(), std::strerror(errno)));
    }
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            throw StorageError(fmt::format("write {}: {}", path.string(), std::strerror(err)));
        }
        written += static_cast<std::size_t>(n);
    }
    fsync_or_throw(fd, path);
    ::close(fd);
    if (!existed) sync_directory(dir_);
}

StoredRecord RecordStore::append(RecordKind kind,
                                 const std::function<Draft(const std::string& id)>& build,
                                 std::optional<std::string> requested_id) {
    auto& st = state(kind);
    std::lock_guard write_lock(st.write_mutex);

    std::string id;
    {
        std::shared_lock read_lock(index_mutex_);
        if (requested_id) {
            if (requested_id->empty()) throw ValidationError("id", "must not be empty");
            if (st.by_id.count(*requested_id) != 0) {
                throw ValidationError("id", fmt::format("{} '{}' already exists", to_string(kind),
                                                        *requested_id));
            }
            id = *requested_id;
        } else {
            do {
                id = format_id(kind, st.next_counter++);
            } while (st.by_id.count(id) != 0);
        }
    }

    Draft draft = build(id);
    StoredRecord record;
    record.kind = kind;
    record.id = id;
    record.created_at = now();
    record.payload = std::move(draft.payload);
    record.supersedes = std::move(draft.supersedes);
    if (record.payload.contains("schema_version") && record.payload["schema_version"].is_number_integer()) {
        record.schema_version = record.payload["schema_version"].get<int>();
    }

    write_line(kind, to_json(record).dump() + "\n");

    std::unique_lock index_lock(index_mutex_);
    if (auto c = counter_of(kind, id); c && *c >= st.next_counter) st.next_counter = *c + 1;
    std::string payload_text = record.payload.dump();
    st.by_id.emplace(id, st.entries.size());
    st.entries.push_back({record, std::move(payload_text)});
    return record;
}

std::string RecordStore::persist(RecordKind kind, nlohmann::json payload,
                                 std::optional<std::string> supersedes,
                                 std::optional<std::string> requested_id) {
    return append(
               kind,
               [&](const std::string&) { return Draft{std::move(payload), std::move(supersedes)}; },
               std::move(requested_id))
        .id;
}

std::optional<StoredRecord> RecordStore::find(RecordKind kind, std::string_view id) const {
    std::shared_lock lock(index_mutex_);
    const auto& st = state(kind);
    const auto it = st.by_id.find(id);
    if (it == st.by_id.end()) return std::nullopt;
    return st.entries[it->second].record;
}

StoredRecord RecordStore::fetch(RecordKind kind, std::string_view id) const {
    if (auto r = find(kind, id)) return *r;
    throw NotFoundError(fmt::format("{} '{}' not found", to_string(kind), id));
}

std::vector<StoredRecord> RecordStore::list(
    RecordKind kind, const std::function<bool(const StoredRecord&)>& filter) const {
    std::shared_lock lock(index_mutex_);
    std::vector<StoredRecord> out;
    for (const auto& e : state(kind).entries) {
        if (!filter || filter(e.record)) out.push_back(e.record);
    }
    return out;
}

std::string RecordStore::payload_text(RecordKind kind, std::string_view id) const {
    std::shared_lock lock(index_mutex_);
    const auto& st = state(kind);
    const auto it = st.by_id.find(id);
    if (it == st.by_id.end()) {
        throw NotFoundError(fmt::format("{} '{}' not found", to_string(kind), id));
    }
    return st.entries[it->second].payload_text;
}

std::string RecordStore::now() const {
    std::shared_lock lock(index_mutex_);
    return clock_();
}

void RecordStore::set_clock(std::function<std::string()> clock) {
    std::unique_lock lock(index_mutex_);
    clock_ = std::move(clock);
}

}  // namespace dyncenter::store
