#include "mnemo/store.hpp"

#include <fcntl.h>
#include <sqlite3.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "mnemo/text.hpp"

namespace mnemo::store {

namespace {

using json = nlohmann::json;

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS config(key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS memories(
  id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, content TEXT NOT NULL,
  mu BLOB NOT NULL, var BLOB NOT NULL, scene_id INTEGER,
  t_created INTEGER NOT NULL, t_accessed INTEGER NOT NULL, n_access INTEGER NOT NULL,
  lifecycle TEXT NOT NULL, token_count INTEGER NOT NULL);
CREATE INDEX IF NOT EXISTS memories_profile ON memories(profile_id);
CREATE TABLE IF NOT EXISTS provenance(
  memory_id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, session_id TEXT NOT NULL,
  speaker TEXT, timestamp INTEGER NOT NULL, source_document TEXT);
CREATE TABLE IF NOT EXISTS temporal_events(
  memory_id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, observed_at INTEGER NOT NULL,
  refers_to INTEGER, valid_from INTEGER, valid_until INTEGER);
CREATE TABLE IF NOT EXISTS langevin_states(
  memory_id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, xi BLOB NOT NULL, last_step_time INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS observations(
  memory_id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, token_count INTEGER NOT NULL,
  entity_count INTEGER NOT NULL, entropy REAL NOT NULL);
CREATE TABLE IF NOT EXISTS scenes(
  id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, source_document TEXT NOT NULL, last_time INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS entities(
  profile_id TEXT NOT NULL, entity_id TEXT NOT NULL, PRIMARY KEY(profile_id, entity_id));
CREATE TABLE IF NOT EXISTS entity_mentions(
  profile_id TEXT NOT NULL, entity_id TEXT NOT NULL, memory_id INTEGER NOT NULL,
  PRIMARY KEY(profile_id, entity_id, memory_id));
CREATE INDEX IF NOT EXISTS mentions_memory ON entity_mentions(memory_id);
CREATE TABLE IF NOT EXISTS entity_edges(
  profile_id TEXT NOT NULL, a TEXT NOT NULL, b TEXT NOT NULL, count INTEGER NOT NULL,
  PRIMARY KEY(profile_id, a, b));
CREATE TABLE IF NOT EXISTS facts(
  id INTEGER PRIMARY KEY, profile_id TEXT NOT NULL, memory_id INTEGER NOT NULL, subject TEXT NOT NULL,
  predicate TEXT NOT NULL, object TEXT NOT NULL, embedding BLOB NOT NULL, context TEXT NOT NULL,
  observed_at INTEGER NOT NULL, attribute INTEGER NOT NULL, superseded_by INTEGER);
CREATE INDEX IF NOT EXISTS facts_key ON facts(profile_id, subject, predicate);
CREATE INDEX IF NOT EXISTS facts_memory ON facts(memory_id);
CREATE TABLE IF NOT EXISTS supersedes_edges(
  profile_id TEXT NOT NULL, newer INTEGER NOT NULL, older INTEGER NOT NULL,
  kappa REAL NOT NULL, discrepancy REAL NOT NULL, PRIMARY KEY(profile_id, newer, older));
CREATE TABLE IF NOT EXISTS bm25_postings(
  profile_id TEXT NOT NULL, term TEXT NOT NULL, memory_id INTEGER NOT NULL, tf INTEGER NOT NULL,
  PRIMARY KEY(profile_id, term, memory_id));
CREATE INDEX IF NOT EXISTS postings_memory ON bm25_postings(memory_id);
CREATE TABLE IF NOT EXISTS profiles(
  profile_id TEXT NOT NULL, entity_id TEXT NOT NULL, attrs TEXT NOT NULL, PRIMARY KEY(profile_id, entity_id));
)sql";

/// Export order; also the whitelist for import.
const std::vector<std::string> kTables = {"config",          "memories",        "provenance",   "temporal_events",
                                          "langevin_states", "observations",    "scenes",       "entities",
                                          "entity_mentions", "entity_edges",    "facts",        "supersedes_edges",
                                          "bm25_postings",   "profiles"};

[[noreturn]] void fail(sqlite3* db, const std::string& what)
{
    const int code = sqlite3_errcode(db);
    const std::string msg = what + ": " + sqlite3_errmsg(db);
    if (code == SQLITE_BUSY || code == SQLITE_LOCKED) throw BusyError(msg);
    throw IoError(msg);
}

void exec(sqlite3* db, const char* sql)
{
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        const std::string msg = err != nullptr ? err : "unknown";
        sqlite3_free(err);
        const int code = sqlite3_errcode(db);
        if (code == SQLITE_BUSY || code == SQLITE_LOCKED) throw BusyError(msg);
        throw IoError(std::string("sqlite: ") + msg);
    }
}

std::string blob_of(std::span<const double> v)
{
    std::string out(v.size() * sizeof(double), '\0');
    if (!v.empty()) std::memcpy(out.data(), v.data(), out.size());
    return out;
}

class Stmt {
  public:
    Stmt(sqlite3* db, const char* sql) : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql, -1, &s_, nullptr) != SQLITE_OK) fail(db, std::string("prepare ") + sql);
    }
    ~Stmt() { sqlite3_finalize(s_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int i, std::int64_t v) { return check(sqlite3_bind_int64(s_, i, v)); }
    Stmt& bind(int i, std::uint64_t v) { return bind(i, static_cast<std::int64_t>(v)); }
    Stmt& bind(int i, int v) { return bind(i, static_cast<std::int64_t>(v)); }
    Stmt& bind(int i, double v) { return check(sqlite3_bind_double(s_, i, v)); }
    Stmt& bind(int i, std::string_view v)
    {
        return check(sqlite3_bind_text(s_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    }
    Stmt& bind(int i, const std::string& v) { return bind(i, std::string_view(v)); }
    Stmt& bind(int i, const char* v) { return bind(i, std::string_view(v)); }
    Stmt& bind(int i, std::nullopt_t) { return check(sqlite3_bind_null(s_, i)); }
    template <class T>
    Stmt& bind(int i, const std::optional<T>& v)
    {
        return v ? bind(i, *v) : bind(i, std::nullopt);
    }
    Stmt& bind_blob(int i, std::span<const double> v)
    {
        const std::string b = blob_of(v);
        return check(sqlite3_bind_blob(s_, i, b.data(), static_cast<int>(b.size()), SQLITE_TRANSIENT));
    }
    Stmt& bind_raw_blob(int i, const std::string& b)
    {
        return check(sqlite3_bind_blob(s_, i, b.data(), static_cast<int>(b.size()), SQLITE_TRANSIENT));
    }

    template <class... A>
    Stmt& with(const A&... a)
    {
        reset();
        int i = 0;
        (bind(++i, a), ...);
        return *this;
    }

    bool step()
    {
        const int rc = sqlite3_step(s_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        fail(db_, "step");
    }
    void run()
    {
        while (step()) {}
    }
    void reset()
    {
        sqlite3_reset(s_);
        sqlite3_clear_bindings(s_);
    }

    int columns() const { return sqlite3_column_count(s_); }
    std::string name(int c) const { return sqlite3_column_name(s_, c); }
    int type(int c) const { return sqlite3_column_type(s_, c); }
    bool is_null(int c) const { return type(c) == SQLITE_NULL; }
    std::int64_t i64(int c) const { return sqlite3_column_int64(s_, c); }
    double f64(int c) const { return sqlite3_column_double(s_, c); }
    std::string text(int c) const
    {
        const auto* p = sqlite3_column_text(s_, c);
        return p == nullptr ? std::string() : std::string(reinterpret_cast<const char*>(p),
                                                          static_cast<std::size_t>(sqlite3_column_bytes(s_, c)));
    }
    std::optional<std::string> opt_text(int c) const { return is_null(c) ? std::nullopt : std::optional(text(c)); }
    std::optional<std::int64_t> opt_i64(int c) const { return is_null(c) ? std::nullopt : std::optional(i64(c)); }
    Vector vec(int c) const
    {
        const auto n = static_cast<std::size_t>(sqlite3_column_bytes(s_, c));
        Vector v(n / sizeof(double));
        if (n > 0) std::memcpy(v.data(), sqlite3_column_blob(s_, c), v.size() * sizeof(double));
        return v;
    }

  private:
    Stmt& check(int rc)
    {
        if (rc != SQLITE_OK) fail(db_, "bind");
        return *this;
    }

    sqlite3* db_;
    sqlite3_stmt* s_ = nullptr;
};

class Transaction {
  public:
    explicit Transaction(sqlite3* db) : db_(db) { exec(db, "BEGIN IMMEDIATE"); }
    ~Transaction()
    {
        if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit()
    {
        exec(db_, "COMMIT");
        done_ = true;
    }

  private:
    sqlite3* db_;
    bool done_ = false;
};

std::string context_for(const StoreMetadata& meta, MemoryId id)
{
    return meta.session_id.empty() ? "mem:" + std::to_string(id) : "session:" + meta.session_id;
}

std::pair<EntityId, EntityId> ordered(const EntityId& a, const EntityId& b)
{
    return a < b ? std::pair(a, b) : std::pair(b, a);
}

double edge_weight(std::int64_t count) { return 1.0 - std::pow(0.5, static_cast<double>(count)); }

} // namespace

const MemoryRecord* Snapshot::find(MemoryId id) const
{
    const auto it = index.find(id);
    return it == index.end() ? nullptr : &memories[it->second];
}

Store::Store(const std::string& path, StoreOptions options) : path_(path), opts_(std::move(options))
{
    if (!opts_.embedder) opts_.embedder = std::make_shared<adapters::HashFeatureEmbedder>();
    opts_.similarity.validate();
    opts_.potential.validate();
    const bool memory = path == ":memory:";

    if (!opts_.read_only && !memory) {
        const std::string lock_path = path + "-lock";
        lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (lock_fd_ < 0) throw IoError("cannot open lock file " + lock_path + ": " + std::strerror(errno));
        if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
            const int err = errno;
            ::close(lock_fd_);
            lock_fd_ = -1;
            if (err == EWOULDBLOCK) throw BusyError("store " + path + " is locked by another writer");
            throw IoError("cannot lock " + lock_path + ": " + std::strerror(err));
        }
    }

    const int flags = opts_.read_only ? SQLITE_OPEN_READONLY : (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    if (sqlite3_open_v2(path.c_str(), &db_, flags | SQLITE_OPEN_FULLMUTEX, nullptr) != SQLITE_OK) {
        const std::string msg = db_ != nullptr ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        if (lock_fd_ >= 0) ::close(lock_fd_);
        lock_fd_ = -1;
        throw IoError("cannot open store " + path + ": " + msg);
    }
    try {
        sqlite3_busy_timeout(db_, 5000);
        if (!opts_.read_only) {
            exec(db_, "PRAGMA journal_mode=WAL; PRAGMA synchronous=FULL;");
            exec(db_, kSchema);
        } else {
            Stmt s(db_, "SELECT count(*) FROM sqlite_master WHERE name='memories'");
            if (!s.step() || s.i64(0) == 0) throw IoError("not a memory store: " + path);
        }
    } catch (...) {
        close();
        throw;
    }
}

Store::~Store() { close(); }

void Store::close()
{
    std::lock_guard lk(mu_);
    if (db_ != nullptr) {
        sqlite3_close_v2(db_);
        db_ = nullptr;
    }
    if (lock_fd_ >= 0) {
        ::close(lock_fd_);
        lock_fd_ = -1;
    }
    cache_.clear();
}

void Store::require_open() const
{
    if (db_ == nullptr) throw Error("store is closed");
}

void Store::require_writable() const
{
    require_open();
    if (opts_.read_only) throw Error("store opened read-only");
}

void Store::fault(std::string_view point) const
{
    if (opts_.fault_hook) opts_.fault_hook(point);
}

void Store::invalidate()
{
    cache_.clear();
}

std::int64_t Store::next_id(const char* key)
{
    Stmt get(db_, "SELECT value FROM config WHERE key = ?");
    get.with(std::string(key));
    std::int64_t next = 1;
    if (get.step()) next = std::stoll(get.text(0));
    Stmt put(db_, "INSERT INTO config(key, value) VALUES(?, ?) ON CONFLICT(key) DO UPDATE SET value = excluded.value");
    put.with(std::string(key), std::to_string(next + 1)).run();
    return next;
}

std::int64_t Store::data_version() const
{
    Stmt s(db_, "PRAGMA data_version");
    s.step();
    return s.i64(0);
}

StoreOutcome Store::store(std::string_view profile, std::string_view content, const StoreMetadata& meta)
{
    std::lock_guard lk(mu_);
    require_writable();
    if (profile.empty()) throw std::invalid_argument("profile id must not be empty");
    if (content.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw std::invalid_argument("content must not be empty");
    if (meta.valid_from && meta.valid_until && *meta.valid_from > *meta.valid_until)
        throw std::invalid_argument("valid_from is after valid_until");
    const std::string prof(profile);
    const std::size_t dim = opts_.embedder->dimension();

    StoreOutcome out;
    const auto gate = text::entropy_gate(content, opts_.entropy_threshold, opts_.min_tokens);
    auto reject = [&] {
        out.rejection = Rejection{"entropy_gate", gate.bits, gate.tokens};
        return out;
    };

    // 1. embed
    fault("ingest:1");
    if (gate.tokens == 0) return reject();
    Vector e = opts_.embedder->embed(content);
    if (e.size() != dim) throw DimensionMismatch(dim, e.size());
    MemoryRecord rec;
    rec.embedding = info::estimate_variance(e, opts_.similarity);

    // 2. metadata
    fault("ingest:2");
    Stmt counter(db_, "SELECT value FROM config WHERE key = ?");
    auto peek = [&](const char* key) {
        counter.with(std::string(key));
        return counter.step() ? std::stoll(counter.text(0)) : std::int64_t{1};
    };
    rec.id = peek("next_memory_id");
    rec.profile_id = prof;
    rec.content = std::string(content);
    rec.t_created = rec.t_accessed = meta.timestamp;
    rec.langevin.last_step_time = meta.timestamp;
    rec.provenance = {meta.session_id, meta.speaker, meta.timestamp, meta.source_document};
    rec.temporal = {rec.id, meta.timestamp, meta.refers_to ? meta.refers_to : text::find_date(content),
                    meta.valid_from, meta.valid_until};
    rec.token_count = static_cast<std::uint32_t>(gate.tokens);
    bool new_scene = false;
    if (meta.source_document) {
        Stmt s(db_, "SELECT id FROM scenes WHERE profile_id = ? AND source_document = ? AND abs(last_time - ?) <= ? "
                    "ORDER BY last_time DESC, id DESC LIMIT 1");
        s.with(prof, *meta.source_document, meta.timestamp, opts_.scene_window);
        if (s.step()) {
            rec.scene_id = s.i64(0);
        } else {
            rec.scene_id = peek("next_scene_id");
            new_scene = true;
        }
    }
    const std::string context = context_for(meta, rec.id);

    // 3. entities
    fault("ingest:3");
    std::set<EntityId> known;
    {
        Stmt s(db_, "SELECT entity_id FROM entities WHERE profile_id = ?");
        s.with(prof);
        while (s.step()) known.insert(s.text(0));
    }
    rec.entities = text::extract_entities(content, known);

    // 4. facts
    fault("ingest:4");
    std::vector<FactRecord> facts;
    FactId fact_id = peek("next_fact_id");
    for (const auto& f : text::extract_facts(content, rec.entities)) {
        FactRecord fr;
        fr.id = fact_id++;
        fr.memory = rec.id;
        fr.subject = f.subject;
        fr.predicate = f.predicate;
        fr.object = f.object;
        fr.attribute = f.attribute;
        fr.embedding = opts_.embedder->embed(f.object);
        if (fr.embedding.size() != dim) throw DimensionMismatch(dim, fr.embedding.size());
        fr.context = context;
        fr.observed_at = meta.timestamp;
        rec.facts.push_back(fr.id);
        facts.push_back(std::move(fr));
    }

    // 5. emotions and beliefs: not modelled
    fault("ingest:5");

    // 6. entity graph co-occurrence
    fault("ingest:6");
    std::vector<std::pair<EntityId, EntityId>> pairs;
    for (auto a = rec.entities.begin(); a != rec.entities.end(); ++a)
        for (auto b = std::next(a); b != rec.entities.end(); ++b) pairs.emplace_back(*a, *b);

    // 7. sheaf consistency per fact key
    fault("ingest:7");
    struct FactSupersede {
        MemoryId older;
        std::string subject, predicate;
        FactId by;
    };
    std::vector<FactSupersede> fact_updates;
    {
        Stmt s(db_, "SELECT memory_id, context, observed_at, embedding FROM facts WHERE profile_id = ? AND subject = ? "
                    "AND predicate = ? AND superseded_by IS NULL ORDER BY id");
        for (const auto& f : facts) {
            s.with(prof, f.subject, f.predicate);
            std::vector<sheaf::FactObservation> existing;
            while (s.step()) existing.push_back({s.text(1), s.i64(0), s.i64(2), s.vec(3)});
            if (existing.empty()) continue;
            const auto check = sheaf::check_new_fact(existing, {f.context, rec.id, f.observed_at, f.embedding}, dim,
                                                     opts_.tau);
            if (!check.directive) continue;
            const auto& d = *check.directive;
            const bool dup = std::any_of(out.supersedes.begin(), out.supersedes.end(),
                                         [&](const auto& x) { return x.older == d.older; });
            if (!dup) out.supersedes.push_back({rec.id, d.older, d.kappa, d.discrepancy});
            fact_updates.push_back({d.older, f.subject, f.predicate, f.id});
        }
    }

    // 8. foresight: not modelled
    fault("ingest:8");

    // 9. observation summary
    fault("ingest:9");
    const auto entity_count = static_cast<std::int64_t>(rec.entities.size());

    // 10. entropy gate
    fault("ingest:10");
    if (!gate.pass) {
        out.supersedes.clear();
        return reject();
    }

    // 11. persist atomically
    fault("ingest:11");
    {
        Transaction tx(db_);
        next_id("next_memory_id");
        if (new_scene) next_id("next_scene_id");
        for (std::size_t i = 0; i < facts.size(); ++i) next_id("next_fact_id");
        fault("persist:config");

        Stmt(db_, "INSERT INTO memories(id, profile_id, content, mu, var, scene_id, t_created, t_accessed, n_access, "
                  "lifecycle, token_count) VALUES(?, ?, ?, ?, ?, ?, ?, ?, 0, ?, ?)")
            .bind(1, rec.id)
            .bind(2, prof)
            .bind(3, rec.content)
            .bind_blob(4, rec.embedding.mu())
            .bind_blob(5, rec.embedding.var())
            .bind(6, rec.scene_id)
            .bind(7, rec.t_created)
            .bind(8, rec.t_accessed)
            .bind(9, langevin::to_string(rec.lifecycle))
            .bind(10, static_cast<std::int64_t>(rec.token_count))
            .run();
        fault("persist:memories");

        Stmt(db_, "INSERT INTO provenance VALUES(?, ?, ?, ?, ?, ?)")
            .with(rec.id, prof, meta.session_id, meta.speaker, meta.timestamp, meta.source_document)
            .run();
        fault("persist:provenance");

        Stmt(db_, "INSERT INTO temporal_events VALUES(?, ?, ?, ?, ?, ?)")
            .with(rec.id, prof, rec.temporal.observed_at, rec.temporal.refers_to, rec.temporal.valid_from,
                  rec.temporal.valid_until)
            .run();
        fault("persist:temporal_events");

        Stmt(db_, "INSERT INTO langevin_states VALUES(?, ?, ?, ?)")
            .bind(1, rec.id)
            .bind(2, prof)
            .bind_blob(3, rec.langevin.xi.coords())
            .bind(4, rec.langevin.last_step_time)
            .run();
        fault("persist:langevin_states");

        Stmt(db_, "INSERT INTO observations VALUES(?, ?, ?, ?, ?)")
            .with(rec.id, prof, static_cast<std::int64_t>(gate.tokens), entity_count, gate.bits)
            .run();
        fault("persist:observations");

        if (rec.scene_id) {
            Stmt(db_, "INSERT INTO scenes(id, profile_id, source_document, last_time) VALUES(?, ?, ?, ?) "
                      "ON CONFLICT(id) DO UPDATE SET last_time = max(last_time, excluded.last_time)")
                .with(*rec.scene_id, prof, *meta.source_document, meta.timestamp)
                .run();
        }
        fault("persist:scenes");

        {
            Stmt ent(db_, "INSERT OR IGNORE INTO entities VALUES(?, ?)");
            Stmt men(db_, "INSERT OR IGNORE INTO entity_mentions VALUES(?, ?, ?)");
            for (const auto& en : rec.entities) {
                ent.with(prof, en).run();
                men.with(prof, en, rec.id).run();
            }
            Stmt edge(db_, "INSERT INTO entity_edges VALUES(?, ?, ?, 1) "
                           "ON CONFLICT(profile_id, a, b) DO UPDATE SET count = count + 1");
            for (const auto& [a, b] : pairs) edge.with(prof, a, b).run();
        }
        fault("persist:entities");

        {
            Stmt ins(db_, "INSERT INTO facts VALUES(?, ?, ?, ?, ?, ?, ?, ?, ?, ?, NULL)");
            for (const auto& f : facts) {
                ins.reset();
                ins.bind(1, f.id)
                    .bind(2, prof)
                    .bind(3, f.memory)
                    .bind(4, f.subject)
                    .bind(5, f.predicate)
                    .bind(6, f.object)
                    .bind_blob(7, f.embedding)
                    .bind(8, f.context)
                    .bind(9, f.observed_at)
                    .bind(10, f.attribute ? 1 : 0)
                    .run();
            }
            Stmt sup(db_, "UPDATE facts SET superseded_by = ? WHERE profile_id = ? AND memory_id = ? AND subject = ? "
                          "AND predicate = ? AND superseded_by IS NULL");
            for (const auto& u : fact_updates) sup.with(u.by, prof, u.older, u.subject, u.predicate).run();
            Stmt edge(db_, "INSERT OR IGNORE INTO supersedes_edges VALUES(?, ?, ?, ?, ?)");
            for (const auto& s : out.supersedes) edge.with(prof, s.newer, s.older, s.kappa, s.discrepancy).run();
        }
        fault("persist:facts");

        {
            std::map<std::string, std::int64_t> tf;
            for (const auto& t : text::tokenize(content)) tf[t]++;
            Stmt ins(db_, "INSERT INTO bm25_postings VALUES(?, ?, ?, ?)");
            for (const auto& [term, f] : tf) ins.with(prof, term, rec.id, f).run();
        }
        fault("persist:bm25_postings");

        {
            Stmt get(db_, "SELECT attrs FROM profiles WHERE profile_id = ? AND entity_id = ?");
            Stmt put(db_, "INSERT INTO profiles VALUES(?, ?, ?) "
                          "ON CONFLICT(profile_id, entity_id) DO UPDATE SET attrs = excluded.attrs");
            for (const auto& f : facts) {
                if (!f.attribute) continue;
                get.with(prof, f.subject);
                json attrs = get.step() ? json::parse(get.text(0)) : json::object();
                attrs[f.predicate] = {{"value", f.object}, {"memory", f.memory}};
                put.with(prof, f.subject, attrs.dump()).run();
            }
        }
        fault("persist:profiles");
        tx.commit();
    }
    invalidate();
    fault("ingest:done");
    out.record = std::move(rec);
    return out;
}

std::vector<MemoryRecord> Store::load_memories(const std::string& profile, std::optional<MemoryId> only) const
{
    std::vector<MemoryRecord> out;
    std::map<MemoryId, std::size_t> at;
    {
        Stmt s(db_, only ? "SELECT m.id, m.content, m.mu, m.var, m.scene_id, m.t_created, m.t_accessed, m.n_access, "
                           "m.lifecycle, m.token_count, p.session_id, p.speaker, p.timestamp, p.source_document, "
                           "t.observed_at, t.refers_to, t.valid_from, t.valid_until, l.xi, l.last_step_time "
                           "FROM memories m JOIN provenance p ON p.memory_id = m.id "
                           "JOIN temporal_events t ON t.memory_id = m.id JOIN langevin_states l ON l.memory_id = m.id "
                           "WHERE m.profile_id = ? AND m.id = ?"
                         : "SELECT m.id, m.content, m.mu, m.var, m.scene_id, m.t_created, m.t_accessed, m.n_access, "
                           "m.lifecycle, m.token_count, p.session_id, p.speaker, p.timestamp, p.source_document, "
                           "t.observed_at, t.refers_to, t.valid_from, t.valid_until, l.xi, l.last_step_time "
                           "FROM memories m JOIN provenance p ON p.memory_id = m.id "
                           "JOIN temporal_events t ON t.memory_id = m.id JOIN langevin_states l ON l.memory_id = m.id "
                           "WHERE m.profile_id = ? ORDER BY m.id");
        if (only)
            s.with(profile, *only);
        else
            s.with(profile);
        while (s.step()) {
            MemoryRecord r;
            r.id = s.i64(0);
            r.profile_id = profile;
            r.content = s.text(1);
            r.embedding = info::GaussianEmbedding(s.vec(2), s.vec(3), opts_.similarity.var_floor);
            r.scene_id = s.opt_i64(4);
            r.t_created = s.i64(5);
            r.t_accessed = s.i64(6);
            r.n_access = static_cast<std::uint64_t>(s.i64(7));
            r.lifecycle = langevin::lifecycle_from_string(s.text(8));
            r.token_count = static_cast<std::uint32_t>(s.i64(9));
            r.provenance = {s.text(10), s.opt_text(11), s.i64(12), s.opt_text(13)};
            r.temporal = {r.id, s.i64(14), s.opt_i64(15), s.opt_i64(16), s.opt_i64(17)};
            r.langevin.xi = hyperbolic::BallPoint::clamped(s.vec(18));
            r.langevin.last_step_time = s.i64(19);
            at[r.id] = out.size();
            out.push_back(std::move(r));
        }
    }
    if (out.empty()) return out;
    {
        Stmt s(db_, only ? "SELECT memory_id, entity_id FROM entity_mentions WHERE profile_id = ? AND memory_id = ?"
                         : "SELECT memory_id, entity_id FROM entity_mentions WHERE profile_id = ?");
        if (only)
            s.with(profile, *only);
        else
            s.with(profile);
        while (s.step())
            if (const auto it = at.find(s.i64(0)); it != at.end()) out[it->second].entities.insert(s.text(1));
    }
    {
        Stmt s(db_, only ? "SELECT memory_id, id FROM facts WHERE profile_id = ? AND memory_id = ? ORDER BY id"
                         : "SELECT memory_id, id FROM facts WHERE profile_id = ? ORDER BY id");
        if (only)
            s.with(profile, *only);
        else
            s.with(profile);
        while (s.step())
            if (const auto it = at.find(s.i64(0)); it != at.end()) out[it->second].facts.push_back(s.i64(1));
    }
    return out;
}

std::optional<MemoryRecord> Store::find(std::string_view profile, MemoryId id) const
{
    std::lock_guard lk(mu_);
    require_open();
    auto v = load_memories(std::string(profile), id);
    if (v.empty()) return std::nullopt;
    return std::move(v.front());
}

std::vector<MemoryRecord> Store::memories(std::string_view profile) const
{
    std::lock_guard lk(mu_);
    require_open();
    return load_memories(std::string(profile), std::nullopt);
}

std::vector<FactRecord> Store::facts(std::string_view profile) const
{
    std::lock_guard lk(mu_);
    require_open();
    std::vector<FactRecord> out;
    Stmt s(db_, "SELECT id, memory_id, subject, predicate, object, embedding, context, observed_at, attribute, "
                "superseded_by FROM facts WHERE profile_id = ? ORDER BY id");
    s.with(std::string(profile));
    while (s.step()) {
        FactRecord f;
        f.id = s.i64(0);
        f.memory = s.i64(1);
        f.subject = s.text(2);
        f.predicate = s.text(3);
        f.object = s.text(4);
        f.embedding = s.vec(5);
        f.context = s.text(6);
        f.observed_at = s.i64(7);
        f.attribute = s.i64(8) != 0;
        f.superseded_by = s.opt_i64(9);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<SupersedesEdge> Store::supersedes_edges(std::string_view profile) const
{
    std::lock_guard lk(mu_);
    require_open();
    std::vector<SupersedesEdge> out;
    Stmt s(db_, "SELECT newer, older, kappa, discrepancy FROM supersedes_edges WHERE profile_id = ? "
                "ORDER BY newer, older");
    s.with(std::string(profile));
    while (s.step()) out.push_back({s.i64(0), s.i64(1), s.f64(2), s.f64(3)});
    return out;
}

std::vector<std::string> Store::profiles() const
{
    std::lock_guard lk(mu_);
    require_open();
    std::vector<std::string> out;
    Stmt s(db_, "SELECT DISTINCT profile_id FROM memories ORDER BY profile_id");
    while (s.step()) out.push_back(s.text(0));
    return out;
}

Stats Store::stats(std::string_view profile) const
{
    std::lock_guard lk(mu_);
    require_open();
    const std::string prof(profile);
    auto count = [&](const char* sql) {
        Stmt s(db_, sql);
        s.with(prof);
        s.step();
        return static_cast<std::size_t>(s.i64(0));
    };
    Stats st;
    st.memories = count("SELECT count(*) FROM memories WHERE profile_id = ?");
    st.facts = count("SELECT count(*) FROM facts WHERE profile_id = ?");
    st.superseded_facts = count("SELECT count(*) FROM facts WHERE profile_id = ? AND superseded_by IS NOT NULL");
    st.entities = count("SELECT count(*) FROM entities WHERE profile_id = ?");
    st.entity_edges = count("SELECT count(*) FROM entity_edges WHERE profile_id = ?");
    st.scenes = count("SELECT count(*) FROM scenes WHERE profile_id = ?");
    st.supersedes_edges = count("SELECT count(*) FROM supersedes_edges WHERE profile_id = ?");
    st.postings = count("SELECT count(*) FROM bm25_postings WHERE profile_id = ?");
    Stmt s(db_, "SELECT lifecycle, count(*) FROM memories WHERE profile_id = ? GROUP BY lifecycle");
    s.with(prof);
    while (s.step())
        st.lifecycle[static_cast<std::size_t>(langevin::lifecycle_from_string(s.text(0)))] =
            static_cast<std::size_t>(s.i64(1));
    return st;
}

MemoryRecord Store::record_access(std::string_view profile, MemoryId id, Timestamp now)
{
    std::lock_guard lk(mu_);
    require_writable();
    auto found = load_memories(std::string(profile), id);
    if (found.empty()) throw NotFound("no memory " + std::to_string(id) + " in profile " + std::string(profile));
    MemoryRecord r = std::move(found.front());
    r.n_access += 1;
    r.t_accessed = std::max(now, r.t_created);
    r.langevin = langevin::access_boost(r.langevin, opts_.access_boost);
    r.lifecycle = langevin::lifecycle_of(r.langevin.xi, opts_.thresholds);
    Transaction tx(db_);
    Stmt(db_, "UPDATE memories SET n_access = ?, t_accessed = ?, lifecycle = ? WHERE id = ? AND profile_id = ?")
        .with(r.n_access, r.t_accessed, langevin::to_string(r.lifecycle), r.id, std::string(profile))
        .run();
    Stmt(db_, "UPDATE langevin_states SET xi = ? WHERE memory_id = ?")
        .bind_blob(1, r.langevin.xi.coords())
        .bind(2, r.id)
        .run();
    tx.commit();
    invalidate();
    return r;
}

std::size_t Store::erase_memories_locked(const std::string& profile, const std::vector<MemoryId>& ids)
{
    std::size_t erased = 0;
    Stmt owned(db_, "SELECT count(*) FROM memories WHERE id = ? AND profile_id = ?");
    Stmt mentions(db_, "SELECT entity_id FROM entity_mentions WHERE profile_id = ? AND memory_id = ? ORDER BY entity_id");
    Stmt dec(db_, "UPDATE entity_edges SET count = count - 1 WHERE profile_id = ? AND a = ? AND b = ?");
    Stmt unlink(db_, "UPDATE facts SET superseded_by = NULL WHERE profile_id = ? AND superseded_by IN "
                     "(SELECT id FROM facts WHERE memory_id = ?)");
    Stmt attrs(db_, "SELECT entity_id, attrs FROM profiles WHERE profile_id = ?");
    Stmt put_attrs(db_, "UPDATE profiles SET attrs = ? WHERE profile_id = ? AND entity_id = ?");
    const char* deletes[] = {
        "DELETE FROM facts WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM entity_mentions WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM bm25_postings WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM temporal_events WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM langevin_states WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM provenance WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM observations WHERE profile_id = ? AND memory_id = ?",
        "DELETE FROM supersedes_edges WHERE profile_id = ?1 AND (newer = ?2 OR older = ?2)",
        "DELETE FROM memories WHERE profile_id = ? AND id = ?",
    };
    for (MemoryId id : ids) {
        owned.with(id, profile);
        owned.step();
        if (owned.i64(0) == 0) continue;

        std::vector<EntityId> ents;
        mentions.with(profile, id);
        while (mentions.step()) ents.push_back(mentions.text(0));
        for (std::size_t i = 0; i < ents.size(); ++i)
            for (std::size_t j = i + 1; j < ents.size(); ++j) {
                const auto [a, b] = ordered(ents[i], ents[j]);
                dec.with(profile, a, b).run();
            }
        unlink.with(profile, id).run();

        std::vector<std::pair<std::string, std::string>> changed;
        attrs.with(profile);
        while (attrs.step()) {
            json j = json::parse(attrs.text(1));
            bool touched = false;
            for (auto it = j.begin(); it != j.end();) {
                if (it.value().at("memory").get<MemoryId>() == id) {
                    it = j.erase(it);
                    touched = true;
                } else {
                    ++it;
                }
            }
            if (touched) changed.emplace_back(attrs.text(0), j.dump());
        }
        for (const auto& [entity, a] : changed) put_attrs.with(a, profile, entity).run();

        for (const char* sql : deletes) Stmt(db_, sql).with(profile, id).run();
        ++erased;
    }
    exec(db_, "DELETE FROM entity_edges WHERE count <= 0");
    Stmt(db_, "DELETE FROM profiles WHERE profile_id = ? AND attrs = '{}'").with(profile).run();
    Stmt(db_, "DELETE FROM entities WHERE profile_id = ?1 AND entity_id NOT IN "
              "(SELECT entity_id FROM entity_mentions WHERE profile_id = ?1)")
        .with(profile)
        .run();
    Stmt(db_, "DELETE FROM entity_edges WHERE profile_id = ?1 AND (a NOT IN (SELECT entity_id FROM entities WHERE "
              "profile_id = ?1) OR b NOT IN (SELECT entity_id FROM entities WHERE profile_id = ?1))")
        .with(profile)
        .run();
    Stmt(db_, "DELETE FROM scenes WHERE profile_id = ?1 AND id NOT IN "
              "(SELECT scene_id FROM memories WHERE profile_id = ?1 AND scene_id IS NOT NULL)")
        .with(profile)
        .run();
    return erased;
}

std::size_t Store::erase_memory(std::string_view profile, MemoryId id)
{
    std::lock_guard lk(mu_);
    require_writable();
    Transaction tx(db_);
    const std::size_t n = erase_memories_locked(std::string(profile), {id});
    tx.commit();
    invalidate();
    return n;
}

std::size_t Store::erase_profile(std::string_view profile)
{
    std::lock_guard lk(mu_);
    require_writable();
    const std::string prof(profile);
    Transaction tx(db_);
    Stmt c(db_, "SELECT count(*) FROM memories WHERE profile_id = ?");
    c.with(prof);
    c.step();
    const auto n = static_cast<std::size_t>(c.i64(0));
    for (const auto& t : kTables) {
        if (t == "config") continue;
        const std::string sql = "DELETE FROM " + t + " WHERE profile_id = ?";
        Stmt(db_, sql.c_str()).with(prof).run();
    }
    tx.commit();
    invalidate();
    return n;
}

std::size_t Store::erase_entity(std::string_view profile, const EntityId& entity)
{
    std::lock_guard lk(mu_);
    require_writable();
    const std::string prof(profile);
    Transaction tx(db_);
    std::vector<MemoryId> ids;
    Stmt s(db_, "SELECT memory_id FROM entity_mentions WHERE profile_id = ? AND entity_id = ? ORDER BY memory_id");
    s.with(prof, entity);
    while (s.step()) ids.push_back(s.i64(0));
    const std::size_t n = erase_memories_locked(prof, ids);
    Stmt(db_, "DELETE FROM profiles WHERE profile_id = ? AND entity_id = ?").with(prof, entity).run();
    Stmt(db_, "DELETE FROM entities WHERE profile_id = ? AND entity_id = ?").with(prof, entity).run();
    Stmt(db_, "DELETE FROM entity_edges WHERE profile_id = ?1 AND (a = ?2 OR b = ?2)").with(prof, entity).run();
    tx.commit();
    invalidate();
    return n;
}

langevin::MaintenanceReport Store::maintain(std::string_view profile, std::uint64_t steps, std::uint64_t seed,
                                            Timestamp now)
{
    std::lock_guard lk(mu_);
    require_writable();
    const std::string prof(profile);
    auto mems = load_memories(prof, std::nullopt);
    std::vector<langevin::MaintenanceItem> items;
    items.reserve(mems.size());
    for (const auto& m : mems) items.push_back({m.id, m.langevin, m.n_access, 0.0, m.lifecycle});
    auto report = langevin::maintenance_pass(items, opts_.potential, steps, seed, opts_.thresholds, now);
    if (steps == 0) return report;
    Transaction tx(db_);
    Stmt st(db_, "UPDATE langevin_states SET xi = ?, last_step_time = ? WHERE memory_id = ? AND profile_id = ?");
    Stmt lc(db_, "UPDATE memories SET lifecycle = ? WHERE id = ? AND profile_id = ?");
    for (const auto& it : items) {
        st.reset();
        st.bind_blob(1, it.state.xi.coords()).bind(2, it.state.last_step_time).bind(3, it.id).bind(4, prof).run();
        lc.with(langevin::to_string(it.lifecycle), it.id, prof).run();
    }
    tx.commit();
    invalidate();
    return report;
}

CheckReport Store::check(std::string_view profile)
{
    std::lock_guard lk(mu_);
    require_writable();
    const std::string prof(profile);
    const std::size_t dim = opts_.embedder->dimension();

    struct Row {
        FactId id;
        sheaf::FactObservation obs;
    };
    std::map<std::pair<EntityId, std::string>, std::vector<Row>> keys;
    {
        Stmt s(db_, "SELECT id, subject, predicate, context, memory_id, observed_at, embedding FROM facts "
                    "WHERE profile_id = ? AND superseded_by IS NULL ORDER BY id");
        s.with(prof);
        while (s.step()) keys[{s.text(1), s.text(2)}].push_back({s.i64(0), {s.text(3), s.i64(4), s.i64(5), s.vec(6)}});
    }

    CheckReport report;
    Transaction tx(db_);
    Stmt exists(db_, "SELECT count(*) FROM supersedes_edges WHERE profile_id = ? AND newer = ? AND older = ?");
    Stmt edge(db_, "INSERT INTO supersedes_edges VALUES(?, ?, ?, ?, ?)");
    Stmt sup(db_, "UPDATE facts SET superseded_by = ? WHERE profile_id = ? AND memory_id = ? AND subject = ? "
                  "AND predicate = ? AND superseded_by IS NULL");
    for (const auto& [key, rows] : keys) {
        std::vector<sheaf::FactObservation> obs;
        for (const auto& r : rows) obs.push_back(r.obs);
        const auto res = sheaf::resolve_key(obs, dim, opts_.tau);
        KeyCheck kc{key.first, key.second, res.initial, res.final, {}};
        for (const auto& d : res.directives) {
            FactId by = 0;
            for (const auto& r : rows)
                if (r.obs.memory == d.newer) by = std::max(by, r.id);
            sup.with(by, prof, d.older, key.first, key.second).run();
            exists.with(prof, d.newer, d.older);
            exists.step();
            if (exists.i64(0) != 0) continue;
            edge.with(prof, d.newer, d.older, d.kappa, d.discrepancy).run();
            kc.created.push_back({d.newer, d.older, d.kappa, d.discrepancy});
        }
        report.kappa = std::max(report.kappa, kc.initial.kappa);
        report.h1_dim += kc.initial.h1_dim;
        report.created += kc.created.size();
        report.keys.push_back(std::move(kc));
    }
    tx.commit();
    invalidate();
    return report;
}

void Store::compact()
{
    std::lock_guard lk(mu_);
    require_writable();
    exec(db_, "PRAGMA wal_checkpoint(TRUNCATE)");
    exec(db_, "VACUUM");
    invalidate();
}

void Store::export_jsonl(std::ostream& out) const
{
    std::lock_guard lk(mu_);
    require_open();
    exec(db_, "BEGIN");
    try {
        for (const auto& t : kTables) {
            const std::string sql = "SELECT * FROM " + t + " ORDER BY rowid";
            Stmt s(db_, sql.c_str());
            while (s.step()) {
                json row = json::object();
                for (int c = 0; c < s.columns(); ++c) {
                    switch (s.type(c)) {
                    case SQLITE_NULL: row[s.name(c)] = nullptr; break;
                    case SQLITE_INTEGER: row[s.name(c)] = s.i64(c); break;
                    case SQLITE_FLOAT: row[s.name(c)] = s.f64(c); break;
                    case SQLITE_BLOB: row[s.name(c)] = s.vec(c); break;
                    default: row[s.name(c)] = s.text(c); break;
                    }
                }
                out << json{{"table", t}, {"row", row}}.dump() << '\n';
            }
        }
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
    exec(db_, "COMMIT");
    if (!out) throw IoError("export: write failed");
}

std::size_t Store::import_jsonl(std::istream& in)
{
    std::lock_guard lk(mu_);
    require_writable();
    std::map<std::string, std::set<std::string>> columns;
    std::set<std::string> blob_columns = {"mu", "var", "xi", "embedding"};
    for (const auto& t : kTables) {
        const std::string sql = "PRAGMA table_info(" + t + ")";
        Stmt s(db_, sql.c_str());
        while (s.step()) columns[t].insert(s.text(1));
    }

    Transaction tx(db_);
    std::size_t rows = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "import line " + std::to_string(lineno);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError(where + ": " + e.what());
        }
        if (!rec.contains("table") || !rec["table"].is_string() || !rec.contains("row") || !rec["row"].is_object())
            throw IoError(where + ": expected {\"table\": ..., \"row\": {...}}");
        const std::string table = rec["table"];
        const auto cols = columns.find(table);
        if (cols == columns.end()) throw IoError(where + ": unknown table " + table);
        const json& row = rec["row"];

        if (table == "config") {
            // counters merge by maximum so later inserts never reuse an id
            Stmt(db_, "INSERT INTO config VALUES(?, ?) ON CONFLICT(key) DO UPDATE SET value = "
                      "CAST(max(CAST(value AS INTEGER), CAST(excluded.value AS INTEGER)) AS TEXT)")
                .with(row.at("key").get<std::string>(), row.at("value").get<std::string>())
                .run();
            ++rows;
            continue;
        }

        std::string names, marks;
        std::vector<const json*> values;
        std::vector<std::string> keys;
        for (const auto& [k, v] : row.items()) {
            if (!cols->second.contains(k)) throw IoError(where + ": unknown column " + table + "." + k);
            names += (names.empty() ? "" : ", ") + k;
            marks += marks.empty() ? "?" : ", ?";
            values.push_back(&v);
            keys.push_back(k);
        }
        const std::string sql = "INSERT INTO " + table + "(" + names + ") VALUES(" + marks + ")";
        Stmt ins(db_, sql.c_str());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const json& v = *values[i];
            const int c = static_cast<int>(i + 1);
            if (v.is_null())
                ins.bind(c, std::nullopt);
            else if (v.is_array() && blob_columns.contains(keys[i]))
                ins.bind_blob(c, v.get<Vector>());
            else if (v.is_number_integer())
                ins.bind(c, v.get<std::int64_t>());
            else if (v.is_number())
                ins.bind(c, v.get<double>());
            else if (v.is_string())
                ins.bind(c, v.get<std::string>());
            else
                throw IoError(where + ": unsupported value for " + keys[i]);
        }
        try {
            ins.run();
        } catch (const IoError& e) {
            throw IoError(where + ": " + e.what());
        }
        ++rows;
    }
    tx.commit();
    invalidate();
    return rows;
}

std::shared_ptr<Snapshot> Store::load_snapshot(const std::string& profile) const
{
    auto snap = std::make_shared<Snapshot>();
    snap->profile = profile;
    snap->memories = load_memories(profile, std::nullopt);
    for (std::size_t i = 0; i < snap->memories.size(); ++i) {
        const auto& m = snap->memories[i];
        snap->index[m.id] = i;
        snap->bm25.set_doc_length(m.id, m.token_count);
        snap->temporal.push_back(m.temporal);
        if (m.scene_id) snap->scenes[*m.scene_id].push_back(m.id);
        for (const auto& e : m.entities) snap->graph.add_mention(e, m.id);
        snap->latest_observed = std::max(snap->latest_observed, m.temporal.observed_at);
    }
    {
        Stmt s(db_, "SELECT term, memory_id, tf FROM bm25_postings WHERE profile_id = ?");
        s.with(profile);
        while (s.step()) snap->bm25.add_posting(s.text(0), s.i64(1), static_cast<std::uint32_t>(s.i64(2)));
    }
    {
        Stmt s(db_, "SELECT entity_id FROM entities WHERE profile_id = ?");
        s.with(profile);
        while (s.step()) {
            snap->known_entities.insert(s.text(0));
            snap->graph.add_node(s.text(0));
        }
    }
    {
        Stmt s(db_, "SELECT a, b, count FROM entity_edges WHERE profile_id = ? AND count > 0");
        s.with(profile);
        while (s.step()) snap->graph.add_edge(s.text(0), s.text(1), edge_weight(s.i64(2)));
    }
    {
        Stmt s(db_, "SELECT older FROM supersedes_edges WHERE profile_id = ?");
        s.with(profile);
        while (s.step()) snap->superseded.insert(s.i64(0));
    }
    {
        Stmt s(db_, "SELECT entity_id, attrs FROM profiles WHERE profile_id = ?");
        s.with(profile);
        while (s.step()) {
            auto& slot = snap->profiles[s.text(0)];
            const json attrs = json::parse(s.text(1));
            for (const auto& [k, v] : attrs.items())
                slot[k] = {v.at("value").get<std::string>(), v.at("memory").get<MemoryId>()};
        }
    }
    return snap;
}

std::shared_ptr<const Snapshot> Store::snapshot(std::string_view profile) const
{
    std::lock_guard lk(mu_);
    require_open();
    const std::int64_t v = data_version();
    if (v != cache_version_) {
        cache_.clear();
        cache_version_ = v;
    }
    const std::string prof(profile);
    if (const auto it = cache_.find(prof); it != cache_.end()) return it->second;
    exec(db_, "BEGIN");
    std::shared_ptr<const Snapshot> snap;
    try {
        snap = load_snapshot(prof);
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
    exec(db_, "COMMIT");
    cache_[prof] = snap;
    return snap;
}

} // namespace mnemo::store
