// mnemo command-line front door. Exit codes: 0 success, 1 domain rejection,
// 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mnemo/analysis.hpp"
#include "mnemo/bench.hpp"
#include "mnemo/fusion.hpp"
#include "mnemo/store.hpp"
#include "mnemo/text.hpp"

namespace {

using json = nlohmann::json;
using namespace mnemo;

enum Exit { kOk = 0, kRejected = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string db = "mnemo.db";
    std::string profile = "default";
    std::size_t top_k = 20;
    std::vector<std::string> disable;
    bool trace = false;
    std::string format = "human";
    std::uint64_t seed = 7;
    std::string embedder = "hash";
    std::string reranker = "off";

    bool structured() const { return format == "structured"; }
    fusion::Ablation ablation() const
    {
        std::string joined;
        for (const auto& d : disable) joined += (joined.empty() ? "" : ",") + d;
        return fusion::Ablation::parse(joined).normalized();
    }
    store::StoreOptions store_options(bool read_only) const
    {
        store::StoreOptions o;
        o.embedder = adapters::make_embedder(embedder);
        o.read_only = read_only;
        return o;
    }
};

void emit(const json& j) { std::cout << j.dump() << '\n'; }

std::string snippet(const std::string& s, std::size_t n = 72)
{
    std::string out;
    for (char c : s) out += (c == '\n' || c == '\t') ? ' ' : c;
    return out.size() <= n ? out : out.substr(0, n - 3) + "...";
}

std::unique_ptr<store::Store> open_existing(const Config& cfg, bool read_only)
{
    if (cfg.db != ":memory:" && !std::filesystem::exists(cfg.db)) throw IoError("no such database: " + cfg.db);
    return std::make_unique<store::Store>(cfg.db, cfg.store_options(read_only));
}

int cmd_store(const Config& cfg, const std::vector<std::string>& content, const std::string& file,
              const std::string& session, const std::string& speaker, std::optional<Timestamp> at)
{
    std::vector<std::string> items;
    std::string source;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw IoError("cannot read " + file);
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) items.push_back(line);
        source = std::filesystem::path(file).filename().string();
    } else {
        std::string joined;
        for (const auto& c : content) joined += (joined.empty() ? "" : " ") + c;
        if (joined.empty()) throw UsageError("nothing to store: give content or --file");
        items.push_back(joined);
    }

    store::Store st(cfg.db, cfg.store_options(false));
    const Timestamp base = at.value_or(std::chrono::duration_cast<std::chrono::seconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count());
    int code = kOk;
    for (std::size_t i = 0; i < items.size(); ++i) {
        store::StoreMetadata meta;
        meta.timestamp = base + static_cast<Timestamp>(i);
        meta.session_id = session;
        if (!speaker.empty()) meta.speaker = speaker;
        if (!source.empty()) meta.source_document = source;
        const auto out = st.store(cfg.profile, items[i], meta);
        if (out.ok()) {
            if (cfg.structured()) {
                json sup = json::array();
                for (const auto& e : out.supersedes) sup.push_back({{"older", e.older}, {"kappa", e.kappa}});
                emit({{"status", "stored"}, {"id", out.record->id}, {"line", i + 1}, {"supersedes", sup}});
            } else {
                std::cout << out.record->id << '\n';
                for (const auto& e : out.supersedes)
                    std::cout << "  supersedes " << e.older << " (kappa " << e.kappa << ")\n";
            }
        } else {
            code = kRejected;
            const auto& r = *out.rejection;
            if (cfg.structured())
                emit({{"status", "rejected"}, {"line", i + 1}, {"reason", r.gate}, {"entropy_bits", r.entropy_bits},
                      {"tokens", r.tokens}});
            else
                std::cerr << "rejected: " << r.gate << " (entropy " << r.entropy_bits << " bits, " << r.tokens
                          << " tokens)\n";
        }
    }
    return code;
}

json ranks_json(const std::array<std::optional<std::size_t>, fusion::kChannels>& ranks)
{
    json j = json::object();
    for (std::size_t c = 0; c < fusion::kChannels; ++c)
        if (ranks[c]) j[std::string(fusion::to_string(static_cast<fusion::Channel>(c)))] = *ranks[c];
    return j;
}

int cmd_retrieve(const Config& cfg, const std::vector<std::string>& words, bool record)
{
    std::string query;
    for (const auto& w : words) query += (query.empty() ? "" : " ") + w;
    if (query.empty()) throw UsageError("empty query");

    auto st = open_existing(cfg, !record);
    fusion::RetrieveOptions opts;
    opts.top_k = cfg.top_k;
    opts.ablation = cfg.ablation();
    opts.reranker = adapters::make_reranker(cfg.reranker);
    const auto res = fusion::retrieve(*st, cfg.profile, query, opts);

    if (cfg.trace) {
        const auto& tr = res.trace;
        if (cfg.structured()) {
            json ch = json::object();
            for (const auto& [c, list] : tr.channels) {
                json l = json::array();
                for (const auto& rc : list) l.push_back({rc.id, rc.score});
                ch[std::string(fusion::to_string(c))] = l;
            }
            json stages = json::array();
            for (const auto& s : tr.stages) {
                json head = json::array();
                for (const auto& [id, sc] : s.head) head.push_back({id, sc});
                stages.push_back({{"name", s.name}, {"in", s.in}, {"out", s.out}, {"millis", s.millis}, {"head", head}});
            }
            emit({{"trace", {{"query_type", fusion::to_string(tr.plan.type)},
                             {"alpha", tr.plan.alpha},
                             {"entities", tr.plan.entities},
                             {"ablation", opts.ablation.describe()},
                             {"profile_hit", tr.profile_hit ? json(*tr.profile_hit) : json(nullptr)},
                             {"entity_coverage", tr.entity_coverage},
                             {"channels", ch},
                             {"stages", stages}}}});
        } else {
            std::cout << "query type: " << fusion::to_string(tr.plan.type) << " (alpha " << tr.plan.alpha << ")\n";
            std::cout << "ablation: " << opts.ablation.describe() << '\n';
            std::cout << "channels:";
            for (const auto& [c, list] : tr.channels) std::cout << ' ' << fusion::to_string(c) << '=' << list.size();
            std::cout << '\n';
            for (const auto& s : tr.stages) {
                std::cout << "  " << std::left << std::setw(16) << s.name << std::right << " in " << std::setw(4) << s.in
                          << " out " << std::setw(4) << s.out << "  " << std::fixed << std::setprecision(2) << s.millis
                          << " ms";
                std::cout.unsetf(std::ios::floatfield);
                for (const auto& [id, sc] : s.head) std::cout << "  " << id << ':' << std::setprecision(4) << sc;
                std::cout << std::setprecision(6) << '\n';
            }
            std::cout << "entity coverage: " << tr.entity_coverage << '\n';
        }
    }

    const Timestamp now = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
    std::size_t rank = 0;
    for (const auto& r : res.results) {
        ++rank;
        if (record) st->record_access(cfg.profile, r.id, now);
        if (cfg.structured()) {
            emit({{"rank", rank},
                  {"id", r.id},
                  {"score", r.score},
                  {"wrrf", r.wrrf},
                  {"ce", r.ce ? json(*r.ce) : json(nullptr)},
                  {"origin", fusion::to_string(r.origin)},
                  {"ranks", ranks_json(r.ranks)},
                  {"lifecycle", langevin::to_string(r.lifecycle)},
                  {"superseded", r.superseded},
                  {"content", r.content}});
        } else {
            std::cout << std::setw(3) << rank << "  " << std::fixed << std::setprecision(6) << r.score << "  "
                      << std::setw(6) << r.id << "  " << snippet(r.content) << '\n';
            std::cout.unsetf(std::ios::floatfield);
        }
    }
    return kOk;
}

int cmd_maintain(const Config& cfg, std::uint64_t steps, std::optional<Timestamp> at)
{
    store::Store st(cfg.db, cfg.store_options(false));
    const Timestamp now = at.value_or(std::chrono::duration_cast<std::chrono::seconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
    const auto rep = st.maintain(cfg.profile, steps, cfg.seed, now);
    const char* names[] = {"active", "warm", "cold", "archived"};
    if (cfg.structured()) {
        json before = json::object();
        json after = json::object();
        for (std::size_t i = 0; i < 4; ++i) {
            before[names[i]] = rep.before[i];
            after[names[i]] = rep.after[i];
        }
        emit({{"steps", rep.steps}, {"seed", cfg.seed}, {"before", before}, {"after", after},
              {"transitions", rep.transitions.size()}});
        for (const auto& t : rep.transitions)
            emit({{"transition", t.id}, {"from", langevin::to_string(t.from)}, {"to", langevin::to_string(t.to)}});
    } else {
        std::cout << "steps " << rep.steps << ", seed " << cfg.seed << ", transitions " << rep.transitions.size() << '\n';
        for (std::size_t i = 0; i < 4; ++i)
            std::cout << "  " << std::left << std::setw(9) << names[i] << std::right << std::setw(7) << rep.before[i]
                      << " -> " << rep.after[i] << '\n';
    }
    return kOk;
}

int cmd_check(const Config& cfg)
{
    store::Store st(cfg.db, cfg.store_options(false));
    const auto rep = st.check(cfg.profile);
    std::size_t offending = 0;
    for (const auto& k : rep.keys) offending += k.initial.offending_edges.size();
    if (cfg.structured()) {
        emit({{"kappa", rep.kappa}, {"h1_dim", rep.h1_dim}, {"keys", rep.keys.size()}, {"offending_edges", offending},
              {"created", rep.created}});
        for (const auto& k : rep.keys) {
            for (const auto& e : k.initial.offending_edges)
                emit({{"offending", {{"subject", k.subject}, {"predicate", k.predicate}, {"u", e.u}, {"v", e.v},
                                     {"discrepancy", e.discrepancy}}}});
            for (const auto& e : k.created)
                emit({{"supersedes", {{"newer", e.newer}, {"older", e.older}, {"kappa", e.kappa}}}});
        }
    } else {
        std::cout << "kappa " << rep.kappa << ", h1 " << rep.h1_dim << ", keys " << rep.keys.size()
                  << ", offending edges " << offending << ", supersedes created " << rep.created << '\n';
        for (const auto& k : rep.keys) {
            for (const auto& e : k.initial.offending_edges)
                std::cout << "  offending " << k.subject << '/' << k.predicate << "  " << e.u << " -- " << e.v
                          << "  " << e.discrepancy << '\n';
            for (const auto& e : k.created)
                std::cout << "  supersedes " << e.newer << " -> " << e.older << " (kappa " << e.kappa << ")\n";
        }
    }
    return kOk;
}

int cmd_stats(const Config& cfg)
{
    auto st = open_existing(cfg, true);
    const auto s = st->stats(cfg.profile);
    if (cfg.structured()) {
        emit({{"profile", cfg.profile}, {"memories", s.memories}, {"facts", s.facts},
              {"superseded_facts", s.superseded_facts}, {"entities", s.entities}, {"entity_edges", s.entity_edges},
              {"scenes", s.scenes}, {"supersedes_edges", s.supersedes_edges}, {"postings", s.postings},
              {"lifecycle", {{"active", s.lifecycle[0]}, {"warm", s.lifecycle[1]}, {"cold", s.lifecycle[2]},
                             {"archived", s.lifecycle[3]}}}});
    } else {
        std::cout << "profile " << cfg.profile << "\n  memories " << s.memories << "\n  facts " << s.facts
                  << " (superseded " << s.superseded_facts << ")\n  entities " << s.entities << " (edges "
                  << s.entity_edges << ")\n  scenes " << s.scenes << "\n  supersedes edges " << s.supersedes_edges
                  << "\n  postings " << s.postings << "\n  lifecycle active " << s.lifecycle[0] << ", warm "
                  << s.lifecycle[1] << ", cold " << s.lifecycle[2] << ", archived " << s.lifecycle[3] << '\n';
    }
    return kOk;
}

int cmd_analyze(const std::vector<std::uint64_t>& ns, const std::vector<int>& ds, const std::vector<double>& epss,
                double p_c, double branching, std::uint64_t k_rel)
{
    std::cout << "n,d,eps,cap_fraction,expected_neighbors,cosine_snr,expected_contradictions,optimal_depth\n";
    std::cout << std::setprecision(10);
    for (auto n : ns)
        for (int d : ds)
            for (double e : epss) {
                std::cout << n << ',' << d << ',' << e << ',' << analysis::cap_fraction(d, e) << ','
                          << analysis::expected_neighbor_count(n, d, e) << ','
                          << analysis::cosine_snr(n, k_rel, d, e) << ','
                          << analysis::expected_contradictions(n, p_c) << ','
                          << analysis::optimal_depth(n, branching) << '\n';
            }
    return kOk;
}

int cmd_bench(const Config& cfg, std::size_t memories, std::size_t queries, std::uint64_t steps,
              std::vector<std::string> configs)
{
    bench::CorpusSpec spec;
    spec.memories = memories;
    spec.queries = queries;
    spec.seed = cfg.seed;
    spec.maintenance_steps = steps;
    const auto corpus = bench::generate(spec);
    store::Store st(":memory:", cfg.store_options(false));
    const auto ids = bench::load(st, "bench", corpus, spec);

    if (configs.empty())
        configs = {"full",   "all_math_off", "fisher_off", "sheaf_off",        "langevin_off",
                   "bm25_off", "entity_off", "temporal_off", "cross_encoder_off"};
    if (!cfg.structured())
        std::cout << std::left << std::setw(34) << "config" << std::right << std::setw(9) << "ndcg@10"
                  << std::setw(9) << "hit@20" << std::setw(9) << "mrr" << std::setw(10) << "channels" << '\n';
    for (const auto& name : configs) {
        fusion::RetrieveOptions opts;
        opts.top_k = std::max<std::size_t>(cfg.top_k, 20);
        opts.reranker = adapters::make_reranker(cfg.reranker);
        opts.ablation = fusion::Ablation::parse(name == "full" ? "" : name).normalized();
        const auto m = bench::evaluate(st, "bench", corpus, ids, name, opts);
        if (cfg.structured())
            emit({{"config", name}, {"ablation", opts.ablation.describe()}, {"queries", m.queries},
                  {"ndcg10", m.ndcg10}, {"hit20", m.hit20}, {"mrr", m.mrr}, {"channels", m.channels},
                  {"seed", cfg.seed}});
        else
            std::cout << std::left << std::setw(34) << name << std::right << std::fixed << std::setprecision(4)
                      << std::setw(9) << m.ndcg10 << std::setw(9) << m.hit20 << std::setw(9) << m.mrr
                      << std::setw(10) << m.channels << '\n';
        std::cout.unsetf(std::ios::floatfield);
    }
    return kOk;
}

int cmd_export(const Config& cfg, const std::string& out_path)
{
    auto st = open_existing(cfg, true);
    if (out_path.empty() || out_path == "-") {
        st->export_jsonl(std::cout);
        return kOk;
    }
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    st->export_jsonl(out);
    return kOk;
}

int cmd_import(const Config& cfg, const std::string& in_path)
{
    store::Store st(cfg.db, cfg.store_options(false));
    std::size_t n = 0;
    if (in_path.empty() || in_path == "-") {
        n = st.import_jsonl(std::cin);
    } else {
        std::ifstream in(in_path);
        if (!in) throw IoError("cannot read " + in_path);
        n = st.import_jsonl(in);
    }
    if (cfg.structured())
        emit({{"imported", n}});
    else
        std::cout << "imported " << n << " rows\n";
    return kOk;
}

int cmd_erase(const Config& cfg, std::optional<MemoryId> memory, const std::string& entity, bool profile)
{
    const int chosen = (memory ? 1 : 0) + (entity.empty() ? 0 : 1) + (profile ? 1 : 0);
    if (chosen != 1) throw UsageError("erase needs exactly one of --memory, --entity, --all");
    auto st = open_existing(cfg, false);
    std::size_t n = 0;
    if (memory)
        n = st->erase_memory(cfg.profile, *memory);
    else if (!entity.empty())
        n = st->erase_entity(cfg.profile, text::canonical_entity(entity));
    else
        n = st->erase_profile(cfg.profile);
    if (cfg.structured())
        emit({{"erased", n}});
    else
        std::cout << "erased " << n << " memories\n";
    return kOk;
}

int cmd_access(const Config& cfg, MemoryId id, std::optional<Timestamp> at)
{
    auto st = open_existing(cfg, false);
    const Timestamp now = at.value_or(std::chrono::duration_cast<std::chrono::seconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
    const auto m = st->record_access(cfg.profile, id, now);
    if (cfg.structured())
        emit({{"id", m.id}, {"n_access", m.n_access}, {"lifecycle", langevin::to_string(m.lifecycle)}});
    else
        std::cout << m.id << " accesses " << m.n_access << ", " << langevin::to_string(m.lifecycle) << '\n';
    return kOk;
}

int cmd_compact(const Config& cfg)
{
    auto st = open_existing(cfg, false);
    st->compact();
    if (!cfg.structured()) std::cout << "compacted " << cfg.db << '\n';
    else emit({{"compacted", cfg.db}});
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mnemo: local-first agent memory engine"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--db", cfg.db, "Database file")->capture_default_str();
    app.add_option("--profile", cfg.profile, "Profile id")->capture_default_str();
    app.add_option("--top-k", cfg.top_k, "Results to return")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--disable", cfg.disable,
                   "Components to disable: fisher, sheaf, langevin, bm25, entity, temporal, cross_encoder, all_math")
        ->delimiter(',')
        ->check(CLI::Validator(
            [](const std::string& name) {
                try {
                    fusion::Ablation::parse(name);
                    return std::string();
                } catch (const std::invalid_argument& e) {
                    return std::string(e.what());
                }
            },
            "COMPONENT"));
    app.add_flag("--trace", cfg.trace, "Print per-stage retrieval traces");
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"human", "structured"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for maintenance and bench")->capture_default_str();
    app.add_option("--embedder", cfg.embedder, "hash | hash:<d> | precomputed:<path> | remote:<url>")
        ->capture_default_str();
    app.add_option("--reranker", cfg.reranker, "lexical | remote:<url> | off")->capture_default_str();

    std::vector<std::string> content;
    std::string file, session = "cli", speaker;
    std::optional<Timestamp> at;
    auto* store_cmd = app.add_subcommand("store", "Store one memory, or one per line of --file");
    store_cmd->add_option("content", content, "Memory text");
    store_cmd->add_option("--file", file, "Read one memory per non-empty line");
    store_cmd->add_option("--session", session, "Session id")->capture_default_str();
    store_cmd->add_option("--speaker", speaker, "Speaker");
    store_cmd->add_option("--at", at, "Timestamp (unix seconds); defaults to now");

    std::vector<std::string> query;
    bool record = false;
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Ranked retrieval");
    retrieve_cmd->add_option("query", query, "Query text")->required();
    retrieve_cmd->add_flag("--record-access", record, "Count returned memories as accessed");

    std::uint64_t steps = 100;
    auto* maintain_cmd = app.add_subcommand("maintain", "Run a Langevin maintenance pass");
    maintain_cmd->add_option("--steps", steps, "Integration steps")->capture_default_str();
    maintain_cmd->add_option("--at", at, "Wall-clock time of the pass (unix seconds)");

    auto* check_cmd = app.add_subcommand("check", "Full-store consistency sweep");
    auto* stats_cmd = app.add_subcommand("stats", "Profile statistics");

    std::vector<std::uint64_t> ns{100000};
    std::vector<int> ds{384};
    std::vector<double> epss{0.05};
    double p_c = 1e-6, branching = 2.0;
    std::uint64_t k_rel = 10;
    auto* analyze_cmd = app.add_subcommand("analyze", "Scale-analysis quantities as CSV");
    analyze_cmd->add_option("--n", ns, "Store sizes")->delimiter(',');
    analyze_cmd->add_option("--d", ds, "Dimensions")->delimiter(',');
    analyze_cmd->add_option("--eps", epss, "Cosine-distance radii")->delimiter(',');
    analyze_cmd->add_option("--p-contradiction", p_c, "Pairwise contradiction probability")->capture_default_str();
    analyze_cmd->add_option("--branching", branching, "Hierarchy branching factor")->capture_default_str();
    analyze_cmd->add_option("--relevant", k_rel, "Relevant memories for the SNR")->capture_default_str();

    std::size_t bench_memories = 1000, bench_queries = 100;
    std::uint64_t bench_steps = bench::CorpusSpec{}.maintenance_steps;
    std::vector<std::string> configs;
    auto* bench_cmd = app.add_subcommand("bench", "Synthetic benchmark across ablation configs");
    bench_cmd->add_option("--memories", bench_memories)->capture_default_str();
    bench_cmd->add_option("--queries", bench_queries)->capture_default_str();
    bench_cmd->add_option("--steps", bench_steps, "Maintenance steps before access replay")->capture_default_str();
    bench_cmd->add_option("--config", configs, "Ablation set, e.g. full or fisher_off,sheaf_off (repeatable)");

    std::string path;
    auto* export_cmd = app.add_subcommand("export", "Export every table as JSON lines");
    export_cmd->add_option("--out", path, "Output file, - for stdout");
    auto* import_cmd = app.add_subcommand("import", "Import exported JSON lines");
    import_cmd->add_option("--in", path, "Input file, - for stdin");

    std::optional<MemoryId> erase_id;
    std::string entity;
    bool erase_all = false;
    auto* erase_cmd = app.add_subcommand("erase", "Erase a memory, an entity or the whole profile");
    erase_cmd->add_option("--memory", erase_id, "Memory id");
    erase_cmd->add_option("--entity", entity, "Entity name");
    erase_cmd->add_flag("--all", erase_all, "Erase every memory of the profile");

    MemoryId access_id = 0;
    auto* access_cmd = app.add_subcommand("access", "Record an access to a memory");
    access_cmd->add_option("id", access_id)->required();
    access_cmd->add_option("--at", at, "Access time (unix seconds)");

    auto* compact_cmd = app.add_subcommand("compact", "Checkpoint and vacuum the database");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*store_cmd) return cmd_store(cfg, content, file, session, speaker, at);
        if (*retrieve_cmd) return cmd_retrieve(cfg, query, record);
        if (*maintain_cmd) return cmd_maintain(cfg, steps, at);
        if (*check_cmd) return cmd_check(cfg);
        if (*stats_cmd) return cmd_stats(cfg);
        if (*analyze_cmd) return cmd_analyze(ns, ds, epss, p_c, branching, k_rel);
        if (*bench_cmd) return cmd_bench(cfg, bench_memories, bench_queries, bench_steps, configs);
        if (*export_cmd) return cmd_export(cfg, path);
        if (*import_cmd) return cmd_import(cfg, path);
        if (*erase_cmd) return cmd_erase(cfg, erase_id, entity, erase_all);
        if (*access_cmd) return cmd_access(cfg, access_id, at);
        if (*compact_cmd) return cmd_compact(cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NotFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRejected;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
