#include "mnemo/adapters.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mnemo/text.hpp"

namespace mnemo::adapters {

namespace {

using json = nlohmann::json;

std::atomic<std::uint64_t> g_network_calls{0};

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Vector parse_vector(const json& j, std::size_t dim, int attempts)
{
    if (!j.is_array()) throw RemoteError("remote: vector is not an array", attempts);
    if (j.size() != dim) throw RemoteError("remote: expected dimension " + std::to_string(dim) + ", got " +
                                               std::to_string(j.size()),
                                           attempts);
    Vector v;
    v.reserve(dim);
    for (const auto& x : j) {
        if (!x.is_number()) throw RemoteError("remote: non-numeric vector entry", attempts);
        const double d = x.get<double>();
        if (!std::isfinite(d)) throw RemoteError("remote: non-finite vector entry", attempts);
        v.push_back(d);
    }
    return v;
}

} // namespace

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

std::vector<Vector> Embedder::embed_batch(const std::vector<std::string>& texts) const
{
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

HashFeatureEmbedder::HashFeatureEmbedder(std::size_t dim) : dim_(dim)
{
    if (dim == 0) throw std::invalid_argument("embedder dimension must be positive");
}

Vector HashFeatureEmbedder::embed(std::string_view s) const
{
    const auto tokens = text::tokenize(s);
    if (tokens.empty()) throw std::invalid_argument("hash embedder: text has no tokens");
    Vector v(dim_, 0.0);
    for (const auto& t : tokens) {
        const std::uint64_t h = fnv1a(t);
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        v[(h & 0x7fffffffffffffffULL) % dim_] += sign;
    }
    const double n = vec::norm(v);
    if (n == 0.0) {
        // every token cancelled out in a shared bucket; fall back to unsigned
        for (const auto& t : tokens) v[(fnv1a(t) & 0x7fffffffffffffffULL) % dim_] += 1.0;
        const double m = vec::norm(v);
        for (double& x : v) x /= m;
        return v;
    }
    for (double& x : v) x /= n;
    return v;
}

PrecomputedEmbedder::PrecomputedEmbedder(std::size_t dim, std::unordered_map<std::string, Vector> table)
    : dim_(dim), table_(std::move(table))
{
    for (const auto& [k, v] : table_) {
        if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
        if (!vec::all_finite(v)) throw std::invalid_argument("precomputed embedding for '" + k + "' is not finite");
    }
}

PrecomputedEmbedder PrecomputedEmbedder::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding table " + path);
    std::unordered_map<std::string, Vector> table;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(line);
            auto v = j.at("vector").get<Vector>();
            if (dim == 0) dim = v.size();
            table[j.at("text").get<std::string>()] = std::move(v);
        } catch (const json::exception& e) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (dim == 0) throw IoError("embedding table " + path + " is empty");
    return PrecomputedEmbedder(dim, std::move(table));
}

Vector PrecomputedEmbedder::embed(std::string_view text) const
{
    const auto it = table_.find(std::string(text));
    if (it == table_.end()) throw NotFound("no precomputed embedding for text: " + std::string(text.substr(0, 60)));
    return it->second;
}

std::vector<double> Reranker::score_batch(std::string_view query, const std::vector<std::string>& docs) const
{
    std::vector<double> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(score(query, d));
    return out;
}

double LexicalOverlapReranker::score(std::string_view query, std::string_view doc) const
{
    const auto q = text::tokenize(query);
    const std::set<std::string> qset(q.begin(), q.end());
    const auto d = text::tokenize(doc);
    const std::set<std::string> dset(d.begin(), d.end());
    std::size_t hit = 0;
    for (const auto& t : qset) hit += dset.contains(t) ? 1 : 0;
    const double frac = qset.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(qset.size());
    return logit(std::clamp(frac, kClamp, 1.0 - kClamp));
}

HttpResponse HttplibTransport::post(const std::string& url, const std::string& body,
                                    const std::map<std::string, std::string>& headers,
                                    std::chrono::milliseconds timeout)
{
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (origin.rfind("http://", 0) != 0) throw RemoteError("remote: only http:// endpoints are supported", 1);

    httplib::Client cli(origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    g_network_calls.fetch_add(1, std::memory_order_relaxed);
    auto res = cli.Post(path, h, body, "application/json");
    if (!res) throw std::runtime_error("http error: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

std::uint64_t network_call_count() { return g_network_calls.load(std::memory_order_relaxed); }

RemoteClient::RemoteClient(RemoteConfig cfg, std::shared_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport))
{
    if (cfg_.url.empty()) throw std::invalid_argument("remote adapter needs an endpoint url");
    if (cfg_.retries < 0) throw std::invalid_argument("remote retries must be >= 0");
    if (cfg_.max_in_flight < 1 || cfg_.max_in_flight > 64)
        throw std::invalid_argument("remote max_in_flight must be in [1, 64]");
    in_flight_ = std::make_unique<std::counting_semaphore<64>>(cfg_.max_in_flight);
}

std::string RemoteClient::post_json(const std::string& body) const
{
    std::map<std::string, std::string> headers;
    if (const char* tok = std::getenv(cfg_.token_env.c_str()); tok != nullptr && *tok != '\0')
        headers["Authorization"] = std::string("Bearer ") + tok;

    std::string last_error;
    int last_status = 0;
    const int max_attempts = cfg_.retries + 1;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(cfg_.backoff * (1 << (attempt - 2)));
        HttpResponse res;
        in_flight_->acquire();
        try {
            res = transport_->post(cfg_.url, body, headers, cfg_.timeout);
            in_flight_->release();
        } catch (const std::exception& e) {
            in_flight_->release();
            last_error = e.what();
            last_status = 0;
            continue;
        }
        if (res.status >= 200 && res.status < 300) return res.body;
        last_status = res.status;
        last_error = "remote: HTTP " + std::to_string(res.status);
        if (res.status < 500 && res.status != 429) throw RemoteError(last_error, attempt, res.status);
    }
    throw RemoteError(last_error, max_attempts, last_status);
}

RemoteEmbedder::RemoteEmbedder(RemoteConfig cfg, std::size_t dim, std::shared_ptr<HttpTransport> transport)
    : client_(std::move(cfg), std::move(transport)), dim_(dim)
{
    if (dim == 0) throw std::invalid_argument("embedder dimension must be positive");
}

Vector RemoteEmbedder::embed(std::string_view text) const
{
    return embed_batch({std::string(text)}).at(0);
}

std::vector<Vector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const
{
    if (texts.empty()) return {};
    const std::string body = client_.post_json(json{{"texts", texts}}.dump());
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw RemoteError(std::string("remote: malformed response: ") + e.what(), 1);
    }
    if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].size() != texts.size())
        throw RemoteError("remote: response has wrong 'vectors' shape", 1);
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& v : j["vectors"]) out.push_back(parse_vector(v, dim_, 1));
    return out;
}

RemoteReranker::RemoteReranker(RemoteConfig cfg, std::shared_ptr<HttpTransport> transport)
    : client_(std::move(cfg), std::move(transport))
{}

double RemoteReranker::score(std::string_view query, std::string_view doc) const
{
    return score_batch(query, {std::string(doc)}).at(0);
}

std::vector<double> RemoteReranker::score_batch(std::string_view query, const std::vector<std::string>& docs) const
{
    if (docs.empty()) return {};
    const std::string body = client_.post_json(json{{"query", std::string(query)}, {"docs", docs}}.dump());
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw RemoteError(std::string("remote: malformed response: ") + e.what(), 1);
    }
    if (!j.contains("scores") || !j["scores"].is_array() || j["scores"].size() != docs.size())
        throw RemoteError("remote: response has wrong 'scores' shape", 1);
    std::vector<double> out;
    for (const auto& s : j["scores"]) {
        if (!s.is_number() || !std::isfinite(s.get<double>())) throw RemoteError("remote: non-finite score", 1);
        out.push_back(s.get<double>());
    }
    return out;
}

std::shared_ptr<Embedder> make_embedder(std::string_view spec, std::size_t dim)
{
    if (spec == "hash") return std::make_shared<HashFeatureEmbedder>(dim);
    if (spec.starts_with("hash:")) return std::make_shared<HashFeatureEmbedder>(std::stoul(std::string(spec.substr(5))));
    if (spec.starts_with("precomputed:"))
        return std::make_shared<PrecomputedEmbedder>(PrecomputedEmbedder::from_file(std::string(spec.substr(12))));
    if (spec.starts_with("remote:")) return std::make_shared<RemoteEmbedder>(RemoteConfig{std::string(spec.substr(7))}, dim);
    throw std::invalid_argument("unknown embedder spec: " + std::string(spec));
}

std::shared_ptr<Reranker> make_reranker(std::string_view spec)
{
    if (spec == "off") return nullptr;
    if (spec == "lexical") return std::make_shared<LexicalOverlapReranker>();
    if (spec.starts_with("remote:")) return std::make_shared<RemoteReranker>(RemoteConfig{std::string(spec.substr(7))});
    throw std::invalid_argument("unknown reranker spec: " + std::string(spec));
}

} // namespace mnemo::adapters
