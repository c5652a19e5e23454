#pragma once

// Embedder and reranker interfaces. The built-ins (feature hashing, lookup
// table, lexical overlap) are deterministic and never touch the network; the
// remote variants speak a small JSON-over-HTTP protocol.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mnemo/common.hpp"

namespace mnemo::adapters {

inline constexpr std::size_t kDefaultDim = 384;

class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual Vector embed(std::string_view text) const = 0;
    virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const;
};

/// Signed feature hashing of the tokenizer output, L2-normalized.
class HashFeatureEmbedder final : public Embedder {
  public:
    explicit HashFeatureEmbedder(std::size_t dim = kDefaultDim);
    std::size_t dimension() const override { return dim_; }
    /// Throws std::invalid_argument when the text has no tokens.
    Vector embed(std::string_view text) const override;

  private:
    std::size_t dim_;
};

/// Exact-text lookup table. Misses throw NotFound.
class PrecomputedEmbedder final : public Embedder {
  public:
    PrecomputedEmbedder(std::size_t dim, std::unordered_map<std::string, Vector> table);
    /// JSON lines of {"text": ..., "vector": [...]}; dimension from the first row.
    static PrecomputedEmbedder from_file(const std::string& path);

    std::size_t dimension() const override { return dim_; }
    Vector embed(std::string_view text) const override;

  private:
    std::size_t dim_;
    std::unordered_map<std::string, Vector> table_;
};

class Reranker {
  public:
    virtual ~Reranker() = default;
    /// Raw pre-logistic score.
    virtual double score(std::string_view query, std::string_view doc) const = 0;
    virtual std::vector<double> score_batch(std::string_view query, const std::vector<std::string>& docs) const;
};

/// logit of the clamped fraction of query tokens present in the document.
class LexicalOverlapReranker final : public Reranker {
  public:
    static constexpr double kClamp = 1e-6;
    double score(std::string_view query, std::string_view doc) const override;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    /// Throws on connection failure or timeout.
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const std::map<std::string, std::string>& headers,
                              std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib client; plain http only.
class HttplibTransport final : public HttpTransport {
  public:
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::map<std::string, std::string>& headers,
                      std::chrono::milliseconds timeout) override;
};

/// Number of network requests attempted by HttplibTransport in this process.
std::uint64_t network_call_count();

class RemoteError : public Error {
  public:
    RemoteError(const std::string& what, int attempts, int status = 0)
        : Error(what + " (after " + std::to_string(attempts) + " attempt" + (attempts == 1 ? "" : "s") + ")"),
          attempts_(attempts), status_(status)
    {}
    int attempts() const { return attempts_; }
    int status() const { return status_; }

  private:
    int attempts_;
    int status_;
};

struct RemoteConfig {
    std::string url;
    std::chrono::milliseconds timeout{10000};
    int retries = 2;
    std::chrono::milliseconds backoff{250};
    /// Bearer token is read from this variable per request and never stored.
    std::string token_env = "MNEMO_REMOTE_TOKEN";
    std::ptrdiff_t max_in_flight = 4;
};

class RemoteClient {
  public:
    RemoteClient(RemoteConfig cfg, std::shared_ptr<HttpTransport> transport);
    const RemoteConfig& config() const { return cfg_; }

    /// POSTs with retry and exponential backoff; returns the 2xx body.
    std::string post_json(const std::string& body) const;

  private:
    RemoteConfig cfg_;
    std::shared_ptr<HttpTransport> transport_;
    std::unique_ptr<std::counting_semaphore<64>> in_flight_;
};

class RemoteEmbedder final : public Embedder {
  public:
    RemoteEmbedder(RemoteConfig cfg, std::size_t dim,
                   std::shared_ptr<HttpTransport> transport = std::make_shared<HttplibTransport>());
    std::size_t dimension() const override { return dim_; }
    Vector embed(std::string_view text) const override;
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const override;

  private:
    RemoteClient client_;
    std::size_t dim_;
};

class RemoteReranker final : public Reranker {
  public:
    explicit RemoteReranker(RemoteConfig cfg,
                            std::shared_ptr<HttpTransport> transport = std::make_shared<HttplibTransport>());
    double score(std::string_view query, std::string_view doc) const override;
    std::vector<double> score_batch(std::string_view query, const std::vector<std::string>& docs) const override;

  private:
    RemoteClient client_;
};

/// "hash", "hash:<dim>", "precomputed:<path>", "remote:<url>".
std::shared_ptr<Embedder> make_embedder(std::string_view spec, std::size_t dim = kDefaultDim);

/// "lexical", "remote:<url>", "off" (returns nullptr).
std::shared_ptr<Reranker> make_reranker(std::string_view spec);

double logistic(double x);
double logit(double p);

} // namespace mnemo::adapters
