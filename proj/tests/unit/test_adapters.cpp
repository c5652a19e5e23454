#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "mnemo/adapters.hpp"
#include "mnemo/info_geometry.hpp"
#include "support.hpp"

using namespace mnemo;
using namespace mnemo::adapters;
using testing::Gen;

namespace {

/// Scripted transport: replays queued responses and records every request.
class FakeTransport final : public HttpTransport {
  public:
    struct Request {
        std::string url;
        std::string body;
        std::map<std::string, std::string> headers;
    };

    std::deque<HttpResponse> responses;
    int fail_connects = 0;
    std::vector<Request> requests;

    HttpResponse post(const std::string& url, const std::string& body, const std::map<std::string, std::string>& headers,
                      std::chrono::milliseconds) override
    {
        requests.push_back({url, body, headers});
        if (fail_connects > 0) {
            --fail_connects;
            throw std::runtime_error("connection refused");
        }
        if (responses.empty()) return {500, ""};
        auto r = responses.front();
        responses.pop_front();
        return r;
    }
};

RemoteConfig fast_config(const std::string& env = "MNEMO_TEST_TOKEN")
{
    RemoteConfig c;
    c.url = "http://127.0.0.1:9/embed";
    c.retries = 2;
    c.backoff = std::chrono::milliseconds(1);
    c.token_env = env;
    return c;
}

std::string random_word(Gen& g, char prefix)
{
    std::string w(1, prefix);
    for (int i = 0; i < 6; ++i) w.push_back(static_cast<char>('a' + g.index(26)));
    return w;
}

} // namespace

TEST_CASE("hash embedder is deterministic and unit norm")
{
    HashFeatureEmbedder e(64);
    const auto a = e.embed("the quick brown fox");
    CHECK(a == e.embed("The QUICK brown fox!"));
    CHECK(a.size() == 64);
    CHECK(vec::norm(a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(e.embed("? !"), std::invalid_argument);
    CHECK_THROWS_AS(HashFeatureEmbedder(0), std::invalid_argument);
    CHECK(e.embed_batch({"alpha beta", "gamma"}).size() == 2);
}

TEST_CASE("hash embeddings of disjoint texts are nearly orthogonal")
{
    Gen g(71);
    HashFeatureEmbedder e(1024);
    for (int i = 0; i < 200; ++i) {
        std::string a, b;
        for (int k = 0; k < 8; ++k) {
            a += random_word(g, 'a') + " ";
            b += random_word(g, 'b') + " ";
        }
        CHECK(std::abs(info::cosine_score(e.embed(a), e.embed(b))) < 0.2);
    }
}

TEST_CASE("precomputed embedder lookup and file loading")
{
    PrecomputedEmbedder p(2, {{"hi", {1.0, 0.0}}});
    CHECK(p.embed("hi") == Vector{1.0, 0.0});
    CHECK_THROWS_AS(p.embed("missing"), NotFound);
    CHECK_THROWS_AS(PrecomputedEmbedder(3, {{"x", {1.0}}}), DimensionMismatch);

    testing::TempDir dir;
    const auto path = dir.file("table.jsonl");
    {
        std::ofstream out(path);
        out << R"({"text": "one", "vector": [0.5, 0.5, 0.0]})" << "\n\n"
            << R"({"text": "two", "vector": [0.0, 1.0, 0.0]})" << "\n";
    }
    const auto loaded = PrecomputedEmbedder::from_file(path);
    CHECK(loaded.dimension() == 3);
    CHECK(loaded.embed("two") == Vector{0.0, 1.0, 0.0});
    CHECK_THROWS_AS(PrecomputedEmbedder::from_file(dir.file("absent.jsonl")), IoError);
    CHECK(make_embedder("precomputed:" + path)->dimension() == 3);
}

TEST_CASE("lexical overlap reranker")
{
    LexicalOverlapReranker r;
    CHECK(r.score("alpha beta", "alpha gamma") == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.score("alpha beta", "alpha beta") == doctest::Approx(logit(1.0 - 1e-6)).epsilon(1e-12));
    CHECK(r.score("alpha beta", "delta") == doctest::Approx(logit(1e-6)).epsilon(1e-12));
    CHECK(std::isfinite(r.score("", "anything")));
    CHECK(logistic(logit(0.3)) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("adapter factories")
{
    CHECK(make_embedder("hash")->dimension() == kDefaultDim);
    CHECK(make_embedder("hash:128")->dimension() == 128);
    CHECK_THROWS_AS(make_embedder("word2vec"), std::invalid_argument);
    CHECK(make_reranker("off") == nullptr);
    CHECK(make_reranker("lexical") != nullptr);
    CHECK_THROWS_AS(make_reranker("bogus"), std::invalid_argument);
    CHECK(make_reranker("remote:http://127.0.0.1:9/r") != nullptr);
}

TEST_CASE("remote embedder parses batches and validates dimensions")
{
    auto t = std::make_shared<FakeTransport>();
    RemoteEmbedder e(fast_config(), 2, t);
    CHECK(e.embed_batch({}).empty());
    CHECK(t->requests.empty());

    t->responses.push_back({200, R"({"vectors": [[1, 0], [0, 1]]})"});
    const auto vs = e.embed_batch({"a", "b"});
    CHECK(vs == std::vector<Vector>{{1.0, 0.0}, {0.0, 1.0}});
    REQUIRE(t->requests.size() == 1);
    CHECK(nlohmann::json::parse(t->requests[0].body).at("texts").size() == 2);

    t->responses.push_back({200, R"({"vectors": [[1, 0, 0]]})"});
    CHECK_THROWS_AS(e.embed("x"), RemoteError);
    t->responses.push_back({200, R"({"vectors": [[1, 0], [1, 0]]})"});
    CHECK_THROWS_AS(e.embed("x"), RemoteError);
    t->responses.push_back({200, "not json"});
    CHECK_THROWS_AS(e.embed("x"), RemoteError);
}

TEST_CASE("remote client retries transient failures with a bounded attempt count")
{
    auto t = std::make_shared<FakeTransport>();
    RemoteEmbedder e(fast_config(), 1, t);

    t->fail_connects = 1;
    t->responses.push_back({503, ""});
    t->responses.push_back({200, R"({"vectors": [[0.25]]})"});
    CHECK(e.embed("x") == Vector{0.25});
    CHECK(t->requests.size() == 3);

    t->requests.clear();
    t->fail_connects = 10;
    try {
        e.embed("x");
        FAIL("expected RemoteError");
    } catch (const RemoteError& err) {
        CHECK(err.attempts() == 3);
        CHECK(std::string(err.what()).find("after 3 attempts") != std::string::npos);
    }
    CHECK(t->requests.size() == 3);

    // Client errors other than 429 are not retried.
    t->requests.clear();
    t->fail_connects = 0;
    t->responses.push_back({400, "bad"});
    try {
        e.embed("x");
        FAIL("expected RemoteError");
    } catch (const RemoteError& err) {
        CHECK(err.status() == 400);
        CHECK(err.attempts() == 1);
    }
    CHECK(t->requests.size() == 1);
}

TEST_CASE("remote credentials come from the environment on every request")
{
    const char* env = "MNEMO_TEST_TOKEN_ROTATE";
    ::unsetenv(env);
    auto t = std::make_shared<FakeTransport>();
    RemoteReranker r(fast_config(env), t);

    t->responses.push_back({200, R"({"scores": [0.5]})"});
    CHECK(r.score("q", "d") == 0.5);
    CHECK_FALSE(t->requests.back().headers.contains("Authorization"));

    ::setenv(env, "first", 1);
    t->responses.push_back({200, R"({"scores": [1.5, -2]})"});
    CHECK(r.score_batch("q", {"a", "b"}) == std::vector<double>{1.5, -2.0});
    CHECK(t->requests.back().headers.at("Authorization") == "Bearer first");

    ::setenv(env, "second", 1);
    t->responses.push_back({200, R"({"scores": [0]})"});
    r.score("q", "d");
    CHECK(t->requests.back().headers.at("Authorization") == "Bearer second");

    ::unsetenv(env);
    t->responses.push_back({200, R"({"scores": [0]})"});
    r.score("q", "d");
    CHECK_FALSE(t->requests.back().headers.contains("Authorization"));
    // The config carries only the variable name.
    CHECK(fast_config(env).token_env == env);

    t->responses.push_back({200, R"({"scores": [1, 2]})"});
    CHECK_THROWS_AS(r.score("q", "d"), RemoteError);
}

TEST_CASE("remote client configuration validation")
{
    auto t = std::make_shared<FakeTransport>();
    RemoteConfig c = fast_config();
    c.url.clear();
    CHECK_THROWS_AS(RemoteClient(c, t), std::invalid_argument);
    c = fast_config();
    c.retries = -1;
    CHECK_THROWS_AS(RemoteClient(c, t), std::invalid_argument);
    c = fast_config();
    c.max_in_flight = 0;
    CHECK_THROWS_AS(RemoteClient(c, t), std::invalid_argument);
}

TEST_CASE("the httplib transport refuses non-http endpoints without network access")
{
    HttplibTransport h;
    const auto before = network_call_count();
    CHECK_THROWS_AS(h.post("https://example.invalid/x", "{}", {}, std::chrono::milliseconds(10)), RemoteError);
    CHECK(network_call_count() == before);
}
