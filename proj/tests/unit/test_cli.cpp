#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI through the shell; stderr is discarded.
Run cli(const std::string& args)
{
    const std::string cmd = std::string(MNEMO_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    Run r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<nlohmann::json> lines(const std::string& s)
{
    std::vector<nlohmann::json> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    return out;
}

} // namespace

TEST_CASE("cli store, retrieve, stats and erase round trip")
{
    testing::TempDir dir;
    const std::string db = "--db " + dir.file("m.db");

    const auto stored = cli(db + " --format structured store 'Alice adopted a grey kitten named Pepper.'");
    REQUIRE(stored.code == 0);
    const auto rec = lines(stored.out).at(0);
    CHECK(rec.at("status") == "stored");
    const auto id = rec.at("id").get<std::int64_t>();

    CHECK(cli(db + " store 'ok ok ok ok'").code == 1);

    const auto got = cli(db + " --format structured retrieve 'Who adopted a kitten?'");
    REQUIRE(got.code == 0);
    const auto rows = lines(got.out);
    REQUIRE_FALSE(rows.empty());
    CHECK(rows[0].at("id") == id);

    const auto traced = cli(db + " --trace --disable entity retrieve 'grey kitten'");
    CHECK(traced.code == 0);
    CHECK(traced.out.find("channels:") != std::string::npos);
    CHECK(traced.out.find("entity=") == std::string::npos);

    CHECK(cli(db + " --profile other --format structured retrieve 'grey kitten'").out.empty());

    const auto st = lines(cli(db + " --format structured stats").out).at(0);
    CHECK(st.at("memories") == 1);

    CHECK(cli(db + " erase --memory " + std::to_string(id)).code == 0);
    CHECK(cli(db + " --format structured retrieve 'grey kitten'").out.empty());
}

TEST_CASE("cli exit codes for usage errors and missing stores")
{
    testing::TempDir dir;
    CHECK(cli("--db " + dir.file("none.db") + " retrieve 'anything here'").code == 3);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("--db " + dir.file("x.db") + " --disable quantum retrieve 'q'").code == 2);
    CHECK(cli("--format xml stats").code == 2);
}

TEST_CASE("cli analyze emits a csv table")
{
    const auto r = cli("analyze --n 100000 --d 384 --eps 0.05");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "n,d,eps,cap_fraction,expected_neighbors,cosine_snr,expected_contradictions,optimal_depth");
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
}

TEST_CASE("cli export and import reproduce the store")
{
    testing::TempDir dir;
    const std::string a = "--db " + dir.file("a.db");
    const std::string b = "--db " + dir.file("b.db");
    REQUIRE(cli(a + " store 'Bob repaired the old bicycle chain in the garage.'").code == 0);
    REQUIRE(cli(a + " store 'Carol baked sourdough bread for the fair.'").code == 0);
    REQUIRE(cli(a + " export --out " + dir.file("dump.jsonl")).code == 0);
    REQUIRE(cli(b + " import --in " + dir.file("dump.jsonl")).code == 0);
    CHECK(cli(a + " export").out == cli(b + " export").out);
}
