#include "mnemo/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "mnemo/text.hpp"

namespace mnemo::bench {

namespace {

constexpr std::array kPeople = {
    "Alice",   "Bruno",   "Carmen",  "Dmitri",  "Elena",   "Farid",   "Greta",   "Hiro",    "Ingrid",
    "Jonas",   "Keiko",   "Lars",    "Mira",    "Nadia",   "Oscar",   "Priya",   "Quentin", "Rosa",
    "Stefan",  "Tamsin",  "Ulrich",  "Vera",    "Wendell", "Ximena",  "Yusuf",   "Zora",    "Anton",
    "Beatriz", "Cyril",   "Dalia",   "Emil",    "Fiona",   "Gustav",  "Hana",    "Igor",    "Jelena",
    "Kofi",    "Leona",   "Magnus",  "Noor",    "Otto",    "Paloma",  "Rafael",  "Sanne",   "Tobias",
    "Ursula",  "Viktor",  "Wilma",   "Yara",    "Zeno",    "Amara",   "Bastian", "Cleo",    "Darius",
    "Esme",    "Felix",   "Gemma",   "Hector",  "Isla",    "Jasper"};

constexpr std::array kCities = {
    "Porto",     "Oslo",    "Lisbon",   "Kyoto",    "Tallinn", "Valencia", "Krakow", "Bergen",
    "Ghent",     "Lyon",    "Seville",  "Turin",    "Riga",    "Bologna",  "Graz",   "Utrecht",
    "Malmo",     "Leipzig", "Aarhus",   "Nantes",   "Bilbao",  "Poznan",   "Brno",   "Tampere",
    "Innsbruck", "Cork",    "Salzburg", "Dubrovnik", "Split",  "Ljubljana"};

constexpr std::array kHobbies = {
    "pottery",     "bouldering",  "birdwatching", "woodworking", "calligraphy", "fencing",
    "beekeeping",  "origami",     "kayaking",     "astronomy",   "knitting",    "archery",
    "sailing",     "gardening",   "juggling",     "orienteering", "glassblowing", "chess",
    "rowing",      "skateboarding", "bookbinding", "foraging",   "drumming",    "paragliding",
    "embroidery",  "surfing",     "tailoring",    "snorkeling",  "weaving",     "cycling"};

constexpr std::array kFoods = {
    "ramen",   "paella",   "pierogi", "falafel", "risotto", "goulash", "dumplings", "tacos",
    "curry",   "lasagna",  "sushi",   "borscht", "tagine",  "gnocchi", "pho",       "moussaka",
    "ceviche", "biryani",  "kimchi",  "fondue"};

constexpr std::array kEvents = {"harbor festival", "book fair",   "jazz night",    "chess tournament",
                                "film screening",  "food market", "science expo",  "charity run",
                                "wine tasting",    "art opening", "design meetup", "folk concert"};

constexpr std::array kRaces = {"river", "coastal", "mountain", "forest", "city", "canal", "island", "valley"};

constexpr std::array kMonths = {"January", "February", "March",     "April",   "May",      "June",
                                "July",    "August",   "September", "October", "November", "December"};

constexpr std::array kTopics = {"the new tram line",  "a noisy neighbour", "the rainy forecast",
                                "a podcast episode",  "train delays",      "the office move",
                                "a broken dishwasher", "holiday plans",    "the quarterly budget",
                                "a documentary",      "printer troubles",  "the gym schedule"};

constexpr std::array kThings = {"coffee", "bread", "soup", "playlist", "lamp", "umbrella", "bicycle", "notebook"};
constexpr std::array kAdjectives = {"cheap", "loud", "cozy", "strange", "bright", "tiny", "crowded", "quiet"};

constexpr Timestamp kBase = 1672531200; // 2023-01-01T00:00:00Z

template <typename Rng, typename Arr>
const char* pick(Rng& rng, const Arr& arr)
{
    return arr[std::uniform_int_distribution<std::size_t>(0, arr.size() - 1)(rng)];
}

struct Builder {
    Corpus corpus;
    std::mt19937_64 rng;
    Timestamp clock = kBase;
    std::size_t session = 0;
    std::size_t in_session = 0;

    explicit Builder(std::uint64_t seed) : rng(seed) {}

    std::size_t add(std::string content, std::uint32_t accesses)
    {
        // Sessions of about eight turns a few minutes apart, a day or two between sessions.
        if (in_session >= 8) {
            ++session;
            in_session = 0;
            clock += std::uniform_int_distribution<Timestamp>(20 * 3600, 50 * 3600)(rng);
        } else {
            clock += std::uniform_int_distribution<Timestamp>(60, 300)(rng);
        }
        ++in_session;
        CorpusMemory m;
        m.content = std::move(content);
        m.meta.timestamp = clock;
        m.meta.session_id = "s" + std::to_string(session);
        m.meta.speaker = "user";
        m.meta.source_document = "chat-" + std::to_string(session);
        m.accesses = accesses;
        corpus.memories.push_back(std::move(m));
        return corpus.memories.size() - 1;
    }

    std::uint32_t uniform(std::uint32_t lo, std::uint32_t hi)
    {
        return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng); }

    /// Frequently used with probability 0.8, otherwise rarely touched.
    std::uint32_t target_accesses() { return chance(0.8) ? uniform(10, 16) : uniform(0, 4); }
    /// Most background memories are never recalled; some are recalled often.
    std::uint32_t background_accesses() { return chance(0.15) ? uniform(10, 16) : 0; }

    std::string chatter(const std::string& person)
    {
        const std::string other = pick(rng, kPeople);
        switch (uniform(0, 6)) {
        case 0:
            return person + " said the " + pick(rng, kAdjectives) + " " + pick(rng, kThings) + " near the station was " +
                   pick(rng, kAdjectives) + ".";
        case 1:
            return "We talked with " + person + " about " + pick(rng, kTopics) + " for a while.";
        case 2:
            return person + " mentioned that weekends are busy lately because of " + pick(rng, kTopics) + ".";
        case 3:
            return person + " thinks " + pick(rng, kCities) + " would be a nice place to live someday.";
        case 4:
            return person + " asked what " + other + " does on weekends.";
        case 5:
            return "Nothing much happened today besides " + std::string(pick(rng, kTopics)) + " and a " +
                   pick(rng, kAdjectives) + " " + pick(rng, kThings) + ".";
        default:
            return person + " recommended a " + pick(rng, kAdjectives) + " place for " + pick(rng, kFoods) +
                   " in " + pick(rng, kCities) + ".";
        }
    }
};

struct Planted {
    std::string text;
    std::string kind;
    std::size_t target = 0;
};

} // namespace

Corpus generate(const CorpusSpec& spec)
{
    Builder b(spec.seed);
    std::vector<std::string> people(kPeople.begin(), kPeople.end());
    std::shuffle(people.begin(), people.end(), b.rng);

    // Query mix: 30% residence, 25% detail, 15% each profile, temporal, multi-hop.
    const std::size_t nq = spec.queries;
    const std::size_t n_res = nq * 30 / 100;
    const std::size_t n_detail = nq * 25 / 100;
    const std::size_t n_profile = nq * 15 / 100;
    const std::size_t n_temporal = nq * 15 / 100;
    const std::size_t n_multi = nq - n_res - n_detail - n_profile - n_temporal;

    // Planted memories are interleaved with chatter across the timeline. Each
    // slot of the plan is either a planted memory or a chatter line.
    struct Slot {
        std::string content;
        std::uint32_t accesses;
        int query = -1; // index into planted queries when this slot is the target
        bool late = false;
    };
    std::vector<Slot> early;
    std::vector<Slot> late;
    std::vector<Planted> queries;

    auto person = [&](std::size_t i) { return people[i % people.size()]; };

    for (std::size_t i = 0; i < n_res; ++i) {
        const std::string p = person(i);
        const std::string a = kCities[(i * 7) % kCities.size()];
        const std::string c = kCities[(i * 7 + 3) % kCities.size()];
        // Stale fact used often before the move; the current fact arrives later.
        early.push_back({p + " lives in " + a + ".", b.uniform(10, 14), -1, false});
        queries.push_back({"Where does " + p + " live?", "residence", 0});
        late.push_back({"These days " + p + " lives in " + c + ".", b.uniform(2, 5),
                        static_cast<int>(queries.size() - 1), true});
    }
    for (std::size_t i = 0; i < n_detail; ++i) {
        const std::string p = person(n_res + i);
        const std::string h = kHobbies[i % kHobbies.size()];
        queries.push_back({"Which hobby does " + p + " enjoy on weekends?", "detail", 0});
        early.push_back({p + " enjoys " + h + " on weekends, and " + h + " keeps " + p + " calm.",
                         b.target_accesses(), static_cast<int>(queries.size() - 1)});
    }
    for (std::size_t i = 0; i < n_profile; ++i) {
        const std::string p = person(i * 3 + 1);
        const std::string f = kFoods[i % kFoods.size()];
        queries.push_back({"What is " + p + "'s favorite food?", "profile", 0});
        early.push_back({p + "'s favorite food is " + f + ".", b.target_accesses(),
                         static_cast<int>(queries.size() - 1)});
    }
    for (std::size_t i = 0; i < n_temporal; ++i) {
        const std::string p = person(i * 5 + 2);
        const std::string race = kRaces[i % kRaces.size()];
        const int month = static_cast<int>(i % 12);
        const int day = static_cast<int>(3 + (i * 5) % 24);
        const std::string date = std::string(kMonths[month]) + " " + std::to_string(day) + ", 2023";
        queries.push_back({"What did " + p + " do on " + date + "?", "temporal", 0});
        early.push_back({"On " + date + " " + p + " ran the " + race + " half marathon.", b.target_accesses(),
                         static_cast<int>(queries.size() - 1)});
    }
    for (std::size_t i = 0; i < n_multi; ++i) {
        const std::string p = person(i * 2);
        const std::string q = person(i * 2 + 31);
        const std::string e = kEvents[i % kEvents.size()];
        const std::string c = kCities[(i * 11) % kCities.size()];
        queries.push_back({"Where did " + p + " and " + q + " first meet?", "multi_hop", 0});
        early.push_back({p + " met " + q + " at the " + e + " in " + c + ".", b.target_accesses(),
                         static_cast<int>(queries.size() - 1)});
    }

    const std::size_t planted = early.size() + late.size();
    const std::size_t chatter = spec.memories > planted ? spec.memories - planted : 0;
    std::vector<Slot> first_half;
    std::vector<Slot> second_half;
    for (std::size_t i = 0; i < chatter; ++i) {
        Slot s{b.chatter(person(b.uniform(0, static_cast<std::uint32_t>(people.size() - 1)))),
               b.background_accesses()};
        (i % 2 == 0 ? first_half : second_half).push_back(std::move(s));
    }
    for (auto& s : early) first_half.push_back(std::move(s));
    for (auto& s : late) second_half.push_back(std::move(s));
    std::shuffle(first_half.begin(), first_half.end(), b.rng);
    std::shuffle(second_half.begin(), second_half.end(), b.rng);

    for (auto* half : {&first_half, &second_half}) {
        for (auto& s : *half) {
            const std::size_t idx = b.add(std::move(s.content), s.accesses);
            if (s.query >= 0) queries[static_cast<std::size_t>(s.query)].target = idx;
        }
    }
    for (auto& q : queries) b.corpus.queries.push_back({q.text, q.kind, {q.target}});
    b.corpus.now = b.clock + kSecondsPerDay;
    return std::move(b.corpus);
}

std::vector<MemoryId> load(store::Store& store, const std::string& profile, const Corpus& corpus,
                           const CorpusSpec& spec)
{
    std::vector<MemoryId> ids;
    ids.reserve(corpus.memories.size());
    for (const auto& m : corpus.memories) {
        const auto out = store.store(profile, m.content, m.meta);
        ids.push_back(out.ok() ? out.record->id : 0);
    }
    store.maintain(profile, spec.maintenance_steps, spec.seed, corpus.now);
    for (std::size_t i = 0; i < corpus.memories.size(); ++i) {
        if (ids[i] == 0) continue;
        for (std::uint32_t a = 0; a < corpus.memories[i].accesses; ++a) store.record_access(profile, ids[i], corpus.now);
    }
    return ids;
}

double ndcg_at(const std::vector<MemoryId>& ranking, const std::set<MemoryId>& relevant, std::size_t k)
{
    if (relevant.empty()) return 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i)
        if (relevant.contains(ranking[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / ideal;
}

Metrics evaluate(const store::Store& store, const std::string& profile, const Corpus& corpus,
                 const std::vector<MemoryId>& ids, const std::string& name, const fusion::RetrieveOptions& opts)
{
    Metrics m;
    m.config = name;
    fusion::RetrieveOptions o = opts;
    o.top_k = std::max<std::size_t>(o.top_k, 20);
    for (const auto& q : corpus.queries) {
        std::set<MemoryId> relevant;
        for (std::size_t i : q.relevant)
            if (ids[i] != 0) relevant.insert(ids[i]);
        const auto res = fusion::retrieve(store, profile, q.text, o);
        std::vector<MemoryId> ranking;
        for (const auto& r : res.results) ranking.push_back(r.id);
        m.ndcg10 += ndcg_at(ranking, relevant, 10);
        double rr = 0.0;
        for (std::size_t i = 0; i < ranking.size() && i < 20; ++i) {
            if (relevant.contains(ranking[i])) {
                m.hit20 += 1.0;
                rr = 1.0 / static_cast<double>(i + 1);
                break;
            }
        }
        m.mrr += rr;
        m.trace_stages = std::max(m.trace_stages, res.trace.stages.size());
        m.channels = std::max(m.channels, res.trace.channels.size());
        ++m.queries;
    }
    if (m.queries > 0) {
        const double n = static_cast<double>(m.queries);
        m.ndcg10 /= n;
        m.hit20 /= n;
        m.mrr /= n;
    }
    return m;
}

} // namespace mnemo::bench
