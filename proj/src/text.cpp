#include "mnemo/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <unordered_map>
#include <unordered_set>

namespace mnemo::text {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) c = lower(c);
    return out;
}

const std::unordered_set<std::string>& sentence_starters()
{
    static const std::unordered_set<std::string> words = {
        "the", "a", "an", "this", "that", "these", "those", "it", "its", "he", "she", "they", "we",
        "you", "my", "our", "your", "his", "her", "their", "what", "who", "whom", "whose", "when",
        "where", "why", "how", "which", "is", "are", "was", "were", "do", "does", "did", "can",
        "could", "will", "would", "should", "shall", "may", "might", "must", "and", "but", "or",
        "so", "then", "if", "in", "on", "at", "for", "to", "from", "with", "after", "before",
        "yesterday", "today", "tomorrow", "there", "here", "also", "please", "yes", "no", "hi",
        "hello", "thanks", "ok", "okay", "some", "all", "every", "each", "both", "one", "just",
        "still", "maybe", "last", "next", "tell", "remind", "remember", "let", "have", "has",
        "had", "not", "never", "always", "now", "recently", "once", "during", "since", "until",
        "about", "compare", "list", "give", "show", "find", "describe", "explain", "name"};
    return words;
}

const std::unordered_set<std::string>& never_entities()
{
    static const std::unordered_set<std::string> words = {
        "i", "january", "february", "march", "april", "june", "july", "august", "september",
        "october", "november", "december", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep",
        "sept", "oct", "nov", "dec", "monday", "tuesday", "wednesday", "thursday", "friday",
        "saturday", "sunday"};
    return words;
}

const std::unordered_set<std::string>& copulas()
{
    static const std::unordered_set<std::string> words = {"is", "was", "are", "were", "became", "becomes"};
    return words;
}

const std::unordered_set<std::string>& prepositions()
{
    static const std::unordered_set<std::string> words = {"in", "at", "to", "from", "with", "for", "on",
                                                         "of", "into", "as", "by", "near", "about"};
    return words;
}

const std::unordered_set<std::string>& clause_breaks()
{
    static const std::unordered_set<std::string> words = {"and", "but", "because", "so", "while", "when",
                                                         "which", "who", "although", "though", "since",
                                                         "until", "after", "before"};
    return words;
}

const std::unordered_set<std::string>& adverbs()
{
    static const std::unordered_set<std::string> words = {"also", "still", "now", "recently", "just", "really",
                                                         "never", "always", "often", "currently", "finally",
                                                         "actually", "usually", "already", "then"};
    return words;
}

const std::unordered_set<std::string>& determiners()
{
    static const std::unordered_set<std::string> words = {"a", "an", "the", "my", "his", "her", "their",
                                                         "our", "its", "your", "some"};
    return words;
}

struct Word {
    std::string surface; // without possessive suffix or apostrophes
    std::string lower;
    bool capitalized = false;
    bool possessive = false;
    bool sentence_initial = false;
};

/// Splits into sentences of words; clause punctuation is kept as a break
/// marker (empty surface).
std::vector<std::vector<Word>> lex(std::string_view s)
{
    std::vector<std::vector<Word>> sentences(1);
    std::size_t i = 0;
    bool at_start = true;
    auto new_sentence = [&] {
        if (!sentences.back().empty()) sentences.emplace_back();
        at_start = true;
    };
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (is_word_byte(c) || (c == '\'' && i > 0 && i + 1 < s.size() && is_word_byte(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            std::string raw;
            while (j < s.size()) {
                const auto cj = static_cast<unsigned char>(s[j]);
                if (cj == '\'' && j + 1 < s.size() && is_word_byte(static_cast<unsigned char>(s[j + 1]))) {
                    raw.push_back('\'');
                    ++j;
                } else if (s.substr(j, 3) == "\xE2\x80\x99") {
                    raw.push_back('\'');
                    j += 3;
                } else if (is_word_byte(cj)) {
                    raw.push_back(s[j]);
                    ++j;
                } else {
                    break;
                }
            }
            Word w;
            if (raw.size() > 2 && (raw.ends_with("'s") || raw.ends_with("'S"))) {
                w.possessive = true;
                raw.resize(raw.size() - 2);
            }
            std::erase(raw, '\'');
            if (!raw.empty()) {
                w.surface = raw;
                w.lower = to_lower(raw);
                w.capitalized = std::isupper(static_cast<unsigned char>(raw[0])) != 0;
                w.sentence_initial = at_start;
                sentences.back().push_back(std::move(w));
                at_start = false;
            }
            i = j;
            continue;
        }
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            new_sentence();
        } else if (c == ',' || c == ';' || c == ':' || c == '(' || c == ')' || c == '"') {
            if (!sentences.back().empty() && !sentences.back().back().surface.empty())
                sentences.back().push_back(Word{});
        }
        ++i;
    }
    if (sentences.back().empty()) sentences.pop_back();
    return sentences;
}

bool is_break(const Word& w) { return w.surface.empty(); }

} // namespace

std::vector<std::string> tokenize(std::string_view s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (is_word_byte(static_cast<unsigned char>(ch))) {
            cur.push_back(lower(ch));
        } else {
            if (cur.size() >= 2) out.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2) out.push_back(cur);
    return out;
}

double token_entropy(const std::vector<std::string>& tokens)
{
    if (tokens.empty()) return 0.0;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : tokens) counts[t]++;
    const double n = static_cast<double>(tokens.size());
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

EntropyResult entropy_gate(std::string_view content, double threshold_bits, std::size_t min_tokens)
{
    const auto tokens = tokenize(content);
    EntropyResult r;
    r.tokens = tokens.size();
    r.bits = token_entropy(tokens);
    r.pass = r.tokens >= min_tokens && r.bits >= threshold_bits;
    return r;
}

std::string canonical_entity(std::string_view surface)
{
    std::string out;
    for (const auto& t : tokenize(surface)) {
        if (!out.empty()) out.push_back('_');
        out += t;
    }
    return out;
}

std::set<EntityId> extract_entities(std::string_view content, const std::set<EntityId>& known)
{
    std::set<EntityId> out;
    for (const auto& sentence : lex(content)) {
        std::vector<std::string> run;
        auto flush = [&] {
            if (!run.empty()) {
                std::string id;
                for (const auto& w : run) id += (id.empty() ? "" : "_") + w;
                const std::string canon = canonical_entity(id);
                if (!canon.empty()) out.insert(canon);
            }
            run.clear();
        };
        for (const auto& w : sentence) {
            const bool candidate = !is_break(w) && w.capitalized && !never_entities().contains(w.lower) &&
                                   !(w.sentence_initial && sentence_starters().contains(w.lower));
            if (candidate) {
                run.push_back(w.lower);
                if (w.possessive) flush();
            } else {
                flush();
            }
        }
        flush();

        if (!known.empty()) {
            std::vector<std::string> lowers;
            for (const auto& w : sentence)
                if (!is_break(w)) lowers.push_back(w.lower);
            for (const auto& id : known) {
                std::vector<std::string> words;
                std::string cur;
                for (char ch : id) {
                    if (ch == '_') {
                        if (!cur.empty()) words.push_back(cur);
                        cur.clear();
                    } else {
                        cur.push_back(ch);
                    }
                }
                if (!cur.empty()) words.push_back(cur);
                if (words.empty() || words.size() > lowers.size()) continue;
                for (std::size_t i = 0; i + words.size() <= lowers.size(); ++i) {
                    if (std::equal(words.begin(), words.end(), lowers.begin() + static_cast<long>(i))) {
                        out.insert(id);
                        break;
                    }
                }
            }
        }
    }
    return out;
}

std::vector<ExtractedFact> extract_facts(std::string_view content, const std::set<EntityId>& entities)
{
    std::vector<ExtractedFact> out;
    if (entities.empty()) return out;
    for (const auto& sentence : lex(content)) {
        // locate the first entity mention (longest match up to 4 words)
        std::size_t subj_end = 0;
        std::optional<EntityId> subject;
        for (std::size_t i = 0; i < sentence.size() && !subject; ++i) {
            if (is_break(sentence[i])) continue;
            std::string id;
            for (std::size_t n = 1; n <= 4 && i + n <= sentence.size(); ++n) {
                const Word& w = sentence[i + n - 1];
                if (is_break(w)) break;
                id += (n > 1 ? "_" : "") + canonical_entity(w.lower);
                if (entities.contains(id)) {
                    subject = id;
                    subj_end = i + n;
                }
                if (w.possessive) break;
            }
        }
        if (!subject) continue;

        auto object_from = [&](std::size_t k) {
            while (k < sentence.size() && !is_break(sentence[k]) && determiners().contains(sentence[k].lower)) ++k;
            std::string obj;
            for (; k < sentence.size(); ++k) {
                const Word& w = sentence[k];
                if (is_break(w) || clause_breaks().contains(w.lower)) break;
                // a trailing prepositional phrase is not part of the object; "of" binds inside it
                if (!obj.empty() && w.lower != "of" && prepositions().contains(w.lower)) break;
                obj += (obj.empty() ? "" : " ") + w.lower;
            }
            return obj;
        };

        std::string predicate, object;
        bool attribute = false;
        const Word& last = sentence[subj_end - 1];
        std::size_t k = subj_end;
        if (last.possessive) {
            std::string attr;
            while (k < sentence.size() && !is_break(sentence[k]) && !copulas().contains(sentence[k].lower)) {
                attr += (attr.empty() ? "" : "_") + sentence[k].lower;
                ++k;
            }
            if (k < sentence.size() && !is_break(sentence[k]) && !attr.empty()) {
                predicate = attr;
                attribute = true;
                object = object_from(k + 1);
            }
        } else {
            while (k < sentence.size() && !is_break(sentence[k]) && adverbs().contains(sentence[k].lower)) ++k;
            if (k < sentence.size() && !is_break(sentence[k])) {
                const Word& verb = sentence[k];
                const bool is_copula = copulas().contains(verb.lower);
                const bool plain_verb = !verb.capitalized && !clause_breaks().contains(verb.lower) &&
                                        std::all_of(verb.lower.begin(), verb.lower.end(),
                                                    [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
                if (is_copula || plain_verb) {
                    predicate = is_copula ? "is" : verb.lower;
                    ++k;
                    if (k < sentence.size() && !is_break(sentence[k]) && prepositions().contains(sentence[k].lower)) {
                        predicate += "_" + sentence[k].lower;
                        ++k;
                    }
                    object = object_from(k);
                }
            }
        }
        if (!predicate.empty() && !tokenize(object).empty()) out.push_back({*subject, predicate, object, attribute});
    }
    return out;
}

std::int64_t days_from_civil(int y, unsigned m, unsigned d)
{
    y -= m <= 2 ? 1 : 0;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string format_date(Timestamp t)
{
    std::int64_t z = (t >= 0 ? t : t - (kSecondsPerDay - 1)) / kSecondsPerDay + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y + (m <= 2 ? 1 : 0)), m, d);
    return buf;
}

namespace {

int month_index(const std::string& name)
{
    static const std::map<std::string, int> months = {
        {"jan", 1}, {"feb", 2}, {"mar", 3}, {"apr", 4}, {"may", 5}, {"jun", 6},
        {"jul", 7}, {"aug", 8}, {"sep", 9}, {"oct", 10}, {"nov", 11}, {"dec", 12}};
    const auto it = months.find(to_lower(name).substr(0, 3));
    return it == months.end() ? 0 : it->second;
}

std::optional<Timestamp> make_date(int y, int m, int d)
{
    if (m < 1 || m > 12 || d < 1 || d > 31 || y < 1 || y > 9999) return std::nullopt;
    return days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d)) * kSecondsPerDay;
}

} // namespace

std::optional<Timestamp> find_date(std::string_view s)
{
    static const std::string month =
        "(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|"
        "sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)";
    static const std::regex iso(R"(\b(\d{4})-(\d{1,2})-(\d{1,2})\b)");
    static const std::regex mdy("\\b" + month + "\\.?\\s+(\\d{1,2})(?:st|nd|rd|th)?,?\\s+(\\d{4})\\b",
                                std::regex::icase);
    static const std::regex dmy("\\b(\\d{1,2})(?:st|nd|rd|th)?\\s+(?:of\\s+)?" + month + "\\.?,?\\s+(\\d{4})\\b",
                                std::regex::icase);
    static const std::regex my("\\b" + month + "\\.?,?\\s+(\\d{4})\\b", std::regex::icase);

    const std::string str(s);
    struct Hit {
        std::ptrdiff_t pos;
        std::optional<Timestamp> t;
    };
    std::vector<Hit> hits;
    std::smatch m;
    if (std::regex_search(str, m, iso))
        hits.push_back({m.position(0), make_date(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]))});
    if (std::regex_search(str, m, mdy))
        hits.push_back({m.position(0), make_date(std::stoi(m[3]), month_index(m[1]), std::stoi(m[2]))});
    if (std::regex_search(str, m, dmy))
        hits.push_back({m.position(0), make_date(std::stoi(m[3]), month_index(m[2]), std::stoi(m[1]))});
    if (std::regex_search(str, m, my))
        hits.push_back({m.position(0), make_date(std::stoi(m[2]), month_index(m[1]), 1)});
    std::optional<Timestamp> best;
    std::ptrdiff_t best_pos = 0;
    for (const auto& h : hits) {
        if (!h.t) continue;
        if (!best || h.pos < best_pos) {
            best = h.t;
            best_pos = h.pos;
        }
    }
    return best;
}

} // namespace mnemo::text
