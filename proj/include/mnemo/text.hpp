#pragma once

// Rule-based text processing shared by ingestion and retrieval: tokenizer,
// entity and fact extraction, token entropy and date expressions.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/common.hpp"

namespace mnemo::text {

/// Lowercase, split on non-alphanumerics, drop tokens shorter than 2 bytes.
/// Bytes >= 0x80 are treated as word characters so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view s);

struct EntropyResult {
    double bits = 0.0;
    std::size_t tokens = 0;
    bool pass = false;
};

/// Shannon entropy (bits) of the token frequency distribution.
double token_entropy(const std::vector<std::string>& tokens);

EntropyResult entropy_gate(std::string_view content, double threshold_bits = 1.5,
                           std::size_t min_tokens = 3);

/// Canonical entity id: lowercase words joined by '_'.
std::string canonical_entity(std::string_view surface);

/// Capitalized token sequences (sentence-initial function words excluded)
/// plus case-insensitive hits of known entity ids.
std::set<EntityId> extract_entities(std::string_view content,
                                    const std::set<EntityId>& known = {});

struct ExtractedFact {
    EntityId subject;
    std::string predicate;
    std::string object;
    /// From the possessive pattern "E's attr is value"; feeds profile records.
    bool attribute = false;

    friend bool operator==(const ExtractedFact&, const ExtractedFact&) = default;
};

/// Subject-verb-object patterns anchored on the given entities.
std::vector<ExtractedFact> extract_facts(std::string_view content, const std::set<EntityId>& entities);

/// First explicit date expression in the text (ISO yyyy-mm-dd, "March 5, 2023",
/// "5 March 2023", "March 2023"), as midnight UTC.
std::optional<Timestamp> find_date(std::string_view s);

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d);

std::string format_date(Timestamp t);

} // namespace mnemo::text
