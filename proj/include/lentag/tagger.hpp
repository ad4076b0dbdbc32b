#pragma once

#include "lentag/kb.hpp"
#include "lentag/tags.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lentag {

/// Exact unbounded integer; window weights are 2^length.
using Score = boost::multiprecision::cpp_int;

enum class TaggingMode { single_pass, multi_pass };

struct TaggingConfig {
    /// Longest window queried; unset means the KB's own max_window.
    std::optional<std::size_t> max_window;
    TaggingMode mode = TaggingMode::single_pass;
    std::size_t max_refine_iters = 3;
};

struct ScoreTable {
    std::array<Score, kTagCount> scores{};

    Score& operator[](CoarseTag t) { return scores[tag_index(t)]; }
    const Score& operator[](CoarseTag t) const { return scores[tag_index(t)]; }

    bool any_positive() const;
    ScoreTable& operator+=(const ScoreTable& o);
    bool operator==(const ScoreTable&) const = default;
};

enum class DecisionSource : std::uint8_t { matched, fallback_length, fallback_global };

std::string_view source_name(DecisionSource s) noexcept;

struct TagDecision {
    CoarseTag tag = CoarseTag::Other;
    DecisionSource source = DecisionSource::fallback_global;
    Score winning_score = 0;

    bool operator==(const TagDecision&) const = default;
};

/// Sum over every window [a, b] containing position i (0-based) of
/// count * 2^(b-a+1), credited to the tag each stored sequence aligns with i.
ScoreTable score_word(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths, std::size_t i,
                      const TaggingConfig& cfg = {});

/// score_word for every position, sharing one lookup per window.
std::vector<ScoreTable> score_sentence(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                       const TaggingConfig& cfg = {});

/// Argmax with ties broken by global tag frequency, then declaration
/// order. An all-zero table falls back to the most frequent tag for
/// word_length, then to the most frequent tag overall. Throws DataError on
/// an untrained KB.
TagDecision select_tag(const ScoreTable& table, const KnowledgeBase& kb, std::uint32_t word_length);

std::vector<TagDecision> tag_sentence(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                      const TaggingConfig& cfg = {});

/// Context scores for every position given the current tagging.
std::vector<ScoreTable> context_scores(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                       std::span<const CoarseTag> current, const TaggingConfig& cfg = {});

/// One synchronous refinement step: base plus context score at every
/// position, then select_tag.
std::vector<CoarseTag> refine_pass(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                   std::span<const CoarseTag> current, const TaggingConfig& cfg = {});

std::vector<CoarseTag> tags_of(std::span<const TagDecision> decisions);

} // namespace lentag
