#pragma once

#include "lentag/corpus.hpp"
#include "lentag/tags.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lentag {

using Count = std::uint64_t;
using TagSequence = std::vector<CoarseTag>;
using TagSequenceCounts = std::map<TagSequence, Count>;
using TagCounts = std::map<CoarseTag, Count>;

inline constexpr std::size_t kDefaultMaxWindow = 12;

/// Ordered word lengths, e.g. "3:6:6".
struct LengthKey {
    std::vector<std::uint32_t> lengths;

    std::string to_string() const;
    static LengthKey parse(std::string_view text);

    auto operator<=>(const LengthKey&) const = default;
};

std::string join_lengths(std::span<const std::uint32_t> lengths);
std::string join_tags(std::span<const CoarseTag> tags);

/// Length window plus the surrounding tags, with one position left open.
struct ContextKey {
    std::vector<std::uint32_t> lengths;
    std::vector<CoarseTag> tags; // tags[hole] is ignored
    std::size_t hole = 0;

    /// "3:6|_:N"
    std::string to_string() const;

    bool operator==(const ContextKey& o) const;
};

struct KbStats {
    std::size_t max_window = 0;
    std::size_t entries = 0;
    std::size_t distinct_keys = 0;
    Count total_windows = 0;
    std::vector<Count> windows_per_length; // index l-1
    std::size_t context_entries = 0;
    std::size_t entry_bytes = 0;

    nlohmann::ordered_json to_json() const;
};

/// Word-length knowledge base: every contiguous window of every training
/// sentence (up to max_window words) keyed by its lengths, counting the tag
/// sequences seen there. Optionally also a context index used by the
/// refinement pass.
class KnowledgeBase {
public:
    explicit KnowledgeBase(std::size_t max_window = kDefaultMaxWindow, bool with_context = false);

    std::size_t max_window() const noexcept { return max_window_; }
    bool has_context() const noexcept { return with_context_; }

    void index_sentence(std::span<const std::uint32_t> lengths, std::span<const CoarseTag> tags);
    void index_sentence(const Sentence& sentence);

    /// Adds count occurrences of one (key, tags) pair directly.
    void add(std::span<const std::uint32_t> lengths, std::span<const CoarseTag> tags, Count count = 1);
    void add_context(const ContextKey& key, CoarseTag tag, Count count = 1);

    /// Tag sequences stored under lengths; nullptr when absent.
    const TagSequenceCounts* lookup(std::span<const std::uint32_t> lengths) const;
    const TagSequenceCounts& lookup_or_empty(std::span<const std::uint32_t> lengths) const;

    const TagCounts* context_lookup(const ContextKey& key) const;

    /// Unigram counts derived from the length-1 entries.
    Count tag_frequency(CoarseTag t) const noexcept { return unigram_[tag_index(t)]; }
    const std::array<Count, kTagCount>& tag_frequencies() const noexcept { return unigram_; }

    /// True when there are no length-1 entries at all.
    bool untrained() const noexcept;

    std::size_t distinct_keys() const noexcept { return entries_.size(); }

    /// Visits (key, tags, count) for every entry, unordered.
    template <class F>
    void for_each_entry(F&& f) const {
        for (const auto& [key, seqs] : entries_)
            for (const auto& [seq, n] : seqs) f(std::span<const std::uint32_t>(key), std::span<const CoarseTag>(seq), n);
    }

    template <class F>
    void for_each_context(F&& f) const {
        for (const auto& [key, tags] : context_)
            for (const auto& [tag, n] : tags) f(key, tag, n);
    }

    KbStats stats() const;

    /// Canonical text form; equal KBs give identical bytes.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& out) const;
    static KnowledgeBase load(std::istream& in);
    static KnowledgeBase load(const std::filesystem::path& path);

    std::string serialize() const;

    bool operator==(const KnowledgeBase& o) const;

private:
    struct LengthsHash {
        std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept;
    };
    struct ContextHash {
        std::size_t operator()(const ContextKey& k) const noexcept;
    };

    void check_window(std::span<const std::uint32_t> lengths, std::size_t tag_count) const;

    std::size_t max_window_;
    bool with_context_;
    std::unordered_map<std::vector<std::uint32_t>, TagSequenceCounts, LengthsHash> entries_;
    std::unordered_map<ContextKey, TagCounts, ContextHash> context_;
    std::array<Count, kTagCount> unigram_{};
};

/// Per-(key, tags) sum. Throws DataError when max_window or context
/// indexing differ.
KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b);

/// Indexes every sentence into a fresh KB.
KnowledgeBase train(const std::vector<Sentence>& corpus, std::size_t max_window = kDefaultMaxWindow,
                    bool with_context = false);

} // namespace lentag
