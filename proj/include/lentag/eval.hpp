#pragma once

#include "lentag/corpus.hpp"
#include "lentag/kb.hpp"
#include "lentag/tagger.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

namespace lentag {

class EvalReport {
public:
    using Matrix = std::array<std::array<Count, kTagCount>, kTagCount>;

    void add(CoarseTag gold, const TagDecision& decision);
    void add(CoarseTag gold, CoarseTag predicted, DecisionSource source = DecisionSource::matched);
    EvalReport& operator+=(const EvalReport& o);

    Count total() const noexcept { return total_; }
    Count correct() const noexcept { return correct_; }
    double accuracy() const noexcept;
    /// Two decimals, round-half-up; "33.92".
    std::string accuracy_pct() const;

    const Matrix& confusion() const noexcept { return confusion_; }
    Count confusion(CoarseTag gold, CoarseTag predicted) const noexcept {
        return confusion_[tag_index(gold)][tag_index(predicted)];
    }
    Count gold_count(CoarseTag t) const noexcept;
    Count predicted_count(CoarseTag t) const noexcept;
    std::optional<double> precision(CoarseTag t) const noexcept;
    std::optional<double> recall(CoarseTag t) const noexcept;
    Count source_count(DecisionSource s) const noexcept { return sources_[static_cast<std::size_t>(s)]; }

    nlohmann::ordered_json to_json() const;

    bool operator==(const EvalReport&) const = default;

private:
    Count total_ = 0;
    Count correct_ = 0;
    Matrix confusion_{};
    std::array<Count, 3> sources_{};
};

/// percent = 100 * num / den, formatted with two decimals, round-half-up.
std::string format_percent(Count num, Count den);

/// Tags each test sentence from its lengths alone and tallies against gold.
/// threads == 0 picks the hardware concurrency.
EvalReport evaluate(const KnowledgeBase& kb, const std::vector<Sentence>& test, const TaggingConfig& cfg = {},
                    unsigned threads = 0);

struct SplitReport {
    ConversionReport train;
    ConversionReport test;
};

/// Writes train and test flatfiles from disjoint genre sets.
SplitReport split_corpus(const std::filesystem::path& source_dir, const TagsetMapping& mapping,
                         const EntityTable& entities, const std::set<char>& train_genres,
                         const std::set<char>& test_genres, const std::filesystem::path& train_out,
                         const std::filesystem::path& test_out);

} // namespace lentag
