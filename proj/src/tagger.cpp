#include "lentag/tagger.hpp"

#include "lentag/error.hpp"

#include <algorithm>

namespace lentag {

namespace {

std::size_t effective_window(const KnowledgeBase& kb, const TaggingConfig& cfg) {
    const std::size_t w = cfg.max_window.value_or(kb.max_window());
    if (w == 0) throw DataError("tagging max_window must be at least 1");
    if (w > kb.max_window())
        throw DataError("tagging max_window " + std::to_string(w) + " exceeds the knowledge base's " +
                        std::to_string(kb.max_window()));
    return w;
}

void check_lengths(std::span<const std::uint32_t> lengths) {
    if (lengths.empty()) throw DataError("cannot tag an empty sentence");
    for (auto l : lengths)
        if (l == 0) throw DataError("word lengths must be positive");
}

/// Per-position, per-tag, per-window-length sums of counts. The exact
/// score is recovered as sum(count_l << l); keeping counts bucketed by
/// length avoids big-integer arithmetic in the inner loop.
class Accumulator {
public:
    Accumulator(std::size_t positions, std::size_t max_window)
        : stride_(max_window + 1), counts_(positions * kTagCount * stride_, 0) {}

    void add(std::size_t pos, CoarseTag tag, std::size_t window, Count n) {
        counts_[(pos * kTagCount + tag_index(tag)) * stride_ + window] += n;
    }

    ScoreTable table(std::size_t pos) const {
        ScoreTable t;
        for (std::size_t k = 0; k < kTagCount; ++k) {
            Score s = 0;
            const Count* row = &counts_[(pos * kTagCount + k) * stride_];
            for (std::size_t l = 1; l < stride_; ++l)
                if (row[l]) s += Score(row[l]) << l;
            t.scores[k] = std::move(s);
        }
        return t;
    }

private:
    std::size_t stride_;
    std::vector<Count> counts_;
};

CoarseTag better_by_prior(const KnowledgeBase& kb, CoarseTag a, CoarseTag b) {
    const Count fa = kb.tag_frequency(a), fb = kb.tag_frequency(b);
    if (fa != fb) return fa > fb ? a : b;
    return tag_index(a) < tag_index(b) ? a : b;
}

template <class Value>
CoarseTag argmax(const KnowledgeBase& kb, const std::array<Value, kTagCount>& values) {
    CoarseTag best = kAllTags[0];
    for (std::size_t k = 1; k < kTagCount; ++k) {
        const CoarseTag t = kAllTags[k];
        if (values[k] > values[tag_index(best)])
            best = t;
        else if (values[k] == values[tag_index(best)])
            best = better_by_prior(kb, best, t);
    }
    return best;
}

std::vector<TagDecision> decide(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                const std::vector<ScoreTable>& tables) {
    std::vector<TagDecision> out;
    out.reserve(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) out.push_back(select_tag(tables[i], kb, lengths[i]));
    return out;
}

std::vector<TagDecision> refine_decisions(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                          const std::vector<ScoreTable>& base, std::span<const CoarseTag> current,
                                          const TaggingConfig& cfg) {
    auto combined = context_scores(kb, lengths, current, cfg);
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += base[i];
    return decide(kb, lengths, combined);
}

} // namespace

std::string_view source_name(DecisionSource s) noexcept {
    switch (s) {
    case DecisionSource::matched: return "matched";
    case DecisionSource::fallback_length: return "fallback_length";
    case DecisionSource::fallback_global: return "fallback_global";
    }
    return "?";
}

bool ScoreTable::any_positive() const {
    return std::any_of(scores.begin(), scores.end(), [](const Score& s) { return s > 0; });
}

ScoreTable& ScoreTable::operator+=(const ScoreTable& o) {
    for (std::size_t k = 0; k < kTagCount; ++k) scores[k] += o.scores[k];
    return *this;
}

ScoreTable score_word(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths, std::size_t i,
                      const TaggingConfig& cfg) {
    if (i >= lengths.size()) throw DataError("position " + std::to_string(i) + " outside sentence");
    const std::size_t w = effective_window(kb, cfg);
    Accumulator acc(1, w);
    const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
    for (std::size_t a = first; a <= i; ++a) {
        for (std::size_t b = i; b < lengths.size() && b - a + 1 <= w; ++b) {
            const std::size_t len = b - a + 1;
            const auto* found = kb.lookup(lengths.subspan(a, len));
            if (!found) continue;
            for (const auto& [seq, n] : *found) acc.add(0, seq[i - a], len, n);
        }
    }
    return acc.table(0);
}

std::vector<ScoreTable> score_sentence(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                       const TaggingConfig& cfg) {
    const std::size_t w = effective_window(kb, cfg);
    const std::size_t n = lengths.size();
    Accumulator acc(n, w);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t len = 1; len <= w && a + len <= n; ++len) {
            const auto* found = kb.lookup(lengths.subspan(a, len));
            if (!found) continue;
            for (const auto& [seq, cnt] : *found)
                for (std::size_t p = 0; p < len; ++p) acc.add(a + p, seq[p], len, cnt);
        }
    }
    std::vector<ScoreTable> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(acc.table(i));
    return out;
}

TagDecision select_tag(const ScoreTable& table, const KnowledgeBase& kb, std::uint32_t word_length) {
    if (kb.untrained()) throw DataError("knowledge base is untrained (no single-word entries)");

    if (table.any_positive()) {
        const CoarseTag best = argmax(kb, table.scores);
        return {best, DecisionSource::matched, table[best]};
    }

    const std::uint32_t key[] = {word_length};
    if (const auto* seen = kb.lookup(key); seen && !seen->empty()) {
        std::array<Count, kTagCount> counts{};
        for (const auto& [seq, n] : *seen) counts[tag_index(seq.front())] += n;
        return {argmax(kb, counts), DecisionSource::fallback_length, 0};
    }
    return {argmax(kb, kb.tag_frequencies()), DecisionSource::fallback_global, 0};
}

std::vector<ScoreTable> context_scores(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                       std::span<const CoarseTag> current, const TaggingConfig& cfg) {
    if (!kb.has_context()) throw DataError("knowledge base has no context index; train with context enabled");
    if (current.size() != lengths.size()) throw DataError("current tagging and lengths differ in size");
    const std::size_t w = effective_window(kb, cfg);
    const std::size_t n = lengths.size();
    Accumulator acc(n, w);
    ContextKey key;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t len = 1; len <= w && a + len <= n; ++len) {
            key.lengths.assign(lengths.begin() + a, lengths.begin() + a + len);
            key.tags.assign(current.begin() + a, current.begin() + a + len);
            for (std::size_t p = 0; p < len; ++p) {
                key.hole = p;
                const auto* found = kb.context_lookup(key);
                if (!found) continue;
                for (const auto& [tag, cnt] : *found) acc.add(a + p, tag, len, cnt);
            }
        }
    }
    std::vector<ScoreTable> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(acc.table(i));
    return out;
}

std::vector<CoarseTag> refine_pass(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                   std::span<const CoarseTag> current, const TaggingConfig& cfg) {
    check_lengths(lengths);
    const auto base = score_sentence(kb, lengths, cfg);
    return tags_of(refine_decisions(kb, lengths, base, current, cfg));
}

std::vector<TagDecision> tag_sentence(const KnowledgeBase& kb, std::span<const std::uint32_t> lengths,
                                      const TaggingConfig& cfg) {
    check_lengths(lengths);
    if (kb.untrained()) throw DataError("knowledge base is untrained (no single-word entries)");
    if (cfg.mode == TaggingMode::multi_pass && !kb.has_context())
        throw DataError("multi-pass tagging needs a knowledge base trained with context enabled");

    const auto base = score_sentence(kb, lengths, cfg);
    auto decisions = decide(kb, lengths, base);
    if (cfg.mode == TaggingMode::single_pass) return decisions;

    for (std::size_t iter = 0; iter < cfg.max_refine_iters; ++iter) {
        const auto current = tags_of(decisions);
        auto next = refine_decisions(kb, lengths, base, current, cfg);
        const bool fixpoint = tags_of(next) == current;
        decisions = std::move(next);
        if (fixpoint) break;
    }
    return decisions;
}

std::vector<CoarseTag> tags_of(std::span<const TagDecision> decisions) {
    std::vector<CoarseTag> out;
    out.reserve(decisions.size());
    for (const auto& d : decisions) out.push_back(d.tag);
    return out;
}

} // namespace lentag
