#include "lentag/eval.hpp"

#include "lentag/error.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace lentag {

namespace {

nlohmann::ordered_json optional_number(std::optional<double> v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

std::string format_percent(Count num, Count den) {
    if (den == 0) return "0.00";
    using Wide = unsigned __int128;
    const Wide hundredths = (Wide(num) * 20000 + den) / (Wide(2) * den);
    const auto whole = static_cast<std::uint64_t>(hundredths / 100);
    const auto frac = static_cast<unsigned>(hundredths % 100);
    std::string out = std::to_string(whole) + '.';
    if (frac < 10) out += '0';
    out += std::to_string(frac);
    return out;
}

void EvalReport::add(CoarseTag gold, const TagDecision& decision) { add(gold, decision.tag, decision.source); }

void EvalReport::add(CoarseTag gold, CoarseTag predicted, DecisionSource source) {
    ++total_;
    if (gold == predicted) ++correct_;
    ++confusion_[tag_index(gold)][tag_index(predicted)];
    ++sources_[static_cast<std::size_t>(source)];
}

EvalReport& EvalReport::operator+=(const EvalReport& o) {
    total_ += o.total_;
    correct_ += o.correct_;
    for (std::size_t g = 0; g < kTagCount; ++g)
        for (std::size_t p = 0; p < kTagCount; ++p) confusion_[g][p] += o.confusion_[g][p];
    for (std::size_t s = 0; s < sources_.size(); ++s) sources_[s] += o.sources_[s];
    return *this;
}

double EvalReport::accuracy() const noexcept {
    return total_ ? static_cast<double>(correct_) / static_cast<double>(total_) : 0.0;
}

std::string EvalReport::accuracy_pct() const { return format_percent(correct_, total_); }

Count EvalReport::gold_count(CoarseTag t) const noexcept {
    Count n = 0;
    for (auto c : confusion_[tag_index(t)]) n += c;
    return n;
}

Count EvalReport::predicted_count(CoarseTag t) const noexcept {
    Count n = 0;
    for (const auto& row : confusion_) n += row[tag_index(t)];
    return n;
}

std::optional<double> EvalReport::precision(CoarseTag t) const noexcept {
    const Count p = predicted_count(t);
    if (!p) return std::nullopt;
    return static_cast<double>(confusion(t, t)) / static_cast<double>(p);
}

std::optional<double> EvalReport::recall(CoarseTag t) const noexcept {
    const Count g = gold_count(t);
    if (!g) return std::nullopt;
    return static_cast<double>(confusion(t, t)) / static_cast<double>(g);
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["total"] = total_;
    j["correct"] = correct_;
    j["accuracy"] = accuracy();
    j["accuracy_pct"] = accuracy_pct();

    auto confusion = nlohmann::ordered_json::object();
    for (auto g : kAllTags) {
        auto row = nlohmann::ordered_json::object();
        for (auto p : kAllTags) row[std::string(tag_name(p))] = this->confusion(g, p);
        confusion[std::string(tag_name(g))] = row;
    }
    j["confusion"] = confusion;

    auto per_tag = nlohmann::ordered_json::object();
    for (auto t : kAllTags) {
        nlohmann::ordered_json e;
        e["precision"] = optional_number(precision(t));
        e["recall"] = optional_number(recall(t));
        per_tag[std::string(tag_name(t))] = e;
    }
    j["per_tag"] = per_tag;

    nlohmann::ordered_json sources;
    for (auto s : {DecisionSource::matched, DecisionSource::fallback_length, DecisionSource::fallback_global})
        sources[std::string(source_name(s))] = source_count(s);
    j["sources"] = sources;
    return j;
}

EvalReport evaluate(const KnowledgeBase& kb, const std::vector<Sentence>& test, const TaggingConfig& cfg,
                    unsigned threads) {
    if (kb.untrained()) throw DataError("knowledge base is untrained (no single-word entries)");
    if (test.empty()) throw DataError("test corpus is empty");

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, test.size()));

    auto run_chunk = [&](std::size_t begin, std::size_t end) {
        EvalReport partial;
        for (std::size_t s = begin; s < end; ++s) {
            // The tagger only ever sees the length sequence.
            const auto lengths = test[s].lengths();
            const auto decisions = tag_sentence(kb, lengths, cfg);
            for (std::size_t i = 0; i < decisions.size(); ++i) partial.add(test[s].words[i].tag, decisions[i]);
        }
        return partial;
    };

    std::vector<std::future<EvalReport>> jobs;
    const std::size_t chunk = (test.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < test.size(); begin += chunk)
        jobs.push_back(std::async(std::launch::async, run_chunk, begin, std::min(test.size(), begin + chunk)));

    EvalReport report;
    for (auto& j : jobs) report += j.get();
    return report;
}

SplitReport split_corpus(const std::filesystem::path& source_dir, const TagsetMapping& mapping,
                         const EntityTable& entities, const std::set<char>& train_genres,
                         const std::set<char>& test_genres, const std::filesystem::path& train_out,
                         const std::filesystem::path& test_out) {
    if (train_genres.empty() || test_genres.empty()) throw DataError("train and test genre sets must be non-empty");
    for (char g : train_genres)
        if (test_genres.contains(g)) throw DataError("genre " + std::string(1, g) + " is in both train and test sets");

    PrepareOptions opts{&mapping, &entities, train_genres, true};
    SplitReport out;
    out.train = build_flatfile(source_dir, opts, train_out);
    opts.genres = test_genres;
    out.test = build_flatfile(source_dir, opts, test_out);
    return out;
}

} // namespace lentag
