#pragma once

// Test-only helpers: random corpora, SUSANNE fixtures, and a brute-force
// tagging oracle that never touches the knowledge base index.

#include "lentag/corpus.hpp"
#include "lentag/kb.hpp"
#include "lentag/tagger.hpp"

#include <gmpxx.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace lentag::testing {

struct LabeledSentence {
    std::vector<std::uint32_t> lengths;
    std::vector<CoarseTag> tags;
};

using Corpus = std::vector<LabeledSentence>;

inline Sentence to_sentence(const LabeledSentence& s) {
    Sentence out;
    for (std::size_t i = 0; i < s.lengths.size(); ++i) out.words.push_back({s.tags[i], s.lengths[i], std::nullopt});
    return out;
}

inline std::vector<Sentence> to_sentences(const Corpus& c) {
    std::vector<Sentence> out;
    for (const auto& s : c) out.push_back(to_sentence(s));
    return out;
}

/// The worked example: "The Fulton County Grand Jury".
inline LabeledSentence fulton() {
    using enum CoarseTag;
    return {{3, 6, 6, 5, 4}, {Det, N, N, Adj, N}};
}

inline KnowledgeBase build_kb(const Corpus& c, std::size_t max_window = kDefaultMaxWindow, bool context = false) {
    KnowledgeBase kb(max_window, context);
    for (const auto& s : c) kb.index_sentence(s.lengths, s.tags);
    return kb;
}

struct CorpusShape {
    std::size_t max_sentences = 6;
    std::size_t max_sentence_len = 8;
    std::uint32_t max_word_len = 9;
    std::vector<CoarseTag> tags = {CoarseTag::N, CoarseTag::V, CoarseTag::Det, CoarseTag::Adj};
};

inline LabeledSentence random_sentence(std::mt19937_64& rng, const CorpusShape& shape) {
    std::uniform_int_distribution<std::size_t> len_dist(1, shape.max_sentence_len);
    std::uniform_int_distribution<std::uint32_t> word_dist(1, shape.max_word_len);
    std::uniform_int_distribution<std::size_t> tag_dist(0, shape.tags.size() - 1);
    LabeledSentence s;
    const auto n = len_dist(rng);
    for (std::size_t i = 0; i < n; ++i) {
        s.lengths.push_back(word_dist(rng));
        s.tags.push_back(shape.tags[tag_dist(rng)]);
    }
    return s;
}

inline Corpus random_corpus(std::mt19937_64& rng, const CorpusShape& shape = {}) {
    std::uniform_int_distribution<std::size_t> count_dist(1, shape.max_sentences);
    Corpus c;
    const auto n = count_dist(rng);
    for (std::size_t i = 0; i < n; ++i) c.push_back(random_sentence(rng, shape));
    return c;
}

// ---- brute-force oracle ------------------------------------------------------

using OracleTable = std::array<mpz_class, kTagCount>;

/// Every (test window containing i) x (training window with equal lengths)
/// pair contributes 2^window to the training tag aligned with i.
inline OracleTable oracle_scores(const Corpus& train, const std::vector<std::uint32_t>& lengths, std::size_t i,
                                 std::size_t max_window) {
    OracleTable table;
    for (auto& v : table) v = 0;
    const std::size_t n = lengths.size();
    for (std::size_t a = 0; a <= i; ++a) {
        for (std::size_t b = i; b < n; ++b) {
            const std::size_t len = b - a + 1;
            if (len > max_window) continue;
            for (const auto& s : train) {
                for (std::size_t sa = 0; sa + len <= s.lengths.size(); ++sa) {
                    bool same = true;
                    for (std::size_t k = 0; k < len && same; ++k) same = s.lengths[sa + k] == lengths[a + k];
                    if (!same) continue;
                    mpz_class w = 1;
                    w <<= static_cast<mp_bitcnt_t>(len);
                    table[tag_index(s.tags[sa + (i - a)])] += w;
                }
            }
        }
    }
    return table;
}

struct OracleDecision {
    CoarseTag tag;
    DecisionSource source;
    mpz_class score;
};

inline OracleDecision oracle_select(const Corpus& train, const OracleTable& table, std::uint32_t word_length) {
    std::array<std::uint64_t, kTagCount> global{}, by_length{};
    for (const auto& s : train)
        for (std::size_t i = 0; i < s.tags.size(); ++i) {
            ++global[tag_index(s.tags[i])];
            if (s.lengths[i] == word_length) ++by_length[tag_index(s.tags[i])];
        }

    // Candidates ranked by (value desc, global frequency desc, declaration order asc).
    auto pick = [&](auto value) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kTagCount; ++k) {
            if (value(k) > value(best) || (value(k) == value(best) && global[k] > global[best])) best = k;
        }
        return kAllTags[best];
    };

    bool any = false;
    for (const auto& v : table) any = any || v > 0;
    if (any) {
        const auto t = pick([&](std::size_t k) { return table[k]; });
        return {t, DecisionSource::matched, table[tag_index(t)]};
    }
    bool seen = false;
    for (auto c : by_length) seen = seen || c > 0;
    if (seen) return {pick([&](std::size_t k) { return by_length[k]; }), DecisionSource::fallback_length, 0};
    return {pick([&](std::size_t k) { return global[k]; }), DecisionSource::fallback_global, 0};
}

inline std::vector<OracleDecision> oracle_tag(const Corpus& train, const std::vector<std::uint32_t>& lengths,
                                              std::size_t max_window) {
    std::vector<OracleDecision> out;
    for (std::size_t i = 0; i < lengths.size(); ++i)
        out.push_back(oracle_select(train, oracle_scores(train, lengths, i, max_window), lengths[i]));
    return out;
}

inline std::string to_decimal(const Score& s) { return s.str(); }
inline std::string to_decimal(const mpz_class& s) { return s.get_str(); }

// ---- files -------------------------------------------------------------------

class TempDir {
public:
    TempDir() {
        static std::size_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("lentag-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Opening lines of SUSANNE text A01, ending at
/// "Jury" with the brackets closed so the fragment is one sentence.
inline std::string susanne_excerpt() {
    return "A01:0010a\t-\tYB\t<minbrk>\t-\t[Oh.Oh]\n"
           "A01:0010b\t-\tAT\tThe\tthe\t[O[S[Nns:s.\n"
           "A01:0010c\t-\tNP1s\tFulton\tFulton\t[Nns.\n"
           "A01:0010d\t-\tNNL1cb\tCounty\tcounty\t.Nns]\n"
           "A01:0010e\t-\tJJ\tGrand\tgrand\t.\n"
           "A01:0010f\t-\tNN1c\tJury\tjury\t.Nns:s]S]O]\n";
}

/// Writes a synthetic SUSANNE-format file: sentences of random words with
/// fine tags drawn from a small SUSANNE-like inventory.
inline void write_synthetic_susanne(const std::filesystem::path& file, char genre, std::size_t sentences,
                                    std::uint64_t seed) {
    static const std::pair<const char*, const char*> kVocab[] = {
        {"AT", "the"},      {"AT1", "a"},        {"NN1c", "dog"},     {"NN2", "horses"},  {"NP1s", "Fulton"},
        {"JJ", "grand"},    {"JJ", "quiet"},     {"VVD", "rode"},     {"VVZ", "says"},    {"VMo", "would"},
        {"RR", "slowly"},   {"II", "into"},      {"IO", "of"},        {"CC", "and"},      {"PPHS1m", "he"},
        {"MC", "three"},    {"UH", "oh"},        {"TO", "to"},        {"XX", "not"},      {"DD1i", "this"},
        {"FO", "x+y"},      {"NN1u", "<bital>dust<eital>"}, {"YC", ","}, {"YIL", "<ldquo>"}, {"YIR", "<rdquo>"},
    };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len(1, 14);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kVocab) - 1);
    std::string out;
    std::size_t ref = 10;
    auto line = [&](const std::string& tag, const std::string& word, const std::string& parse) {
        out += std::string(1, genre) + "01:" + std::to_string(ref++) + "\t-\t" + tag + "\t" + word + "\t" + word +
               "\t" + parse + "\n";
    };
    for (std::size_t s = 0; s < sentences; ++s) {
        line("YB", "<minbrk>", "[Oh.Oh]");
        const auto n = len(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& [tag, word] = kVocab[pick(rng)];
            std::string parse = i == 0 ? "[O[S." : ".";
            if (i + 1 == n) parse += "S]O]";
            line(tag, word, parse);
        }
    }
    write_text(file, out);
}

} // namespace lentag::testing
