#include "lentag/error.hpp"
#include "lentag/kb.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace lentag;
using namespace lentag::testing;
using enum lentag::CoarseTag;

namespace {

TagSequenceCounts seqs(std::initializer_list<std::pair<TagSequence, Count>> items) {
    TagSequenceCounts out;
    for (const auto& [s, n] : items) out[s] = n;
    return out;
}

const TagSequenceCounts& at(const KnowledgeBase& kb, const char* key) {
    return kb.lookup_or_empty(LengthKey::parse(key).lengths);
}

} // namespace

TEST(LengthKey, CanonicalText) {
    EXPECT_EQ(LengthKey::parse("3:6:6").to_string(), "3:6:6");
    EXPECT_EQ(LengthKey::parse("12").lengths, (std::vector<std::uint32_t>{12}));
    EXPECT_THROW(LengthKey::parse("3::6"), FormatError);
    EXPECT_THROW(LengthKey::parse("0"), FormatError);
    EXPECT_THROW(LengthKey::parse(""), FormatError);
}

TEST(IndexSentence, OutwardKeysFromFirstWord) {
    const auto kb = build_kb({fulton()});
    EXPECT_EQ(at(kb, "3"), seqs({{{Det}, 1}}));
    EXPECT_EQ(at(kb, "3:6"), seqs({{{Det, N}, 1}}));
    EXPECT_EQ(at(kb, "3:6:6"), seqs({{{Det, N, N}, 1}}));
    EXPECT_EQ(at(kb, "3:6:6:5"), seqs({{{Det, N, N, Adj}, 1}}));
    EXPECT_EQ(at(kb, "3:6:6:5:4"), seqs({{{Det, N, N, Adj, N}, 1}}));
}

TEST(IndexSentence, RepeatedLengthCountedPerOccurrence) {
    const auto kb = build_kb({fulton()});
    EXPECT_EQ(at(kb, "6"), seqs({{{N}, 2}}));
    EXPECT_EQ(at(kb, "6:6:5"), seqs({{{N, N, Adj}, 1}}));
}

TEST(IndexSentence, SingleWord) {
    const auto kb = build_kb({{{7}, {V}}});
    EXPECT_EQ(kb.distinct_keys(), 1u);
    EXPECT_EQ(at(kb, "7"), seqs({{{V}, 1}}));
}

TEST(IndexSentence, WindowCapRespected) {
    const auto kb = build_kb({fulton()}, 2);
    EXPECT_TRUE(at(kb, "3:6:6").empty());
    EXPECT_EQ(at(kb, "6:5"), seqs({{{N, Adj}, 1}}));
    EXPECT_EQ(kb.lookup(LengthKey::parse("3:6:6").lengths), nullptr);
}

TEST(IndexSentence, RejectsEmptyAndMismatched) {
    KnowledgeBase kb;
    EXPECT_THROW(kb.index_sentence(std::vector<std::uint32_t>{}, std::vector<CoarseTag>{}), DataError);
    EXPECT_THROW(kb.index_sentence(std::vector<std::uint32_t>{3, 4}, std::vector<CoarseTag>{N}), DataError);
}

TEST(Lookup, AbsentKeyIsEmpty) {
    const auto kb = build_kb({fulton()});
    EXPECT_TRUE(at(kb, "9:9:9").empty());
    EXPECT_EQ(at(kb, "3:6"), seqs({{{Det, N}, 1}}));
}

TEST(Lookup, ReturnsExactMultisetInserted) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto corpus = random_corpus(rng);
        const auto kb = build_kb(corpus, 8);
        // Brute-force multiset of (lengths, tags) windows.
        std::map<std::vector<std::uint32_t>, TagSequenceCounts> expected;
        for (const auto& s : corpus)
            for (std::size_t a = 0; a < s.lengths.size(); ++a)
                for (std::size_t b = a; b < s.lengths.size(); ++b)
                    ++expected[{s.lengths.begin() + a, s.lengths.begin() + b + 1}]
                              [{s.tags.begin() + a, s.tags.begin() + b + 1}];
        ASSERT_EQ(kb.distinct_keys(), expected.size());
        for (const auto& [key, counts] : expected) ASSERT_EQ(kb.lookup_or_empty(key), counts);
    }
}

TEST(Merge, IdentityAndMismatch) {
    const auto kb = build_kb({fulton()});
    EXPECT_EQ(merge(kb, KnowledgeBase()).serialize(), kb.serialize());
    EXPECT_THROW(merge(kb, KnowledgeBase(5)), DataError);
    EXPECT_THROW(merge(kb, KnowledgeBase(kDefaultMaxWindow, true)), DataError);
}

TEST(Merge, HalvesEqualWhole) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Corpus corpus;
        for (int i = 0; i < 10; ++i) corpus.push_back(random_sentence(rng, {}));
        const Corpus first(corpus.begin(), corpus.begin() + 4), second(corpus.begin() + 4, corpus.end());
        const auto whole = build_kb(corpus, 6, true);
        const auto merged = merge(build_kb(first, 6, true), build_kb(second, 6, true));
        ASSERT_EQ(merged.serialize(), whole.serialize());
        ASSERT_EQ(merged, whole);
    }
}

TEST(SaveLoad, RoundTripWithContext) {
    const auto kb = build_kb({fulton(), {{2, 6}, {Pron, V}}}, 4, true);
    std::istringstream in(kb.serialize());
    const auto back = KnowledgeBase::load(in);
    EXPECT_EQ(back, kb);
    EXPECT_EQ(back.serialize(), kb.serialize());
    EXPECT_TRUE(back.has_context());
    EXPECT_EQ(back.tag_frequencies(), kb.tag_frequencies());
}

TEST(SaveLoad, CanonicalAcrossSentenceOrder) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto corpus = random_corpus(rng);
        const auto a = build_kb(corpus, 8, true).serialize();
        std::shuffle(corpus.begin(), corpus.end(), rng);
        ASSERT_EQ(build_kb(corpus, 8, true).serialize(), a);
    }
}

TEST(SaveLoad, EntriesSortedByKeyThenTags) {
    const auto text = build_kb({fulton()}).serialize();
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; std::getline(in, line); ++i) {
        if (i < 3) continue;
        auto t1 = line.find('\t'), t2 = line.find('\t', t1 + 1);
        rows.emplace_back(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1));
    }
    EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
    EXPECT_EQ(rows.size(), 14u);
}

TEST(SaveLoad, Errors) {
    const std::string header = "LKB 1\nmaxwindow 3\ntags N,V,Adj,Adv,Det,Pron,Prep,Conj,Num,Aux,Interj,Part,Punct,Formula,Other\n";
    auto fails_at = [](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            KnowledgeBase::load(in);
        } catch (const FormatError& e) {
            return e.line() == line;
        }
        return false;
    };
    EXPECT_TRUE(fails_at("LKB 2\n", 1));
    EXPECT_TRUE(fails_at(header + "3\tDet\t0\n", 4));
    EXPECT_TRUE(fails_at(header + "3\tDet\t1\n3\tNoun\t1\n", 5));
    EXPECT_TRUE(fails_at(header + "3\tDet\tmany\n", 4));
    EXPECT_TRUE(fails_at(header + "3:4\tDet\t1\n", 4));
    EXPECT_TRUE(fails_at(header + "3:4:5:6\tDet:N:N:N\t1\n", 4));
    EXPECT_TRUE(fails_at(header + "3\tDet\t1\n3\tDet\t2\n", 5));
    EXPECT_TRUE(fails_at(header + "CTX\n3:4|_:_\tDet\t1\n", 5));
    EXPECT_TRUE(fails_at("LKB 1\nmaxwindow 3\ntags N,V\n", 3));

    std::istringstream ok(header + "3\tDet\t2\nCTX\n3|_\tDet\t2\n");
    const auto kb = KnowledgeBase::load(ok);
    EXPECT_EQ(kb.tag_frequency(Det), 2u);
    EXPECT_TRUE(kb.has_context());
}

TEST(Stats, FiveWordExample) {
    const auto s = build_kb({fulton()}, 5).stats();
    EXPECT_EQ(s.windows_per_length, (std::vector<Count>{5, 4, 3, 2, 1}));
    EXPECT_EQ(s.total_windows, 15u);
    EXPECT_EQ(s.entries, 14u);
    EXPECT_EQ(s.distinct_keys, 14u);
    EXPECT_LE(s.distinct_keys, s.total_windows);
    EXPECT_GT(s.entry_bytes, 0u);
}

TEST(Stats, EmptyKbIsAllZero) {
    const auto s = KnowledgeBase(4).stats();
    EXPECT_EQ(s.entries, 0u);
    EXPECT_EQ(s.distinct_keys, 0u);
    EXPECT_EQ(s.total_windows, 0u);
    EXPECT_EQ(s.context_entries, 0u);
    EXPECT_EQ(s.entry_bytes, 0u);
    EXPECT_EQ(s.windows_per_length, (std::vector<Count>(4, 0)));
}

TEST(DerivedTables, RecomputableFromSingleWordEntries) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto kb = build_kb(random_corpus(rng), 5);
        std::array<Count, kTagCount> recomputed{};
        kb.for_each_entry([&](auto key, auto tags, Count n) {
            if (key.size() == 1) recomputed[tag_index(tags[0])] += n;
        });
        ASSERT_EQ(recomputed, kb.tag_frequencies());
    }
}

TEST(ContextIndex, HoleKeysForSingleSentence) {
    const auto kb = build_kb({fulton()}, 5, true);
    ContextKey key{{3, 6}, {Det, N}, 0};
    const auto* found = kb.context_lookup(key);
    ASSERT_NE(found, nullptr);
    EXPECT_EQ(*found, (TagCounts{{Det, 1}}));
    key.tags[0] = Adj; // the hole's own tag never matters
    EXPECT_EQ(kb.context_lookup(key), found);
    EXPECT_EQ(key.to_string(), "3:6|_:N");
    EXPECT_EQ(build_kb({fulton()}).context_lookup(key), nullptr);
}
