#include "lentag/kb.hpp"

#include "lentag/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace lentag {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "LKB 1";

std::size_t hash_mix(std::size_t h, std::size_t v) noexcept {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
bool parse_uint(std::string_view s, T& value) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::vector<std::uint32_t> parse_lengths(std::string_view text, std::size_t line_no) {
    std::vector<std::uint32_t> out;
    for (auto part : split(text, ':')) {
        std::uint32_t v = 0;
        if (!parse_uint(part, v) || v == 0)
            throw FormatError("bad length key '" + std::string(text) + "'", line_no);
        out.push_back(v);
    }
    return out;
}

CoarseTag parse_tag_or_throw(std::string_view name, std::size_t line_no) {
    auto t = parse_tag(name);
    if (!t) throw FormatError("unknown tag name '" + std::string(name) + "'", line_no);
    return *t;
}

} // namespace

std::string join_lengths(std::span<const std::uint32_t> lengths) {
    std::string out;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (i) out += ':';
        out += std::to_string(lengths[i]);
    }
    return out;
}

std::string join_tags(std::span<const CoarseTag> tags) {
    std::string out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i) out += ':';
        out += tag_name(tags[i]);
    }
    return out;
}

std::string LengthKey::to_string() const { return join_lengths(lengths); }

LengthKey LengthKey::parse(std::string_view text) { return LengthKey{parse_lengths(text, 0)}; }

std::string ContextKey::to_string() const {
    std::string out = join_lengths(lengths);
    out += '|';
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i) out += ':';
        out += i == hole ? std::string_view("_") : tag_name(tags[i]);
    }
    return out;
}

bool ContextKey::operator==(const ContextKey& o) const {
    if (hole != o.hole || lengths != o.lengths || tags.size() != o.tags.size()) return false;
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (i != hole && tags[i] != o.tags[i]) return false;
    return true;
}

std::size_t KnowledgeBase::LengthsHash::operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h = hash_mix(h, x);
    return h;
}

std::size_t KnowledgeBase::ContextHash::operator()(const ContextKey& k) const noexcept {
    std::size_t h = hash_mix(k.lengths.size(), k.hole);
    for (auto x : k.lengths) h = hash_mix(h, x);
    for (std::size_t i = 0; i < k.tags.size(); ++i)
        if (i != k.hole) h = hash_mix(h, tag_index(k.tags[i]));
    return h;
}

nlohmann::ordered_json KbStats::to_json() const {
    nlohmann::ordered_json j;
    j["max_window"] = max_window;
    j["entries"] = entries;
    j["distinct_keys"] = distinct_keys;
    j["total_windows"] = total_windows;
    j["windows_per_length"] = windows_per_length;
    j["context_entries"] = context_entries;
    j["entry_bytes"] = entry_bytes;
    return j;
}

KnowledgeBase::KnowledgeBase(std::size_t max_window, bool with_context)
    : max_window_(max_window), with_context_(with_context) {
    if (max_window_ == 0) throw DataError("max_window must be at least 1");
}

void KnowledgeBase::check_window(std::span<const std::uint32_t> lengths, std::size_t tag_count) const {
    if (lengths.empty() || lengths.size() > max_window_)
        throw DataError("window of " + std::to_string(lengths.size()) + " words outside 1.." +
                        std::to_string(max_window_));
    if (tag_count != lengths.size()) throw DataError("tag sequence length differs from key length");
    for (auto l : lengths)
        if (l == 0) throw DataError("word length must be positive");
}

void KnowledgeBase::add(std::span<const std::uint32_t> lengths, std::span<const CoarseTag> tags, Count count) {
    check_window(lengths, tags.size());
    if (count == 0) return;
    auto& seqs = entries_[std::vector<std::uint32_t>(lengths.begin(), lengths.end())];
    seqs[TagSequence(tags.begin(), tags.end())] += count;
    if (lengths.size() == 1) unigram_[tag_index(tags[0])] += count;
}

void KnowledgeBase::add_context(const ContextKey& key, CoarseTag tag, Count count) {
    if (!with_context_) throw DataError("context indexing is disabled for this knowledge base");
    check_window(key.lengths, key.tags.size());
    if (key.hole >= key.lengths.size()) throw DataError("context hole outside window");
    if (count == 0) return;
    ContextKey k = key;
    k.tags[k.hole] = CoarseTag::N; // normalise the ignored slot so equal keys hash alike
    context_[std::move(k)][tag] += count;
}

void KnowledgeBase::index_sentence(std::span<const std::uint32_t> lengths, std::span<const CoarseTag> tags) {
    if (lengths.empty()) throw DataError("cannot index an empty sentence");
    if (lengths.size() != tags.size()) throw DataError("sentence lengths and tags differ in size");
    const std::size_t n = lengths.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t w = 1; w <= max_window_ && a + w <= n; ++w) {
            auto lw = lengths.subspan(a, w);
            auto tw = tags.subspan(a, w);
            add(lw, tw);
            if (!with_context_) continue;
            ContextKey key{{lw.begin(), lw.end()}, {tw.begin(), tw.end()}, 0};
            for (std::size_t p = 0; p < w; ++p) {
                key.hole = p;
                add_context(key, tw[p]);
            }
        }
    }
}

void KnowledgeBase::index_sentence(const Sentence& sentence) {
    auto lengths = sentence.lengths();
    auto tags = sentence.tags();
    index_sentence(lengths, tags);
}

const TagSequenceCounts* KnowledgeBase::lookup(std::span<const std::uint32_t> lengths) const {
    if (lengths.empty() || lengths.size() > max_window_) return nullptr;
    auto it = entries_.find(std::vector<std::uint32_t>(lengths.begin(), lengths.end()));
    return it == entries_.end() ? nullptr : &it->second;
}

const TagSequenceCounts& KnowledgeBase::lookup_or_empty(std::span<const std::uint32_t> lengths) const {
    static const TagSequenceCounts kEmpty;
    const auto* found = lookup(lengths);
    return found ? *found : kEmpty;
}

const TagCounts* KnowledgeBase::context_lookup(const ContextKey& key) const {
    if (!with_context_) return nullptr;
    auto it = context_.find(key);
    return it == context_.end() ? nullptr : &it->second;
}

bool KnowledgeBase::untrained() const noexcept {
    return std::all_of(unigram_.begin(), unigram_.end(), [](Count c) { return c == 0; });
}

KbStats KnowledgeBase::stats() const {
    KbStats s;
    s.max_window = max_window_;
    s.distinct_keys = entries_.size();
    s.windows_per_length.assign(max_window_, 0);
    for_each_entry([&](auto key, auto, Count n) {
        ++s.entries;
        s.total_windows += n;
        s.windows_per_length[key.size() - 1] += n;
    });
    for (const auto& [k, tags] : context_) s.context_entries += tags.size();

    std::ostringstream body;
    save(body);
    std::ostringstream header;
    KnowledgeBase(max_window_, with_context_).save(header);
    s.entry_bytes = body.str().size() - header.str().size();
    return s;
}

void KnowledgeBase::save(std::ostream& out) const {
    out << kMagic << '\n' << "maxwindow " << max_window_ << '\n' << "tags " << tagset_signature() << '\n';

    std::vector<std::tuple<std::string, std::string, Count>> rows;
    rows.reserve(entries_.size());
    for_each_entry([&](auto key, auto tags, Count n) { rows.emplace_back(join_lengths(key), join_tags(tags), n); });
    std::sort(rows.begin(), rows.end());
    for (const auto& [k, t, n] : rows) out << k << '\t' << t << '\t' << n << '\n';

    if (!with_context_) return;
    out << "CTX\n";
    rows.clear();
    for (const auto& [key, tags] : context_)
        for (const auto& [tag, n] : tags) rows.emplace_back(key.to_string(), std::string(tag_name(tag)), n);
    std::sort(rows.begin(), rows.end());
    for (const auto& [k, t, n] : rows) out << k << '\t' << t << '\t' << n << '\n';
}

void KnowledgeBase::save(const fs::path& out) const {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + out.string());
    save(f);
    if (!f) throw IoError("write failed: " + out.string());
}

std::string KnowledgeBase::serialize() const {
    std::ostringstream out;
    save(out);
    return out.str();
}

KnowledgeBase KnowledgeBase::load(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next() || line != kMagic) throw FormatError("not an LKB 1 file (version mismatch)", line_no ? line_no : 1);

    std::size_t max_window = 0;
    if (!next() || !line.starts_with("maxwindow ") || !parse_uint(std::string_view(line).substr(10), max_window) ||
        max_window == 0)
        throw FormatError("expected 'maxwindow <W>'", line_no);

    if (!next() || !line.starts_with("tags ")) throw FormatError("expected 'tags <names>'", line_no);
    auto names = split(std::string_view(line).substr(5), ',');
    for (auto n : names) parse_tag_or_throw(n, line_no);
    if (std::string_view(line).substr(5) != tagset_signature())
        throw FormatError("tag set differs from the 15 coarse tags", line_no);

    // Context presence is only known once "CTX" is seen, so collect first.
    struct CtxRow {
        ContextKey key;
        CoarseTag tag;
        Count count;
    };
    std::vector<CtxRow> ctx_rows;
    bool in_ctx = false;
    KnowledgeBase kb(max_window, false);

    while (next()) {
        if (line.empty()) continue;
        if (line == "CTX") {
            if (in_ctx) throw FormatError("duplicate CTX section", line_no);
            in_ctx = true;
            continue;
        }
        auto fields = split(line, '\t');
        if (fields.size() != 3) throw FormatError("expected 3 tab-separated fields", line_no);
        Count count = 0;
        if (!parse_uint(fields[2], count) || count == 0)
            throw FormatError("count must be a positive integer, got '" + std::string(fields[2]) + "'", line_no);

        if (!in_ctx) {
            auto lengths = parse_lengths(fields[0], line_no);
            TagSequence tags;
            for (auto t : split(fields[1], ':')) tags.push_back(parse_tag_or_throw(t, line_no));
            if (lengths.size() > max_window) throw FormatError("key longer than maxwindow", line_no);
            if (tags.size() != lengths.size()) throw FormatError("tag sequence length differs from key", line_no);
            if (kb.lookup_or_empty(lengths).contains(tags)) throw FormatError("duplicate entry", line_no);
            kb.add(lengths, tags, count);
        } else {
            auto bar = fields[0].find('|');
            if (bar == std::string_view::npos) throw FormatError("context key needs '|'", line_no);
            CtxRow row;
            row.key.lengths = parse_lengths(fields[0].substr(0, bar), line_no);
            auto slots = split(fields[0].substr(bar + 1), ':');
            std::size_t holes = 0;
            for (std::size_t i = 0; i < slots.size(); ++i) {
                if (slots[i] == "_") {
                    ++holes;
                    row.key.hole = i;
                    row.key.tags.push_back(CoarseTag::N);
                } else {
                    row.key.tags.push_back(parse_tag_or_throw(slots[i], line_no));
                }
            }
            if (holes != 1) throw FormatError("context key needs exactly one '_'", line_no);
            if (row.key.tags.size() != row.key.lengths.size() || row.key.lengths.size() > max_window)
                throw FormatError("malformed context key", line_no);
            row.tag = parse_tag_or_throw(fields[1], line_no);
            row.count = count;
            ctx_rows.push_back(std::move(row));
        }
    }

    if (in_ctx) {
        kb.with_context_ = true;
        for (const auto& r : ctx_rows) {
            if (const auto* existing = kb.context_lookup(r.key); existing && existing->contains(r.tag))
                throw FormatError("duplicate context entry " + r.key.to_string());
            kb.add_context(r.key, r.tag, r.count);
        }
    }
    return kb;
}

KnowledgeBase KnowledgeBase::load(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    return load(f);
}

bool KnowledgeBase::operator==(const KnowledgeBase& o) const {
    return max_window_ == o.max_window_ && with_context_ == o.with_context_ && unigram_ == o.unigram_ &&
           entries_ == o.entries_ && context_ == o.context_;
}

KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b) {
    if (a.max_window() != b.max_window()) throw DataError("cannot merge knowledge bases with different max_window");
    if (a.has_context() != b.has_context()) throw DataError("cannot merge with and without context index");
    KnowledgeBase out = a;
    b.for_each_entry([&](auto key, auto tags, Count n) { out.add(key, tags, n); });
    b.for_each_context([&](const ContextKey& key, CoarseTag tag, Count n) { out.add_context(key, tag, n); });
    return out;
}

KnowledgeBase train(const std::vector<Sentence>& corpus, std::size_t max_window, bool with_context) {
    KnowledgeBase kb(max_window, with_context);
    for (const auto& s : corpus) kb.index_sentence(s);
    return kb;
}

} // namespace lentag
