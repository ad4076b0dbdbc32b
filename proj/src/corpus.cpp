#include "lentag/corpus.hpp"

#include "lentag/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace lentag {

namespace fs = std::filesystem;

namespace {

bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_entity_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    return in;
}

template <class F>
void for_each_tsv_row(std::istream& in, F&& f) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("expected two tab-separated fields", line_no);
        f(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1), line_no);
    }
}

} // namespace

RawToken parse_susanne_line(std::string_view line, std::size_t line_no) {
    auto fields = split_ws(line);
    if (fields.size() < 6)
        throw FormatError("SUSANNE line has " + std::to_string(fields.size()) + " fields, expected 6", line_no);
    RawToken t;
    t.reference = fields[0];
    t.status = fields[1];
    t.fine_tag = fields[2];
    t.surface = fields[3];
    t.lemma = fields[4];
    t.parse = fields[5];
    return t;
}

// ---- entities --------------------------------------------------------------

EntityTable EntityTable::builtin() {
    EntityTable t;
    static const std::pair<const char*, const char*> kDefaults[] = {
        {"<ldquo>", "\""}, {"<rdquo>", "\""}, {"<lsquo>", "'"},  {"<rsquo>", "'"},
        {"<apos>", "'"},   {"<quot>", "\""},  {"<amp>", "&"},    {"<lt>", "<"},
        {"<gt>", ">"},     {"<hyphen>", "-"}, {"<minus>", "-"},  {"<ndash>", "-"},
        {"<mdash>", "-"},  {"<hellip>", "..."}, {"<deg>", "o"},  {"<frac12>", "1/2"},
        {"<frac14>", "1/4"}, {"<frac34>", "3/4"}, {"<times>", "x"}, {"<plus>", "+"},
        {"<aacute>", "a"}, {"<agrave>", "a"}, {"<acirc>", "a"},  {"<auml>", "a"},
        {"<eacute>", "e"}, {"<egrave>", "e"}, {"<ecirc>", "e"},  {"<euml>", "e"},
        {"<iacute>", "i"}, {"<icirc>", "i"},  {"<iuml>", "i"},   {"<oacute>", "o"},
        {"<ocirc>", "o"},  {"<ouml>", "o"},   {"<uacute>", "u"}, {"<ucirc>", "u"},
        {"<uuml>", "u"},   {"<ccedil>", "c"}, {"<ntilde>", "n"}, {"<Eacute>", "E"},
        {"<bital>", ""},   {"<eital>", ""},   {"<bbold>", ""},   {"<ebold>", ""},
        {"<bsc>", ""},     {"<esc>", ""},     {"<bsuper>", ""},  {"<esuper>", ""},
        {"<bsub>", ""},    {"<esub>", ""},    {"<bmath>", ""},   {"<emath>", ""},
        {"<minbrk>", ""},  {"<maxbrk>", ""},
    };
    for (const auto& [k, v] : kDefaults) t.set(k, v);
    return t;
}

EntityTable EntityTable::load(std::istream& in) {
    EntityTable t;
    for_each_tsv_row(in, [&](std::string_view entity, std::string_view repl, std::size_t line_no) {
        if (entity.size() < 3 || entity.front() != '<' || entity.back() != '>')
            throw FormatError("entity must look like <name>", line_no);
        t.set(std::string(entity), std::string(repl));
    });
    return t;
}

EntityTable EntityTable::load_file(const fs::path& path) {
    auto in = open_in(path);
    return load(in);
}

void EntityTable::set(std::string entity, std::string replacement) { table_[std::move(entity)] = std::move(replacement); }

const std::string* EntityTable::find(std::string_view entity) const {
    auto it = table_.find(entity);
    return it == table_.end() ? nullptr : &it->second;
}

std::string strip_markup(std::string_view surface, const EntityTable& entities, MarkupReport* report) {
    std::string out;
    out.reserve(surface.size());
    std::size_t i = 0;
    while (i < surface.size()) {
        if (surface[i] == '<') {
            std::size_t j = i + 1;
            while (j < surface.size() && is_entity_char(surface[j])) ++j;
            if (j < surface.size() && surface[j] == '>' && j > i + 1) {
                auto entity = surface.substr(i, j - i + 1);
                if (const auto* repl = entities.find(entity)) {
                    out += *repl;
                } else {
                    out += kUnknownEntityReplacement;
                    if (report) {
                        ++report->unknown_entities;
                        ++report->unknown[std::string(entity)];
                    }
                }
                i = j + 1;
                continue;
            }
        }
        out += surface[i++];
    }
    return out;
}

// ---- tagset mapping -------------------------------------------------------

TagsetMapping TagsetMapping::builtin() {
    TagsetMapping m;
    static const std::pair<const char*, CoarseTag> kRules[] = {
        {"TO", CoarseTag::Part},   {"XX", CoarseTag::Part},   {"GG", CoarseTag::Part},
        {"EX", CoarseTag::Pron},   {"A*", CoarseTag::Det},    {"D*", CoarseTag::Det},
        {"N*", CoarseTag::N},      {"VM*", CoarseTag::Aux},   {"V*", CoarseTag::V},
        {"J*", CoarseTag::Adj},    {"R*", CoarseTag::Adv},    {"I*", CoarseTag::Prep},
        {"C*", CoarseTag::Conj},   {"M*", CoarseTag::Num},    {"P*", CoarseTag::Pron},
        {"U*", CoarseTag::Interj}, {"Y*", CoarseTag::Punct},  {"F*", CoarseTag::Formula},
    };
    for (const auto& [p, t] : kRules) m.add_rule(p, t);
    m.set_default(CoarseTag::Other);
    return m;
}

TagsetMapping TagsetMapping::load(std::istream& in) {
    TagsetMapping m;
    for_each_tsv_row(in, [&](std::string_view pattern, std::string_view coarse, std::size_t line_no) {
        auto tag = parse_tag(trim(coarse));
        if (!tag) throw FormatError("unknown coarse tag '" + std::string(trim(coarse)) + "'", line_no);
        pattern = trim(pattern);
        if (pattern.empty()) throw FormatError("empty pattern", line_no);
        if (pattern == "*")
            m.set_default(*tag);
        else
            m.add_rule(pattern, *tag);
    });
    return m;
}

TagsetMapping TagsetMapping::load_file(const fs::path& path) {
    auto in = open_in(path);
    return load(in);
}

void TagsetMapping::add_rule(std::string_view pattern, CoarseTag coarse) {
    Rule r;
    r.prefix = !pattern.empty() && pattern.back() == '*';
    r.pattern = r.prefix ? pattern.substr(0, pattern.size() - 1) : pattern;
    r.coarse = coarse;
    rules_.push_back(std::move(r));
}

CoarseTag TagsetMapping::simplify(std::string_view fine) const {
    for (const auto& r : rules_)
        if (!r.prefix && r.pattern == fine) return r.coarse;
    const Rule* best = nullptr;
    for (const auto& r : rules_) {
        if (r.prefix && fine.starts_with(r.pattern) && (!best || r.pattern.size() > best->pattern.size()))
            best = &r;
    }
    return best ? best->coarse : default_;
}

// ---- words and sentences ----------------------------------------------------

std::uint32_t word_length(std::string_view surface) {
    if (surface.empty()) throw DataError("empty surface has no length");
    std::uint32_t n = 0;
    for (unsigned char c : surface)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::vector<std::uint32_t> Sentence::lengths() const {
    std::vector<std::uint32_t> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.length);
    return out;
}

std::vector<CoarseTag> Sentence::tags() const {
    std::vector<CoarseTag> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.tag);
    return out;
}

bool is_break_tag(std::string_view fine) noexcept { return fine == "YB"; }

std::vector<TokenGroup> segment_sentences(const std::vector<RawToken>& tokens) {
    std::vector<TokenGroup> groups;
    TokenGroup current;
    long depth = 0;
    for (const auto& tok : tokens) {
        for (char c : tok.parse) {
            if (c == '[') ++depth;
            else if (c == ']') --depth;
            if (depth < 0) throw DataError("bracket depth below zero at " + tok.reference);
        }
        if (is_break_tag(tok.fine_tag)) {
            groups.push_back(TokenGroup{{tok}, true, false});
            continue;
        }
        current.tokens.push_back(tok);
        if (depth == 0) {
            groups.push_back(std::move(current));
            current = {};
        }
    }
    if (!current.tokens.empty()) {
        current.open = true;
        groups.push_back(std::move(current));
    }
    return groups;
}

// ---- conversion -------------------------------------------------------------

nlohmann::ordered_json ConversionReport::to_json() const {
    nlohmann::ordered_json j;
    j["files"] = files;
    j["tokens"] = tokens;
    j["sentences"] = sentences;
    j["dropped"] = dropped;
    j["unknown_entities"] = unknown_entities;
    j["unterminated"] = unterminated;
    auto genres = nlohmann::ordered_json::object();
    for (const auto& [g, n] : per_genre) genres[std::string(1, g)] = n;
    j["per_genre"] = genres;
    return j;
}

namespace {

void merge_into(PreparedCorpus& dst, PreparedCorpus&& src) {
    auto& a = dst.report;
    const auto& b = src.report;
    a.files += b.files;
    a.tokens += b.tokens;
    a.sentences += b.sentences;
    a.dropped += b.dropped;
    a.unknown_entities += b.unknown_entities;
    a.unterminated += b.unterminated;
    for (const auto& [g, n] : b.per_genre) a.per_genre[g] += n;
    std::move(src.sentences.begin(), src.sentences.end(), std::back_inserter(dst.sentences));
}

} // namespace

PreparedCorpus convert_susanne(std::istream& in, const PrepareOptions& opts) {
    static const TagsetMapping kMapping = TagsetMapping::builtin();
    static const EntityTable kEntities = EntityTable::builtin();
    const auto& mapping = opts.mapping ? *opts.mapping : kMapping;
    const auto& entities = opts.entities ? *opts.entities : kEntities;

    std::vector<RawToken> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        tokens.push_back(parse_susanne_line(line, line_no));
    }

    PreparedCorpus out;
    out.report.files = 1;
    auto groups = segment_sentences(tokens);
    for (const auto& group : groups) {
        if (group.is_break) continue;
        Sentence s;
        for (const auto& tok : group.tokens) {
            if (!opts.genres.contains(tok.genre())) continue;
            MarkupReport mr;
            auto surface = strip_markup(tok.surface, entities, &mr);
            out.report.unknown_entities += mr.unknown_entities;
            if (surface.empty()) {
                ++out.report.dropped;
                continue;
            }
            WordRecord w;
            w.tag = mapping.simplify(tok.fine_tag);
            w.length = word_length(surface);
            if (opts.keep_surface) w.surface = std::move(surface);
            s.words.push_back(std::move(w));
            ++out.report.per_genre[tok.genre()];
        }
        if (s.words.empty()) continue;
        if (group.open) ++out.report.unterminated;
        out.report.tokens += s.words.size();
        ++out.report.sentences;
        out.sentences.push_back(std::move(s));
    }
    return out;
}

PreparedCorpus prepare_corpus(const fs::path& source_dir, const PrepareOptions& opts) {
    if (opts.genres.empty()) throw DataError("no genres selected");
    std::error_code ec;
    if (!fs::is_directory(source_dir, ec)) throw IoError("not a directory: " + source_dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(source_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().starts_with('.')) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    std::vector<std::future<PreparedCorpus>> jobs;
    jobs.reserve(files.size());
    for (const auto& f : files) {
        jobs.push_back(std::async(std::launch::async, [&opts, f] {
            auto in = open_in(f);
            try {
                return convert_susanne(in, opts);
            } catch (const FormatError& e) {
                throw FormatError(f.filename().string() + ": " + e.what());
            }
        }));
    }

    PreparedCorpus all;
    for (auto& j : jobs) merge_into(all, j.get());
    if (all.report.tokens == 0) throw DataError("no tokens selected for the requested genres");
    return all;
}

ConversionReport build_flatfile(const fs::path& source_dir, const PrepareOptions& opts, const fs::path& out) {
    auto corpus = prepare_corpus(source_dir, opts);
    write_flatfile(out, corpus.sentences);
    return corpus.report;
}

// ---- flatfile ---------------------------------------------------------------

void write_flatfile(std::ostream& out, const std::vector<Sentence>& sentences) {
    for (const auto& s : sentences) {
        for (const auto& w : s.words) {
            out << tag_name(w.tag) << ':' << w.length << ':';
            if (w.surface) out << '"' << *w.surface << '"';
            out << '\n';
        }
        out << '\n';
    }
}

void write_flatfile(const fs::path& out, const std::vector<Sentence>& sentences) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + out.string());
    write_flatfile(f, sentences);
    if (!f) throw IoError("write failed: " + out.string());
}

std::vector<Sentence> read_flatfile(std::istream& in) {
    std::vector<Sentence> out;
    Sentence current;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (!current.words.empty()) out.push_back(std::move(current));
        current = {};
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.front() == '#') continue;

        std::string_view rest = line;
        auto c1 = rest.find(':');
        if (c1 == std::string_view::npos) throw FormatError("expected TAG:LEN:\"SURFACE\"", line_no);
        auto tag_text = rest.substr(0, c1);
        while (!tag_text.empty() && tag_text.back() == ' ') tag_text.remove_suffix(1);
        auto tag = parse_tag(tag_text);
        if (!tag) throw FormatError("unknown tag '" + std::string(tag_text) + "'", line_no);
        rest.remove_prefix(c1 + 1);

        auto c2 = rest.find(':');
        if (c2 == std::string_view::npos) throw FormatError("missing length field", line_no);
        auto len_text = rest.substr(0, c2);
        std::uint32_t len = 0;
        auto [p, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
        if (ec != std::errc{} || p != len_text.data() + len_text.size() || len == 0)
            throw FormatError("length must be a positive integer, got '" + std::string(len_text) + "'", line_no);
        rest.remove_prefix(c2 + 1);

        WordRecord w;
        w.tag = *tag;
        w.length = len;
        if (!rest.empty()) {
            if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"')
                throw FormatError("surface must be double-quoted", line_no);
            std::string surface(rest.substr(1, rest.size() - 2));
            if (surface.empty() || word_length(surface) != len)
                throw FormatError("length " + std::to_string(len) + " does not match surface", line_no);
            w.surface = std::move(surface);
        }
        current.words.push_back(std::move(w));
    }
    flush();
    return out;
}

std::vector<Sentence> read_flatfile(const fs::path& path) {
    auto in = open_in(path);
    return read_flatfile(in);
}

std::set<char> parse_genres(std::string_view spec) {
    std::set<char> out;
    for (char c : spec) {
        if (c == ',' || is_space(c)) continue;
        if (!std::isupper(static_cast<unsigned char>(c))) throw DataError("bad genre letter '" + std::string(1, c) + "'");
        out.insert(c);
    }
    return out;
}

} // namespace lentag
