#pragma once

#include "lentag/tags.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lentag {

/// One line of a SUSANNE source file, fields verbatim.
struct RawToken {
    std::string reference;
    std::string status;
    std::string fine_tag;
    std::string surface;
    std::string lemma;
    std::string parse;

    /// Brown genre letter, the first character of the reference.
    char genre() const noexcept { return reference.empty() ? '\0' : reference.front(); }
};

/// Splits a SUSANNE line on whitespace into its six fields.
/// Throws FormatError (carrying line_no) when fewer than six are present.
RawToken parse_susanne_line(std::string_view line, std::size_t line_no = 0);

/// SGML entity token ("<ldquo>") to ASCII replacement.
class EntityTable {
public:
    EntityTable() = default;

    /// Entities seen in SUSANNE: typographic quotes, dashes, accents,
    /// font-shift markers (which expand to nothing).
    static EntityTable builtin();

    /// TSV of `entity<TAB>replacement`; '#' starts a comment line.
    static EntityTable load(std::istream& in);
    static EntityTable load_file(const std::filesystem::path& path);

    void set(std::string entity, std::string replacement);
    const std::string* find(std::string_view entity) const;
    std::size_t size() const noexcept { return table_.size(); }

private:
    std::map<std::string, std::string, std::less<>> table_;
};

inline constexpr std::string_view kUnknownEntityReplacement = "?";

struct MarkupReport {
    std::size_t unknown_entities = 0;
    std::map<std::string, std::size_t> unknown;
};

/// Replaces every `<name>` entity in surface. Unknown entities become "?"
/// and are tallied in report when one is supplied.
std::string strip_markup(std::string_view surface, const EntityTable& entities,
                         MarkupReport* report = nullptr);

/// Fine-to-coarse tag rules. A pattern ending in '*' is a prefix rule,
/// anything else matches exactly. Exact rules are tried first, then the
/// longest matching prefix; among equal candidates the earliest rule wins.
class TagsetMapping {
public:
    struct Rule {
        std::string pattern;
        bool prefix = false;
        CoarseTag coarse = CoarseTag::Other;
    };

    TagsetMapping() = default;

    static TagsetMapping builtin();

    /// TSV of `pattern<TAB>coarse_tag`; pattern "*" sets the default.
    static TagsetMapping load(std::istream& in);
    static TagsetMapping load_file(const std::filesystem::path& path);

    void add_rule(std::string_view pattern, CoarseTag coarse);
    void set_default(CoarseTag t) noexcept { default_ = t; }

    const std::vector<Rule>& rules() const noexcept { return rules_; }
    CoarseTag default_tag() const noexcept { return default_; }

    CoarseTag simplify(std::string_view fine) const;

private:
    std::vector<Rule> rules_;
    CoarseTag default_ = CoarseTag::Other;
};

inline CoarseTag simplify_tag(std::string_view fine, const TagsetMapping& mapping) {
    return mapping.simplify(fine);
}

/// Number of characters (UTF-8 code points) in an already converted
/// surface. Throws DataError on an empty string.
std::uint32_t word_length(std::string_view surface);

struct WordRecord {
    CoarseTag tag = CoarseTag::Other;
    std::uint32_t length = 1;
    std::optional<std::string> surface;

    bool operator==(const WordRecord&) const = default;
};

struct Sentence {
    std::vector<WordRecord> words;

    std::vector<std::uint32_t> lengths() const;
    std::vector<CoarseTag> tags() const;

    bool operator==(const Sentence&) const = default;
};

/// Fine tags that mark non-lexical breaks rather than words.
bool is_break_tag(std::string_view fine) noexcept;

struct TokenGroup {
    std::vector<RawToken> tokens;
    /// A lone non-lexical break token; never becomes a sentence.
    bool is_break = false;
    /// Trailing group whose brackets never closed.
    bool open = false;
};

/// Groups tokens into sentences by parse-field bracket depth: a sentence
/// closes whenever the running count of '[' minus ']' returns to zero.
/// Break tokens form their own groups. A trailing group left open at the
/// end of input is still emitted. Throws DataError if the depth goes
/// negative.
std::vector<TokenGroup> segment_sentences(const std::vector<RawToken>& tokens);

struct ConversionReport {
    std::size_t files = 0;
    std::size_t tokens = 0;
    std::size_t sentences = 0;
    std::size_t dropped = 0;
    std::size_t unknown_entities = 0;
    std::size_t unterminated = 0;
    std::map<char, std::size_t> per_genre;

    nlohmann::ordered_json to_json() const;
};

struct PrepareOptions {
    const TagsetMapping* mapping = nullptr;
    const EntityTable* entities = nullptr;
    std::set<char> genres;
    bool keep_surface = true;
};

struct PreparedCorpus {
    std::vector<Sentence> sentences;
    ConversionReport report;
};

/// Converts one SUSANNE file's contents. Tokens outside opts.genres are
/// discarded after segmentation.
PreparedCorpus convert_susanne(std::istream& in, const PrepareOptions& opts);

/// Converts every regular file directly under source_dir, in file name
/// order. Throws DataError when no token is selected.
PreparedCorpus prepare_corpus(const std::filesystem::path& source_dir, const PrepareOptions& opts);

/// prepare_corpus followed by write_flatfile to out.
ConversionReport build_flatfile(const std::filesystem::path& source_dir, const PrepareOptions& opts,
                                const std::filesystem::path& out);

void write_flatfile(std::ostream& out, const std::vector<Sentence>& sentences);
void write_flatfile(const std::filesystem::path& out, const std::vector<Sentence>& sentences);

/// Parses `TAG:LEN:"SURFACE"` lines; blank lines end sentences, '#' lines
/// are comments. Spaces before the first colon are tolerated.
std::vector<Sentence> read_flatfile(std::istream& in);
std::vector<Sentence> read_flatfile(const std::filesystem::path& path);

/// Parses "A,G,J" (or "AGJ") into a set of genre letters.
std::set<char> parse_genres(std::string_view spec);

} // namespace lentag
