#include "lentag/cli.hpp"

#include "lentag/corpus.hpp"
#include "lentag/error.hpp"
#include "lentag/eval.hpp"
#include "lentag/kb.hpp"
#include "lentag/tagger.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lentag::cli {

namespace fs = std::filesystem;

namespace {

struct TaggingFlags {
    std::string mode = "single";
    std::size_t max_window = 0;
    std::size_t refine_iters = 3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "single or multi (multi needs a KB trained with --context)")
            ->check(CLI::IsMember({"single", "multi"}))
            ->capture_default_str();
        cmd->add_option("--max-window", max_window, "longest window to query (0 = the KB's max window)")
            ->capture_default_str();
        cmd->add_option("--refine-iters", refine_iters, "refinement passes in multi mode")->capture_default_str();
    }

    TaggingConfig config() const {
        TaggingConfig cfg;
        if (max_window) cfg.max_window = max_window;
        cfg.mode = mode == "multi" ? TaggingMode::multi_pass : TaggingMode::single_pass;
        cfg.max_refine_iters = refine_iters;
        return cfg;
    }
};

struct TableFlags {
    std::string mapping = "default";
    std::string entities = "default";

    void attach(CLI::App* cmd) {
        cmd->add_option("--mapping", mapping, "tagset mapping TSV, or 'default'")->capture_default_str();
        cmd->add_option("--entities", entities, "entity table TSV, or 'default'")->capture_default_str();
    }

    TagsetMapping load_mapping() const {
        return mapping == "default" ? TagsetMapping::builtin() : TagsetMapping::load_file(mapping);
    }
    EntityTable load_entities() const {
        return entities == "default" ? EntityTable::builtin() : EntityTable::load_file(entities);
    }
};

void write_json(const nlohmann::ordered_json& j, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

std::vector<std::uint32_t> parse_length_list(const std::string& text) {
    try {
        return LengthKey::parse(text).lengths;
    } catch (const FormatError&) {
        throw DataError("--lengths expects positive integers joined by ':', got '" + text + "'");
    }
}

void print_decisions(std::ostream& out, const std::vector<TagDecision>& decisions, bool verbose) {
    for (std::size_t i = 0; i < decisions.size(); ++i) out << (i ? " " : "") << tag_name(decisions[i].tag);
    if (verbose) {
        out << '\t';
        for (std::size_t i = 0; i < decisions.size(); ++i)
            out << (i ? " " : "") << tag_name(decisions[i].tag) << '/' << source_name(decisions[i].source);
    }
    out << '\n';
}

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

} // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string word;
    while (in >> word) {
        std::size_t b = 0, e = word.size();
        while (b < e && is_punct(word[b])) ++b;
        if (b == e) {
            for (char c : word) out.emplace_back(1, c);
            continue;
        }
        while (e > b && is_punct(word[e - 1])) --e;
        for (std::size_t i = 0; i < b; ++i) out.emplace_back(1, word[i]);
        out.push_back(word.substr(b, e - b));
        for (std::size_t i = e; i < word.size(); ++i) out.emplace_back(1, word[i]);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Part-of-speech tagging from word lengths alone", "lentag"};
    app.require_subcommand(1);

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Convert SUSANNE files to a flatfile corpus");
    std::string prep_input, prep_genres, prep_out, prep_report;
    bool prep_omit_surface = false;
    TableFlags prep_tables;
    prepare->add_option("--input", prep_input, "directory of SUSANNE files")->required();
    prepare->add_option("--genres", prep_genres, "genre letters, e.g. A,G,J")->required();
    prepare->add_option("--out", prep_out, "flatfile to write")->required();
    prepare->add_option("--report", prep_report, "conversion report JSON (default: stdout)");
    prepare->add_flag("--omit-surface", prep_omit_surface, "write TAG:LEN: without the word");
    prep_tables.attach(prepare);

    // split
    auto* split = app.add_subcommand("split", "Write train and test flatfiles from disjoint genre sets");
    std::string split_input, split_train = "A,G,J", split_test = "N", split_train_out, split_test_out, split_report;
    TableFlags split_tables;
    split->add_option("--input", split_input, "directory of SUSANNE files")->required();
    split->add_option("--train-genres", split_train, "training genres")->capture_default_str();
    split->add_option("--test-genres", split_test, "test genres")->capture_default_str();
    split->add_option("--train-out", split_train_out, "training flatfile")->required();
    split->add_option("--test-out", split_test_out, "test flatfile")->required();
    split->add_option("--report", split_report, "JSON with both conversion reports (default: stdout)");
    split_tables.attach(split);

    // train
    auto* trn = app.add_subcommand("train", "Build a knowledge base from flatfile corpora");
    std::vector<std::string> train_corpora;
    std::string train_out;
    std::size_t train_window = kDefaultMaxWindow;
    bool train_context = false;
    trn->add_option("--corpus", train_corpora, "flatfile corpus (repeatable)")->required();
    trn->add_option("--out", train_out, "LKB file to write")->required();
    trn->add_option("--max-window", train_window, "longest window indexed")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    trn->add_flag("--context", train_context, "also build the context index for multi-pass tagging");

    // kb-stats
    auto* kbstats = app.add_subcommand("kb-stats", "Print knowledge base statistics as JSON");
    std::string stats_kb;
    kbstats->add_option("kb", stats_kb, "LKB file")->required();

    // tag
    auto* tag = app.add_subcommand("tag", "Tag length sequences or raw text");
    std::string tag_kb;
    std::vector<std::string> tag_lengths;
    std::string tag_text;
    bool tag_verbose = false;
    TaggingFlags tag_flags;
    tag->add_option("--kb", tag_kb, "LKB file")->required();
    auto* lengths_opt = tag->add_option("--lengths", tag_lengths, "colon-joined word lengths, e.g. 3:6:6:5:4");
    auto* text_opt = tag->add_option("--text", tag_text, "text to tokenize and tag, one sentence per line");
    lengths_opt->excludes(text_opt);
    tag->add_flag("--verbose", tag_verbose, "append tag/source pairs");
    tag_flags.attach(tag);

    // eval
    auto* ev = app.add_subcommand("eval", "Tag a test flatfile and score it against its gold tags");
    std::string ev_kb, ev_test, ev_report;
    unsigned ev_threads = 0;
    TaggingFlags ev_flags;
    ev->add_option("--kb", ev_kb, "LKB file")->required();
    ev->add_option("--test", ev_test, "test flatfile")->required();
    ev->add_option("--report", ev_report, "report JSON (default: stdout)");
    ev->add_option("--threads", ev_threads, "worker threads (0 = hardware concurrency)")->capture_default_str();
    ev_flags.attach(ev);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (*tag && tag_lengths.empty() && tag_text.empty())
            throw CLI::RequiredError("tag needs --lengths or --text");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return kOk;
        }
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*prepare) {
            const auto mapping = prep_tables.load_mapping();
            const auto entities = prep_tables.load_entities();
            PrepareOptions opts{&mapping, &entities, parse_genres(prep_genres), !prep_omit_surface};
            const auto report = build_flatfile(prep_input, opts, prep_out);
            write_json(report.to_json(), prep_report, out);
        } else if (*split) {
            const auto report =
                split_corpus(split_input, split_tables.load_mapping(), split_tables.load_entities(),
                             parse_genres(split_train), parse_genres(split_test), split_train_out, split_test_out);
            nlohmann::ordered_json j;
            j["train"] = report.train.to_json();
            j["test"] = report.test.to_json();
            write_json(j, split_report, out);
        } else if (*trn) {
            KnowledgeBase kb(train_window, train_context);
            for (const auto& path : train_corpora)
                for (const auto& s : read_flatfile(fs::path(path))) kb.index_sentence(s);
            if (kb.untrained()) throw DataError("training corpora contain no tokens");
            kb.save(fs::path(train_out));
        } else if (*kbstats) {
            write_json(KnowledgeBase::load(fs::path(stats_kb)).stats().to_json(), "", out);
        } else if (*tag) {
            const auto kb = KnowledgeBase::load(fs::path(tag_kb));
            const auto cfg = tag_flags.config();
            for (const auto& text : tag_lengths) print_decisions(out, tag_sentence(kb, parse_length_list(text), cfg), tag_verbose);
            std::istringstream lines(tag_text);
            std::string line;
            while (std::getline(lines, line)) {
                std::vector<std::uint32_t> lengths;
                for (const auto& tok : tokenize(line)) lengths.push_back(word_length(tok));
                if (!lengths.empty()) print_decisions(out, tag_sentence(kb, lengths, cfg), tag_verbose);
            }
        } else if (*ev) {
            const auto kb = KnowledgeBase::load(fs::path(ev_kb));
            const auto test = read_flatfile(fs::path(ev_test));
            write_json(evaluate(kb, test, ev_flags.config(), ev_threads).to_json(), ev_report, out);
        }
    } catch (const FormatError& e) {
        err << "lentag: format error: " << e.what() << '\n';
        return kData;
    } catch (const DataError& e) {
        err << "lentag: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "lentag: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace lentag::cli
