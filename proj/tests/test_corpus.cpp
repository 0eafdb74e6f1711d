#include "ipkit/corpus.hpp"
#include "ipkit/errors.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace ipkit;
using test_support::TempDir;

TEST_CASE("tokenize peels trailing punctuation and n't") {
    CHECK(tokenize("I don't have anything.") == Tokens{"I", "do", "n't", "have", "anything", "."});
    CHECK(tokenize("  Anyone know?!  ") == Tokens{"Anyone", "know", "?", "!"});
    CHECK(tokenize("wait, what") == Tokens{"wait", ",", "what"});
    CHECK(tokenize("CAN'T") == Tokens{"CA", "N'T"});
    CHECK(tokenize("n't") == Tokens{"n't"});  // bare clitic stays whole
    CHECK(tokenize("...they") == Tokens{"...they"});
    CHECK(tokenize("").empty());
}

TEST_CASE("detokenize inverts tokenize on normal text") {
    for (const char* s : {"I don't have anything to add.", "Anyone know what the issue might be?",
                          "If anyone asks, tell them I am busy.", "Nobody came"})
        CHECK(detokenize(tokenize(s)) == s);
}

TEST_CASE("locate_ips finds only the four target pronouns") {
    const auto hits = locate_ips(tokenize("Somebody told Someone that ANYTHING and anyone or nothing."));
    REQUIRE(hits.size() == 3);
    CHECK(hits[0] == IpOccurrence{2, Pronoun::Someone});
    CHECK(hits[1] == IpOccurrence{4, Pronoun::Anything});
    CHECK(hits[2] == IpOccurrence{6, Pronoun::Anyone});
}

TEST_CASE("substitute swaps the family and keeps casing") {
    auto r = make_record("a", "Someone left.", 0, Pronoun::Someone, Population::Native);
    CHECK(substitute(r) == Tokens{"Anyone", "left", "."});

    r = make_record("b", "I saw ANYTHING there.", 2, Pronoun::Anything, Population::Native);
    CHECK(substitute(r)[2] == "SOMETHING");

    r = make_record("c", "I saw anything there.", 2, Pronoun::Anything, Population::Native);
    const auto s = substituted(r);
    CHECK(s.original == Pronoun::Something);
    CHECK(s.raw_text == "I saw something there.");
    CHECK(substituted(s).tokens == r.tokens);
}

TEST_CASE("alternate and family") {
    for (auto p : {Pronoun::Someone, Pronoun::Anyone, Pronoun::Something, Pronoun::Anything}) {
        CHECK(alternate(alternate(p)) == p);
        CHECK(family(alternate(p)) != family(p));
    }
}

TEST_CASE("records_from_text numbers multiple occurrences") {
    const auto one = records_from_text("s1", "Did anyone call?", Population::Learner);
    REQUIRE(one.size() == 1);
    CHECK(one[0].id == "s1");
    CHECK(one[0].ip_index == 1);

    const auto two = records_from_text("s2", "Someone said something.", Population::Native);
    REQUIRE(two.size() == 2);
    CHECK(two[0].id == "s2.1");
    CHECK(two[1].id == "s2.2");
    CHECK(two[1].original == Pronoun::Something);

    CHECK(records_from_text("s3", "Nothing here.", Population::Native).empty());
}

TEST_CASE("validate rejects bad indices") {
    CHECK_THROWS_AS(make_record("x", "Someone left.", 5, Pronoun::Someone, Population::Native), ValidationError);
    CHECK_THROWS_AS(make_record("x", "Someone left.", 1, Pronoun::Someone, Population::Native), ValidationError);
    CHECK_THROWS_AS(make_record("x", "Someone left.", 0, Pronoun::Anyone, Population::Native), ValidationError);
}

TEST_CASE("parse_record_line reports the line number") {
    const auto ok = parse_record_line(
        R"({"id":"a","text":"Anyone home?","ip_index":0,"original":"anyone","population":"learner","note":[1,2]})", 1);
    CHECK(ok.population == Population::Learner);
    CHECK(ok.extras.at("note") == "[1,2]");

    auto line_of = [](const char* text) {
        try {
            parse_record_line(text, 7);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("not json") == 7);
    CHECK(line_of(R"({"id":"a","text":"Anyone?","original":"anyone","population":"native"})") == 7);
    CHECK(line_of(R"({"id":"a","text":"Anyone?","ip_index":-1,"original":"anyone","population":"native"})") == 7);
    CHECK(line_of(R"({"id":"a","text":"Anyone?","ip_index":0,"original":"somebody","population":"native"})") == 7);
    CHECK(line_of(R"({"id":"a","text":"Anyone?","ip_index":0,"original":"anyone","population":"martian"})") == 7);
    CHECK(line_of(R"({"id":"a","text":"Anyone?","ip_index":1,"original":"anyone","population":"native"})") == 7);
    CHECK(line_of("[1,2]") == 7);
}

TEST_CASE("corpus files round-trip records exactly") {
    // Random records built from a small vocabulary with one pronoun each.
    std::mt19937_64 rng(2024);
    const std::vector<std::string> words = {"the", "cat", "saw", "never", "if", "Did", "we", "than", "Bob", "x"};
    const std::vector<std::string> prons = {"someone", "Anyone", "SOMETHING", "anything"};
    const std::vector<std::string> punct = {".", "?", "!", ""};

    Corpus c;
    for (int i = 0; i < 100; ++i) {
        std::string text;
        const std::size_t before = rng() % 5, after = rng() % 5;
        for (std::size_t k = 0; k < before; ++k) text += words[rng() % words.size()] + " ";
        const auto& p = prons[rng() % prons.size()];
        text += p;
        for (std::size_t k = 0; k < after; ++k) text += " " + words[rng() % words.size()];
        text += punct[rng() % punct.size()];
        auto r = make_record("r" + std::to_string(i), text, before, *parse_pronoun(p),
                             static_cast<Population>(rng() % 3));
        if (i % 7 == 0) r.extras["meta"] = R"({"k":[1,"two"]})";
        c.records.push_back(std::move(r));
    }
    TempDir dir("corpus");
    save_corpus(c, dir / "c.jsonl");
    const auto back = load_corpus(dir / "c.jsonl");
    REQUIRE(back.records.size() == c.records.size());
    for (std::size_t i = 0; i < c.records.size(); ++i) CHECK(back.records[i] == c.records[i]);

    save_corpus(back, dir / "d.jsonl");
    CHECK(test_support::read_file(dir / "c.jsonl") == test_support::read_file(dir / "d.jsonl"));
}

TEST_CASE("CorpusReader skips blanks and rejects duplicate ids") {
    TempDir dir("reader");
    const std::string rec = R"({"id":"a","text":"Anyone?","ip_index":0,"original":"anyone","population":"native"})";
    test_support::write_file(dir / "ok.jsonl", rec + "\n\n  \n");
    CHECK(load_corpus(dir / "ok.jsonl").records.size() == 1);

    test_support::write_file(dir / "dup.jsonl", rec + "\n\n" + rec + "\n");
    try {
        load_corpus(dir / "dup.jsonl");
        FAIL("expected a duplicate-id error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl"), IoError);
}

TEST_CASE("idiom list matches patterns covering the pronoun") {
    const auto idioms = IdiomList::defaults();
    auto rec = [](const char* text) { return records_from_text("i", text, Population::Native).front(); };
    CHECK(idioms.matches(rec("We could grab lunch or something.")));
    CHECK(idioms.matches(rec("If anything, it got worse.")));
    CHECK_FALSE(idioms.matches(rec("If anyone calls, answer.")));
    CHECK_FALSE(idioms.matches(rec("Something or other.")));

    const auto loaded = IdiomList::load(test_support::fixture("idioms.txt"));
    CHECK(loaded.patterns().size() == idioms.patterns().size());
}
