#include "ipkit/errors.hpp"
#include "ipkit/synth.hpp"
#include "ipkit/usage.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ipkit;

namespace {

std::size_t count_gold(const SynthData& d, GoldLabel g) {
    return static_cast<std::size_t>(std::count_if(d.gold.begin(), d.gold.end(),
                                                  [&](const GoldRecord& r) { return r.annotation.gold == g; }));
}

} // namespace

TEST_CASE("flip count is exact") {
    for (auto [size, rate, expect] : {std::tuple{200u, 0.2, 40u}, std::tuple{200u, 0.0, 0u}, std::tuple{7u, 1.0, 7u},
                                      std::tuple{10u, 0.25, 3u}, std::tuple{1u, 0.4, 0u}}) {
        const auto d = synth_corpus({42, size, rate});
        CHECK(d.corpus.records.size() == size);
        CHECK(count_gold(d, GoldLabel::Infelicitous) == expect);
        CHECK(count_gold(d, GoldLabel::Felicitous) == size - expect);
    }
}

TEST_CASE("views are consistent") {
    const auto d = synth_corpus({5, 120, 0.3});
    REQUIRE(d.annotations.size() == 120);
    REQUIRE(d.gold.size() == 120);
    for (std::size_t i = 0; i < 120; ++i) {
        const auto& r = d.corpus.records[i];
        CHECK_NOTHROW(validate(r));
        CHECK(d.gold[i].record == r);
        CHECK(d.annotations[i].sentence_id == r.id);
        CHECK(d.annotations[i].original == r.original);
        CHECK(d.gold[i].annotation.unanimous());
        // raw text re-tokenizes to the stored tokens
        CHECK(tokenize(r.raw_text) == r.tokens);
        const bool infelicitous = d.gold[i].annotation.gold == GoldLabel::Infelicitous;
        CHECK(infelicitous == (choice_for(family(r.original)) != d.annotations[i].choices.front()));
    }
}

TEST_CASE("context decides the fitting family") {
    const auto d = synth_corpus({9, 300, 0.0});
    const auto rules = RuleConfig::defaults();
    for (const auto& r : d.corpus.records) {
        const auto c = classify_usage(r, rules);
        if (family(r.original) == Family::Some) CHECK(c == CoarseClass::Mixed);
        else CHECK((c == CoarseClass::DN || c == CoarseClass::QU));
    }
}

TEST_CASE("same seed, same output; different seed, different output") {
    const auto a = synth_corpus({1, 50, 0.2});
    const auto b = synth_corpus({1, 50, 0.2});
    const auto c = synth_corpus({2, 50, 0.2});
    CHECK(a.corpus.records == b.corpus.records);
    CHECK(a.corpus.records != c.corpus.records);
    CHECK(synth_sentences(3, 20) == synth_sentences(3, 20));
    CHECK(synth_sentences(3, 20) != synth_sentences(4, 20));
}

TEST_CASE("invalid options") {
    CHECK_THROWS_AS(synth_corpus({1, 0, 0.2}), ValidationError);
    CHECK_THROWS_AS(synth_corpus({1, 10, -0.1}), ValidationError);
    CHECK_THROWS_AS(synth_corpus({1, 10, 1.5}), ValidationError);
}
