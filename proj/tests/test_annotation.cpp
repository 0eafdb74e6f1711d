#include "ipkit/annotation.hpp"
#include "ipkit/errors.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace ipkit;
using test_support::TempDir;

namespace {

AnnotationItem item(Pronoun p, std::initializer_list<Choice> cs) { return {"x", p, cs}; }

constexpr auto S = Choice::SomeForm;
constexpr auto A = Choice::AnyForm;
constexpr auto O = Choice::Other;

} // namespace

TEST_CASE("anchor cases") {
    const auto unanimous = aggregate(item(Pronoun::Anyone, {A, A, A, A, A}));
    CHECK(unanimous.confidence() == 1.0);
    CHECK(unanimous.unanimous());
    CHECK(unanimous.gold == GoldLabel::Felicitous);

    const auto split = aggregate(item(Pronoun::Anyone, {A, A, A, S, S}));
    CHECK(split.confidence() == 0.6);
    CHECK(split.gold == GoldLabel::LowConfidence);
    CHECK(split.gold_at(0.6) == GoldLabel::Felicitous);

    const auto wrong = aggregate(item(Pronoun::Something, {A, A, A, A, S}));
    CHECK(wrong.confidence() == 0.8);
    CHECK(wrong.gold == GoldLabel::Infelicitous);

    const auto other = aggregate(item(Pronoun::Someone, {O, O, O, O, S}));
    CHECK(other.gold == GoldLabel::OtherMajority);
    CHECK(other.majority == Choice::Other);
}

TEST_CASE("ties are low confidence and pick the first tied choice") {
    const auto t = aggregate(item(Pronoun::Someone, {O, O, A, A, S}), 0.55);
    CHECK(t.tied);
    CHECK(t.majority == Choice::AnyForm);
    CHECK(t.majority_votes == 2);
    CHECK(t.gold == GoldLabel::LowConfidence);
    CHECK(t.gold_at(0.55) == GoldLabel::LowConfidence);
}

TEST_CASE("aggregate validates its input") {
    CHECK_THROWS_AS(aggregate(item(Pronoun::Someone, {S, S, S, S})), ValidationError);
    CHECK_THROWS_AS(aggregate(item(Pronoun::Someone, {S, S, S, S, S, S})), ValidationError);
    CHECK_THROWS_AS(aggregate(item(Pronoun::Someone, {S, S, S, S, S}), 0.5), ValidationError);
    CHECK_THROWS_AS(aggregate(item(Pronoun::Someone, {S, S, S, S, S}), 1.01), ValidationError);
    CHECK_NOTHROW(aggregate(item(Pronoun::Someone, {S, S, S, S, S}), 1.0));
}

TEST_CASE("infelicity rate excludes other-majority items") {
    std::vector<AnnotationAggregate> aggs{
        aggregate(item(Pronoun::Someone, {A, A, A, A, A})),  // infelicitous
        aggregate(item(Pronoun::Someone, {S, S, S, S, A})),  // felicitous
        aggregate(item(Pronoun::Someone, {O, O, O, O, O})),  // other
        aggregate(item(Pronoun::Someone, {S, S, S, A, A})),  // low confidence
    };
    CHECK(infelicity_rate(aggs, 0.8) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(infelicity_rate(aggs, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(infelicity_rate({}, 0.8), ValidationError);
    CHECK_THROWS_AS(infelicity_rate(std::span(aggs).subspan(2, 1), 0.8), ValidationError);
}

TEST_CASE("cohen kappa against hand computation") {
    const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 1, 1};
    CHECK(*cohen_kappa(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*cohen_kappa(a, a) == 1.0);

    // p_e = 1 with perfect agreement is defined, otherwise not
    const std::vector<int> c{2, 2, 2};
    CHECK(*cohen_kappa(c, c) == 1.0);

    // 3x3: po = 0.6, pe = 0.36 + 0.04 + 0.04 = 0.44 -> 0.16/0.56
    const std::vector<int> x{0, 0, 0, 1, 2}, y{0, 0, 0, 2, 1};
    CHECK(*cohen_kappa(x, y) == doctest::Approx(0.16 / 0.56).epsilon(1e-14));

    CHECK_THROWS_AS(cohen_kappa(a, c), ValidationError);
    CHECK_THROWS_AS(cohen_kappa(std::span<const int>{}, std::span<const int>{}), ValidationError);

    const std::vector<std::vector<int>> three{a, a, b};
    CHECK(*mean_pairwise_kappa(three) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("annotation files") {
    TempDir dir("ann");
    test_support::write_file(dir / "a.csv", "id,original,a1,a2,a3,a4,a5\n# note\ns1,anyone,A,A,a,any,S\n\ns2,something,O,S,S,S,S\n");
    const auto items = load_annotations(dir / "a.csv");
    REQUIRE(items.size() == 2);
    CHECK(items[0].choices == std::vector<Choice>{A, A, A, A, S});
    CHECK(format_annotation_line(items[1]) == "s2,something,O,S,S,S,S");

    auto line_of = [&](const std::string& text) {
        test_support::write_file(dir / "b.csv", text);
        try {
            load_annotations(dir / "b.csv");
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{99};
    };
    CHECK(line_of("s1,anyone,A,A,A,A\n") == 1);
    CHECK(line_of("s1,anyone,A,A,A,A,A\ns2,anybody,A,A,A,A,A\n") == 2);
    CHECK(line_of("s1,anyone,A,A,A,A,X\n") == 1);
    CHECK(line_of("s1,anyone,A,A,A,A,A\ns1,anyone,A,A,A,A,A\n") == 2);
    CHECK_THROWS_AS(load_annotations(dir / "none.csv"), IoError);
}
