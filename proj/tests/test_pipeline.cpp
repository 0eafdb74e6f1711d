#include "ipkit/errors.hpp"
#include "ipkit/pipeline.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace ipkit;
using test_support::read_file;
using test_support::TempDir;
using test_support::write_file;
using json = nlohmann::json;

namespace {

std::vector<json> read_jsonl(const Path& p) {
    std::vector<json> out;
    std::istringstream in(read_file(p));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

} // namespace

TEST_CASE("ingest splits ids, skips pronoun-free lines and numbers repeats") {
    TempDir dir("ingest");
    write_file(dir / "raw.txt", "Did anyone call?\n\nNothing here.\nx7\tSomeone said something.\n");
    CHECK(ingest_file(dir / "raw.txt", Population::Learner, dir / "c.jsonl") == 3);
    const auto recs = read_jsonl(dir / "c.jsonl");
    CHECK(recs[0]["id"] == "raw-1");
    CHECK(recs[0]["population"] == "learner");
    CHECK(recs[1]["id"] == "x7.1");
    CHECK(recs[2]["id"] == "x7.2");

    write_file(dir / "dup.txt", "a\tanyone\na\tsomeone\n");
    CHECK_THROWS_AS(ingest_file(dir / "dup.txt", Population::Native, dir / "d.jsonl"), ParseError);
}

TEST_CASE("classify output does not depend on worker count or chunking") {
    TempDir dir("classify");
    const auto in = test_support::fixture("classifier_regression.jsonl");
    const auto rules = RuleConfig::defaults();
    classify_file(in, dir / "one.jsonl", rules, 1);
    classify_file(in, dir / "many.jsonl", rules, 4, 7);
    CHECK(read_file(dir / "one.jsonl") == read_file(dir / "many.jsonl"));
    for (const auto& r : read_jsonl(dir / "one.jsonl")) CHECK(r["class"] == r["expected"]);
}

TEST_CASE("synth, aggregate, train and detect") {
    TempDir dir("e2e");
    SynthFileOptions o;
    o.synth = {3, 80, 0.25};
    o.train_size = 800;
    synth_files(o, dir.path());
    for (const char* f : {"corpus.jsonl", "gold.jsonl", "ann.csv", "train.txt"}) CHECK(std::filesystem::exists(dir / f));

    // aggregate reproduces the generated gold file
    CHECK(aggregate_file(dir / "ann.csv", dir / "corpus.jsonl", dir / "gold2.jsonl") == 80);
    CHECK(read_file(dir / "gold.jsonl") == read_file(dir / "gold2.jsonl"));

    CHECK(train_ngram_file(dir / "train.txt", {}, dir / "m.lm") == 800);
    const auto scorer = open_scorer("ngram:" + (dir / "m.lm").string());
    const auto s = detect_file(*scorer, dir / "gold.jsonl", ConfidenceFilter::AtLeast80, dir / "r.json",
                               dir / "out.jsonl");
    CHECK(s.report.n == 80);
    CHECK(s.report.confusion.tp + s.report.confusion.fn == 20);
    const auto report = json::parse(read_file(dir / "r.json"));
    CHECK(report["n"] == 80);
    CHECK(read_jsonl(dir / "out.jsonl").size() == 80);

    stats_file(StatsKind::ByClass, dir / "corpus.jsonl", dir / "s1.json", RuleConfig::defaults());
    stats_file(StatsKind::Infelicity, dir / "gold.jsonl", dir / "s2.json", RuleConfig::defaults());
    stats_file(StatsKind::Confusion, dir / "gold.jsonl", dir / "s3.json", RuleConfig::defaults());
    const auto infel = json::parse(read_file(dir / "s2.json"));
    CHECK(infel["overall"]["annotated"] == 80);
    CHECK(infel["overall"]["infelicitous"] == 20);
    CHECK(json::parse(read_file(dir / "s1.json"))["rows"].size() == 18);
}

TEST_CASE("aggregate checks the join") {
    TempDir dir("join");
    write_file(dir / "c.jsonl",
               R"({"id":"a","text":"Anyone?","ip_index":0,"original":"anyone","population":"native"})" "\n");
    write_file(dir / "ann.csv", "b,anyone,A,A,A,A,A\n");
    CHECK_THROWS_AS(aggregate_file(dir / "ann.csv", dir / "c.jsonl", dir / "g.jsonl"), ValidationError);
    write_file(dir / "ann.csv", "a,someone,A,A,A,A,A\n");
    CHECK_THROWS_AS(aggregate_file(dir / "ann.csv", dir / "c.jsonl", dir / "g.jsonl"), ValidationError);
    write_file(dir / "ann.csv", "a,anyone,A,A,A,S,S\n");
    AggregateOptions o;
    o.threshold = 0.6;
    aggregate_file(dir / "ann.csv", dir / "c.jsonl", dir / "g.jsonl", o);
    const auto g = load_gold(dir / "g.jsonl");
    CHECK(g.front().annotation.gold == GoldLabel::Felicitous);
    CHECK(g.front().usage == CoarseClass::QU);
}

TEST_CASE("agreement over annotator columns") {
    TempDir dir("agree");
    write_file(dir / "ann.csv", "a,anyone,A,A,A,A,A\nb,someone,S,S,S,S,S\n");
    const auto s = agreement_file(dir / "ann.csv");
    CHECK(s.items == 2);
    CHECK(s.mean_kappa == 1.0);
}

TEST_CASE("mds and overlap from files") {
    TempDir dir("mds");
    const auto e = mds_file(MdsInput::Records, test_support::fixture("synthetic_colex.csv"), dir / "e.csv");
    CHECK(e.classes.size() == 8);
    const auto text = read_file(dir / "e.csv");
    CHECK(text.rfind("class,x,y\n", 0) == 0);
    CHECK(text.find("# eigenvalues:") != std::string::npos);
    CHECK(overlap_file(test_support::fixture("overlap10.csv")) == 0.1);
}

TEST_CASE("scorer specs") {
    CHECK_THROWS_AS(open_scorer("ngram:"), ValidationError);
    CHECK_THROWS_AS(open_scorer("bert:x"), ValidationError);
    CHECK_THROWS_AS(open_scorer("remote:ftp://x"), ValidationError);
    CHECK_THROWS_AS(open_scorer("ngram:/nonexistent/model"), IoError);
    CHECK(open_scorer("remote:http://127.0.0.1:9")->describe().find("127.0.0.1:9") != std::string::npos);
}
