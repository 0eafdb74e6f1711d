#include "ipkit/pipeline.hpp"

#include "ipkit/errors.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>
#include <unordered_map>

namespace ipkit {

namespace {

using json = nlohmann::ordered_json;

class Output {
public:
    explicit Output(const Path& path) : path_(path) {
        if (path == "-") return;
        file_.open(path);
        if (!file_) throw IoError("cannot open '" + path.string() + "' for writing");
    }

    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write to '" + path_.string() + "' failed");
    }

private:
    Path path_;
    std::ofstream file_;
};

std::ifstream open_input(const Path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const LabelMetrics& m) {
    return {{"precision", opt(m.precision)}, {"recall", opt(m.recall)}, {"f1", opt(m.f1)},
            {"support", m.support}};
}

json test_json(const TwoProportionResult& t) {
    return {{"z", t.z}, {"p", t.p_value}, {"marker", to_string(t.marker)}};
}

CoarseClass class_of(const SentenceRecord& r, const std::optional<CoarseClass>& stored, const RuleConfig& rules) {
    return stored ? *stored : classify_usage(r, rules);
}

std::optional<CoarseClass> stored_class(const SentenceRecord& r) {
    auto it = r.extras.find("class");
    if (it == r.extras.end()) return std::nullopt;
    const auto v = json::parse(it->second);
    return v.is_string() ? parse_coarse_class(v.get<std::string>()) : std::nullopt;
}

std::vector<Tokens> read_training_text(const Path& in) {
    std::vector<Tokens> out;
    if (in.extension() == ".jsonl") {
        CorpusReader reader(in);
        while (auto r = reader.next()) out.push_back(std::move(r->tokens));
        return out;
    }
    auto stream = open_input(in);
    std::string line;
    while (std::getline(stream, line)) {
        auto t = tokenize(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

} // namespace

std::size_t ingest_file(const Path& in, Population population, const Path& out) {
    auto stream = open_input(in);
    Output o(out);
    const std::string stem = in.stem().string();
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0, written = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        std::string id = stem + "-" + std::to_string(line_no);
        std::string text = line;
        if (const auto tab = line.find('\t'); tab != std::string::npos) {
            id = detail::trim(std::string_view(line).substr(0, tab));
            text = line.substr(tab + 1);
            if (id.empty()) throw ParseError("empty id before tab", line_no);
        }
        if (!seen.emplace(id, line_no).second) throw ParseError("duplicate id '" + id + "'", line_no);
        for (const auto& r : records_from_text(id, detail::trim(text), population)) {
            o.stream() << format_record_line(r) << '\n';
            ++written;
        }
    }
    o.finish();
    return written;
}

std::size_t classify_file(const Path& in, const Path& out, const RuleConfig& rules, unsigned workers,
                          std::size_t chunk) {
    rules.validate();
    if (chunk == 0) throw ValidationError("chunk size must be positive");
    workers = std::max(1u, workers);
    CorpusReader reader(in);
    Output o(out);

    std::vector<SentenceRecord> batch;
    std::vector<CoarseClass> labels;
    std::size_t total = 0;
    auto flush = [&] {
        labels.assign(batch.size(), CoarseClass::Mixed);
        const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, batch.size()));
        if (n_threads <= 1) {
            for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = classify_usage(batch[i], rules);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < n_threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < batch.size(); i = next++)
                        labels[i] = classify_usage(batch[i], rules);
                });
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            batch[i].extras["class"] = json(to_string(labels[i])).dump();
            o.stream() << format_record_line(batch[i]) << '\n';
        }
        total += batch.size();
        batch.clear();
    };
    while (auto r = reader.next()) {
        batch.push_back(std::move(*r));
        if (batch.size() == chunk) flush();
    }
    flush();
    o.finish();
    return total;
}

std::size_t aggregate_file(const Path& annotations, const Path& corpus, const Path& out,
                           const AggregateOptions& options) {
    options.rules.validate();
    const auto items = load_annotations(annotations);
    std::unordered_map<std::string, SentenceRecord> by_id;
    {
        CorpusReader reader(corpus);
        while (auto r = reader.next()) by_id.emplace(r->id, std::move(*r));
    }
    std::vector<GoldRecord> gold;
    gold.reserve(items.size());
    for (const auto& item : items) {
        auto it = by_id.find(item.sentence_id);
        if (it == by_id.end())
            throw ValidationError("annotation '" + item.sentence_id + "' has no record in '" + corpus.string() + "'");
        if (it->second.original != item.original)
            throw ValidationError("annotation '" + item.sentence_id + "' names '" +
                                  std::string(to_string(item.original)) + "' but the corpus has '" +
                                  std::string(to_string(it->second.original)) + "'");
        GoldRecord g;
        g.record = it->second;
        g.record.extras.erase("class");
        g.annotation = aggregate(item, options.threshold);
        g.idiomatic = options.idioms.matches(g.record);
        g.usage = classify_usage(g.record, options.rules);
        gold.push_back(std::move(g));
    }
    Output o(out);
    for (const auto& g : gold) o.stream() << format_gold_line(g) << '\n';
    o.finish();
    return gold.size();
}

AgreementSummary agreement_file(const Path& annotations) {
    const auto items = load_annotations(annotations);
    if (items.empty()) throw ValidationError("no annotation rows in '" + annotations.string() + "'");
    std::vector<std::vector<int>> columns(kAnnotators);
    for (const auto& item : items)
        for (std::size_t a = 0; a < kAnnotators; ++a) columns[a].push_back(static_cast<int>(item.choices[a]));
    return {items.size(), mean_pairwise_kappa(columns)};
}

std::size_t train_ngram_file(const Path& in, const NgramOptions& options, const Path& model_out) {
    options.validate();
    const auto sentences = read_training_text(in);
    const auto model = NgramModel::train(sentences, options);
    model.save(model_out);
    return sentences.size();
}

std::unique_ptr<SentenceScorer> open_scorer(const std::string& spec, const RemoteOptions& remote,
                                            unsigned workers) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (arg.empty() || (kind != "ngram" && kind != "remote"))
        throw ValidationError("scorer must be ngram:<model> or remote:<url> (got '" + spec + "')");
    if (kind == "remote") return std::make_unique<RemoteScorer>(arg, remote);
    auto model = std::make_unique<NgramModel>(NgramModel::load(arg));
    model->set_workers(workers);
    return model;
}

DetectSummary detect_file(const SentenceScorer& scorer, const Path& gold_path, ConfidenceFilter filter,
                          const Path& report_out, const std::optional<Path>& outcomes_out) {
    const auto gold = load_gold(gold_path);
    std::vector<SentenceRecord> records;
    std::vector<AnnotationAggregate> aggs;
    DetectSummary s;
    for (const auto& g : gold) {
        if (g.idiomatic) {
            ++s.idiomatic;
            continue;
        }
        records.push_back(g.record);
        aggs.push_back(g.annotation);
    }
    auto outcomes = detect_all(records, scorer);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto label = aggs[i].gold_at(kDefaultThreshold);
        if (label == GoldLabel::Felicitous || label == GoldLabel::Infelicitous)
            outcomes[i].gold_infelicitous = label == GoldLabel::Infelicitous;
    }
    s.report = detection_report(outcomes, aggs, filter);

    if (outcomes_out) {
        Output o(*outcomes_out);
        for (const auto& oc : outcomes) o.stream() << format_outcome_line(oc) << '\n';
        o.finish();
    }
    Output o(report_out);
    o.stream() << report_json(s) << '\n';
    o.finish();
    return s;
}

std::string report_json(const DetectSummary& s) {
    const auto& r = s.report;
    json j;
    j["confidence"] = to_string(r.filter);
    j["n"] = r.n;
    j["excluded_by_confidence"] = r.excluded;
    j["excluded_idiomatic"] = s.idiomatic;
    j["infelicitous"] = metrics_json(r.infelicitous);
    j["felicitous"] = metrics_json(r.felicitous);
    j["accuracy"] = r.accuracy;
    j["baseline_accuracy"] = r.baseline_accuracy;
    j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}};
    return j.dump(2);
}

void stats_file(StatsKind kind, const Path& in, const Path& out, const RuleConfig& rules, double threshold) {
    rules.validate();
    json j;
    if (kind == StatsKind::ByClass) {
        const auto corpus = load_corpus(in);
        std::vector<CoarseClass> classes;
        for (const auto& r : corpus.records) classes.push_back(class_of(r, stored_class(r), rules));
        const auto dist = usage_shares(corpus.records, classes);
        j["rows"] = json::array();
        for (const auto& row : dist.rows) {
            json e;
            e["class"] = row.cls ? std::string(to_string(*row.cls)) : "TOTAL";
            e["population"] = to_string(row.population);
            e["some"] = row.some;
            e["any"] = row.any;
            e["some_share"] = opt(row.some_share);
            e["any_share"] = opt(row.any_share);
            e["vs_native"] = row.vs_native ? test_json(*row.vs_native) : json(nullptr);
            j["rows"].push_back(std::move(e));
        }
    } else {
        const auto gold = load_gold(in);
        std::vector<GoldRecord> kept;
        std::size_t idiomatic = 0;
        for (const auto& g : gold) {
            if (g.idiomatic) ++idiomatic;
            else kept.push_back(g);
        }
        j["threshold"] = threshold;
        j["excluded_idiomatic"] = idiomatic;
        if (kind == StatsKind::Infelicity) {
            std::vector<ClassLabel> items;
            for (const auto& g : kept)
                items.push_back({class_of(g.record, g.usage, rules), g.annotation.gold_at(threshold)});
            const auto t = infelicity_by_class(items);
            auto row_json = [](const ClassInfelicity& c) {
                return json{{"annotated", c.annotated}, {"infelicitous", c.infelicitous},
                            {"percent", opt(c.percent)}};
            };
            j["classes"] = json::object();
            for (const auto& c : t.per_class)
                if (c.annotated > 0) j["classes"][std::string(to_string(c.cls))] = row_json(c);
            j["overall"] = row_json(t.overall);
        } else {
            auto rates_json = [](const DirectionRates& d) {
                return json{{"some_preferred", d.some_preferred}, {"any_used", d.any_used},
                            {"any_used_rate", opt(d.any_used_rate)}, {"any_preferred", d.any_preferred},
                            {"some_used", d.some_used}, {"some_used_rate", opt(d.some_used_rate)}};
            };
            std::vector<AnnotationAggregate> all;
            std::map<Population, std::vector<AnnotationAggregate>> by_pop;
            for (const auto& g : kept) {
                all.push_back(g.annotation);
                by_pop[g.record.population].push_back(g.annotation);
            }
            j["overall"] = rates_json(confusion_direction(all, threshold));
            j["populations"] = json::object();
            for (const auto& [pop, aggs] : by_pop)
                j["populations"][std::string(to_string(pop))] = rates_json(confusion_direction(aggs, threshold));
        }
    }
    Output o(out);
    o.stream() << j.dump(2) << '\n';
    o.finish();
}

Embedding mds_file(MdsInput kind, const Path& in, const Path& out, long languages, DistanceTransform transform,
                   std::size_t dims) {
    LabeledMatrix distances;
    if (kind == MdsInput::Distances) {
        distances = load_matrix(in);
    } else {
        ColexMatrix m;
        if (kind == MdsInput::Counts) {
            m = colex_from_counts(load_matrix(in), languages);
        } else {
            m = build_matrix(load_colex_records(in));
        }
        distances.classes = m.classes;
        distances.values = to_distance(m, transform);
    }
    auto e = mds_project(distances, dims);
    save_embedding(e, out);
    return e;
}

double overlap_file(const Path& records, std::size_t min_each, std::size_t min_shared) {
    return overlap_breadth(load_colex_records(records), min_each, min_shared);
}

void synth_files(const SynthFileOptions& options, const Path& dir) {
    const auto data = synth_corpus(options.synth);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    save_corpus(data.corpus, dir / "corpus.jsonl");

    auto gold = data.gold;
    const auto rules = RuleConfig::defaults();
    for (auto& g : gold) g.usage = classify_usage(g.record, rules);
    save_gold(gold, dir / "gold.jsonl");

    {
        Output o(dir / "ann.csv");
        o.stream() << "id,original,a1,a2,a3,a4,a5\n";
        for (const auto& item : data.annotations) o.stream() << format_annotation_line(item) << '\n';
        o.finish();
    }
    {
        // A separate stream so training sentences are not the evaluation sentences.
        Output o(dir / "train.txt");
        for (const auto& s : synth_sentences(options.synth.seed ^ 0x9e3779b97f4a7c15ULL, options.train_size))
            o.stream() << s << '\n';
        o.finish();
    }
}

} // namespace ipkit
