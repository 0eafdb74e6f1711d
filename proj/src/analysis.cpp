#include "ipkit/analysis.hpp"

#include "ipkit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ipkit {

namespace {

using json = nlohmann::ordered_json;

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

LabelMetrics label_metrics(std::size_t hit, std::size_t predicted, std::size_t actual) {
    LabelMetrics m;
    m.support = actual;
    m.precision = ratio(hit, predicted);
    m.recall = ratio(hit, actual);
    if (m.precision && m.recall) {
        const double s = *m.precision + *m.recall;
        m.f1 = s > 0.0 ? 2.0 * *m.precision * *m.recall / s : 0.0;
    }
    return m;
}

bool passes(const AnnotationAggregate& a, ConfidenceFilter f) {
    const auto g = a.gold_at(f == ConfidenceFilter::Unanimous ? 1.0 : 0.8);
    return g == GoldLabel::Felicitous || g == GoldLabel::Infelicitous;
}

} // namespace

DetectionOutcome decide(const SentenceRecord& record, double score_original, double score_alternative) {
    DetectionOutcome o;
    o.sentence_id = record.id;
    o.original = record.original;
    o.score_original = score_original;
    o.score_alternative = score_alternative;
    o.predicted_infelicitous = score_alternative > score_original;
    o.model_choice = o.predicted_infelicitous ? alternate(record.original) : record.original;
    return o;
}

DetectionOutcome detect(const SentenceRecord& record, const SentenceScorer& scorer) {
    const Tokens alt = substitute(record);
    return decide(record, scorer.score(record.tokens), scorer.score(alt));
}

std::vector<DetectionOutcome> detect_all(std::span<const SentenceRecord> records,
                                         const SentenceScorer& scorer) {
    std::vector<Tokens> batch;
    batch.reserve(records.size() * 2);
    for (const auto& r : records) {
        batch.push_back(r.tokens);
        batch.push_back(substitute(r));
    }
    std::vector<double> scores;
    try {
        scores = scorer.score_batch(batch);
    } catch (const ScorerError& e) {
        const std::size_t i = std::min(e.offset() / 2, records.empty() ? 0 : records.size() - 1);
        const std::string msg =
            records.empty() ? e.what() : "sentence '" + records[i].id + "': " + e.what();
        if (dynamic_cast<const TransportError*>(&e)) throw TransportError(msg, e.offset());
        if (dynamic_cast<const ProtocolError*>(&e)) throw ProtocolError(msg, e.offset());
        throw ScorerError(msg, e.offset());
    }
    if (scores.size() != batch.size())
        throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(batch.size()) + " sentences");

    std::vector<DetectionOutcome> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        out.push_back(decide(records[i], scores[2 * i], scores[2 * i + 1]));
    return out;
}

std::string_view to_string(ConfidenceFilter f) noexcept {
    return f == ConfidenceFilter::Unanimous ? "1.0" : "0.8";
}

std::optional<ConfidenceFilter> parse_confidence_filter(std::string_view s) {
    if (s == "0.8" || s == "0.80") return ConfidenceFilter::AtLeast80;
    if (s == "1" || s == "1.0" || s == "1.00" || s == "unanimous") return ConfidenceFilter::Unanimous;
    return std::nullopt;
}

DetectionReport report_from_confusion(const Confusion& c, ConfidenceFilter filter) {
    if (c.total() == 0) throw ValidationError("detection report: no items to evaluate");
    DetectionReport r;
    r.filter = filter;
    r.confusion = c;
    r.n = c.total();
    r.infelicitous = label_metrics(c.tp, c.tp + c.fp, c.tp + c.fn);
    r.felicitous = label_metrics(c.tn, c.tn + c.fn, c.tn + c.fp);
    const double n = static_cast<double>(r.n);
    r.accuracy = static_cast<double>(c.tp + c.tn) / n;
    r.baseline_accuracy = static_cast<double>(std::max(c.tp + c.fn, c.tn + c.fp)) / n;
    return r;
}

DetectionReport detection_report(std::span<const DetectionOutcome> outcomes,
                                 std::span<const AnnotationAggregate> gold, ConfidenceFilter filter) {
    if (outcomes.size() != gold.size())
        throw ValidationError("detection report: " + std::to_string(outcomes.size()) + " outcomes but " +
                              std::to_string(gold.size()) + " gold items");
    Confusion c;
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].sentence_id != gold[i].sentence_id)
            throw ValidationError("detection report: item " + std::to_string(i) + " is '" +
                                  outcomes[i].sentence_id + "' in outcomes but '" + gold[i].sentence_id +
                                  "' in gold");
        if (!passes(gold[i], filter)) {
            ++excluded;
            continue;
        }
        const bool truth = gold[i].gold_at(0.8) == GoldLabel::Infelicitous;
        const bool pred = outcomes[i].predicted_infelicitous;
        if (pred && truth) ++c.tp;
        else if (pred) ++c.fp;
        else if (truth) ++c.fn;
        else ++c.tn;
    }
    auto r = report_from_confusion(c, filter);
    r.excluded = excluded;
    return r;
}

InfelicityTable infelicity_by_class(std::span<const ClassLabel> items) {
    InfelicityTable t;
    for (std::size_t i = 0; i < t.per_class.size(); ++i) t.per_class[i].cls = kAllCoarseClasses[i];
    for (const auto& it : items) {
        if (it.label == GoldLabel::OtherMajority) continue;
        auto& row = t.per_class[static_cast<std::size_t>(it.cls)];
        ++row.annotated;
        ++t.overall.annotated;
        if (it.label == GoldLabel::Infelicitous) {
            ++row.infelicitous;
            ++t.overall.infelicitous;
        }
    }
    auto finish = [](ClassInfelicity& row) {
        if (auto r = ratio(row.infelicitous, row.annotated)) row.percent = 100.0 * *r;
    };
    for (auto& row : t.per_class) finish(row);
    finish(t.overall);
    return t;
}

std::string_view to_string(SignificanceMarker m) noexcept {
    switch (m) {
    case SignificanceMarker::Significant: return "***";
    case SignificanceMarker::NotSignificant: return "ns";
    case SignificanceMarker::Degenerate: return "degenerate";
    }
    return "ns";
}

TwoProportionResult two_proportion_test(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2) {
    if (n1 == 0 || n2 == 0) throw ValidationError("two-proportion test: empty sample");
    if (k1 > n1 || k2 > n2) throw ValidationError("two-proportion test: successes exceed sample size");
    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));

    TwoProportionResult r;
    if (!(var > 0.0)) {
        // Both samples all-success or all-failure: nothing to test.
        r.marker = SignificanceMarker::Degenerate;
        return r;
    }
    r.z = (p1 - p2) / std::sqrt(var);
    r.p_value = std::erfc(std::fabs(r.z) / std::sqrt(2.0));
    r.marker = r.p_value < 0.001 ? SignificanceMarker::Significant : SignificanceMarker::NotSignificant;
    return r;
}

const ShareRow& ClassDistribution::row(std::optional<CoarseClass> cls, Population pop) const {
    for (const auto& r : rows)
        if (r.cls == cls && r.population == pop) return r;
    throw ValidationError("class distribution has no such row");
}

ClassDistribution usage_shares(std::span<const SentenceRecord> records,
                               std::span<const CoarseClass> classes) {
    if (records.size() != classes.size())
        throw ValidationError("usage shares: " + std::to_string(records.size()) + " records but " +
                              std::to_string(classes.size()) + " class labels");
    constexpr std::array kPops{Population::Native, Population::AdvancedL2, Population::Learner};

    // [class or total][population] -> {some, any}
    std::array<std::array<std::array<std::size_t, 2>, 3>, 6> counts{};
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto f = static_cast<std::size_t>(family(records[i].original));
        const auto p = static_cast<std::size_t>(records[i].population);
        ++counts[static_cast<std::size_t>(classes[i])][p][f];
        ++counts[5][p][f];
    }

    ClassDistribution d;
    for (std::size_t c = 0; c < 6; ++c) {
        const auto& native = counts[c][0];
        for (std::size_t p = 0; p < 3; ++p) {
            ShareRow row;
            if (c < 5) row.cls = kAllCoarseClasses[c];
            row.population = kPops[p];
            row.some = counts[c][p][0];
            row.any = counts[c][p][1];
            row.some_share = ratio(row.some, row.some + row.any);
            row.any_share = ratio(row.any, row.some + row.any);
            const std::size_t n_native = native[0] + native[1];
            if (p > 0 && row.some + row.any > 0 && n_native > 0)
                row.vs_native = two_proportion_test(row.some, row.some + row.any, native[0], n_native);
            d.rows.push_back(row);
        }
    }
    return d;
}

ClassDistribution usage_shares(std::span<const SentenceRecord> records, const RuleConfig& rules) {
    std::vector<CoarseClass> classes;
    classes.reserve(records.size());
    for (const auto& r : records) classes.push_back(classify_usage(r, rules));
    return usage_shares(records, classes);
}

DirectionRates confusion_direction(std::span<const AnnotationAggregate> gold, double threshold) {
    DirectionRates d;
    for (const auto& a : gold) {
        const auto g = a.gold_at(threshold);
        if (g != GoldLabel::Felicitous && g != GoldLabel::Infelicitous) continue;
        const bool used_any = family(a.original) == Family::Any;
        if (a.majority == Choice::SomeForm) {
            ++d.some_preferred;
            if (used_any) ++d.any_used;
        } else {
            ++d.any_preferred;
            if (!used_any) ++d.some_used;
        }
    }
    d.any_used_rate = ratio(d.any_used, d.some_preferred);
    d.some_used_rate = ratio(d.some_used, d.any_preferred);
    return d;
}

std::string format_gold_line(const GoldRecord& g) {
    json obj = json::parse(format_record_line(g.record));
    obj["majority"] = to_string(g.annotation.majority);
    obj["votes"] = g.annotation.majority_votes;
    obj["tied"] = g.annotation.tied;
    obj["confidence"] = g.annotation.confidence();
    obj["gold"] = to_string(g.annotation.gold);
    obj["idiom"] = g.idiomatic;
    if (g.usage) obj["class"] = to_string(*g.usage);
    return obj.dump();
}

GoldRecord parse_gold_line(std::string_view line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("gold record is not a JSON object", line_no);

    auto take = [&](const char* key) -> json {
        auto it = obj.find(key);
        if (it == obj.end()) return json();
        json v = *it;
        obj.erase(key);
        return v;
    };
    const json majority = take("majority");
    const json votes = take("votes");
    const json tied = take("tied");
    take("confidence");
    const json gold = take("gold");
    const json idiom = take("idiom");
    const json cls = take("class");

    GoldRecord g;
    g.record = parse_record_line(obj.dump(), line_no);
    auto& a = g.annotation;
    a.sentence_id = g.record.id;
    a.original = g.record.original;

    if (!majority.is_string()) throw ParseError("missing or non-string field 'majority'", line_no);
    auto ch = parse_choice(majority.get<std::string>());
    if (!ch) throw ParseError("unknown majority '" + majority.get<std::string>() + "'", line_no);
    a.majority = *ch;
    if (!votes.is_number_integer() || votes.get<int>() < 1 || votes.get<int>() > static_cast<int>(kAnnotators))
        throw ParseError("field 'votes' must be an integer in 1..5", line_no);
    a.majority_votes = votes.get<int>();
    if (!tied.is_null() && !tied.is_boolean()) throw ParseError("field 'tied' must be a boolean", line_no);
    a.tied = tied.is_boolean() && tied.get<bool>();
    if (!gold.is_string()) throw ParseError("missing or non-string field 'gold'", line_no);
    auto gl = parse_gold_label(gold.get<std::string>());
    if (!gl) throw ParseError("unknown gold label '" + gold.get<std::string>() + "'", line_no);
    a.gold = *gl;
    if (!idiom.is_null() && !idiom.is_boolean()) throw ParseError("field 'idiom' must be a boolean", line_no);
    g.idiomatic = idiom.is_boolean() && idiom.get<bool>();
    if (!cls.is_null()) {
        auto c = cls.is_string() ? parse_coarse_class(cls.get<std::string>()) : std::nullopt;
        if (!c) throw ParseError("unknown usage class in field 'class'", line_no);
        g.usage = *c;
    }
    return g;
}

std::vector<GoldRecord> load_gold(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<GoldRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_gold_line(line, line_no));
    }
    return out;
}

void save_gold(std::span<const GoldRecord> gold, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const auto& g : gold) out << format_gold_line(g) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string format_outcome_line(const DetectionOutcome& o) {
    json obj;
    obj["id"] = o.sentence_id;
    obj["original"] = to_string(o.original);
    obj["model_choice"] = to_string(o.model_choice);
    obj["score_original"] = o.score_original;
    obj["score_alternative"] = o.score_alternative;
    obj["predicted"] = o.predicted_infelicitous ? "infelicitous" : "felicitous";
    if (o.gold_infelicitous) obj["gold"] = *o.gold_infelicitous ? "infelicitous" : "felicitous";
    return obj.dump();
}

} // namespace ipkit
