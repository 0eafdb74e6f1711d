#pragma once

#include "ipkit/annotation.hpp"
#include "ipkit/corpus.hpp"
#include "ipkit/lm.hpp"
#include "ipkit/usage.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipkit {

// ---------------------------------------------------------------------------
// Detection by score comparison

struct DetectionOutcome {
    std::string sentence_id;
    Pronoun original = Pronoun::Someone;
    Pronoun model_choice = Pronoun::Someone;
    double score_original = 0.0;
    double score_alternative = 0.0;
    bool predicted_infelicitous = false;
    std::optional<bool> gold_infelicitous;
};

/// The alternative wins only on a strictly higher score; ties keep the original.
DetectionOutcome decide(const SentenceRecord& record, double score_original, double score_alternative);

/// Scores the record and its pronoun-swapped twin with the same scorer.
DetectionOutcome detect(const SentenceRecord& record, const SentenceScorer& scorer);

/// Batched detect; outcomes follow input order. Scorer errors are rethrown
/// with the offending sentence id in the message.
std::vector<DetectionOutcome> detect_all(std::span<const SentenceRecord> records,
                                         const SentenceScorer& scorer);

enum class ConfidenceFilter {
    AtLeast80,  // annotator confidence >= 0.8
    Unanimous,  // confidence == 1.0
};

std::string_view to_string(ConfidenceFilter f) noexcept;
std::optional<ConfidenceFilter> parse_confidence_filter(std::string_view s);

struct LabelMetrics {
    std::optional<double> precision;  // absent when nothing was predicted with the label
    std::optional<double> recall;     // absent when the label never occurs in gold
    std::optional<double> f1;
    std::size_t support = 0;
};

struct Confusion {
    std::size_t tp = 0;  // predicted infelicitous, gold infelicitous
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

struct DetectionReport {
    LabelMetrics infelicitous;
    LabelMetrics felicitous;
    double accuracy = 0.0;
    double baseline_accuracy = 0.0;  // share of the majority gold label
    std::size_t n = 0;
    std::size_t excluded = 0;        // dropped by the confidence filter
    Confusion confusion;
    ConfidenceFilter filter = ConfidenceFilter::AtLeast80;
};

/// Metrics from raw confusion counts; throws on an empty matrix.
DetectionReport report_from_confusion(const Confusion& c,
                                      ConfidenceFilter filter = ConfidenceFilter::AtLeast80);

/// Outcomes and gold aggregates are aligned by position and must agree on
/// sentence ids. Items whose gold is LOW_CONFIDENCE or OTHER_MAJORITY under the
/// filter are excluded.
DetectionReport detection_report(std::span<const DetectionOutcome> outcomes,
                                 std::span<const AnnotationAggregate> gold, ConfidenceFilter filter);

// ---------------------------------------------------------------------------
// Distributions

struct ClassInfelicity {
    CoarseClass cls = CoarseClass::Mixed;
    std::size_t annotated = 0;
    std::size_t infelicitous = 0;
    std::optional<double> percent;  // absent for a class with no items
};

struct InfelicityTable {
    std::array<ClassInfelicity, 5> per_class;
    ClassInfelicity overall;
};

struct ClassLabel {
    CoarseClass cls;
    GoldLabel label;
};

/// Per-class infelicity counts; OTHER_MAJORITY items are not counted as annotated.
InfelicityTable infelicity_by_class(std::span<const ClassLabel> items);

enum class SignificanceMarker { Significant, NotSignificant, Degenerate };

std::string_view to_string(SignificanceMarker m) noexcept;  // "***", "ns", "degenerate"

struct TwoProportionResult {
    double z = 0.0;
    double p_value = 1.0;
    SignificanceMarker marker = SignificanceMarker::NotSignificant;
};

/// Pooled two-proportion z-test, two-sided; "***" iff p < .001.
TwoProportionResult two_proportion_test(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2);

struct ShareRow {
    std::optional<CoarseClass> cls;  // nullopt is the all-classes total
    Population population = Population::Native;
    std::size_t some = 0;
    std::size_t any = 0;
    std::optional<double> some_share;
    std::optional<double> any_share;
    std::optional<TwoProportionResult> vs_native;  // some-share against the native cell
};

struct ClassDistribution {
    std::vector<ShareRow> rows;  // classes in DN, QU, CD, CP, MIXED order then total; populations nested

    const ShareRow& row(std::optional<CoarseClass> cls, Population pop) const;
};

ClassDistribution usage_shares(std::span<const SentenceRecord> records,
                               std::span<const CoarseClass> classes);
ClassDistribution usage_shares(std::span<const SentenceRecord> records, const RuleConfig& rules);

struct DirectionRates {
    std::size_t some_preferred = 0;
    std::size_t any_used = 0;        // within some_preferred
    std::size_t any_preferred = 0;
    std::size_t some_used = 0;       // within any_preferred
    std::optional<double> any_used_rate;   // absent for an empty stratum
    std::optional<double> some_used_rate;
};

/// Among confidently labeled items, how often the writer used the family the
/// annotators did not prefer, split by the preferred family.
DirectionRates confusion_direction(std::span<const AnnotationAggregate> gold, double threshold);

// ---------------------------------------------------------------------------
// Gold files: a corpus record plus its aggregated annotation, one JSON object per line.

struct GoldRecord {
    SentenceRecord record;
    AnnotationAggregate annotation;
    bool idiomatic = false;
    std::optional<CoarseClass> usage;
};

std::string format_gold_line(const GoldRecord& g);
GoldRecord parse_gold_line(std::string_view line, std::size_t line_no);
std::vector<GoldRecord> load_gold(const std::filesystem::path& path);
void save_gold(std::span<const GoldRecord> gold, const std::filesystem::path& path);

std::string format_outcome_line(const DetectionOutcome& o);

} // namespace ipkit
