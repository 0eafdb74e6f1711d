#pragma once

// File-to-file stages behind the command-line tool. A path of "-" as an
// output means standard output.

#include "ipkit/analysis.hpp"
#include "ipkit/corpus.hpp"
#include "ipkit/lm.hpp"
#include "ipkit/remote_scorer.hpp"
#include "ipkit/synth.hpp"
#include "ipkit/typology.hpp"
#include "ipkit/usage.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ipkit {

using Path = std::filesystem::path;

/// Plain text, one sentence per line, optionally `id<TAB>text`. Lines without
/// a target pronoun are skipped; a line with several yields several records.
std::size_t ingest_file(const Path& in, Population population, const Path& out);

/// Adds a "class" field to every record. Output order follows input order
/// for any worker count; memory is bounded by the chunk size.
std::size_t classify_file(const Path& in, const Path& out, const RuleConfig& rules, unsigned workers = 1,
                          std::size_t chunk = 4096);

struct AggregateOptions {
    double threshold = kDefaultThreshold;
    RuleConfig rules = RuleConfig::defaults();
    IdiomList idioms = IdiomList::defaults();
};

/// Joins annotation rows with their corpus records by id into gold lines.
std::size_t aggregate_file(const Path& annotations, const Path& corpus, const Path& out,
                           const AggregateOptions& options = {});

struct AgreementSummary {
    std::size_t items = 0;
    std::optional<double> mean_kappa;  // over the ten annotator pairs
};

AgreementSummary agreement_file(const Path& annotations);

/// Training text is one sentence per line, or a corpus file when the name ends in .jsonl.
std::size_t train_ngram_file(const Path& in, const NgramOptions& options, const Path& model_out);

/// `ngram:<model path>` or `remote:<url>`.
std::unique_ptr<SentenceScorer> open_scorer(const std::string& spec, const RemoteOptions& remote = {},
                                            unsigned workers = 1);

struct DetectSummary {
    DetectionReport report;
    std::size_t idiomatic = 0;  // removed before scoring
};

/// Idiomatic gold items are dropped, the rest scored, and the report written as JSON.
DetectSummary detect_file(const SentenceScorer& scorer, const Path& gold, ConfidenceFilter filter,
                          const Path& report_out, const std::optional<Path>& outcomes_out = std::nullopt);

std::string report_json(const DetectSummary& s);

enum class StatsKind { ByClass, Infelicity, Confusion };

void stats_file(StatsKind kind, const Path& in, const Path& out, const RuleConfig& rules,
                double threshold = kDefaultThreshold);

enum class MdsInput { Distances, Counts, Records };

Embedding mds_file(MdsInput kind, const Path& in, const Path& out, long languages = 0,
                   DistanceTransform transform = DistanceTransform::OneMinusShare, std::size_t dims = 2);

double overlap_file(const Path& records, std::size_t min_each = 6, std::size_t min_shared = 5);

struct SynthFileOptions {
    SynthOptions synth;
    std::size_t train_size = 5000;
};

/// Writes corpus.jsonl, gold.jsonl, ann.csv and train.txt into `dir`.
void synth_files(const SynthFileOptions& options, const Path& dir);

} // namespace ipkit
