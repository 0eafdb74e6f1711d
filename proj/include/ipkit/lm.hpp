#pragma once

#include "ipkit/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ipkit {

/// Anything that assigns a sentence a log-score; higher means more probable.
/// Implementations must be deterministic and safe for concurrent calls.
class SentenceScorer {
public:
    virtual ~SentenceScorer() = default;

    virtual double score(const Tokens& tokens) const = 0;

    /// Order-aligned scores. The default loops over score().
    virtual std::vector<double> score_batch(std::span<const Tokens> batch) const;

    virtual std::string describe() const = 0;
};

struct NgramOptions {
    int order = 3;
    std::vector<double> lambdas{0.6, 0.3, 0.1};  // highest order first
    double add_k = 1.0;
    long min_count = 1;

    void validate() const;
};

/// Interpolated maximum-likelihood n-gram model with an add-k unigram floor.
/// Tokens are case-folded. An order whose history was never seen passes its
/// weight down to the next lower order, so every conditional distribution
/// sums to one over the vocabulary.
class NgramModel final : public SentenceScorer {
public:
    static constexpr std::string_view kBos = "<s>";
    static constexpr std::string_view kEos = "</s>";
    static constexpr std::string_view kUnk = "<unk>";

    static NgramModel train(std::span<const Tokens> sentences, const NgramOptions& options = {});

    /// P(token | history). Only the last order-1 history tokens are used;
    /// shorter histories are left-padded with <s>. Unknown tokens map to <unk>.
    double next_prob(std::span<const std::string> history, std::string_view token) const;

    /// Natural-log probability of the padded sentence including </s>.
    double score(const Tokens& tokens) const override;
    std::vector<double> score_batch(std::span<const Tokens> batch) const override;
    std::string describe() const override;

    /// Raw count of an n-gram given as surface tokens (case-folded, OOV -> <unk>).
    long count(std::span<const std::string> ngram) const;

    const std::vector<std::string>& vocab() const noexcept { return words_; }
    const NgramOptions& options() const noexcept { return options_; }
    long predicted_tokens() const noexcept { return total_; }

    /// Worker threads used by score_batch (>= 1).
    void set_workers(unsigned workers) noexcept { workers_ = workers ? workers : 1; }

    /// Line-based count dump, first line `ipkit-ngram 1`.
    void save(const std::filesystem::path& path) const;
    static NgramModel load(const std::filesystem::path& path);
    void write(std::ostream& out) const;
    static NgramModel read(std::istream& in);

private:
    using Id = std::uint32_t;
    using Key = std::string;  // packed ids

    NgramModel() = default;

    Id id_of(std::string_view token) const;
    Id add_word(const std::string& w);
    void add_count(std::span<const Id> ngram, long c);
    double prob_ids(std::span<const Id> context, Id w) const;
    static Key pack(std::span<const Id> ids);

    NgramOptions options_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, Id> index_;
    std::vector<std::unordered_map<Key, long>> ngrams_;   // [k-1] -> counts of k-grams
    std::vector<std::unordered_map<Key, long>> history_;  // [k-1] -> continuation totals of (k-1)-gram histories
    long total_ = 0;
    unsigned workers_ = 1;
};

} // namespace ipkit
