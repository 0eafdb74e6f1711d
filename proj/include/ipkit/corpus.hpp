#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ipkit {

using Tokens = std::vector<std::string>;

enum class Pronoun : std::uint8_t { Someone, Anyone, Something, Anything };
enum class Family : std::uint8_t { Some, Any };
enum class Population : std::uint8_t { Native, AdvancedL2, Learner };

Pronoun alternate(Pronoun p) noexcept;
Family family(Pronoun p) noexcept;

std::string_view to_string(Pronoun p) noexcept;
std::string_view to_string(Family f) noexcept;
std::string_view to_string(Population p) noexcept;

/// Case-insensitive lemma lookup; somebody/anybody and everything else give nullopt.
std::optional<Pronoun> parse_pronoun(std::string_view lemma);
std::optional<Population> parse_population(std::string_view s);

std::string to_lower(std::string_view s);

/// One marked pronoun occurrence in one sentence.
struct SentenceRecord {
    std::string id;
    Tokens tokens;
    std::size_t ip_index = 0;
    Pronoun original = Pronoun::Someone;
    Population population = Population::Native;
    std::string raw_text;
    /// Unrecognised fields from the source line, name -> serialized JSON value.
    std::map<std::string, std::string> extras;

    bool operator==(const SentenceRecord&) const = default;
};

/// Throws ValidationError unless ip_index is in range and names `original`.
void validate(const SentenceRecord& record);

/// Tokenizes `text` and builds a validated record.
SentenceRecord make_record(std::string id, std::string text, std::size_t ip_index, Pronoun original,
                           Population population);

struct Corpus {
    std::vector<SentenceRecord> records;
    std::map<std::string, std::string> source_meta;
};

/// Whitespace split, then trailing . ? ! , ; : peeled off as separate tokens and
/// a word-final "n't" split into its own token. Casing is preserved.
Tokens tokenize(std::string_view raw_text);

/// Inverse of tokenize for well-formed input: punctuation and "n't" attach to the left.
std::string detokenize(const Tokens& tokens);

struct IpOccurrence {
    std::size_t index;
    Pronoun pronoun;
    bool operator==(const IpOccurrence&) const = default;
};

std::vector<IpOccurrence> locate_ips(const Tokens& tokens);

/// Returns record.tokens with the target pronoun swapped for its alternate,
/// carrying over an initial capital or an all-caps spelling.
Tokens substitute(const SentenceRecord& record);

/// The record with the swap applied (original becomes the alternate pronoun).
SentenceRecord substituted(const SentenceRecord& record);

/// One record per located pronoun. Ids are `base_id` for a single occurrence,
/// otherwise `base_id.1`, `base_id.2`, ...
std::vector<SentenceRecord> records_from_text(const std::string& base_id, const std::string& text,
                                              Population population);

// Line-delimited JSON corpus files.

SentenceRecord parse_record_line(std::string_view line, std::size_t line_no);
std::string format_record_line(const SentenceRecord& record);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Streams records from a corpus file, enforcing id uniqueness across the stream.
class CorpusReader {
public:
    explicit CorpusReader(const std::filesystem::path& path);

    /// Next record, or nullopt at end of file. Blank lines are skipped.
    std::optional<SentenceRecord> next();

    /// Raw text of the line last returned by next().
    const std::string& line() const noexcept { return line_; }
    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
    std::unordered_set<std::string> seen_;
};

/// Idiomatic pronoun expressions excluded from felicity statistics.
class IdiomList {
public:
    IdiomList() = default;
    explicit IdiomList(std::vector<Tokens> patterns);

    /// Built-in stand-in list.
    static IdiomList defaults();
    /// One pattern per line, whitespace-tokenized; '#' starts a comment.
    static IdiomList load(const std::filesystem::path& path);

    /// True if some pattern occurs in the record's tokens covering ip_index.
    bool matches(const SentenceRecord& record) const;

    const std::vector<Tokens>& patterns() const noexcept { return patterns_; }

private:
    std::vector<Tokens> patterns_;
};

} // namespace ipkit
