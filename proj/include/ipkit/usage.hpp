#pragma once

#include "ipkit/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipkit {

/// Fine-grained usage classes of an indefinite pronoun occurrence.
enum class UsageClass : std::uint8_t {
    Specific,           // SP
    NonSpecific,        // NS
    Question,           // QU
    Conditional,        // CD
    IndirectNegation,   // IN
    DirectNegation,     // DN
    Comparison,         // CP
    FreeChoice,         // FC
};

inline constexpr std::array<UsageClass, 8> kAllUsageClasses = {
    UsageClass::Specific,         UsageClass::NonSpecific,    UsageClass::Question,
    UsageClass::Conditional,      UsageClass::IndirectNegation, UsageClass::DirectNegation,
    UsageClass::Comparison,       UsageClass::FreeChoice,
};

enum class CoarseClass : std::uint8_t { DN, QU, CD, CP, Mixed };

inline constexpr std::array<CoarseClass, 5> kAllCoarseClasses = {
    CoarseClass::DN, CoarseClass::QU, CoarseClass::CD, CoarseClass::CP, CoarseClass::Mixed,
};

/// SP, NS, FC and IN collapse into MIXED; the other four keep their own class.
CoarseClass coarse(UsageClass c) noexcept;

/// Whether English some-/any- pronouns can express the class.
bool some_compatible(UsageClass c) noexcept;
bool any_compatible(UsageClass c) noexcept;

std::string_view to_string(UsageClass c) noexcept;
std::string_view to_string(CoarseClass c) noexcept;
std::optional<UsageClass> parse_usage_class(std::string_view s);
std::optional<CoarseClass> parse_coarse_class(std::string_view s);

/// Lexical cue inventories for the left-scan rules. Entries are lowercase; a
/// multi-word opener such as "in case" is stored as its token sequence.
struct RuleConfig {
    std::set<std::string> negators;
    std::vector<Tokens> conditional_openers;
    std::set<std::string> clause_boundaries;
    std::size_t comparison_window = 2;

    static RuleConfig defaults();

    /// `key = item | item | ...` lines; '#' comments. Missing keys keep defaults.
    static RuleConfig load(const std::filesystem::path& path);
    static RuleConfig parse(std::string_view text);

    /// Throws ValidationError on empty sets or a zero window.
    void validate() const;
};

/// Precedence CP > QU > CD > DN > MIXED, first match wins.
CoarseClass classify_usage(const SentenceRecord& record, const RuleConfig& config);
CoarseClass classify_usage(const Tokens& tokens, std::size_t ip_index, const RuleConfig& config);

struct ClassScores {
    CoarseClass cls;
    std::size_t support = 0;    // gold count
    std::size_t predicted = 0;  // predicted count
    std::optional<double> precision;
    std::optional<double> recall;  // absent when the class never occurs in gold
    std::optional<double> f1;
};

struct ClassifierEvaluation {
    std::array<ClassScores, 5> per_class;
    double accuracy = 0.0;
    double chance_baseline = 0.2;
    std::size_t n = 0;

    const ClassScores& scores(CoarseClass c) const { return per_class[static_cast<std::size_t>(c)]; }
};

ClassifierEvaluation evaluate_classifier(std::span<const CoarseClass> predictions,
                                         std::span<const CoarseClass> gold);

} // namespace ipkit
