#pragma once

#include "ipkit/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipkit {

/// One annotator's pick for the blanked-out pronoun slot.
enum class Choice : std::uint8_t { SomeForm, AnyForm, Other };

enum class GoldLabel : std::uint8_t { Felicitous, Infelicitous, LowConfidence, OtherMajority };

inline constexpr std::size_t kAnnotators = 5;
inline constexpr double kDefaultThreshold = 0.8;

std::string_view to_string(Choice c) noexcept;       // "some" / "any" / "other"
std::string_view to_code(Choice c) noexcept;         // "S" / "A" / "O"
std::string_view to_string(GoldLabel g) noexcept;    // "felicitous", ...
std::optional<Choice> parse_choice(std::string_view s);  // accepts codes and names
std::optional<GoldLabel> parse_gold_label(std::string_view s);

Choice choice_for(Family f) noexcept;

struct AnnotationItem {
    std::string sentence_id;
    Pronoun original = Pronoun::Someone;
    std::vector<Choice> choices;
};

struct AnnotationAggregate {
    std::string sentence_id;
    Pronoun original = Pronoun::Someone;
    Choice majority = Choice::SomeForm;
    int majority_votes = 0;   // 1..5
    bool tied = false;        // two choices share the top count
    GoldLabel gold = GoldLabel::LowConfidence;

    double confidence() const noexcept {
        return static_cast<double>(majority_votes) / static_cast<double>(kAnnotators);
    }
    bool unanimous() const noexcept { return majority_votes == static_cast<int>(kAnnotators); }

    /// The gold label this item would receive at another threshold.
    GoldLabel gold_at(double threshold) const;
};

/// Majority vote with confidence = top count / 5. A tie at the top count is
/// always LOW_CONFIDENCE; its majority is the first tied choice in
/// some, any, other order.
AnnotationAggregate aggregate(const AnnotationItem& item, double threshold = kDefaultThreshold);

/// |INFELICITOUS| / |not OTHER_MAJORITY| with labels re-derived at `threshold`.
double infelicity_rate(std::span<const AnnotationAggregate> aggregates, double threshold);

/// Cohen's kappa with marginal-product chance agreement. nullopt when
/// chance agreement is 1 but observed agreement is not.
std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b);

/// Mean of cohen_kappa over all unordered pairs of labelings; pairs with an
/// undefined kappa are skipped. nullopt if no pair is defined.
std::optional<double> mean_pairwise_kappa(std::span<const std::vector<int>> labelings);

/// `sentence_id, original, c1, ..., c5` rows, choice codes S/A/O. A first line
/// whose second field is not a pronoun is treated as a header.
std::vector<AnnotationItem> load_annotations(const std::filesystem::path& path);
std::string format_annotation_line(const AnnotationItem& item);

} // namespace ipkit
