#include "ipkit/annotation.hpp"

#include "ipkit/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>
#include <utility>

namespace ipkit {

namespace {

void check_threshold(double threshold) {
    if (!(threshold > 0.5 && threshold <= 1.0))
        throw ValidationError("confidence threshold must be in (0.5, 1.0], got " +
                              detail::format_double(threshold));
}

} // namespace

std::string_view to_string(Choice c) noexcept {
    switch (c) {
    case Choice::SomeForm: return "some";
    case Choice::AnyForm: return "any";
    case Choice::Other: return "other";
    }
    return "?";
}

std::string_view to_code(Choice c) noexcept {
    switch (c) {
    case Choice::SomeForm: return "S";
    case Choice::AnyForm: return "A";
    case Choice::Other: return "O";
    }
    return "?";
}

std::string_view to_string(GoldLabel g) noexcept {
    switch (g) {
    case GoldLabel::Felicitous: return "felicitous";
    case GoldLabel::Infelicitous: return "infelicitous";
    case GoldLabel::LowConfidence: return "low_confidence";
    case GoldLabel::OtherMajority: return "other_majority";
    }
    return "?";
}

std::optional<Choice> parse_choice(std::string_view s) {
    const auto t = to_lower(detail::trim(s));
    if (t == "s" || t == "some") return Choice::SomeForm;
    if (t == "a" || t == "any") return Choice::AnyForm;
    if (t == "o" || t == "other") return Choice::Other;
    return std::nullopt;
}

std::optional<GoldLabel> parse_gold_label(std::string_view s) {
    const auto t = to_lower(detail::trim(s));
    for (auto g : {GoldLabel::Felicitous, GoldLabel::Infelicitous, GoldLabel::LowConfidence,
                   GoldLabel::OtherMajority})
        if (t == to_string(g)) return g;
    return std::nullopt;
}

Choice choice_for(Family f) noexcept { return f == Family::Some ? Choice::SomeForm : Choice::AnyForm; }

GoldLabel AnnotationAggregate::gold_at(double threshold) const {
    check_threshold(threshold);
    if (tied || confidence() < threshold) return GoldLabel::LowConfidence;
    if (majority == Choice::Other) return GoldLabel::OtherMajority;
    if (majority != choice_for(family(original))) return GoldLabel::Infelicitous;
    return GoldLabel::Felicitous;
}

AnnotationAggregate aggregate(const AnnotationItem& item, double threshold) {
    if (item.choices.size() != kAnnotators)
        throw ValidationError("annotation '" + item.sentence_id + "': expected 5 choices, got " +
                              std::to_string(item.choices.size()));
    check_threshold(threshold);

    std::array<int, 3> votes{};
    for (auto c : item.choices) ++votes[static_cast<std::size_t>(c)];
    const auto top = std::max_element(votes.begin(), votes.end());

    AnnotationAggregate agg;
    agg.sentence_id = item.sentence_id;
    agg.original = item.original;
    agg.majority = static_cast<Choice>(top - votes.begin());
    agg.majority_votes = *top;
    agg.tied = std::count(votes.begin(), votes.end(), *top) > 1;
    agg.gold = agg.gold_at(threshold);
    return agg;
}

double infelicity_rate(std::span<const AnnotationAggregate> aggregates, double threshold) {
    if (aggregates.empty()) throw ValidationError("infelicity_rate: no items");
    std::size_t infelicitous = 0, counted = 0;
    for (const auto& a : aggregates) {
        const auto g = a.gold_at(threshold);
        if (g == GoldLabel::OtherMajority) continue;
        ++counted;
        if (g == GoldLabel::Infelicitous) ++infelicitous;
    }
    if (counted == 0) throw ValidationError("infelicity_rate: every item has an OTHER majority");
    return static_cast<double>(infelicitous) / static_cast<double>(counted);
}

std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw ValidationError("cohen_kappa: labelings differ in length");
    if (a.empty()) throw ValidationError("cohen_kappa: empty labelings");
    const double n = static_cast<double>(a.size());
    std::map<int, std::pair<double, double>> marginals;
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) agree += 1.0;
        marginals[a[i]].first += 1.0;
        marginals[b[i]].second += 1.0;
    }
    const double p_o = agree / n;
    double p_e = 0.0;
    for (const auto& [cat, m] : marginals) p_e += (m.first / n) * (m.second / n);
    if (p_e >= 1.0) {
        if (p_o >= 1.0) return 1.0;
        return std::nullopt;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

std::optional<double> mean_pairwise_kappa(std::span<const std::vector<int>> labelings) {
    if (labelings.size() < 2) throw ValidationError("mean_pairwise_kappa: need at least two labelings");
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < labelings.size(); ++i)
        for (std::size_t j = i + 1; j < labelings.size(); ++j)
            if (auto k = cohen_kappa(labelings[i], labelings[j])) {
                sum += *k;
                ++defined;
            }
    if (defined == 0) return std::nullopt;
    return sum / static_cast<double>(defined);
}

std::vector<AnnotationItem> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file '" + path.string() + "'");
    std::vector<AnnotationItem> out;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split(t, ',');
        const bool is_first = std::exchange(first, false);
        if (fields.size() >= 2 && !parse_pronoun(fields[1]) && is_first) continue;  // header
        if (fields.size() != 2 + kAnnotators)
            throw ParseError("expected sentence_id, original and 5 choices (" +
                             std::to_string(fields.size()) + " fields found)", line_no);
        AnnotationItem item;
        item.sentence_id = fields[0];
        if (item.sentence_id.empty()) throw ParseError("empty sentence_id", line_no);
        if (!seen.insert(item.sentence_id).second)
            throw ParseError("duplicate sentence_id '" + item.sentence_id + "'", line_no);
        auto pron = parse_pronoun(fields[1]);
        if (!pron) throw ParseError("unknown pronoun '" + fields[1] + "'", line_no);
        item.original = *pron;
        for (std::size_t k = 0; k < kAnnotators; ++k) {
            auto c = parse_choice(fields[2 + k]);
            if (!c) throw ParseError("unknown choice code '" + fields[2 + k] + "'", line_no);
            item.choices.push_back(*c);
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::string format_annotation_line(const AnnotationItem& item) {
    std::string s = item.sentence_id + "," + std::string(to_string(item.original));
    for (auto c : item.choices) s += "," + std::string(to_code(c));
    return s;
}

} // namespace ipkit
