#include "ipkit/usage.hpp"

#include "ipkit/errors.hpp"

#include <fstream>
#include <sstream>

namespace ipkit {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_items(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto bar = value.find('|', start);
        if (bar == std::string_view::npos) bar = value.size();
        auto item = trim(value.substr(start, bar - start));
        if (!item.empty()) out.push_back(to_lower(item));
        start = bar + 1;
    }
    return out;
}

bool opener_ends_at(const Tokens& tokens, std::size_t pos, const Tokens& opener) {
    if (opener.size() > pos + 1) return false;
    const std::size_t first = pos + 1 - opener.size();
    for (std::size_t k = 0; k < opener.size(); ++k)
        if (to_lower(tokens[first + k]) != opener[k]) return false;
    return true;
}

bool is_sentence_punct(const std::string& tok) {
    return tok.size() == 1 && std::string_view(".?!,;:").find(tok[0]) != std::string_view::npos;
}

} // namespace

CoarseClass coarse(UsageClass c) noexcept {
    switch (c) {
    case UsageClass::Question: return CoarseClass::QU;
    case UsageClass::Conditional: return CoarseClass::CD;
    case UsageClass::DirectNegation: return CoarseClass::DN;
    case UsageClass::Comparison: return CoarseClass::CP;
    default: return CoarseClass::Mixed;
    }
}

bool some_compatible(UsageClass c) noexcept { return c != UsageClass::FreeChoice; }

bool any_compatible(UsageClass c) noexcept {
    return c != UsageClass::Specific && c != UsageClass::NonSpecific;
}

std::string_view to_string(UsageClass c) noexcept {
    static constexpr std::array<std::string_view, 8> names = {"SP", "NS", "QU", "CD",
                                                              "IN", "DN", "CP", "FC"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view to_string(CoarseClass c) noexcept {
    static constexpr std::array<std::string_view, 5> names = {"DN", "QU", "CD", "CP", "MIXED"};
    return names[static_cast<std::size_t>(c)];
}

std::optional<UsageClass> parse_usage_class(std::string_view s) {
    const auto t = trim(s);
    for (auto c : kAllUsageClasses)
        if (t == to_string(c)) return c;
    return std::nullopt;
}

std::optional<CoarseClass> parse_coarse_class(std::string_view s) {
    const auto t = trim(s);
    for (auto c : kAllCoarseClasses)
        if (t == to_string(c)) return c;
    return std::nullopt;
}

RuleConfig RuleConfig::defaults() {
    RuleConfig cfg;
    cfg.negators = {"not",  "n't",     "never",  "no",     "none",  "nothing",  "nobody",
                    "without", "neither", "nor", "hardly", "barely", "scarcely"};
    cfg.conditional_openers = {{"if"}, {"unless"}, {"whether"}, {"in", "case"}};
    cfg.clause_boundaries = {".",   ",",   ";",   ":",       "that", "who", "which",
                             "how", "because", "but", "and", "than"};
    cfg.comparison_window = 2;
    return cfg;
}

RuleConfig RuleConfig::parse(std::string_view text) {
    RuleConfig cfg = defaults();
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        const auto key = to_lower(trim(std::string_view(line).substr(0, eq)));
        const auto value = std::string_view(line).substr(eq + 1);
        if (key == "negators") {
            auto items = split_items(value);
            cfg.negators = {items.begin(), items.end()};
        } else if (key == "clause_boundaries") {
            auto items = split_items(value);
            cfg.clause_boundaries = {items.begin(), items.end()};
        } else if (key == "conditional_openers") {
            cfg.conditional_openers.clear();
            for (const auto& item : split_items(value)) cfg.conditional_openers.push_back(tokenize(item));
        } else if (key == "comparison_window") {
            const auto v = trim(value);
            try {
                std::size_t used = 0;
                const long w = std::stol(v, &used);
                if (used != v.size() || w < 0) throw std::invalid_argument(v);
                cfg.comparison_window = static_cast<std::size_t>(w);
            } catch (const std::exception&) {
                throw ParseError("comparison_window must be a non-negative integer", line_no);
            }
        } else {
            throw ParseError("unknown key '" + key + "'", line_no);
        }
    }
    cfg.validate();
    return cfg;
}

RuleConfig RuleConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rule config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RuleConfig::validate() const {
    if (negators.empty()) throw ValidationError("rule config: negators must not be empty");
    if (conditional_openers.empty())
        throw ValidationError("rule config: conditional_openers must not be empty");
    if (clause_boundaries.empty())
        throw ValidationError("rule config: clause_boundaries must not be empty");
    if (comparison_window < 1) throw ValidationError("rule config: comparison_window must be >= 1");
}

CoarseClass classify_usage(const Tokens& tokens, std::size_t ip_index, const RuleConfig& config) {
    if (ip_index >= tokens.size()) throw ValidationError("ip_index out of range");

    for (std::size_t d = 1; d <= config.comparison_window && d <= ip_index; ++d)
        if (to_lower(tokens[ip_index - d]) == "than") return CoarseClass::CP;

    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (is_sentence_punct(*it)) {
            if (*it == "?") return CoarseClass::QU;
            break;
        }
    }

    // Left scan within the pronoun's clause.
    bool negated = false;
    for (std::size_t pos = ip_index; pos-- > 0;) {
        for (const auto& opener : config.conditional_openers)
            if (opener_ends_at(tokens, pos, opener)) return CoarseClass::CD;
        const auto low = to_lower(tokens[pos]);
        if (config.clause_boundaries.contains(low)) break;
        if (!negated && config.negators.contains(low)) negated = true;
    }
    return negated ? CoarseClass::DN : CoarseClass::Mixed;
}

CoarseClass classify_usage(const SentenceRecord& record, const RuleConfig& config) {
    return classify_usage(record.tokens, record.ip_index, config);
}

ClassifierEvaluation evaluate_classifier(std::span<const CoarseClass> predictions,
                                         std::span<const CoarseClass> gold) {
    if (predictions.size() != gold.size())
        throw ValidationError("evaluate_classifier: " + std::to_string(predictions.size()) +
                              " predictions for " + std::to_string(gold.size()) + " gold labels");
    if (gold.empty()) throw ValidationError("evaluate_classifier: no items");

    std::array<std::array<std::size_t, 5>, 5> confusion{};  // [gold][pred]
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predictions[i])];

    ClassifierEvaluation ev;
    ev.n = gold.size();
    std::size_t correct = 0;
    for (std::size_t c = 0; c < 5; ++c) {
        auto& s = ev.per_class[c];
        s.cls = kAllCoarseClasses[c];
        const std::size_t tp = confusion[c][c];
        correct += tp;
        for (std::size_t k = 0; k < 5; ++k) {
            s.support += confusion[c][k];
            s.predicted += confusion[k][c];
        }
        if (s.predicted > 0) s.precision = static_cast<double>(tp) / static_cast<double>(s.predicted);
        if (s.support > 0) s.recall = static_cast<double>(tp) / static_cast<double>(s.support);
        if (s.precision && s.recall) {
            const double sum = *s.precision + *s.recall;
            s.f1 = sum > 0.0 ? 2.0 * *s.precision * *s.recall / sum : 0.0;
        }
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.n);
    return ev;
}

} // namespace ipkit
