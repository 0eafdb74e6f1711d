#include "ipkit/synth.hpp"

#include "ipkit/errors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <string_view>

namespace ipkit {

namespace {

struct Verb {
    std::string_view past;
    std::string_view base;
};

constexpr std::array<std::string_view, 10> kSubjects = {
    "I", "We", "They", "She", "He", "The teacher", "My brother", "Our neighbor", "The children", "The guard",
};

constexpr std::array<Verb, 8> kVerbs = {{
    {"saw", "see"}, {"heard", "hear"}, {"found", "find"}, {"noticed", "notice"},
    {"met", "meet"}, {"called", "call"}, {"followed", "follow"}, {"remembered", "remember"},
}};

constexpr std::array<std::string_view, 7> kAdjuncts = {
    "yesterday", "at the station", "in the garden", "last night", "near the river", "this morning", "",
};

enum class Frame { Affirmative, Negated, Never, Question };

// All draws go through this so output depends only on the seed, not on the
// standard library's distribution implementations.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::string lower_first(std::string_view s) {
    std::string out(s);
    if (out != "I" && !out.empty()) out.front() = static_cast<char>(std::tolower(static_cast<unsigned char>(out.front())));
    return out;
}

struct Draft {
    std::string text;
    Pronoun fitting;
};

Draft draft(std::mt19937_64& rng) {
    const bool any_frame = draw(rng, 2) == 1;
    const Frame frame = any_frame ? static_cast<Frame>(1 + draw(rng, 3)) : Frame::Affirmative;
    const bool thing = draw(rng, 2) == 1;
    const auto subject = kSubjects[draw(rng, kSubjects.size())];
    const auto& verb = kVerbs[draw(rng, kVerbs.size())];
    const auto adjunct = kAdjuncts[draw(rng, kAdjuncts.size())];

    const Pronoun fitting = any_frame ? (thing ? Pronoun::Anything : Pronoun::Anyone)
                                      : (thing ? Pronoun::Something : Pronoun::Someone);
    const std::string pron(to_string(fitting));

    std::string text;
    switch (frame) {
    case Frame::Affirmative: text = std::string(subject) + " " + std::string(verb.past) + " " + pron; break;
    case Frame::Negated: text = std::string(subject) + " didn't " + std::string(verb.base) + " " + pron; break;
    case Frame::Never: text = std::string(subject) + " never " + std::string(verb.past) + " " + pron; break;
    case Frame::Question:
        text = "Did " + lower_first(subject) + " " + std::string(verb.base) + " " + pron;
        break;
    }
    if (!adjunct.empty()) text += " " + std::string(adjunct);
    text += frame == Frame::Question ? "?" : ".";
    return {std::move(text), fitting};
}

} // namespace

SynthData synth_corpus(const SynthOptions& options) {
    if (options.size == 0) throw ValidationError("synth: size must be positive");
    if (!(options.corruption_rate >= 0.0 && options.corruption_rate <= 1.0))
        throw ValidationError("synth: corruption rate must be in [0, 1]");

    std::mt19937_64 rng(options.seed);
    std::vector<Draft> drafts;
    drafts.reserve(options.size);
    for (std::size_t i = 0; i < options.size; ++i) drafts.push_back(draft(rng));

    const auto flips = static_cast<std::size_t>(
        std::llround(options.corruption_rate * static_cast<double>(options.size)));
    std::vector<std::size_t> order(options.size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < flips; ++i) std::swap(order[i], order[i + draw(rng, options.size - i)]);
    std::vector<bool> flipped(options.size, false);
    for (std::size_t i = 0; i < flips; ++i) flipped[order[i]] = true;

    constexpr std::array kPops{Population::Native, Population::AdvancedL2, Population::Learner};

    SynthData out;
    out.corpus.source_meta["generator"] = "synth";
    out.corpus.source_meta["seed"] = std::to_string(options.seed);
    const int width = static_cast<int>(std::to_string(options.size).size());
    for (std::size_t i = 0; i < options.size; ++i) {
        std::string num = std::to_string(i + 1);
        num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
        const std::string id = "syn-" + num;
        const Population pop = kPops[draw(rng, kPops.size())];

        auto recs = records_from_text(id, drafts[i].text, pop);
        SentenceRecord rec = std::move(recs.front());
        if (flipped[i]) rec = substituted(rec);

        AnnotationItem item{id, rec.original,
                            std::vector<Choice>(kAnnotators, choice_for(family(drafts[i].fitting)))};
        GoldRecord g;
        g.record = rec;
        g.annotation = aggregate(item);
        out.corpus.records.push_back(std::move(rec));
        out.annotations.push_back(std::move(item));
        out.gold.push_back(std::move(g));
    }
    return out;
}

std::vector<std::string> synth_sentences(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draft(rng).text);
    return out;
}

} // namespace ipkit
