#pragma once

#include "ipkit/analysis.hpp"
#include "ipkit/annotation.hpp"
#include "ipkit/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ipkit {

struct SynthOptions {
    std::uint64_t seed = 1;
    std::size_t size = 200;
    double corruption_rate = 0.2;  // share of sentences whose pronoun is flipped
};

/// A generated evaluation set. The three views describe the same sentences in
/// the same order.
struct SynthData {
    Corpus corpus;
    std::vector<AnnotationItem> annotations;  // five identical votes for the fitting family
    std::vector<GoldRecord> gold;             // confidence 1.0
};

/// Template sentences whose fitting family follows from local context:
/// affirmative declaratives take some-, negated and interrogative frames take
/// any-. Exactly round(rate * size) sentences get the other family.
SynthData synth_corpus(const SynthOptions& options);

/// `count` clean sentences drawn from the same templates, as plain text.
std::vector<std::string> synth_sentences(std::uint64_t seed, std::size_t count);

} // namespace ipkit
