#include "ipkit/corpus.hpp"

#include "ipkit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>

namespace ipkit {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kPunct = ".?!,;:";
constexpr std::string_view kClitic = "n't";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct_char(char c) { return kPunct.find(c) != std::string_view::npos; }

bool is_attaching(const std::string& tok) {
    return (tok.size() == 1 && is_punct_char(tok[0])) || tok == kClitic;
}

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string recase_like(std::string_view replacement, std::string_view model) {
    bool has_alpha = false;
    bool all_caps = true;
    for (char c : model) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            has_alpha = true;
            if (!is_upper(c)) all_caps = false;
        }
    }
    if (has_alpha && all_caps && model.size() > 1) return upper(replacement);
    std::string out(replacement);
    if (!model.empty() && is_upper(model.front()) && !out.empty())
        out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
    return out;
}

template <typename T>
T require_field(const json& obj, const char* name, std::size_t line_no) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'", line_no);
    try {
        return it->template get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("field '") + name + "' has the wrong type", line_no);
    }
}

} // namespace

Pronoun alternate(Pronoun p) noexcept {
    switch (p) {
    case Pronoun::Someone: return Pronoun::Anyone;
    case Pronoun::Anyone: return Pronoun::Someone;
    case Pronoun::Something: return Pronoun::Anything;
    case Pronoun::Anything: return Pronoun::Something;
    }
    return p;
}

Family family(Pronoun p) noexcept {
    return (p == Pronoun::Someone || p == Pronoun::Something) ? Family::Some : Family::Any;
}

std::string_view to_string(Pronoun p) noexcept {
    switch (p) {
    case Pronoun::Someone: return "someone";
    case Pronoun::Anyone: return "anyone";
    case Pronoun::Something: return "something";
    case Pronoun::Anything: return "anything";
    }
    return "?";
}

std::string_view to_string(Family f) noexcept { return f == Family::Some ? "some" : "any"; }

std::string_view to_string(Population p) noexcept {
    switch (p) {
    case Population::Native: return "native";
    case Population::AdvancedL2: return "advanced_l2";
    case Population::Learner: return "learner";
    }
    return "?";
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<Pronoun> parse_pronoun(std::string_view lemma) {
    const auto low = to_lower(lemma);
    for (auto p : {Pronoun::Someone, Pronoun::Anyone, Pronoun::Something, Pronoun::Anything})
        if (low == to_string(p)) return p;
    return std::nullopt;
}

std::optional<Population> parse_population(std::string_view s) {
    const auto low = to_lower(s);
    for (auto p : {Population::Native, Population::AdvancedL2, Population::Learner})
        if (low == to_string(p)) return p;
    return std::nullopt;
}

Tokens tokenize(std::string_view raw_text) {
    Tokens out;
    std::size_t i = 0;
    while (i < raw_text.size()) {
        while (i < raw_text.size() && is_space(raw_text[i])) ++i;
        std::size_t j = i;
        while (j < raw_text.size() && !is_space(raw_text[j])) ++j;
        if (j == i) break;
        std::string_view chunk = raw_text.substr(i, j - i);
        i = j;

        std::size_t word_end = chunk.size();
        while (word_end > 0 && is_punct_char(chunk[word_end - 1])) --word_end;
        std::string_view word = chunk.substr(0, word_end);
        if (!word.empty()) {
            if (word.size() > kClitic.size() &&
                to_lower(word.substr(word.size() - kClitic.size())) == kClitic) {
                out.emplace_back(word.substr(0, word.size() - kClitic.size()));
                out.emplace_back(word.substr(word.size() - kClitic.size()));
            } else {
                out.emplace_back(word);
            }
        }
        for (std::size_t k = word_end; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
    }
    return out;
}

std::string detokenize(const Tokens& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && !is_attaching(tokens[i])) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::vector<IpOccurrence> locate_ips(const Tokens& tokens) {
    std::vector<IpOccurrence> out;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (auto p = parse_pronoun(tokens[i])) out.push_back({i, *p});
    return out;
}

void validate(const SentenceRecord& record) {
    if (record.ip_index >= record.tokens.size())
        throw ValidationError("record '" + record.id + "': ip_index " +
                              std::to_string(record.ip_index) + " is out of range for " +
                              std::to_string(record.tokens.size()) + " tokens");
    if (to_lower(record.tokens[record.ip_index]) != to_string(record.original))
        throw ValidationError("record '" + record.id + "': token '" +
                              record.tokens[record.ip_index] + "' at ip_index does not match '" +
                              std::string(to_string(record.original)) + "'");
}

SentenceRecord make_record(std::string id, std::string text, std::size_t ip_index, Pronoun original,
                           Population population) {
    SentenceRecord r;
    r.id = std::move(id);
    r.tokens = tokenize(text);
    r.raw_text = std::move(text);
    r.ip_index = ip_index;
    r.original = original;
    r.population = population;
    validate(r);
    return r;
}

Tokens substitute(const SentenceRecord& record) {
    validate(record);
    Tokens out = record.tokens;
    auto& target = out[record.ip_index];
    target = recase_like(to_string(alternate(record.original)), target);
    return out;
}

SentenceRecord substituted(const SentenceRecord& record) {
    SentenceRecord out = record;
    out.tokens = substitute(record);
    out.original = alternate(record.original);
    out.raw_text = detokenize(out.tokens);
    return out;
}

std::vector<SentenceRecord> records_from_text(const std::string& base_id, const std::string& text,
                                              Population population) {
    const Tokens tokens = tokenize(text);
    const auto hits = locate_ips(tokens);
    std::vector<SentenceRecord> out;
    out.reserve(hits.size());
    for (std::size_t k = 0; k < hits.size(); ++k) {
        SentenceRecord r;
        r.id = hits.size() == 1 ? base_id : base_id + "." + std::to_string(k + 1);
        r.tokens = tokens;
        r.ip_index = hits[k].index;
        r.original = hits[k].pronoun;
        r.population = population;
        r.raw_text = text;
        out.push_back(std::move(r));
    }
    return out;
}

SentenceRecord parse_record_line(std::string_view line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record is not a JSON object", line_no);

    SentenceRecord r;
    r.id = require_field<std::string>(obj, "id", line_no);
    r.raw_text = require_field<std::string>(obj, "text", line_no);
    auto idx_it = obj.find("ip_index");
    if (idx_it == obj.end()) throw ParseError("missing field 'ip_index'", line_no);
    if (!idx_it->is_number_integer() || idx_it->get<std::int64_t>() < 0)
        throw ParseError("field 'ip_index' must be a non-negative integer", line_no);
    r.ip_index = idx_it->get<std::size_t>();

    const auto lemma = require_field<std::string>(obj, "original", line_no);
    auto pron = parse_pronoun(lemma);
    if (!pron) throw ParseError("unknown pronoun '" + lemma + "'", line_no);
    r.original = *pron;

    const auto pop = require_field<std::string>(obj, "population", line_no);
    auto popv = parse_population(pop);
    if (!popv) throw ParseError("unknown population '" + pop + "'", line_no);
    r.population = *popv;

    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const auto& key = it.key();
        if (key == "id" || key == "text" || key == "ip_index" || key == "original" ||
            key == "population")
            continue;
        r.extras.emplace(key, it.value().dump());
    }

    r.tokens = tokenize(r.raw_text);
    try {
        validate(r);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no);
    }
    return r;
}

std::string format_record_line(const SentenceRecord& record) {
    json obj;
    obj["id"] = record.id;
    obj["text"] = record.raw_text;
    obj["ip_index"] = record.ip_index;
    obj["original"] = to_string(record.original);
    obj["population"] = to_string(record.population);
    for (const auto& [k, v] : record.extras) obj[k] = json::parse(v);
    return obj.dump();
}

CorpusReader::CorpusReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
}

std::optional<SentenceRecord> CorpusReader::next() {
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        if (line_.find_first_not_of(" \t") == std::string::npos) continue;
        auto r = parse_record_line(line_, line_no_);
        if (!seen_.insert(r.id).second) throw ParseError("duplicate id '" + r.id + "'", line_no_);
        return r;
    }
    return std::nullopt;
}

Corpus load_corpus(const std::filesystem::path& path) {
    Corpus c;
    c.source_meta["path"] = path.string();
    CorpusReader reader(path);
    while (auto r = reader.next()) c.records.push_back(std::move(*r));
    return c;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const auto& r : corpus.records) out << format_record_line(r) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

IdiomList::IdiomList(std::vector<Tokens> patterns) : patterns_(std::move(patterns)) {
    for (auto& p : patterns_)
        for (auto& t : p) t = to_lower(t);
    std::erase_if(patterns_, [](const Tokens& p) { return p.empty(); });
}

IdiomList IdiomList::defaults() {
    // Stand-in list of common fixed expressions; replace via IdiomList::load.
    static const std::array<std::string_view, 10> kBuiltin = {
        "or something",      "or anything",   "or someone",        "or anyone",
        "something like that", "anything but", "if anything",     "something of a",
        "anything goes",     "something else entirely",
    };
    std::vector<Tokens> pats;
    for (auto s : kBuiltin) pats.push_back(tokenize(s));
    return IdiomList(std::move(pats));
}

IdiomList IdiomList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open idiom list '" + path.string() + "'");
    std::vector<Tokens> pats;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto toks = tokenize(line);
        if (!toks.empty()) pats.push_back(std::move(toks));
    }
    return IdiomList(std::move(pats));
}

bool IdiomList::matches(const SentenceRecord& record) const {
    const auto& toks = record.tokens;
    const std::size_t ip = record.ip_index;
    for (const auto& pat : patterns_) {
        if (pat.size() > toks.size()) continue;
        const std::size_t lo = ip + 1 >= pat.size() ? ip + 1 - pat.size() : 0;
        const std::size_t hi = std::min(ip, toks.size() - pat.size());
        for (std::size_t start = lo; start <= hi; ++start) {
            bool ok = true;
            for (std::size_t k = 0; k < pat.size() && ok; ++k)
                ok = to_lower(toks[start + k]) == pat[k];
            if (ok) return true;
        }
    }
    return false;
}

} // namespace ipkit
