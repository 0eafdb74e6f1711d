#include "ipkit/lm.hpp"

#include "ipkit/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace ipkit {

namespace {

constexpr std::string_view kMagic = "ipkit-ngram";
constexpr int kFormatVersion = 1;

bool is_reserved(std::string_view w) {
    return w == NgramModel::kBos || w == NgramModel::kEos || w == NgramModel::kUnk;
}

} // namespace

std::vector<double> SentenceScorer::score_batch(std::span<const Tokens> batch) const {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& t : batch) out.push_back(score(t));
    return out;
}

void NgramOptions::validate() const {
    if (order < 1) throw ValidationError("n-gram order must be >= 1");
    if (lambdas.size() != static_cast<std::size_t>(order))
        throw ValidationError("expected " + std::to_string(order) + " interpolation weights, got " +
                              std::to_string(lambdas.size()));
    double sum = 0.0;
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw ValidationError("interpolation weights must be non-negative");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("interpolation weights must sum to 1");
    if (!(add_k > 0.0) || !std::isfinite(add_k)) throw ValidationError("add_k must be positive");
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
}

NgramModel::Key NgramModel::pack(std::span<const Id> ids) {
    Key k(ids.size() * sizeof(Id), '\0');
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t b = 0; b < sizeof(Id); ++b)
            k[i * sizeof(Id) + b] = static_cast<char>((ids[i] >> (8 * b)) & 0xffu);
    return k;
}

NgramModel::Id NgramModel::add_word(const std::string& w) {
    auto [it, inserted] = index_.emplace(w, static_cast<Id>(words_.size()));
    if (inserted) words_.push_back(w);
    return it->second;
}

NgramModel::Id NgramModel::id_of(std::string_view token) const {
    auto it = index_.find(to_lower(token));
    return it == index_.end() ? index_.at(std::string(kUnk)) : it->second;
}

void NgramModel::add_count(std::span<const Id> ngram, long c) {
    const std::size_t k = ngram.size();
    ngrams_[k - 1][pack(ngram)] += c;
    if (k >= 2) history_[k - 1][pack(ngram.first(k - 1))] += c;
    else total_ += c;
}

NgramModel NgramModel::train(std::span<const Tokens> sentences, const NgramOptions& options) {
    options.validate();
    if (sentences.empty()) throw ValidationError("cannot train on an empty corpus");

    std::map<std::string, long> freq;
    for (const auto& s : sentences)
        for (const auto& t : s) ++freq[to_lower(t)];

    NgramModel m;
    m.options_ = options;
    m.add_word(std::string(kBos));
    m.add_word(std::string(kEos));
    m.add_word(std::string(kUnk));
    for (const auto& [w, c] : freq)
        if (c >= options.min_count && !is_reserved(w)) m.add_word(w);

    const auto order = static_cast<std::size_t>(options.order);
    m.ngrams_.assign(order, {});
    m.history_.assign(order, {});

    const Id bos = 0, eos = 1;
    std::vector<Id> padded;
    for (const auto& s : sentences) {
        padded.assign(order - 1, bos);
        for (const auto& t : s) padded.push_back(m.id_of(t));
        padded.push_back(eos);
        for (std::size_t i = order - 1; i < padded.size(); ++i)
            for (std::size_t k = 1; k <= order; ++k)
                m.add_count(std::span<const Id>(padded).subspan(i + 1 - k, k), 1);
    }
    return m;
}

double NgramModel::prob_ids(std::span<const Id> context, Id w) const {
    const auto order = static_cast<std::size_t>(options_.order);
    std::vector<Id> gram(context.begin(), context.end());
    gram.push_back(w);

    double p = 0.0;
    double carry = 0.0;
    for (std::size_t k = order; k >= 2; --k) {
        const auto full = std::span<const Id>(gram).last(k);
        const double weight = options_.lambdas[order - k] + carry;
        auto h = history_[k - 1].find(pack(full.first(k - 1)));
        if (h == history_[k - 1].end() || h->second == 0) {
            carry = weight;
            continue;
        }
        carry = 0.0;
        auto c = ngrams_[k - 1].find(pack(full));
        const double ml = c == ngrams_[k - 1].end()
                              ? 0.0
                              : static_cast<double>(c->second) / static_cast<double>(h->second);
        p += weight * ml;
    }
    auto u = ngrams_[0].find(pack(std::span<const Id>(&w, 1)));
    const double cw = u == ngrams_[0].end() ? 0.0 : static_cast<double>(u->second);
    const double k = options_.add_k;
    const double uni = (cw + k) / (static_cast<double>(total_) + k * static_cast<double>(words_.size()));
    return p + (options_.lambdas[order - 1] + carry) * uni;
}

double NgramModel::next_prob(std::span<const std::string> history, std::string_view token) const {
    const auto need = static_cast<std::size_t>(options_.order) - 1;
    std::vector<Id> ctx(need, 0);
    const std::size_t take = std::min(need, history.size());
    for (std::size_t i = 0; i < take; ++i)
        ctx[need - take + i] = id_of(history[history.size() - take + i]);
    return prob_ids(ctx, id_of(token));
}

double NgramModel::score(const Tokens& tokens) const {
    const auto need = static_cast<std::size_t>(options_.order) - 1;
    std::vector<Id> padded(need, 0);
    for (const auto& t : tokens) padded.push_back(id_of(t));
    padded.push_back(1);
    double logp = 0.0;
    for (std::size_t i = need; i < padded.size(); ++i)
        logp += std::log(prob_ids(std::span<const Id>(padded).subspan(i - need, need), padded[i]));
    return logp;
}

std::vector<double> NgramModel::score_batch(std::span<const Tokens> batch) const {
    std::vector<double> out(batch.size());
    const std::size_t workers = std::min<std::size_t>(workers_, std::max<std::size_t>(batch.size(), 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < batch.size(); ++i) out[i] = score(batch[i]);
        return out;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < batch.size(); i += workers) out[i] = score(batch[i]);
        });
    return out;
}

std::string NgramModel::describe() const {
    return "ngram(order=" + std::to_string(options_.order) + ", vocab=" + std::to_string(words_.size()) + ")";
}

long NgramModel::count(std::span<const std::string> ngram) const {
    if (ngram.empty() || ngram.size() > static_cast<std::size_t>(options_.order)) return 0;
    std::vector<Id> ids;
    for (const auto& t : ngram) ids.push_back(id_of(t));
    auto it = ngrams_[ids.size() - 1].find(pack(ids));
    return it == ngrams_[ids.size() - 1].end() ? 0 : it->second;
}

void NgramModel::write(std::ostream& out) const {
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "order " << options_.order << '\n';
    out << "lambdas";
    for (double l : options_.lambdas) out << ' ' << detail::format_double(l);
    out << '\n';
    out << "add_k " << detail::format_double(options_.add_k) << '\n';
    out << "min_count " << options_.min_count << '\n';
    out << "vocab " << words_.size() << '\n';
    for (const auto& w : words_) out << w << '\n';
    for (std::size_t k = 1; k <= ngrams_.size(); ++k) {
        std::vector<std::string> lines;
        lines.reserve(ngrams_[k - 1].size());
        for (const auto& [key, c] : ngrams_[k - 1]) {
            std::string line;
            for (std::size_t i = 0; i < k; ++i) {
                Id id = 0;
                for (std::size_t b = 0; b < sizeof(Id); ++b)
                    id |= static_cast<Id>(static_cast<unsigned char>(key[i * sizeof(Id) + b])) << (8 * b);
                if (i) line += ' ';
                line += words_[id];
            }
            line += '\t' + std::to_string(c);
            lines.push_back(std::move(line));
        }
        std::sort(lines.begin(), lines.end());
        out << "ngrams " << k << ' ' << lines.size() << '\n';
        for (const auto& l : lines) out << l << '\n';
    }
}

void NgramModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write(out);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

NgramModel NgramModel::read(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view expect) {
        if (!std::getline(in, line)) throw ParseError("model file truncated, expected " + std::string(expect));
        ++line_no;
        return std::string_view(line);
    };
    auto keyed = [&](std::string_view key) {
        auto l = next_line(key);
        if (l.substr(0, key.size()) != key || l.size() <= key.size() || l[key.size()] != ' ')
            throw ParseError("expected '" + std::string(key) + "'", line_no);
        return std::string(l.substr(key.size() + 1));
    };

    if (keyed(kMagic) != std::to_string(kFormatVersion))
        throw ParseError("unsupported model format version", line_no);

    NgramModel m;
    m.options_.order = static_cast<int>(detail::parse_long(keyed("order"), line_no, "order"));
    m.options_.lambdas.clear();
    for (const auto& f : detail::split(keyed("lambdas"), ' '))
        m.options_.lambdas.push_back(detail::parse_double(f, line_no, "lambda"));
    m.options_.add_k = detail::parse_double(keyed("add_k"), line_no, "add_k");
    m.options_.min_count = detail::parse_long(keyed("min_count"), line_no, "min_count");
    try {
        m.options_.validate();
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no);
    }

    const long vsize = detail::parse_long(keyed("vocab"), line_no, "vocab size");
    if (vsize < 3) throw ParseError("vocabulary must hold the reserved tokens", line_no);
    for (long i = 0; i < vsize; ++i) {
        std::string w(next_line("vocabulary entry"));
        if (m.add_word(w) != static_cast<Id>(i)) throw ParseError("duplicate vocabulary entry", line_no);
    }
    if (m.words_[0] != kBos || m.words_[1] != kEos || m.words_[2] != kUnk)
        throw ParseError("reserved tokens must come first in the vocabulary");

    const auto order = static_cast<std::size_t>(m.options_.order);
    m.ngrams_.assign(order, {});
    m.history_.assign(order, {});
    for (std::size_t k = 1; k <= order; ++k) {
        const auto header = detail::split(keyed("ngrams"), ' ');
        if (header.size() != 2 || detail::parse_long(header[0], line_no, "order") != static_cast<long>(k))
            throw ParseError("expected 'ngrams " + std::to_string(k) + " <count>'", line_no);
        const long entries = detail::parse_long(header[1], line_no, "entry count");
        for (long e = 0; e < entries; ++e) {
            const std::string l(next_line("n-gram entry"));
            const auto tab = l.find('\t');
            if (tab == std::string::npos) throw ParseError("n-gram entry lacks a tab", line_no);
            const auto words = detail::split(std::string_view(l).substr(0, tab), ' ');
            if (words.size() != k) throw ParseError("n-gram has the wrong order", line_no);
            std::vector<Id> ids;
            for (const auto& w : words) {
                auto it = m.index_.find(w);
                if (it == m.index_.end()) throw ParseError("n-gram word '" + w + "' not in vocabulary", line_no);
                ids.push_back(it->second);
            }
            const long c = detail::parse_long(std::string_view(l).substr(tab + 1), line_no, "count");
            if (c < 0) throw ParseError("negative count", line_no);
            m.add_count(ids, c);
        }
    }
    return m;
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model '" + path.string() + "'");
    return read(in);
}

} // namespace ipkit
