#include "ipkit/ipkit.h"

#include "ipkit/errors.hpp"
#include "ipkit/pipeline.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>

struct ipk_rules {
    ipkit::RuleConfig rules;
};

struct ipk_idioms {
    ipkit::IdiomList list;
};

struct ipk_corpus {
    ipkit::Corpus corpus;
};

struct ipk_scorer {
    std::unique_ptr<ipkit::SentenceScorer> scorer;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_warnings;

ipk_status fail(ipk_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

// Runs `f`, mapping the library's exception types onto status codes.
template <typename F>
ipk_status guarded(F&& f) {
    try {
        f();
        g_error.clear();
        return IPK_OK;
    } catch (const ipkit::ParseError& e) {
        return fail(IPK_ERR_PARSE, e.what());
    } catch (const ipkit::ValidationError& e) {
        return fail(IPK_ERR_INVALID_ARGUMENT, e.what());
    } catch (const ipkit::IoError& e) {
        return fail(IPK_ERR_IO, e.what());
    } catch (const ipkit::TransportError& e) {
        return fail(IPK_ERR_TRANSPORT, e.what());
    } catch (const ipkit::ProtocolError& e) {
        return fail(IPK_ERR_PROTOCOL, e.what());
    } catch (const ipkit::NumericError& e) {
        return fail(IPK_ERR_NUMERIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(IPK_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(IPK_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(IPK_ERR_INTERNAL, "unknown error");
    }
}

#define IPK_REQUIRE(cond, msg) \
    do { \
        if (!(cond)) return fail(IPK_ERR_INVALID_ARGUMENT, msg); \
    } while (0)

double or_nan(const std::optional<double>& v) {
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

extern "C" {

const char* ipk_version(void) { return "0.1.0"; }

const char* ipk_status_name(ipk_status status) {
    switch (status) {
    case IPK_OK: return "ok";
    case IPK_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IPK_ERR_PARSE: return "parse error";
    case IPK_ERR_IO: return "i/o error";
    case IPK_ERR_TRANSPORT: return "transport error";
    case IPK_ERR_PROTOCOL: return "protocol error";
    case IPK_ERR_NUMERIC: return "numeric error";
    case IPK_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ipk_last_error(void) { return g_error.c_str(); }
const char* ipk_last_warnings(void) { return g_warnings.c_str(); }

const char* ipk_class_name(ipk_class c) {
    if (c < IPK_DN || c > IPK_MIXED) return "";
    return ipkit::to_string(static_cast<ipkit::CoarseClass>(c)).data();
}

ipk_status ipk_rules_load(const char* path, ipk_rules** out) {
    IPK_REQUIRE(out, "out is NULL");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<ipk_rules>();
        r->rules = path ? ipkit::RuleConfig::load(path) : ipkit::RuleConfig::defaults();
        *out = r.release();
    });
}

void ipk_rules_free(ipk_rules* rules) { delete rules; }

ipk_status ipk_classify_text(const ipk_rules* rules, const char* text, size_t ip_index, ipk_class* out) {
    IPK_REQUIRE(rules && text && out, "NULL argument");
    return guarded([&] {
        const auto tokens = ipkit::tokenize(text);
        if (ip_index >= tokens.size())
            throw ipkit::ValidationError("ip_index " + std::to_string(ip_index) + " is past the last token");
        if (!ipkit::parse_pronoun(tokens[ip_index]))
            throw ipkit::ValidationError("token '" + tokens[ip_index] + "' is not someone/anyone/something/anything");
        *out = static_cast<ipk_class>(ipkit::classify_usage(tokens, ip_index, rules->rules));
    });
}

ipk_status ipk_idioms_load(const char* path, ipk_idioms** out) {
    IPK_REQUIRE(out, "out is NULL");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<ipk_idioms>();
        r->list = path ? ipkit::IdiomList::load(path) : ipkit::IdiomList::defaults();
        *out = r.release();
    });
}

void ipk_idioms_free(ipk_idioms* idioms) { delete idioms; }

ipk_status ipk_corpus_load(const char* path, ipk_corpus** out) {
    IPK_REQUIRE(path && out, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<ipk_corpus>();
        c->corpus = ipkit::load_corpus(path);
        *out = c.release();
    });
}

ipk_status ipk_corpus_save(const ipk_corpus* corpus, const char* path) {
    IPK_REQUIRE(corpus && path, "NULL argument");
    return guarded([&] { ipkit::save_corpus(corpus->corpus, path); });
}

size_t ipk_corpus_size(const ipk_corpus* corpus) { return corpus ? corpus->corpus.records.size() : 0; }

ipk_status ipk_corpus_record(const ipk_corpus* corpus, size_t index, const char** id, const char** text,
                             size_t* ip_index) {
    IPK_REQUIRE(corpus, "corpus is NULL");
    IPK_REQUIRE(index < corpus->corpus.records.size(), "record index out of range");
    const auto& r = corpus->corpus.records[index];
    if (id) *id = r.id.c_str();
    if (text) *text = r.raw_text.c_str();
    if (ip_index) *ip_index = r.ip_index;
    g_error.clear();
    return IPK_OK;
}

void ipk_corpus_free(ipk_corpus* corpus) { delete corpus; }

ipk_remote_options ipk_remote_options_default(void) {
    const ipkit::RemoteOptions d;
    return {d.timeout_ms, d.max_retries, d.backoff_ms, d.batch_size, d.max_in_flight};
}

ipk_status ipk_scorer_open(const char* spec, const ipk_remote_options* remote, unsigned workers, ipk_scorer** out) {
    IPK_REQUIRE(spec && out, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        ipkit::RemoteOptions ro;
        if (remote) {
            ro.timeout_ms = remote->timeout_ms;
            ro.max_retries = remote->max_retries;
            ro.backoff_ms = remote->backoff_ms;
            ro.batch_size = remote->batch_size;
            ro.max_in_flight = remote->max_in_flight;
        }
        auto s = std::make_unique<ipk_scorer>();
        s->scorer = ipkit::open_scorer(spec, ro, workers);
        *out = s.release();
    });
}

ipk_status ipk_scorer_score(const ipk_scorer* scorer, const char* text, double* out) {
    IPK_REQUIRE(scorer && text && out, "NULL argument");
    return guarded([&] { *out = scorer->scorer->score(ipkit::tokenize(text)); });
}

ipk_status ipk_scorer_score_many(const ipk_scorer* scorer, const char* const* texts, size_t n, double* out) {
    IPK_REQUIRE(scorer && (n == 0 || (texts && out)), "NULL argument");
    return guarded([&] {
        std::vector<ipkit::Tokens> batch;
        batch.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (!texts[i]) throw ipkit::ValidationError("text " + std::to_string(i) + " is NULL");
            batch.push_back(ipkit::tokenize(texts[i]));
        }
        const auto scores = scorer->scorer->score_batch(batch);
        std::copy(scores.begin(), scores.end(), out);
    });
}

void ipk_scorer_free(ipk_scorer* scorer) { delete scorer; }

ipk_status ipk_ingest_file(const char* in, const char* population, const char* out, size_t* n_records) {
    IPK_REQUIRE(in && population && out, "NULL argument");
    return guarded([&] {
        const auto pop = ipkit::parse_population(population);
        if (!pop)
            throw ipkit::ValidationError(std::string("unknown population '") + population +
                                         "' (native, advanced_l2, learner)");
        const auto n = ipkit::ingest_file(in, *pop, out);
        if (n_records) *n_records = n;
    });
}

ipk_status ipk_classify_file(const ipk_rules* rules, const char* in, const char* out, unsigned workers,
                             size_t* n_records) {
    IPK_REQUIRE(rules && in && out, "NULL argument");
    return guarded([&] {
        const auto n = ipkit::classify_file(in, out, rules->rules, workers);
        if (n_records) *n_records = n;
    });
}

ipk_status ipk_aggregate_file(const char* annotations, const char* corpus, double threshold, const ipk_rules* rules,
                              const ipk_idioms* idioms, const char* out, size_t* n_items) {
    IPK_REQUIRE(annotations && corpus && out, "NULL argument");
    return guarded([&] {
        ipkit::AggregateOptions o;
        o.threshold = threshold;
        if (rules) o.rules = rules->rules;
        if (idioms) o.idioms = idioms->list;
        const auto n = ipkit::aggregate_file(annotations, corpus, out, o);
        if (n_items) *n_items = n;
    });
}

ipk_status ipk_agreement_file(const char* annotations, size_t* n_items, double* mean_kappa) {
    IPK_REQUIRE(annotations, "NULL argument");
    return guarded([&] {
        const auto s = ipkit::agreement_file(annotations);
        if (n_items) *n_items = s.items;
        if (mean_kappa) *mean_kappa = or_nan(s.mean_kappa);
    });
}

ipk_status ipk_train_ngram_file(const char* in, const ipk_ngram_options* options, const char* model_out,
                                size_t* n_sentences) {
    IPK_REQUIRE(in && model_out, "NULL argument");
    IPK_REQUIRE(!options || options->n_lambdas == 0 || options->lambdas, "lambdas is NULL");
    return guarded([&] {
        ipkit::NgramOptions o;
        if (options) {
            o.order = options->order;
            o.lambdas.assign(options->lambdas, options->lambdas + options->n_lambdas);
            o.add_k = options->add_k;
            o.min_count = options->min_count;
        }
        const auto n = ipkit::train_ngram_file(in, o, model_out);
        if (n_sentences) *n_sentences = n;
    });
}

ipk_status ipk_detect_file(const ipk_scorer* scorer, const char* gold, double confidence, const char* report_out,
                           const char* outcomes_out, ipk_detection_summary* out) {
    IPK_REQUIRE(scorer && gold && report_out, "NULL argument");
    ipkit::ConfidenceFilter filter;
    if (confidence == 0.8) filter = ipkit::ConfidenceFilter::AtLeast80;
    else if (confidence == 1.0) filter = ipkit::ConfidenceFilter::Unanimous;
    else return fail(IPK_ERR_INVALID_ARGUMENT, "confidence must be 0.8 or 1.0");
    return guarded([&] {
        std::optional<ipkit::Path> oc;
        if (outcomes_out) oc = outcomes_out;
        const auto s = ipkit::detect_file(*scorer->scorer, gold, filter, report_out, oc);
        if (out) {
            const auto& r = s.report;
            *out = {r.n, r.excluded, s.idiomatic, r.confusion.tp, r.confusion.fp, r.confusion.fn, r.confusion.tn,
                    r.accuracy, r.baseline_accuracy, or_nan(r.infelicitous.precision),
                    or_nan(r.infelicitous.recall), or_nan(r.infelicitous.f1)};
        }
    });
}

ipk_status ipk_stats_file(ipk_stats_kind kind, const char* in, const ipk_rules* rules, double threshold,
                          const char* out) {
    IPK_REQUIRE(in && out, "NULL argument");
    IPK_REQUIRE(kind >= IPK_STATS_BY_CLASS && kind <= IPK_STATS_CONFUSION, "unknown stats kind");
    return guarded([&] {
        const auto r = rules ? rules->rules : ipkit::RuleConfig::defaults();
        ipkit::stats_file(static_cast<ipkit::StatsKind>(kind), in, out, r, threshold);
    });
}

ipk_status ipk_mds_file(ipk_mds_input kind, const char* in, long languages, ipk_transform transform, size_t dims,
                        const char* out, size_t* n_warnings) {
    IPK_REQUIRE(in && out, "NULL argument");
    IPK_REQUIRE(kind >= IPK_MDS_DISTANCES && kind <= IPK_MDS_RECORDS, "unknown matrix input kind");
    IPK_REQUIRE(transform == IPK_ONE_MINUS_SHARE || transform == IPK_COUNT_EUCLIDEAN, "unknown transform");
    return guarded([&] {
        const auto e = ipkit::mds_file(static_cast<ipkit::MdsInput>(kind), in, out, languages,
                                       static_cast<ipkit::DistanceTransform>(transform), dims);
        g_warnings.clear();
        for (const auto& w : e.warnings) g_warnings += w + "\n";
        if (n_warnings) *n_warnings = e.warnings.size();
    });
}

ipk_status ipk_overlap_file(const char* records, size_t min_each, size_t min_shared, double* out) {
    IPK_REQUIRE(records && out, "NULL argument");
    return guarded([&] { *out = ipkit::overlap_file(records, min_each, min_shared); });
}

ipk_status ipk_synth_files(const ipk_synth_options* options, const char* out_dir) {
    IPK_REQUIRE(options && out_dir, "NULL argument");
    return guarded([&] {
        ipkit::SynthFileOptions o;
        o.synth.seed = options->seed;
        o.synth.size = options->size;
        o.synth.corruption_rate = options->corruption_rate;
        o.train_size = options->train_size;
        ipkit::synth_files(o, out_dir);
    });
}

ipk_status ipk_two_proportion(size_t k1, size_t n1, size_t k2, size_t n2, ipk_z_result* out) {
    IPK_REQUIRE(out, "out is NULL");
    return guarded([&] {
        const auto r = ipkit::two_proportion_test(k1, n1, k2, n2);
        *out = {r.z, r.p_value, ipkit::to_string(r.marker).data()};
    });
}

} // extern "C"
