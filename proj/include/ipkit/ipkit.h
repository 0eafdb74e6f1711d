#ifndef IPKIT_IPKIT_H
#define IPKIT_IPKIT_H

/* C interface to the ipkit library. Every fallible call returns an ipk_status;
 * on failure ipk_last_error() describes the problem for the calling thread.
 * Handles are opaque and must be released with their matching _free call.
 * Output paths of "-" mean standard output where noted. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IPKIT_BUILDING)
#    define IPK_API __declspec(dllexport)
#  else
#    define IPK_API __declspec(dllimport)
#  endif
#else
#  define IPK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ipk_status {
    IPK_OK = 0,
    IPK_ERR_INVALID_ARGUMENT = 1, /* bad option or data that violates an invariant */
    IPK_ERR_PARSE = 2,            /* malformed input file */
    IPK_ERR_IO = 3,               /* file could not be opened, read or written */
    IPK_ERR_TRANSPORT = 4,        /* remote scorer unreachable after retries */
    IPK_ERR_PROTOCOL = 5,         /* remote scorer answered in the wrong format */
    IPK_ERR_NUMERIC = 6,          /* iterative routine did not converge */
    IPK_ERR_INTERNAL = 7
} ipk_status;

IPK_API const char* ipk_version(void);
IPK_API const char* ipk_status_name(ipk_status status);

/* Message for the last failed call on this thread; "" if none. */
IPK_API const char* ipk_last_error(void);

/* Newline-separated warnings from the last call on this thread that produced any. */
IPK_API const char* ipk_last_warnings(void);

/* ---- usage classes ---------------------------------------------------- */

typedef enum ipk_class { IPK_DN = 0, IPK_QU = 1, IPK_CD = 2, IPK_CP = 3, IPK_MIXED = 4 } ipk_class;

IPK_API const char* ipk_class_name(ipk_class c);

typedef struct ipk_rules ipk_rules;

/* NULL path gives the built-in rules. */
IPK_API ipk_status ipk_rules_load(const char* path, ipk_rules** out);
IPK_API void ipk_rules_free(ipk_rules* rules);

/* Classifies the pronoun at token `ip_index` of `text`. */
IPK_API ipk_status ipk_classify_text(const ipk_rules* rules, const char* text, size_t ip_index, ipk_class* out);

typedef struct ipk_idioms ipk_idioms;

/* NULL path gives the built-in list. */
IPK_API ipk_status ipk_idioms_load(const char* path, ipk_idioms** out);
IPK_API void ipk_idioms_free(ipk_idioms* idioms);

/* ---- corpus ----------------------------------------------------------- */

typedef struct ipk_corpus ipk_corpus;

IPK_API ipk_status ipk_corpus_load(const char* path, ipk_corpus** out);
IPK_API ipk_status ipk_corpus_save(const ipk_corpus* corpus, const char* path);
IPK_API size_t ipk_corpus_size(const ipk_corpus* corpus);
/* Borrowed strings, valid until the corpus is freed. */
IPK_API ipk_status ipk_corpus_record(const ipk_corpus* corpus, size_t index, const char** id, const char** text,
                                     size_t* ip_index);
IPK_API void ipk_corpus_free(ipk_corpus* corpus);

/* ---- scorers ---------------------------------------------------------- */

typedef struct ipk_remote_options {
    int timeout_ms;
    int max_retries;
    int backoff_ms;
    size_t batch_size;
    size_t max_in_flight;
} ipk_remote_options;

IPK_API ipk_remote_options ipk_remote_options_default(void);

typedef struct ipk_scorer ipk_scorer;

/* spec is "ngram:<model path>" or "remote:<url>"; remote may be NULL for defaults. */
IPK_API ipk_status ipk_scorer_open(const char* spec, const ipk_remote_options* remote, unsigned workers,
                                   ipk_scorer** out);
IPK_API ipk_status ipk_scorer_score(const ipk_scorer* scorer, const char* text, double* out);
IPK_API ipk_status ipk_scorer_score_many(const ipk_scorer* scorer, const char* const* texts, size_t n,
                                         double* out);
IPK_API void ipk_scorer_free(ipk_scorer* scorer);

typedef struct ipk_ngram_options {
    int order;
    const double* lambdas; /* highest order first; n_lambdas == order */
    size_t n_lambdas;
    double add_k;
    long min_count;
} ipk_ngram_options;

/* ---- pipeline stages --------------------------------------------------- */

IPK_API ipk_status ipk_ingest_file(const char* in, const char* population, const char* out, size_t* n_records);

/* `out` may be "-". */
IPK_API ipk_status ipk_classify_file(const ipk_rules* rules, const char* in, const char* out, unsigned workers,
                                     size_t* n_records);

IPK_API ipk_status ipk_aggregate_file(const char* annotations, const char* corpus, double threshold,
                                      const ipk_rules* rules, const ipk_idioms* idioms, const char* out,
                                      size_t* n_items);

/* mean_kappa is NaN when no annotator pair has a defined kappa. */
IPK_API ipk_status ipk_agreement_file(const char* annotations, size_t* n_items, double* mean_kappa);

/* NULL options give order 3, lambdas 0.6/0.3/0.1, add_k 1, min_count 1. */
IPK_API ipk_status ipk_train_ngram_file(const char* in, const ipk_ngram_options* options, const char* model_out,
                                        size_t* n_sentences);

typedef struct ipk_detection_summary {
    size_t n;
    size_t excluded_by_confidence;
    size_t excluded_idiomatic;
    size_t tp, fp, fn, tn;
    double accuracy;
    double baseline_accuracy;
    double precision_infelicitous; /* NaN when undefined */
    double recall_infelicitous;
    double f1_infelicitous;
} ipk_detection_summary;

/* confidence is 0.8 or 1.0; outcomes_out may be NULL; report_out may be "-". */
IPK_API ipk_status ipk_detect_file(const ipk_scorer* scorer, const char* gold, double confidence,
                                   const char* report_out, const char* outcomes_out, ipk_detection_summary* out);

typedef enum ipk_stats_kind { IPK_STATS_BY_CLASS = 0, IPK_STATS_INFELICITY = 1, IPK_STATS_CONFUSION = 2 } ipk_stats_kind;

IPK_API ipk_status ipk_stats_file(ipk_stats_kind kind, const char* in, const ipk_rules* rules, double threshold,
                                  const char* out);

typedef enum ipk_mds_input { IPK_MDS_DISTANCES = 0, IPK_MDS_COUNTS = 1, IPK_MDS_RECORDS = 2 } ipk_mds_input;
typedef enum ipk_transform { IPK_ONE_MINUS_SHARE = 0, IPK_COUNT_EUCLIDEAN = 1 } ipk_transform;

/* `languages` is only read for IPK_MDS_COUNTS. Warnings go to ipk_last_warnings(). */
IPK_API ipk_status ipk_mds_file(ipk_mds_input kind, const char* in, long languages, ipk_transform transform,
                                size_t dims, const char* out, size_t* n_warnings);

IPK_API ipk_status ipk_overlap_file(const char* records, size_t min_each, size_t min_shared, double* out);

typedef struct ipk_synth_options {
    uint64_t seed;
    size_t size;
    double corruption_rate;
    size_t train_size;
} ipk_synth_options;

/* Writes corpus.jsonl, gold.jsonl, ann.csv and train.txt into out_dir. */
IPK_API ipk_status ipk_synth_files(const ipk_synth_options* options, const char* out_dir);

typedef struct ipk_z_result {
    double z;
    double p_value;
    const char* marker; /* "***", "ns" or "degenerate"; static storage */
} ipk_z_result;

IPK_API ipk_status ipk_two_proportion(size_t k1, size_t n1, size_t k2, size_t n2, ipk_z_result* out);

#ifdef __cplusplus
}
#endif

#endif /* IPKIT_IPKIT_H */
