// ipkit: command-line front end over the C API.
//
// Exit codes: 0 success, 1 invalid input or arguments, 2 runtime failure.

#include "ipkit/ipkit.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Failure {
    ipk_status status;
};

int exit_code(ipk_status s) {
    switch (s) {
    case IPK_OK: return 0;
    case IPK_ERR_INVALID_ARGUMENT:
    case IPK_ERR_PARSE:
    case IPK_ERR_IO: return kExitValidation;
    default: return kExitRuntime;
    }
}

void check(ipk_status s) {
    if (s != IPK_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using RulesPtr = std::unique_ptr<ipk_rules, Deleter<ipk_rules, ipk_rules_free>>;
using IdiomsPtr = std::unique_ptr<ipk_idioms, Deleter<ipk_idioms, ipk_idioms_free>>;
using ScorerPtr = std::unique_ptr<ipk_scorer, Deleter<ipk_scorer, ipk_scorer_free>>;

RulesPtr load_rules(const std::string& path) {
    ipk_rules* r = nullptr;
    check(ipk_rules_load(path.empty() ? nullptr : path.c_str(), &r));
    return RulesPtr(r);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* opt_path(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ipkit: indefinite-pronoun corpus, classification and detection toolkit"};
    app.set_config("--config", "", "INI file with option defaults, one [section] per subcommand");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ipk_version()));

    std::function<void()> run;

    // ingest
    std::string ingest_in, ingest_out, ingest_pop = "native";
    auto* ingest = app.add_subcommand("ingest", "Turn plain text (one sentence per line, optional id<TAB>text) into a corpus");
    ingest->add_option("--in", ingest_in, "Input text file")->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", ingest_out, "Output corpus (.jsonl), - for stdout")->required();
    ingest->add_option("--population", ingest_pop, "native, advanced_l2 or learner")
        ->check(CLI::IsMember({"native", "advanced_l2", "learner"}));
    ingest->callback([&] {
        run = [&] {
            size_t n = 0;
            check(ipk_ingest_file(ingest_in.c_str(), ingest_pop.c_str(), ingest_out.c_str(), &n));
            std::cerr << "ingest: " << n << " records\n";
        };
    });

    // classify
    std::string cls_in, cls_out, cls_rules;
    unsigned cls_workers = 1;
    auto* classify = app.add_subcommand("classify", "Label every record with a usage class (DN, QU, CD, CP, MIXED)");
    classify->add_option("--in", cls_in, "Input corpus (.jsonl)")->required()->check(CLI::ExistingFile);
    classify->add_option("--out", cls_out, "Output corpus with a class field, - for stdout")->required();
    classify->add_option("--rules", cls_rules, "Rule configuration file (key = item | item)")->check(CLI::ExistingFile);
    classify->add_option("--workers", cls_workers, "Worker threads")->check(CLI::Range(1u, 256u));
    classify->callback([&] {
        run = [&] {
            auto rules = load_rules(cls_rules);
            size_t n = 0;
            check(ipk_classify_file(rules.get(), cls_in.c_str(), cls_out.c_str(), cls_workers, &n));
            std::cerr << "classify: " << n << " records\n";
        };
    });

    // aggregate
    std::string agg_in, agg_corpus, agg_out, agg_idioms, agg_rules;
    double agg_threshold = 0.8;
    auto* aggr = app.add_subcommand("aggregate", "Majority-vote five annotations per item into gold labels");
    aggr->add_option("--in", agg_in, "Annotation CSV: id,original,c1..c5 with S/A/O codes")->required()->check(CLI::ExistingFile);
    aggr->add_option("--corpus", agg_corpus, "Corpus holding the annotated records")->required()->check(CLI::ExistingFile);
    aggr->add_option("--out", agg_out, "Output gold file (.jsonl), - for stdout")->required();
    aggr->add_option("--threshold", agg_threshold, "Minimum majority share for a confident label, in (0.5, 1]");
    aggr->add_option("--idioms", agg_idioms, "Idiom list, one pattern per line (default: built-in)")->check(CLI::ExistingFile);
    aggr->add_option("--rules", agg_rules, "Rule configuration for the class field")->check(CLI::ExistingFile);
    aggr->callback([&] {
        run = [&] {
            auto rules = load_rules(agg_rules);
            ipk_idioms* id = nullptr;
            check(ipk_idioms_load(opt_path(agg_idioms), &id));
            IdiomsPtr idioms(id);
            size_t n = 0;
            check(ipk_aggregate_file(agg_in.c_str(), agg_corpus.c_str(), agg_threshold, rules.get(), idioms.get(),
                                     agg_out.c_str(), &n));
            std::cerr << "aggregate: " << n << " items\n";
        };
    });

    // agreement
    std::string agr_in;
    auto* agreement = app.add_subcommand("agreement", "Mean pairwise Cohen's kappa over the five annotator columns");
    agreement->add_option("--in", agr_in, "Annotation CSV")->required()->check(CLI::ExistingFile);
    agreement->callback([&] {
        run = [&] {
            size_t n = 0;
            double kappa = 0.0;
            check(ipk_agreement_file(agr_in.c_str(), &n, &kappa));
            std::cout << "items " << n << "\nmean_kappa " << fmt(kappa) << '\n';
        };
    });

    // train-lm
    std::string lm_in, lm_out;
    int lm_order = 3;
    std::vector<double> lm_lambdas{0.6, 0.3, 0.1};
    double lm_add_k = 1.0;
    long lm_min_count = 1;
    auto* train = app.add_subcommand("train-lm", "Train an interpolated n-gram model");
    train->add_option("--in", lm_in, "Training text (one sentence per line) or corpus (.jsonl)")->required()->check(CLI::ExistingFile);
    train->add_option("--out", lm_out, "Model file to write")->required();
    train->add_option("--order", lm_order, "Model order")->check(CLI::Range(1, 10));
    train->add_option("--lambdas", lm_lambdas, "Interpolation weights, highest order first, summing to 1")->delimiter(',');
    train->add_option("--add-k", lm_add_k, "Additive smoothing of the unigram floor");
    train->add_option("--min-count", lm_min_count, "Words seen fewer times map to <unk>");
    train->callback([&] {
        run = [&] {
            ipk_ngram_options o{lm_order, lm_lambdas.data(), lm_lambdas.size(), lm_add_k, lm_min_count};
            size_t n = 0;
            check(ipk_train_ngram_file(lm_in.c_str(), &o, lm_out.c_str(), &n));
            std::cerr << "train-lm: " << n << " sentences\n";
        };
    });

    // detect
    std::string det_in, det_scorer, det_report = "-", det_outcomes;
    std::string det_conf = "0.8";
    unsigned det_workers = 1;
    int det_timeout = -1;
    auto* detect = app.add_subcommand("detect", "Flag pronouns whose alternative scores higher");
    detect->add_option("--in", det_in, "Gold file (.jsonl) from aggregate")->required()->check(CLI::ExistingFile);
    detect->add_option("--scorer", det_scorer,
                       "ngram:<model> or remote:<url>; defaults to remote:$IPKIT_SCORER_URL");
    detect->add_option("--confidence", det_conf, "Gold confidence filter")->check(CLI::IsMember({"0.8", "1.0"}));
    detect->add_option("--report", det_report, "Report JSON path, - for stdout");
    detect->add_option("--outcomes", det_outcomes, "Per-item outcomes (.jsonl)");
    detect->add_option("--workers", det_workers, "Scoring threads for the n-gram scorer")->check(CLI::Range(1u, 256u));
    detect->add_option("--timeout-ms", det_timeout,
                       "Remote request timeout; defaults to $IPKIT_SCORER_TIMEOUT_MS or 10000")->check(CLI::PositiveNumber);
    detect->callback([&] {
        run = [&] {
            std::string spec = det_scorer;
            if (spec.empty()) {
                const char* url = std::getenv("IPKIT_SCORER_URL");
                if (!url || !*url) {
                    std::cerr << "error: detect needs --scorer or IPKIT_SCORER_URL\n";
                    throw Failure{IPK_ERR_INVALID_ARGUMENT};
                }
                spec = std::string("remote:") + url;
            }
            ipk_remote_options ro = ipk_remote_options_default();
            if (det_timeout > 0) {
                ro.timeout_ms = det_timeout;
            } else if (const char* t = std::getenv("IPKIT_SCORER_TIMEOUT_MS"); t && *t) {
                try {
                    ro.timeout_ms = std::stoi(t);
                } catch (const std::exception&) {
                    ro.timeout_ms = 0;
                }
                if (ro.timeout_ms <= 0) {
                    std::cerr << "error: IPKIT_SCORER_TIMEOUT_MS must be a positive integer\n";
                    throw Failure{IPK_ERR_INVALID_ARGUMENT};
                }
            }
            ipk_scorer* s = nullptr;
            check(ipk_scorer_open(spec.c_str(), &ro, det_workers, &s));
            ScorerPtr scorer(s);
            ipk_detection_summary sum{};
            check(ipk_detect_file(scorer.get(), det_in.c_str(), det_conf == "1.0" ? 1.0 : 0.8, det_report.c_str(),
                                  opt_path(det_outcomes), &sum));
            std::cerr << "detect: n=" << sum.n << " f1(infelicitous)=" << fmt(sum.f1_infelicitous)
                      << " accuracy=" << fmt(sum.accuracy) << " baseline=" << fmt(sum.baseline_accuracy) << '\n';
        };
    });

    // stats
    std::string st_in, st_out = "-", st_rules;
    double st_threshold = 0.8;
    bool st_by_class = false, st_infel = false, st_conf = false;
    auto* stats = app.add_subcommand("stats", "Distribution tables");
    stats->add_option("--in", st_in, "Corpus (--by-class) or gold file")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", st_out, "Output JSON, - for stdout");
    auto* f1 = stats->add_flag("--by-class", st_by_class, "some-/any- shares per class and population with z-tests");
    auto* f2 = stats->add_flag("--infelicity", st_infel, "Infelicity rate per class");
    auto* f3 = stats->add_flag("--confusion", st_conf, "Use of the dispreferred family, by preferred family");
    f1->excludes(f2)->excludes(f3);
    f2->excludes(f3);
    stats->add_option("--threshold", st_threshold, "Confidence threshold for gold labels");
    stats->add_option("--rules", st_rules, "Rule configuration for unlabeled records")->check(CLI::ExistingFile);
    stats->callback([&] {
        run = [&] {
            if (!st_by_class && !st_infel && !st_conf) {
                std::cerr << "error: stats needs one of --by-class, --infelicity, --confusion\n";
                throw Failure{IPK_ERR_INVALID_ARGUMENT};
            }
            auto rules = load_rules(st_rules);
            const auto kind = st_by_class ? IPK_STATS_BY_CLASS : st_infel ? IPK_STATS_INFELICITY : IPK_STATS_CONFUSION;
            check(ipk_stats_file(kind, st_in.c_str(), rules.get(), st_threshold, st_out.c_str()));
        };
    });

    // mds
    std::string mds_matrix, mds_counts, mds_records, mds_out, mds_transform = "one-minus-share";
    long mds_languages = 0;
    std::size_t mds_dims = 2;
    auto* mds = app.add_subcommand("mds", "Classical scaling of a usage-class distance matrix");
    auto* m1 = mds->add_option("--matrix", mds_matrix, "Distance matrix CSV")->check(CLI::ExistingFile);
    auto* m2 = mds->add_option("--counts", mds_counts, "Colexification count matrix CSV")->check(CLI::ExistingFile);
    auto* m3 = mds->add_option("--records", mds_records, "Colexification records: language,term,CLASS|CLASS")->check(CLI::ExistingFile);
    m1->excludes(m2)->excludes(m3);
    m2->excludes(m3);
    auto* langs = mds->add_option("--languages", mds_languages, "Number of languages behind --counts")->check(CLI::PositiveNumber);
    langs->needs(m2);
    m2->needs(langs);
    mds->add_option("--transform", mds_transform, "one-minus-share or count-euclidean")
        ->check(CLI::IsMember({"one-minus-share", "count-euclidean"}));
    mds->add_option("--dims", mds_dims, "Embedding dimensions")->check(CLI::Range(1, 64));
    mds->add_option("--out", mds_out, "Output CSV (class,x,y)")->required();
    mds->callback([&] {
        run = [&] {
            if (mds_matrix.empty() && mds_counts.empty() && mds_records.empty()) {
                std::cerr << "error: mds needs one of --matrix, --counts, --records\n";
                throw Failure{IPK_ERR_INVALID_ARGUMENT};
            }
            const auto kind = !mds_matrix.empty() ? IPK_MDS_DISTANCES : !mds_counts.empty() ? IPK_MDS_COUNTS : IPK_MDS_RECORDS;
            const std::string& in = !mds_matrix.empty() ? mds_matrix : !mds_counts.empty() ? mds_counts : mds_records;
            const auto tr = mds_transform == "count-euclidean" ? IPK_COUNT_EUCLIDEAN : IPK_ONE_MINUS_SHARE;
            size_t warnings = 0;
            check(ipk_mds_file(kind, in.c_str(), mds_languages, tr, mds_dims, mds_out.c_str(), &warnings));
            if (warnings) std::cerr << "warning: " << ipk_last_warnings();
        };
    });

    // overlap
    std::string ov_records;
    std::size_t ov_each = 6, ov_shared = 5;
    auto* overlap = app.add_subcommand("overlap", "Share of languages with two broad, overlapping terms");
    overlap->add_option("--records", ov_records, "Colexification records")->required()->check(CLI::ExistingFile);
    overlap->add_option("--min-each", ov_each, "Classes each term must cover");
    overlap->add_option("--min-shared", ov_shared, "Classes the two terms must share");
    overlap->callback([&] {
        run = [&] {
            double v = 0.0;
            check(ipk_overlap_file(ov_records.c_str(), ov_each, ov_shared, &v));
            std::cout << v << '\n';
        };
    });

    // synth
    std::uint64_t sy_seed = 1;
    std::size_t sy_size = 200, sy_train = 5000;
    double sy_rate = 0.2;
    std::string sy_out;
    auto* synth = app.add_subcommand("synth", "Generate a template corpus with a known share of swapped pronouns");
    synth->add_option("--seed", sy_seed, "Random seed");
    synth->add_option("--size", sy_size, "Sentences in the evaluation corpus")->check(CLI::PositiveNumber);
    synth->add_option("--corruption", sy_rate, "Share of sentences with the other family")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--train-size", sy_train, "Clean sentences in train.txt");
    synth->add_option("--out-dir", sy_out, "Directory for corpus.jsonl, gold.jsonl, ann.csv, train.txt")->required();
    synth->callback([&] {
        run = [&] {
            ipk_synth_options o{sy_seed, sy_size, sy_rate, sy_train};
            check(ipk_synth_files(&o, sy_out.c_str()));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        run();
    } catch (const Failure& f) {
        const std::string msg = ipk_last_error();
        if (!msg.empty()) std::cerr << "error (" << ipk_status_name(f.status) << "): " << msg << '\n';
        return exit_code(f.status);
    }
    return 0;
}
