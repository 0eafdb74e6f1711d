#include "ipkit/errors.hpp"
#include "ipkit/typology.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ipkit;
using test_support::TempDir;

namespace {

SquareMatrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    SquareMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
    return a;
}

SquareMatrix pairwise(const std::vector<std::vector<double>>& pts) {
    SquareMatrix d(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) d(i, j) = euclidean(pts[i], pts[j]);
    return d;
}

// Counts by direct definition: a language links i and j if one of its terms covers both.
long brute_count(const std::vector<ColexRecord>& recs, UsageClass a, UsageClass b) {
    std::set<std::string> langs;
    for (const auto& r : recs) {
        std::set<UsageClass> merged;
        for (const auto& s : recs)
            if (s.language == r.language && s.term == r.term) merged.insert(s.covers.begin(), s.covers.end());
        if (merged.contains(a) && merged.contains(b)) langs.insert(r.language);
    }
    return static_cast<long>(langs.size());
}

} // namespace

TEST_CASE("jacobi agrees with Eigen's self-adjoint solver") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 12u}) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto a = random_symmetric(rng, n);
            Eigen::MatrixXd m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
            const auto got = jacobi_eigen(a);
            REQUIRE(got.values.size() == n);
            for (std::size_t k = 0; k < n; ++k) {
                // Eigen sorts ascending, we sort descending.
                CHECK(got.values[k] == doctest::Approx(ref.eigenvalues()(n - 1 - k)).epsilon(1e-10));
                // A v = lambda v
                for (std::size_t i = 0; i < n; ++i) {
                    double av = 0.0;
                    for (std::size_t j = 0; j < n; ++j) av += a(i, j) * got.vectors[k][j];
                    CHECK(std::abs(av - got.values[k] * got.vectors[k][i]) < 1e-9);
                }
            }
            CHECK(std::is_sorted(got.values.rbegin(), got.values.rend()));
        }
    }
}

TEST_CASE("mds recovers planar configurations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 3 + rng() % 6;
        std::vector<std::vector<double>> pts(n);
        for (auto& p : pts) p = {u(rng), u(rng)};
        const auto d = pairwise(pts);
        const auto e = mds_project(d, 2);
        CHECK(e.warnings.empty());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(euclidean(e.coords[i], e.coords[j]) - d(i, j)) < 1e-9);
        // centred coordinates
        for (std::size_t k = 0; k < 2; ++k) {
            double s = 0.0;
            for (const auto& c : e.coords) s += c[k];
            CHECK(std::abs(s) < 1e-9);
        }
    }
}

TEST_CASE("mds on collinear points has one non-zero eigenvalue") {
    std::vector<std::vector<double>> pts{{0, 0}, {1, 2}, {3, 6}, {-2, -4}, {0.5, 1}};
    const auto e = mds_project(pairwise(pts), 2);
    CHECK(e.eigenvalues[0] > 1.0);
    CHECK(std::abs(e.eigenvalues[1]) < 1e-9);
}

TEST_CASE("mds input validation and non-Euclidean warning") {
    SquareMatrix d(3, 1.0);
    for (std::size_t i = 0; i < 3; ++i) d(i, i) = 0.0;
    CHECK_NOTHROW(mds_project(d, 2));
    CHECK_THROWS_AS(mds_project(d, 0), ValidationError);
    CHECK_THROWS_AS(mds_project(d, 4), ValidationError);
    CHECK_THROWS_AS(mds_project(SquareMatrix{}, 1), ValidationError);

    auto bad = d;
    bad(0, 1) = 2.0;
    CHECK_THROWS_AS(mds_project(bad, 2), ValidationError);
    bad = d;
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS(mds_project(bad, 2), ValidationError);
    bad = d;
    bad(0, 2) = bad(2, 0) = -1.0;
    CHECK_THROWS_AS(mds_project(bad, 2), ValidationError);
    bad = d;
    bad(0, 2) = bad(2, 0) = std::nan("");
    CHECK_THROWS_AS(mds_project(bad, 2), ValidationError);

    // violates the triangle inequality badly
    SquareMatrix tri(3);
    tri(0, 1) = tri(1, 0) = 1.0;
    tri(1, 2) = tri(2, 1) = 1.0;
    tri(0, 2) = tri(2, 0) = 5.0;
    const auto e = mds_project(tri, 2);
    CHECK(e.warnings.size() == 1);
    CHECK(e.eigenvalues.back() < 0.0);
}

TEST_CASE("build_matrix matches a brute-force count") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<ColexRecord> recs;
        const int langs = 1 + static_cast<int>(rng() % 6);
        for (int l = 0; l < langs; ++l) {
            const int terms = 1 + static_cast<int>(rng() % 4);
            for (int t = 0; t < terms; ++t) {
                ColexRecord r{"L" + std::to_string(l), "t" + std::to_string(rng() % 3), {}};
                const int k = 1 + static_cast<int>(rng() % 4);
                for (int c = 0; c < k; ++c) r.covers.insert(kAllUsageClasses[rng() % 8]);
                recs.push_back(r);
            }
        }
        std::set<UsageClass> present;
        for (const auto& r : recs) present.insert(r.covers.begin(), r.covers.end());
        if (present.size() < 2) continue;

        const auto m = build_matrix(recs);
        CHECK(m.classes == std::vector<UsageClass>(present.begin(), present.end()));
        for (std::size_t i = 0; i < m.classes.size(); ++i)
            for (std::size_t j = 0; j < m.classes.size(); ++j)
                CHECK(m.counts[i][j] == brute_count(recs, m.classes[i], m.classes[j]));
    }
}

TEST_CASE("distance transforms") {
    ColexMatrix m;
    m.classes = {UsageClass::Specific, UsageClass::Question};
    m.counts = {{4, 1}, {1, 3}};
    m.total_languages = 4;
    const auto d1 = to_distance(m);
    CHECK(d1(0, 1) == 0.75);
    CHECK(d1(0, 0) == 0.0);
    const auto d2 = to_distance(m, DistanceTransform::CountEuclidean);
    CHECK(d2(0, 1) == std::sqrt(5.0));
    m.total_languages = 0;
    CHECK_THROWS_AS(to_distance(m), ValidationError);
}

TEST_CASE("build_matrix rejects degenerate input") {
    CHECK_THROWS_AS(build_matrix({}), ValidationError);
    std::vector<ColexRecord> one{{"a", "t", {UsageClass::Specific}}};
    CHECK_THROWS_AS(build_matrix(one), ValidationError);
    std::vector<ColexRecord> empty{{"a", "t", {}}, {"a", "u", {UsageClass::Specific, UsageClass::Question}}};
    CHECK_THROWS_AS(build_matrix(empty), ValidationError);
}

TEST_CASE("overlap breadth") {
    using U = UsageClass;
    std::vector<ColexRecord> recs{
        {"en", "some", {U::Specific, U::NonSpecific, U::Question, U::Conditional, U::IndirectNegation, U::DirectNegation, U::Comparison}},
        {"en", "any", {U::Question, U::Conditional, U::IndirectNegation, U::DirectNegation, U::Comparison, U::FreeChoice}},
        {"xx", "a", {U::Specific}},
    };
    CHECK(overlap_breadth(recs) == 0.5);
    CHECK(overlap_breadth(recs, 7, 5) == 0.0);
    CHECK(overlap_breadth(recs, 6, 6) == 0.0);
    CHECK(overlap_breadth({}) == 0.0);

    const auto fixture = load_colex_records(test_support::fixture("overlap10.csv"));
    CHECK(overlap_breadth(fixture) == 0.1);
}

TEST_CASE("matrix and record files") {
    TempDir dir("typo");
    test_support::write_file(dir / "m.csv", "# distances\nSP,QU,DN\n0,1,2\n1,0,1.5\n2,1.5,0\n");
    const auto m = load_matrix(dir / "m.csv");
    CHECK(m.classes == std::vector<UsageClass>{UsageClass::Specific, UsageClass::Question, UsageClass::DirectNegation});
    CHECK(m.values(2, 1) == 1.5);

    test_support::write_file(dir / "l.csv", ",SP,QU\nSP,0,1\nQU,1,0\n");
    CHECK(load_matrix(dir / "l.csv").values(0, 1) == 1.0);

    save_matrix(m, dir / "out.csv");
    const auto back = load_matrix(dir / "out.csv");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(back.values(i, j) == m.values(i, j));

    auto line_of = [&](const std::string& text) {
        test_support::write_file(dir / "bad.csv", text);
        try {
            load_matrix(dir / "bad.csv");
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{99};
    };
    CHECK(line_of("SP,QU\n0,1\n1,x\n") == 3);
    CHECK(line_of("SP,ZZ\n0,1\n1,0\n") == 1);
    CHECK(line_of("SP,QU\n0,1\n1\n") == 3);

    test_support::write_file(dir / "r.csv", "# c\nen,some,SP|QU\n\nen,any,QU|FC\n");
    const auto recs = load_colex_records(dir / "r.csv");
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].covers == std::set<UsageClass>{UsageClass::Question, UsageClass::FreeChoice});
    test_support::write_file(dir / "r2.csv", "en,some,SP|XX\n");
    CHECK_THROWS_AS(load_colex_records(dir / "r2.csv"), ParseError);

    const auto built = build_matrix(recs);
    const auto counts = counts_as_matrix(built);
    const auto again = colex_from_counts(counts, built.total_languages);
    CHECK(again.counts == built.counts);
    CHECK_THROWS_AS(colex_from_counts(counts, 0), ValidationError);
}
