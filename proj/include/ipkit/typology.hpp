#pragma once

#include "ipkit/usage.hpp"

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ipkit {

/// Row-major square matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// One term of one language and the usage classes it expresses.
struct ColexRecord {
    std::string language;
    std::string term;
    std::set<UsageClass> covers;
};

struct ColexMatrix {
    std::vector<UsageClass> classes;
    std::vector<std::vector<long>> counts;
    long total_languages = 0;
};

enum class DistanceTransform {
    OneMinusShare,    // 1 - s_ij / L
    CountEuclidean,   // sqrt(s_ii + s_jj - 2 s_ij)
};

struct Embedding {
    std::vector<UsageClass> classes;
    std::vector<std::vector<double>> coords;  // n rows of `dims` columns
    std::vector<double> eigenvalues;          // full spectrum, descending, unclamped
    std::vector<std::string> warnings;
};

struct EigenDecomposition {
    std::vector<double> values;                 // descending
    std::vector<std::vector<double>> vectors;   // vectors[k] pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix.
EigenDecomposition jacobi_eigen(const SquareMatrix& symmetric);

/// Counts, per class pair, the languages with one term covering both classes.
ColexMatrix build_matrix(std::span<const ColexRecord> records);

SquareMatrix to_distance(const ColexMatrix& matrix,
                         DistanceTransform transform = DistanceTransform::OneMinusShare);

/// Classical (Torgerson) scaling: double-centre -D.^2/2, keep the top `dims`
/// eigenpairs, scale by sqrt(max(lambda, 0)).
Embedding mds_project(const SquareMatrix& distances, std::size_t dims = 2);

/// Share of languages owning two distinct terms that each cover at least
/// `min_each` classes and share at least `min_shared` of them.
double overlap_breadth(std::span<const ColexRecord> records, std::size_t min_each = 6,
                       std::size_t min_shared = 5);

double euclidean(std::span<const double> a, std::span<const double> b);

// Files.

/// Lines `language,term,CLASS|CLASS|...`; '#' comments and blank lines skipped.
std::vector<ColexRecord> load_colex_records(const std::filesystem::path& path);

struct LabeledMatrix {
    std::vector<UsageClass> classes;
    SquareMatrix values;
};

/// Header row of class names, then one comma-separated numeric row per class.
/// A leading row label matching the header is tolerated.
LabeledMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const LabeledMatrix& matrix, const std::filesystem::path& path);

LabeledMatrix counts_as_matrix(const ColexMatrix& m);

/// Reads a count grid back as a ColexMatrix; entries must be integers in [0, L].
ColexMatrix colex_from_counts(const LabeledMatrix& m, long total_languages);

/// mds_project on a labeled distance matrix; the embedding carries the labels.
Embedding mds_project(const LabeledMatrix& distances, std::size_t dims = 2);

/// `class,x,y` rows followed by a `# eigenvalues:` comment line.
void save_embedding(const Embedding& e, const std::filesystem::path& path);

} // namespace ipkit
