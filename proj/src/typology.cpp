#include "ipkit/typology.hpp"

#include "ipkit/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace ipkit {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const SquareMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius(const SquareMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

std::vector<UsageClass> parse_class_list(std::string_view field, std::size_t line_no) {
    std::vector<UsageClass> out;
    for (const auto& name : detail::split(field, '|')) {
        if (name.empty()) continue;
        auto c = parse_usage_class(name);
        if (!c) throw ParseError("unknown usage class '" + name + "'", line_no);
        out.push_back(*c);
    }
    return out;
}

} // namespace

double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

EigenDecomposition jacobi_eigen(const SquareMatrix& symmetric) {
    const std::size_t n = symmetric.size();
    SquareMatrix a = symmetric;
    SquareMatrix v(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const double tol = 1e-12 * std::max(1.0, frobenius(a));
    int sweeps = 0;
    while (off_diagonal_norm(a) >= tol) {
        if (sweeps == kMaxSweeps) throw NumericError("jacobi_eigen: no convergence");
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    for (auto k : order) {
        out.values.push_back(a(k, k));
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

ColexMatrix build_matrix(std::span<const ColexRecord> records) {
    if (records.empty()) throw ValidationError("build_matrix: no colexification records");

    // Rows naming the same term of the same language describe one term.
    std::set<UsageClass> present;
    std::map<std::string, std::map<std::string, std::set<UsageClass>>> by_language;
    for (const auto& r : records) {
        if (r.covers.empty())
            throw ValidationError("build_matrix: term '" + r.term + "' of '" + r.language +
                                  "' covers no class");
        present.insert(r.covers.begin(), r.covers.end());
        by_language[r.language][r.term].insert(r.covers.begin(), r.covers.end());
    }
    if (present.size() < 2) throw ValidationError("build_matrix: records cover fewer than 2 classes");

    ColexMatrix m;
    m.classes.assign(present.begin(), present.end());
    const std::size_t n = m.classes.size();
    m.counts.assign(n, std::vector<long>(n, 0));
    m.total_languages = static_cast<long>(by_language.size());

    for (const auto& [lang, terms] : by_language) {
        std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
        for (const auto& [term, covers] : terms)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (covers.contains(m.classes[i]) && covers.contains(m.classes[j]))
                        linked[i][j] = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (linked[i][j]) ++m.counts[i][j];
    }
    return m;
}

SquareMatrix to_distance(const ColexMatrix& matrix, DistanceTransform transform) {
    if (matrix.total_languages <= 0) throw ValidationError("to_distance: total_languages must be positive");
    const std::size_t n = matrix.classes.size();
    const double total = static_cast<double>(matrix.total_languages);
    SquareMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& c = matrix.counts;
            if (transform == DistanceTransform::OneMinusShare) {
                d(i, j) = 1.0 - static_cast<double>(c[i][j]) / total;
            } else {
                const double sq = static_cast<double>(c[i][i] + c[j][j] - 2 * c[i][j]);
                d(i, j) = std::sqrt(std::max(0.0, sq));
            }
        }
    }
    return d;
}

Embedding mds_project(const SquareMatrix& distances, std::size_t dims) {
    const std::size_t n = distances.size();
    if (n == 0) throw ValidationError("mds_project: empty distance matrix");
    if (dims == 0 || dims > n)
        throw ValidationError("mds_project: dims must be in [1, " + std::to_string(n) + "]");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(distances(i, j)))
                throw ValidationError("mds_project: non-finite distance");
            scale = std::max(scale, std::abs(distances(i, j)));
        }
    const double sym_tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < n; ++i) {
        if (distances(i, i) < 0.0) throw ValidationError("mds_project: negative diagonal entry");
        if (distances(i, i) != 0.0) throw ValidationError("mds_project: diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            if (distances(i, j) < 0.0) throw ValidationError("mds_project: negative distance");
            if (std::abs(distances(i, j) - distances(j, i)) > sym_tol)
                throw ValidationError("mds_project: distance matrix is not symmetric");
        }
    }

    SquareMatrix sq(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sq(i, j) = distances(i, j) * distances(i, j);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);

    SquareMatrix b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);

    auto eig = jacobi_eigen(b);

    Embedding e;
    e.eigenvalues = eig.values;
    const double top = std::max(1.0, std::abs(eig.values.front()));
    const double lowest = eig.values.back();
    if (lowest < -1e-9 * top)
        e.warnings.push_back("distance matrix is not Euclidean: eigenvalue " +
                             detail::format_double(lowest) + " clamped to zero");

    e.coords.assign(n, std::vector<double>(dims, 0.0));
    for (std::size_t k = 0; k < dims; ++k) {
        const double root = std::sqrt(std::max(0.0, eig.values[k]));
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e.coords[i][k] = eig.vectors[k][i] * root;
            mean += e.coords[i][k];
        }
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) e.coords[i][k] -= mean;
    }
    return e;
}

Embedding mds_project(const LabeledMatrix& distances, std::size_t dims) {
    auto e = mds_project(distances.values, dims);
    e.classes = distances.classes;
    return e;
}

double overlap_breadth(std::span<const ColexRecord> records, std::size_t min_each,
                       std::size_t min_shared) {
    std::map<std::string, std::map<std::string, std::set<UsageClass>>> langs;
    for (const auto& r : records) langs[r.language][r.term].insert(r.covers.begin(), r.covers.end());
    if (langs.empty()) return 0.0;

    std::size_t qualifying = 0;
    for (const auto& [lang, terms] : langs) {
        bool found = false;
        for (auto a = terms.begin(); a != terms.end() && !found; ++a) {
            if (a->second.size() < min_each) continue;
            for (auto b = std::next(a); b != terms.end() && !found; ++b) {
                if (b->second.size() < min_each) continue;
                std::size_t shared = 0;
                for (auto c : a->second) shared += b->second.contains(c) ? 1 : 0;
                found = shared >= min_shared;
            }
        }
        if (found) ++qualifying;
    }
    return static_cast<double>(qualifying) / static_cast<double>(langs.size());
}

std::vector<ColexRecord> load_colex_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open colexification records '" + path.string() + "'");
    std::vector<ColexRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split(t, ',');
        if (fields.size() != 3) throw ParseError("expected language,term,CLASS|CLASS...", line_no);
        if (fields[0].empty() || fields[1].empty())
            throw ParseError("language and term must be non-empty", line_no);
        ColexRecord r{fields[0], fields[1], {}};
        for (auto c : parse_class_list(fields[2], line_no)) r.covers.insert(c);
        if (r.covers.empty()) throw ParseError("term covers no usage class", line_no);
        out.push_back(std::move(r));
    }
    return out;
}

LabeledMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_nos;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        rows.push_back(detail::split(t, ','));
        line_nos.push_back(line_no);
    }
    if (rows.empty()) throw ParseError("matrix file is empty");

    auto header = rows.front();
    bool row_labels = false;
    if (!header.empty() && !parse_usage_class(header.front())) {
        row_labels = true;
        header.erase(header.begin());
    }
    LabeledMatrix m;
    for (const auto& name : header) {
        auto c = parse_usage_class(name);
        if (!c) throw ParseError("unknown class '" + name + "' in header", line_nos.front());
        m.classes.push_back(*c);
    }
    const std::size_t n = m.classes.size();
    if (rows.size() - 1 != n)
        throw ParseError("expected " + std::to_string(n) + " rows, found " +
                         std::to_string(rows.size() - 1));
    m.values = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto cells = rows[i + 1];
        const auto ln = line_nos[i + 1];
        if (row_labels) {
            if (cells.empty() || parse_usage_class(cells.front()) != m.classes[i])
                throw ParseError("row label does not match header", ln);
            cells.erase(cells.begin());
        }
        if (cells.size() != n)
            throw ParseError("expected " + std::to_string(n) + " values", ln);
        for (std::size_t j = 0; j < n; ++j) m.values(i, j) = detail::parse_double(cells[j], ln, "matrix cell");
    }
    return m;
}

void save_matrix(const LabeledMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::size_t n = matrix.classes.size();
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << to_string(matrix.classes[j]);
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            out << (j ? "," : "") << detail::format_double(matrix.values(i, j));
        out << '\n';
    }
}

LabeledMatrix counts_as_matrix(const ColexMatrix& m) {
    LabeledMatrix out{m.classes, SquareMatrix(m.classes.size())};
    for (std::size_t i = 0; i < m.classes.size(); ++i)
        for (std::size_t j = 0; j < m.classes.size(); ++j)
            out.values(i, j) = static_cast<double>(m.counts[i][j]);
    return out;
}

ColexMatrix colex_from_counts(const LabeledMatrix& m, long total_languages) {
    if (total_languages <= 0) throw ValidationError("total languages must be positive");
    ColexMatrix out;
    out.classes = m.classes;
    out.total_languages = total_languages;
    const std::size_t n = m.classes.size();
    out.counts.assign(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m.values(i, j);
            if (v < 0 || v != std::floor(v) || v > static_cast<double>(total_languages))
                throw ValidationError("count matrix entries must be integers in [0, L]");
            if (m.values(j, i) != v) throw ValidationError("count matrix is not symmetric");
            out.counts[i][j] = static_cast<long>(v);
        }
    return out;
}

void save_embedding(const Embedding& e, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "class";
    const std::size_t dims = e.coords.empty() ? 0 : e.coords.front().size();
    static constexpr std::string_view axes[] = {"x", "y", "z"};
    for (std::size_t k = 0; k < dims; ++k)
        out << ',' << (k < 3 ? std::string(axes[k]) : "d" + std::to_string(k + 1));
    out << '\n';
    for (std::size_t i = 0; i < e.classes.size(); ++i) {
        out << to_string(e.classes[i]);
        for (double v : e.coords[i]) out << ',' << detail::format_double(v);
        out << '\n';
    }
    out << "# eigenvalues:";
    for (double v : e.eigenvalues) out << ' ' << detail::format_double(v);
    out << '\n';
}

} // namespace ipkit
