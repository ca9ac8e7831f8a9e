#include "bowae/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bowae/error.hpp"
#include "bowae/rng.hpp"

namespace bowae {

std::vector<DocEmbedding> embed_documents(std::span<const Document> docs, const Matrix& embeddings) {
    std::vector<DocEmbedding> out;
    out.reserve(docs.size());
    for (const Document& doc : docs) {
        DocEmbedding emb;
        emb.vector = Vector::Zero(embeddings.rows());
        emb.label = doc.label;
        emb.language = doc.language;
        bool all_zero = true;
        for (const auto& [id, weight] : doc.weights) {
            if (id < 0 || id >= embeddings.cols()) {
                throw IndexError("document word index " + std::to_string(id) + " outside embedding matrix with " +
                                 std::to_string(embeddings.cols()) + " columns");
            }
            emb.vector += weight * embeddings.col(id);
            all_zero = all_zero && weight == 0.0;
        }
        emb.degenerate = doc.degenerate || all_zero;
        out.push_back(std::move(emb));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear SVM

Vector LinearSVM::scores(const Vector& v) const { return weights * v + biases; }

int LinearSVM::predict(const Vector& v) const {
    const Vector s = scores(v);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < s.size(); ++k) {
        if (s[k] > s[best]) {
            best = k;
        }
    }
    return static_cast<int>(best);
}

LinearSVM fit_svm(std::span<const DocEmbedding> train, double c, std::size_t num_classes,
                  const SvmOptions& options) {
    if (train.empty()) {
        throw Error("empty training set");
    }
    if (!(c > 0.0)) {
        throw Error("SVM C must be positive");
    }
    const auto dim = train.front().vector.size();
    const auto n = train.size();
    const double lambda = 1.0 / (c * static_cast<double>(n));

    // Features with a trailing constant 1 for the bias.
    Matrix features(dim + 1, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        features.col(static_cast<Eigen::Index>(i)) << train[i].vector, 1.0;
    }

    LinearSVM svm;
    svm.c = c;
    svm.weights = RowMatrix::Zero(static_cast<Eigen::Index>(num_classes), dim);
    svm.biases = Vector::Zero(static_cast<Eigen::Index>(num_classes));

    std::vector<std::size_t> order(n);
    const std::size_t average_from = options.epochs / 2;
    for (std::size_t k = 0; k < num_classes; ++k) {
        Vector w = Vector::Zero(dim + 1);
        Vector sum = Vector::Zero(dim + 1);
        std::size_t averaged = 0;
        std::size_t step = 0;
        for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(options.seed + epoch);
            rng.shuffle(std::span<std::size_t>(order));
            for (const std::size_t i : order) {
                ++step;
                const double eta = 1.0 / (lambda * static_cast<double>(step));
                const double target = train[i].label == static_cast<int>(k) ? 1.0 : -1.0;
                const auto x = features.col(static_cast<Eigen::Index>(i));
                const double margin = target * w.dot(x);
                w *= 1.0 - eta * lambda;
                if (margin < 1.0) {
                    w += (eta * target) * x;
                }
                if (epoch >= average_from) {
                    sum += w;
                    ++averaged;
                }
            }
        }
        if (averaged > 0) {
            w = sum / static_cast<double>(averaged);
        }
        svm.weights.row(static_cast<Eigen::Index>(k)) = w.head(dim).transpose();
        svm.biases[static_cast<Eigen::Index>(k)] = w[dim];
    }
    return svm;
}

double error_rate(const LinearSVM& svm, std::span<const DocEmbedding> docs) {
    if (docs.empty()) {
        throw Error("empty evaluation set");
    }
    std::size_t wrong = 0;
    for (const auto& doc : docs) {
        if (svm.predict(doc.vector) != doc.label) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(docs.size());
}

LinearSVM train_svm(std::span<const DocEmbedding> train, std::span<const DocEmbedding> valid,
                    const SvmOptions& options) {
    if (options.c_grid.empty()) {
        throw Error("empty C grid");
    }
    int max_label = 0;
    std::vector<int> labels;
    for (const auto& doc : train) {
        labels.push_back(doc.label);
        max_label = std::max(max_label, doc.label);
    }
    for (const auto& doc : valid) {
        max_label = std::max(max_label, doc.label);
    }
    std::sort(labels.begin(), labels.end());
    if (std::unique(labels.begin(), labels.end()) - labels.begin() < 2) {
        throw Error("training set must contain at least two classes");
    }
    const auto num_classes = static_cast<std::size_t>(max_label) + 1;

    std::vector<double> grid = options.c_grid;
    std::sort(grid.begin(), grid.end());
    LinearSVM best;
    bool have_best = false;
    for (const double c : grid) {
        LinearSVM svm = fit_svm(train, c, num_classes, options);
        svm.validation_error = valid.empty() ? error_rate(svm, train) : error_rate(svm, valid);
        // Strict comparison keeps the smaller C on ties.
        if (!have_best || svm.validation_error < best.validation_error) {
            best = std::move(svm);
            have_best = true;
        }
    }
    return best;
}

ClassificationReport evaluate(const LinearSVM& svm, std::span<const DocEmbedding> test) {
    if (test.empty()) {
        throw Error("empty test set");
    }
    std::size_t classes = svm.num_classes();
    for (const auto& doc : test) {
        classes = std::max(classes, static_cast<std::size_t>(doc.label) + 1);
    }
    ClassificationReport report;
    report.total = test.size();
    report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
    std::size_t wrong = 0;
    for (const auto& doc : test) {
        const int predicted = svm.predict(doc.vector);
        ++report.confusion[static_cast<std::size_t>(doc.label)][static_cast<std::size_t>(predicted)];
        if (predicted != doc.label) {
            ++wrong;
        }
    }
    report.error = static_cast<double>(wrong) / static_cast<double>(test.size());
    report.precision.assign(classes, 0.0);
    report.recall.assign(classes, 0.0);
    for (std::size_t k = 0; k < classes; ++k) {
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t j = 0; j < classes; ++j) {
            predicted += report.confusion[j][k];
            actual += report.confusion[k][j];
        }
        const auto hits = static_cast<double>(report.confusion[k][k]);
        report.precision[k] = predicted == 0 ? 0.0 : hits / static_cast<double>(predicted);
        report.recall[k] = actual == 0 ? 0.0 : hits / static_cast<double>(actual);
    }
    return report;
}

namespace {

std::string class_name(const LabelSet& labels, std::size_t k) {
    return k < labels.size() ? labels.name(static_cast<int>(k)) : std::to_string(k);
}

}  // namespace

void write_report(std::ostream& out, const ClassificationReport& report, const LabelSet& labels) {
    out << std::fixed << std::setprecision(4);
    out << "error rate: " << report.error << " (" << report.total << " documents)\n\n";
    out << "class\tprecision\trecall\n";
    for (std::size_t k = 0; k < report.confusion.size(); ++k) {
        out << class_name(labels, k) << '\t' << report.precision[k] << '\t' << report.recall[k] << '\n';
    }
    out << "\nconfusion (rows: true, columns: predicted)\n";
    for (std::size_t k = 0; k < report.confusion.size(); ++k) {
        out << '\t' << class_name(labels, k);
    }
    out << '\n';
    for (std::size_t k = 0; k < report.confusion.size(); ++k) {
        out << class_name(labels, k);
        for (const std::size_t count : report.confusion[k]) {
            out << '\t' << count;
        }
        out << '\n';
    }
    out << std::defaultfloat;
}

void write_report_kv(std::ostream& out, const ClassificationReport& report, const LabelSet& labels) {
    out << std::setprecision(10);
    out << "error=" << report.error << '\n';
    out << "total=" << report.total << '\n';
    for (std::size_t k = 0; k < report.confusion.size(); ++k) {
        const std::string name = class_name(labels, k);
        out << "precision." << name << '=' << report.precision[k] << '\n';
        out << "recall." << name << '=' << report.recall[k] << '\n';
        for (std::size_t j = 0; j < report.confusion.size(); ++j) {
            out << "confusion." << name << '.' << class_name(labels, j) << '=' << report.confusion[k][j] << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Neighbors and projection

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    const double norms = a.norm() * b.norm();
    return norms > 0.0 ? a.dot(b) / norms : 0.0;
}

std::vector<Neighbor> nearest_neighbors(std::string_view word, Language source, Language target, std::size_t k,
                                        const BilingualModel& model) {
    if (k == 0) {
        throw Error("k must be at least 1");
    }
    const LanguageParams& from = model.side(source);
    const LanguageParams& to = model.side(target);
    const WordId query = from.vocab.at(word);
    const Vector q = from.embeddings.col(query);

    std::vector<Neighbor> all(to.vocab_size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto id = static_cast<WordId>(i);
        all[i] = {id, to.vocab.words()[i], cosine_similarity(q, to.embeddings.col(id))};
    }
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          if (a.similarity != b.similarity) {
                              return a.similarity > b.similarity;
                          }
                          return a.id < b.id;
                      });
    all.resize(keep);
    return all;
}

Matrix principal_projection(const Matrix& points) {
    const auto n = points.rows();
    const auto dim = points.cols();
    Matrix projected = Matrix::Zero(n, 2);
    if (n == 0 || dim == 0) {
        return projected;
    }
    const Matrix centered = points.rowwise() - points.colwise().mean();
    const Matrix covariance = centered.transpose() * centered / static_cast<double>(n);
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
    // Eigenvalues come out ascending.
    const Eigen::Index components = std::min<Eigen::Index>(2, dim);
    for (Eigen::Index j = 0; j < components; ++j) {
        Vector direction = solver.eigenvectors().col(dim - 1 - j);
        Eigen::Index largest = 0;
        direction.cwiseAbs().maxCoeff(&largest);
        if (direction[largest] < 0.0) {
            direction = -direction;
        }
        projected.col(j) = centered * direction;
    }
    return projected;
}

std::vector<ProjectedWord> project_2d(const BilingualModel& model, std::size_t top_n) {
    if (top_n < 2) {
        throw Error("top_n must be at least 2");
    }
    std::vector<ProjectedWord> words;
    std::vector<const double*> columns;
    for (const Language lang : {Language::x, Language::y}) {
        const LanguageParams& side = model.side(lang);
        const std::size_t count = std::min(top_n, side.vocab_size());
        for (std::size_t i = 0; i < count; ++i) {
            words.push_back({side.vocab.words()[i], lang, 0.0, 0.0});
            columns.push_back(side.embeddings.col(static_cast<Eigen::Index>(i)).data());
        }
    }
    const auto dim = static_cast<Eigen::Index>(model.dim);
    Matrix points(static_cast<Eigen::Index>(words.size()), dim);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        points.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(columns[i], dim).transpose();
    }
    const Matrix projected = principal_projection(points);
    for (std::size_t i = 0; i < words.size(); ++i) {
        words[i].x = projected(static_cast<Eigen::Index>(i), 0);
        words[i].y = projected(static_cast<Eigen::Index>(i), 1);
    }
    return words;
}

void write_projection(std::ostream& out, const std::vector<ProjectedWord>& points) {
    out << std::setprecision(17);
    for (const auto& p : points) {
        out << p.token << '\t' << to_string(p.language) << '\t' << p.x << '\t' << p.y << '\n';
    }
}

void write_embeddings(std::ostream& out, const Vocabulary& vocab, const Matrix& embeddings) {
    if (static_cast<std::size_t>(embeddings.cols()) != vocab.size()) {
        throw Error("embedding matrix does not match vocabulary size");
    }
    out << embeddings.cols() << ' ' << embeddings.rows() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index w = 0; w < embeddings.cols(); ++w) {
        out << vocab.words()[static_cast<std::size_t>(w)];
        for (Eigen::Index d = 0; d < embeddings.rows(); ++d) {
            out << ' ' << embeddings(d, w);
        }
        out << '\n';
    }
}

EmbeddingTable read_embeddings(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw Error("embedding file is empty");
    }
    std::istringstream header_stream(header);
    Eigen::Index vocab_size = 0;
    Eigen::Index dim = 0;
    if (!(header_stream >> vocab_size >> dim) || vocab_size < 0 || dim < 0) {
        throw Error("bad embedding header: " + header);
    }
    EmbeddingTable table;
    table.tokens.reserve(static_cast<std::size_t>(vocab_size));
    table.embeddings.resize(dim, vocab_size);
    for (Eigen::Index w = 0; w < vocab_size; ++w) {
        std::string token;
        if (!(in >> token)) {
            throw Error("embedding file ends after " + std::to_string(w) + " of " + std::to_string(vocab_size) +
                        " words");
        }
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (!(in >> table.embeddings(d, w))) {
                throw Error("bad embedding value for word " + token);
            }
        }
        table.tokens.push_back(std::move(token));
    }
    return table;
}

}  // namespace bowae
