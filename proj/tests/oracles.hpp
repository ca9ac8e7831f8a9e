#pragma once

// Reference computations used only by tests. They share no code with the
// library's implementation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// Token frequencies, sorted by (count desc, token asc).
inline std::vector<std::pair<std::string, long>> ranked_counts(const std::vector<std::vector<std::string>>& lines) {
    std::map<std::string, long> counts;
    for (const auto& line : lines) {
        for (const auto& t : line) {
            counts[t] += 1;
        }
    }
    std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranked;
}

/// Dense TF-IDF matrix [doc][word] straight from the formula:
/// count * ln(N / df), each row divided by its sum.
inline std::vector<std::vector<double>> tfidf_matrix(const std::vector<std::vector<int>>& docs, int vocab_size) {
    const double n = static_cast<double>(docs.size());
    std::vector<std::vector<double>> tf(docs.size(), std::vector<double>(vocab_size, 0.0));
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (int w : docs[d]) {
            tf[d][w] += 1.0;
        }
    }
    std::vector<double> df(vocab_size, 0.0);
    for (int w = 0; w < vocab_size; ++w) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            if (tf[d][w] > 0) {
                df[w] += 1.0;
            }
        }
    }
    for (auto& row : tf) {
        double sum = 0.0;
        for (int w = 0; w < vocab_size; ++w) {
            row[w] = row[w] > 0 ? row[w] * std::log(n / df[w]) : 0.0;
            sum += row[w];
        }
        if (sum > 0) {
            for (auto& v : row) {
                v /= sum;
            }
        }
    }
    return tf;
}

/// Leaf depths of the complete binary tree with v leaves, built level by
/// level: take the deepest full level with m = 2^d <= v nodes and split
/// v - m of them, each split adding one leaf.
inline std::vector<int> complete_tree_leaf_depths(int v) {
    int depth = 0;
    int level_nodes = 1;
    while (level_nodes * 2 <= v) {
        level_nodes *= 2;
        ++depth;
    }
    const int splits = v - level_nodes;
    std::vector<int> depths(static_cast<std::size_t>(level_nodes - splits), depth);
    depths.insert(depths.end(), static_cast<std::size_t>(2 * splits), depth + 1);
    return depths;
}

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

/// Central finite difference of f with respect to x, which f reads by reference.
inline double central_difference(const std::function<double()>& f, double& x, double step) {
    const double saved = x;
    x = saved + step;
    const double plus = f();
    x = saved - step;
    const double minus = f();
    x = saved;
    return (plus - minus) / (2.0 * step);
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        eig[i] = a[i][i];
    }
    std::sort(eig.rbegin(), eig.rend());
    return eig;
}

/// Multiclass averaged perceptron; returns training-set-free predictions for `test`.
inline std::vector<int> perceptron_predict(const std::vector<std::vector<double>>& train_x,
                                           const std::vector<int>& train_y,
                                           const std::vector<std::vector<double>>& test_x, int classes,
                                           int epochs = 50) {
    const std::size_t dim = train_x.front().size() + 1;
    std::vector<std::vector<double>> w(classes, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> avg = w;
    const auto score = [&](const std::vector<std::vector<double>>& m, int k, const std::vector<double>& x) {
        double s = m[k][dim - 1];
        for (std::size_t j = 0; j + 1 < dim; ++j) {
            s += m[k][j] * x[j];
        }
        return s;
    };
    const auto argmax = [&](const std::vector<std::vector<double>>& m, const std::vector<double>& x) {
        int best = 0;
        for (int k = 1; k < classes; ++k) {
            if (score(m, k, x) > score(m, best, x)) {
                best = k;
            }
        }
        return best;
    };
    for (int e = 0; e < epochs; ++e) {
        for (std::size_t i = 0; i < train_x.size(); ++i) {
            const int pred = argmax(w, train_x[i]);
            if (pred != train_y[i]) {
                for (std::size_t j = 0; j + 1 < dim; ++j) {
                    w[train_y[i]][j] += train_x[i][j];
                    w[pred][j] -= train_x[i][j];
                }
                w[train_y[i]][dim - 1] += 1.0;
                w[pred][dim - 1] -= 1.0;
            }
            for (int k = 0; k < classes; ++k) {
                for (std::size_t j = 0; j < dim; ++j) {
                    avg[k][j] += w[k][j];
                }
            }
        }
    }
    std::vector<int> out;
    for (const auto& x : test_x) {
        out.push_back(argmax(avg, x));
    }
    return out;
}

}  // namespace oracle

namespace oracle {

/// Relative gradient error with an absolute floor of 1e-5 on the
/// denominator, so coordinates that are (numerically) zero on both sides
/// compare by absolute difference.
inline double gradient_relative_error(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
    return std::abs(analytic - numeric) / scale;
}

}  // namespace oracle
