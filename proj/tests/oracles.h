#pragma once
// Independent reference computations used by the unit and acceptance tests.
// Deliberately plain loops: no Eigen decompositions, no library kernels.
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues in descending order and the matching eigenvectors as rows.
inline void jacobi_eigen(Mat a, std::vector<double>& values, Mat& vectors) {
    const std::size_t n = a.size();
    Mat v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
    values.clear();
    vectors.assign(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        values.push_back(a[order[r]][order[r]]);
        for (std::size_t k = 0; k < n; ++k) vectors[r][k] = v[k][order[r]];
    }
}

/// PCA by eigendecomposition of the sample covariance. Scores are the
/// centred rows projected on the top-k eigenvectors.
struct Pca {
    std::vector<double> mean;
    Mat components;  // k x d
    std::vector<double> variances;
    Mat scores;      // n x k
};

inline Pca covariance_pca(const Mat& x, std::size_t k) {
    const std::size_t n = x.size(), d = x[0].size();
    Pca out;
    out.mean.assign(d, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) out.mean[j] += row[j] / static_cast<double>(n);
    Mat cov(d, std::vector<double>(d, 0.0));
    for (const auto& row : x)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov[i][j] += (row[i] - out.mean[i]) * (row[j] - out.mean[j]) / static_cast<double>(n - 1);
    std::vector<double> values;
    Mat vectors;
    jacobi_eigen(cov, values, vectors);
    out.components.assign(vectors.begin(), vectors.begin() + static_cast<long>(k));
    out.variances.assign(values.begin(), values.begin() + static_cast<long>(k));
    out.scores.assign(n, std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) out.scores[r][c] += (x[r][j] - out.mean[j]) * out.components[c][j];
    return out;
}

/// Softmax cross-entropy, mean over rows, from first principles.
inline double softmax_xent(const Mat& w, const std::vector<double>& b, const Mat& x, const std::vector<int>& y) {
    double total = 0;
    for (std::size_t r = 0; r < x.size(); ++r) {
        std::vector<double> z(w.size());
        for (std::size_t c = 0; c < w.size(); ++c) {
            z[c] = b[c];
            for (std::size_t j = 0; j < x[r].size(); ++j) z[c] += w[c][j] * x[r][j];
        }
        const double m = *std::max_element(z.begin(), z.end());
        double s = 0;
        for (double v : z) s += std::exp(v - m);
        total += -(z[static_cast<std::size_t>(y[r])] - m - std::log(s));
    }
    return total / static_cast<double>(x.size());
}

}  // namespace oracle
