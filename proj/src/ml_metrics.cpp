#include "bsdlab/ml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsdlab::ml {

namespace {
void check_sizes(std::size_t a, std::size_t b) {
    if (a != b || a == 0) throw MetricError("metric inputs must be equal-length and non-empty");
}

std::vector<int> sorted_labels(std::span<const int> y, std::span<const int> yhat) {
    std::vector<int> labels(y.begin(), y.end());
    labels.insert(labels.end(), yhat.begin(), yhat.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}
} // namespace

double nmae(std::span<const double> y, std::span<const double> yhat) {
    check_sizes(y.size(), yhat.size());
    auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    if (*mx == *mn) throw MetricError("nmae: test targets have zero range");
    std::vector<double> abs_err(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) abs_err[i] = std::fabs(y[i] - yhat[i]);
    std::sort(abs_err.begin(), abs_err.end());
    std::size_t n = abs_err.size();
    double med = n % 2 ? abs_err[n / 2] : 0.5 * (abs_err[n / 2 - 1] + abs_err[n / 2]);
    return med / (*mx - *mn);
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
    check_sizes(y.size(), yhat.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double e = y[i] - yhat[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(y.size()));
}

double f1(std::span<const int> y, std::span<const int> yhat, F1Average avg) {
    check_sizes(y.size(), yhat.size());
    auto labels = sorted_labels(y, yhat);
    std::map<int, std::size_t> tp, fp, fn;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == yhat[i]) ++tp[y[i]];
        else {
            ++fp[yhat[i]];
            ++fn[y[i]];
        }
    }
    if (avg == F1Average::micro) {
        std::size_t TP = 0, FP = 0, FN = 0;
        for (int c : labels) {
            TP += tp[c];
            FP += fp[c];
            FN += fn[c];
        }
        double denom = 2.0 * TP + FP + FN;
        return denom == 0.0 ? 0.0 : 2.0 * TP / denom;
    }
    double total = 0.0;
    for (int c : labels) {
        double denom = 2.0 * tp[c] + fp[c] + fn[c];
        total += denom == 0.0 ? 0.0 : 2.0 * tp[c] / denom;
    }
    return total / static_cast<double>(labels.size());
}

double mcc(std::span<const int> y, std::span<const int> yhat) {
    check_sizes(y.size(), yhat.size());
    auto labels = sorted_labels(y, yhat);
    const std::size_t k = labels.size();
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < k; ++i) pos[labels[i]] = i;
    std::vector<double> C(k * k, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) C[pos[y[i]] * k + pos[yhat[i]]] += 1.0;

    // R_k statistic: cov(y, yhat) / sqrt(cov(y,y) * cov(yhat,yhat))
    double n = static_cast<double>(y.size());
    double trace = 0.0;
    std::vector<double> truth_tot(k, 0.0), pred_tot(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            truth_tot[i] += C[i * k + j];
            pred_tot[j] += C[i * k + j];
            if (i == j) trace += C[i * k + j];
        }
    double sum_tp = 0.0, sum_tt = 0.0, sum_pp = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sum_tp += truth_tot[i] * pred_tot[i];
        sum_tt += truth_tot[i] * truth_tot[i];
        sum_pp += pred_tot[i] * pred_tot[i];
    }
    double num = trace * n - sum_tp;
    double den = std::sqrt(n * n - sum_tt) * std::sqrt(n * n - sum_pp);
    return den == 0.0 ? 0.0 : num / den;
}

Confusion confusion(std::span<const int> y, std::span<const int> yhat) {
    check_sizes(y.size(), yhat.size());
    Confusion c;
    c.labels = sorted_labels(y, yhat);
    c.k = c.labels.size();
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < c.k; ++i) pos[c.labels[i]] = i;
    c.counts.assign(c.k * c.k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) ++c.counts[pos[y[i]] * c.k + pos[yhat[i]]];
    c.normalized.assign(c.k * c.k, 0.0);
    for (std::size_t col = 0; col < c.k; ++col) {
        std::size_t total = 0;
        for (std::size_t row = 0; row < c.k; ++row) total += c.counts[row * c.k + col];
        if (total == 0) continue;
        for (std::size_t row = 0; row < c.k; ++row)
            c.normalized[row * c.k + col] =
                static_cast<double>(c.counts[row * c.k + col]) / static_cast<double>(total);
    }
    return c;
}

} // namespace bsdlab::ml
