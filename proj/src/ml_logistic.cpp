#include "bsdlab/ml/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsdlab::ml {

namespace {

void softmax_row(std::span<const double> logits, std::vector<double>& out) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    out.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - mx);
        total += out[k];
    }
    for (auto& v : out) v /= total;
}

// in-place SPD solve (Cholesky); the ridge keeps the Hessian positive definite
bool spd_solve(std::vector<double> A, std::size_t p, std::vector<double>& b) {
    for (std::size_t j = 0; j < p; ++j) {
        double d = A[j * p + j];
        for (std::size_t k = 0; k < j; ++k) d -= A[j * p + k] * A[j * p + k];
        if (!(d > 0)) return false;
        A[j * p + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = A[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * p + k] * A[j * p + k];
            A[i * p + j] = s / A[j * p + j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= A[i * p + k] * b[k];
        b[i] = s / A[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= A[k * p + ii] * b[k];
        b[ii] = s / A[ii * p + ii];
    }
    return true;
}

} // namespace

std::vector<double> LogisticModel::predict_proba(std::span<const double> row) const {
    const std::size_t K = classes.size(), p = m + 1;
    std::vector<double> logits(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double v = W[k * p];
        for (std::size_t j = 0; j < m; ++j) v += W[k * p + j + 1] * row[j];
        logits[k] = v;
    }
    std::vector<double> probs;
    softmax_row(logits, probs);
    return probs;
}

int LogisticModel::predict(std::span<const double> row) const {
    auto probs = predict_proba(row);
    std::size_t best = 0;
    for (std::size_t k = 1; k < probs.size(); ++k)
        if (probs[k] > probs[best]) best = k;
    return classes[best];
}

LogisticModel logistic_fit(std::span<const double> X, std::size_t n, std::size_t m,
                           std::span<const int> y, const LogisticOptions& opt) {
    if (y.size() != n || n == 0) throw std::invalid_argument("logistic_fit: size mismatch");
    LogisticModel model;
    model.classes.assign(y.begin(), y.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                        model.classes.end());
    if (model.classes.size() < 2)
        throw std::invalid_argument("logistic_fit: need at least 2 classes");
    model.m = m;

    const std::size_t K = model.classes.size(), p = m + 1, P = K * p;
    std::map<int, std::size_t> pos;
    for (std::size_t k = 0; k < K; ++k) pos[model.classes[k]] = k;

    std::vector<double> theta(P, 0.0);
    std::vector<double> probs, logits(K), xt(p);

    auto neg_loglik = [&](const std::vector<double>& th) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < K; ++k) {
                double v = th[k * p];
                for (std::size_t j = 0; j < m; ++j) v += th[k * p + j + 1] * X[i * m + j];
                logits[k] = v;
            }
            double mx = *std::max_element(logits.begin(), logits.end());
            double lse = 0.0;
            for (double l : logits) lse += std::exp(l - mx);
            loss += mx + std::log(lse) - logits[pos[y[i]]];
        }
        for (double t : th) loss += 0.5 * opt.ridge * t * t;
        return loss;
    };

    double loss = neg_loglik(theta);
    for (int it = 0; it < opt.max_iters; ++it) {
        std::vector<double> grad(P, 0.0), H(P * P, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            xt[0] = 1.0;
            for (std::size_t j = 0; j < m; ++j) xt[j + 1] = X[i * m + j];
            for (std::size_t k = 0; k < K; ++k) {
                double v = 0.0;
                for (std::size_t j = 0; j < p; ++j) v += theta[k * p + j] * xt[j];
                logits[k] = v;
            }
            softmax_row(logits, probs);
            std::size_t yi = pos[y[i]];
            for (std::size_t k = 0; k < K; ++k) {
                double gk = probs[k] - (k == yi ? 1.0 : 0.0);
                for (std::size_t j = 0; j < p; ++j) grad[k * p + j] += gk * xt[j];
                for (std::size_t l = k; l < K; ++l) {
                    double w = probs[k] * ((k == l ? 1.0 : 0.0) - probs[l]);
                    if (w == 0.0) continue;
                    for (std::size_t a = 0; a < p; ++a)
                        for (std::size_t b = 0; b < p; ++b)
                            H[(k * p + a) * P + (l * p + b)] += w * xt[a] * xt[b];
                }
            }
        }
        for (std::size_t a = 0; a < P; ++a) {
            grad[a] += opt.ridge * theta[a];
            H[a * P + a] += opt.ridge;
            for (std::size_t b = a + 1; b < P; ++b) H[b * P + a] = H[a * P + b];
        }

        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        model.grad_norm = gnorm;
        model.iterations = it;
        if (gnorm < opt.tol) {
            model.W = theta;
            return model;
        }

        std::vector<double> step = grad;
        if (!spd_solve(H, P, step))
            throw ConvergenceError("logistic_fit: Hessian solve failed", gnorm);

        // backtracking on the Newton direction
        double t = 1.0;
        std::vector<double> trial(P);
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            for (std::size_t a = 0; a < P; ++a) trial[a] = theta[a] - t * step[a];
            double trial_loss = neg_loglik(trial);
            if (trial_loss <= loss) {
                theta = trial;
                loss = trial_loss;
                break;
            }
        }
    }
    throw ConvergenceError("logistic_fit: no convergence after " +
                               std::to_string(opt.max_iters) + " iterations",
                           model.grad_norm);
}

} // namespace bsdlab::ml
