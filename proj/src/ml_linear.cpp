#include "bsdlab/ml/linear.hpp"

#include <cmath>
#include <limits>

namespace bsdlab::ml {

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// continued fraction for I_x(a,b), modified Lentz
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15, kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// symmetric positive-definite solve; returns false on a non-positive pivot
bool cholesky(std::vector<double>& A, std::size_t p, std::size_t& bad_col) {
    for (std::size_t j = 0; j < p; ++j) {
        double d = A[j * p + j];
        for (std::size_t k = 0; k < j; ++k) d -= A[j * p + k] * A[j * p + k];
        if (!(d > 1e-12 * std::max(1.0, std::fabs(A[j * p + j])))) {
            bad_col = j;
            return false;
        }
        double lj = std::sqrt(d);
        A[j * p + j] = lj;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = A[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * p + k] * A[j * p + k];
            A[i * p + j] = s / lj;
        }
    }
    return true;
}

// solve L L^T x = b in place
void chol_solve(const std::vector<double>& L, std::size_t p, std::vector<double>& b) {
    for (std::size_t i = 0; i < p; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= L[i * p + k] * b[k];
        b[i] = s / L[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= L[k * p + ii] * b[k];
        b[ii] = s / L[ii * p + ii];
    }
}

} // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf2(double t, double df) {
    if (df <= 0) return std::numeric_limits<double>::quiet_NaN();
    double x = df / (df + t * t);
    return reg_inc_beta(df / 2.0, 0.5, x);
}

double f_sf(double f, double d1, double d2) {
    if (f <= 0) return 1.0;
    double x = d2 / (d2 + d1 * f);
    return reg_inc_beta(d2 / 2.0, d1 / 2.0, x);
}

double OlsModel::predict(std::span<const double> row) const {
    double v = coefs[0].value;
    for (std::size_t j = 0; j < m; ++j) v += coefs[j + 1].value * row[j];
    return v;
}

OlsModel ols_fit(std::span<const double> X, std::size_t n, std::size_t m,
                 std::span<const double> y, const std::vector<std::string>& names) {
    const std::size_t p = m + 1;
    if (n <= p) throw RankDeficiencyError("ols_fit: need n > m+1");

    // normal equations on [1 | X]
    std::vector<double> XtX(p * p, 0.0), Xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = X.data() + i * m;
        XtX[0] += 1.0;
        Xty[0] += y[i];
        for (std::size_t a = 0; a < m; ++a) {
            XtX[(a + 1) * p] += row[a];
            Xty[a + 1] += row[a] * y[i];
            for (std::size_t b = 0; b <= a; ++b) XtX[(a + 1) * p + (b + 1)] += row[a] * row[b];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) XtX[i * p + j] = XtX[j * p + i];

    std::vector<double> L = XtX;
    std::size_t bad = 0;
    if (!cholesky(L, p, bad)) {
        std::string col = bad == 0 ? "(intercept)"
                                   : (bad - 1 < names.size() ? names[bad - 1]
                                                             : "x" + std::to_string(bad - 1));
        throw RankDeficiencyError("ols_fit: design matrix is rank-deficient at column " + col);
    }
    std::vector<double> beta(Xty);
    chol_solve(L, p, beta);

    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) y_mean += y[i] / static_cast<double>(n);
    double rss = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = beta[0];
        for (std::size_t a = 0; a < m; ++a) pred += beta[a + 1] * X[i * m + a];
        double e = y[i] - pred;
        rss += e * e;
        double d = y[i] - y_mean;
        tss += d * d;
    }

    OlsModel model;
    model.n = n;
    model.m = m;
    double df_res = static_cast<double>(n - p);
    model.sigma2 = rss / df_res;
    model.residual_zero = rss <= 1e-12 * std::max(tss, 1.0);
    model.r2 = tss > 0 ? 1.0 - rss / tss : 0.0;
    model.adj_r2 = 1.0 - (1.0 - model.r2) * static_cast<double>(n - 1) / df_res;
    if (m > 0 && tss > 0) {
        double msr = (tss - rss) / static_cast<double>(m);
        model.f_stat = model.sigma2 > 0 ? msr / model.sigma2
                                        : std::numeric_limits<double>::infinity();
        model.f_p = std::isfinite(model.f_stat)
                        ? f_sf(model.f_stat, static_cast<double>(m), df_res)
                        : 0.0;
    }

    // diag of (X'X)^-1 via p unit solves
    model.coefs.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> e(p, 0.0);
        e[j] = 1.0;
        chol_solve(L, p, e);
        OlsCoef& c = model.coefs[j];
        c.name = j == 0 ? "(intercept)"
                        : (j - 1 < names.size() ? names[j - 1] : "x" + std::to_string(j - 1));
        c.value = beta[j];
        c.std_err = std::sqrt(std::max(0.0, model.sigma2 * e[j]));
        if (c.std_err > 0) {
            c.t = c.value / c.std_err;
            c.p = student_t_sf2(c.t, df_res);
        } else {
            c.t = 0.0;
            c.p = c.value == 0.0 ? 1.0 : 0.0;
        }
    }
    return model;
}

} // namespace bsdlab::ml
