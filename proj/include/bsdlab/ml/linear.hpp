#pragma once
// OLS with t/F inference through the regularized incomplete beta function.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::ml {

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OlsCoef {
    std::string name;
    double value = 0.0;
    double std_err = 0.0;
    double t = 0.0;
    double p = 1.0;
};

struct OlsModel {
    std::vector<OlsCoef> coefs; // intercept first
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = 0.0;
    double f_p = 1.0;
    double sigma2 = 0.0; // residual variance estimate
    std::size_t n = 0, m = 0;
    bool residual_zero = false;

    double predict(std::span<const double> row) const;
};

// X row-major n x m; an intercept column is added internally
OlsModel ols_fit(std::span<const double> X, std::size_t n, std::size_t m,
                 std::span<const double> y, const std::vector<std::string>& names = {});

// special-function layer, exposed for independent testing
double reg_inc_beta(double a, double b, double x);
double student_t_sf2(double t, double df); // two-sided p-value
double f_sf(double f, double d1, double d2);

} // namespace bsdlab::ml
