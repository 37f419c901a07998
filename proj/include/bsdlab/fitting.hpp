#pragma once
// Maximum-likelihood fitting with multi-start Nelder-Mead and AIC model
// selection over the family registry.

#include "bsdlab/distributions.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::stats {

struct FitResult {
    Family family;
    std::vector<double> params;
    double loglik = 0.0;
    double aic = 0.0; // 2k - 2*loglik
    std::size_t n = 0;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    int restarts = 50;
    double tol = 1e-8;       // log-likelihood tolerance
    int max_iters = 4000;    // per restart
    std::uint64_t seed = 0x5eedf17ULL;
};

// MLE for one family; throws FitError on degenerate input or if no restart
// produced a finite likelihood.
FitResult fit_family(Family f, std::span<const double> samples, const FitOptions& opt = {});

// scaled Beta over (alpha, beta, s) with s >= max(sample)*(1+1e-9)
FitResult fit_beta_scaled(std::span<const double> samples, const FitOptions& opt = {});

struct SelectionResult {
    std::vector<FitResult> ranked; // ascending AIC
    std::vector<std::pair<Family, std::string>> failures;
};
SelectionResult fit_select_aic(std::span<const double> samples, const std::vector<Family>& families,
                               const FitOptions& opt = {});

// Derivative-free simplex minimizer; returns argmin.
std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, double step, double tol, int max_iters);

} // namespace bsdlab::stats
