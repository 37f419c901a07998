#pragma once
// Continuous distribution families for MLE fitting. The registry is the
// configurable subset used by AIC model selection.

#include "bsdlab/rng.hpp"

#include <span>
#include <string>
#include <vector>

namespace bsdlab::stats {

enum class Family {
    normal,
    exponential,
    lognormal,
    gamma,
    weibull,
    beta_scaled,     // (alpha, beta, s) with support [0, s]
    exp_weibull,     // exponentiated Weibull (a, c, scale)
    johnson_sb,      // (gamma, delta, lambda) with xi fixed at 0
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);
std::vector<Family> default_registry();

// number of free parameters (the k in AIC)
std::size_t family_param_count(Family f);

// log density; -inf outside the support or for invalid parameters
double family_logpdf(Family f, std::span<const double> params, double x);

double family_loglik(Family f, std::span<const double> params, std::span<const double> samples);

// random variate for test/synthetic-data use
double family_sample(Family f, std::span<const double> params, Rng& rng);

} // namespace bsdlab::stats
